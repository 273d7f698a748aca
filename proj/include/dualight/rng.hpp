#pragma once

#include <array>
#include <cstdint>

namespace dualight {

/// Deterministic PRNG (xoshiro256**). Implemented here instead of the
/// <random> engines/distributions so that streams are bit-reproducible
/// across standard libraries and serializable into checkpoints.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  /// Uniform double in [0, 1), 53 bits of entropy.
  double uniform();

  /// Uniform integer in [0, n). n must be > 0.
  int uniform_int(int n);

  /// Uniform double in [lo, hi).
  double uniform_range(double lo, double hi);

  /// Derive an independent child stream; deterministic in (state, tag).
  Rng fork(uint64_t tag) const;

  std::array<uint64_t, 4> state() const { return state_; }
  void set_state(const std::array<uint64_t, 4>& s) { state_ = s; }

  /// SplitMix64 step, also used for seed derivation.
  static uint64_t splitmix64(uint64_t& x);

 private:
  std::array<uint64_t, 4> state_{};
};

}  // namespace dualight
