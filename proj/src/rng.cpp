#include "dualight/rng.hpp"

namespace dualight {

namespace {
inline uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

uint64_t Rng::splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(uint64_t seed) {
  uint64_t x = seed;
  for (auto& w : state_) w = splitmix64(x);
}

uint64_t Rng::next_u64() {
  const uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int n) {
  // Lemire's multiply-shift; slight bias is irrelevant at these ranges
  // and the mapping is deterministic, which is what matters here.
  return static_cast<int>((static_cast<__uint128_t>(next_u64()) *
                           static_cast<__uint128_t>(n)) >>
                          64);
}

double Rng::uniform_range(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

Rng Rng::fork(uint64_t tag) const {
  uint64_t x = state_[0] ^ rotl(state_[2], 13) ^ (tag * 0x9e3779b97f4a7c15ULL);
  Rng child;
  for (auto& w : child.state_) w = splitmix64(x);
  return child;
}

}  // namespace dualight
