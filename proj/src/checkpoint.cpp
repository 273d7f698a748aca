#include "dualight/checkpoint.hpp"

#include <cstring>
#include <fstream>

#include "dualight/errors.hpp"

namespace dualight {

namespace {

constexpr char kMagic[4] = {'D', 'L', 'Q', 'K'};
constexpr uint32_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot open checkpoint file '" + path + "' for writing");
  }
  void bytes(const void* p, size_t n) { out_.write(static_cast<const char*>(p), n); }
  void u32(uint32_t v) { bytes(&v, sizeof v); }
  void u64(uint64_t v) { bytes(&v, sizeof v); }
  void i32(int32_t v) { bytes(&v, sizeof v); }
  void vec(const Vec& v) {
    u64(v.size());
    bytes(v.data(), v.size() * sizeof(double));
  }
  void mat(const Mat& m) {
    i32(m.rows);
    i32(m.cols);
    bytes(m.a.data(), m.a.size() * sizeof(double));
  }
  bool good() const { return static_cast<bool>(out_); }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw Error("cannot open checkpoint file '" + path + "'");
  }
  void bytes(void* p, size_t n) {
    in_.read(static_cast<char*>(p), n);
    if (!in_) throw Error("truncated checkpoint file");
  }
  uint32_t u32() {
    uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  uint64_t u64() {
    uint64_t v;
    bytes(&v, sizeof v);
    return v;
  }
  int32_t i32() {
    int32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  Vec vec() {
    Vec v(u64());
    bytes(v.data(), v.size() * sizeof(double));
    return v;
  }
  Mat mat() {
    Mat m;
    m.rows = i32();
    m.cols = i32();
    m.a.resize(static_cast<size_t>(m.rows) * m.cols);
    bytes(m.a.data(), m.a.size() * sizeof(double));
    return m;
  }

 private:
  std::ifstream in_;
};

void write_shared(Writer& w, const qkernel::SharedParams& p) {
  w.mat(p.w_feat);
  w.vec(p.b_feat);
  w.mat(p.w_att);
  for (const Mat& h : p.w_head) w.mat(h);
  w.mat(p.w_out);
  w.vec(p.b_out);
}

qkernel::SharedParams read_shared(Reader& r, const qkernel::DimConfig& dims) {
  qkernel::SharedParams p;
  p.dims = dims;
  p.w_feat = r.mat();
  p.b_feat = r.vec();
  p.w_att = r.mat();
  p.w_head.clear();
  for (int m = 0; m < dims.num_heads; ++m) p.w_head.push_back(r.mat());
  p.w_out = r.mat();
  p.b_out = r.vec();
  return p;
}

void write_moments(Writer& w, const qkernel::Moments& mo) {
  w.u64(mo.t);
  w.vec(mo.m);
  w.vec(mo.v);
}

qkernel::Moments read_moments(Reader& r) {
  qkernel::Moments mo;
  mo.t = r.u64();
  mo.m = r.vec();
  mo.v = r.vec();
  return mo;
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
  Writer w(path);
  w.bytes(kMagic, 4);
  w.u32(kVersion);

  const auto& dims = model.dims;
  w.i32(dims.obs_dim);
  w.i32(dims.feat_dim);
  w.i32(dims.att_dim);
  w.i32(dims.num_phases);
  w.i32(dims.num_heads);
  w.i32(dims.num_neighbors);
  w.u32(model.cross_scenario ? 1 : 0);

  w.u32(static_cast<uint32_t>(model.scenario_sizes.size()));
  for (int n : model.scenario_sizes) w.i32(n);

  write_shared(w, model.params);
  write_shared(w, model.target);
  for (size_t k = 0; k < model.emb.intersection_w.size(); ++k) {
    w.mat(model.emb.intersection_w[k]);
    w.mat(model.emb.feature_w[k]);
  }

  write_moments(w, model.opt.w_feat);
  write_moments(w, model.opt.b_feat);
  write_moments(w, model.opt.w_att);
  for (const auto& mo : model.opt.w_head) write_moments(w, mo);
  write_moments(w, model.opt.w_out);
  write_moments(w, model.opt.b_out);
  for (const auto& rows : model.opt.int_rows) {
    for (const auto& mo : rows) write_moments(w, mo);
  }
  for (const auto& rows : model.opt.fea_rows) {
    for (const auto& mo : rows) write_moments(w, mo);
  }

  for (uint64_t word : model.rng.state()) w.u64(word);
  w.u64(model.global_step);
  w.u32(model.episodes_done);
  if (!w.good()) throw Error("failed writing checkpoint '" + path + "'");
}

Model load_checkpoint(const std::string& path) {
  Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointMismatch("'" + path + "' is not a checkpoint file");
  }
  const uint32_t version = r.u32();
  if (version != kVersion) {
    throw CheckpointMismatch("unsupported checkpoint version " +
                             std::to_string(version));
  }

  Model model;
  model.dims.obs_dim = r.i32();
  model.dims.feat_dim = r.i32();
  model.dims.att_dim = r.i32();
  model.dims.num_phases = r.i32();
  model.dims.num_heads = r.i32();
  model.dims.num_neighbors = r.i32();
  model.cross_scenario = r.u32() != 0;

  const uint32_t k = r.u32();
  model.scenario_sizes.resize(k);
  for (uint32_t i = 0; i < k; ++i) model.scenario_sizes[i] = r.i32();

  model.params = read_shared(r, model.dims);
  model.target = read_shared(r, model.dims);
  for (uint32_t i = 0; i < k; ++i) {
    model.emb.intersection_w.push_back(r.mat());
    model.emb.feature_w.push_back(r.mat());
  }

  model.opt.w_feat = read_moments(r);
  model.opt.b_feat = read_moments(r);
  model.opt.w_att = read_moments(r);
  model.opt.w_head.clear();
  for (int m = 0; m < model.dims.num_heads; ++m) {
    model.opt.w_head.push_back(read_moments(r));
  }
  model.opt.w_out = read_moments(r);
  model.opt.b_out = read_moments(r);
  for (uint32_t i = 0; i < k; ++i) {
    std::vector<qkernel::Moments> rows;
    for (int n = 0; n < model.scenario_sizes[i]; ++n) rows.push_back(read_moments(r));
    model.opt.int_rows.push_back(std::move(rows));
  }
  for (uint32_t i = 0; i < k; ++i) {
    std::vector<qkernel::Moments> rows;
    for (int n = 0; n < model.scenario_sizes[i]; ++n) rows.push_back(read_moments(r));
    model.opt.fea_rows.push_back(std::move(rows));
  }

  std::array<uint64_t, 4> state;
  for (auto& word : state) word = r.u64();
  model.rng.set_state(state);
  model.global_step = r.u64();
  model.episodes_done = r.u32();
  return model;
}

void require_compatible(const Model& model, const std::vector<int>& scenario_sizes) {
  if (model.scenario_sizes != scenario_sizes) {
    throw CheckpointMismatch(
        "checkpoint was trained on a different scenario set (counts " +
        std::to_string(model.scenario_sizes.size()) + " vs " +
        std::to_string(scenario_sizes.size()) + ")");
  }
}

}  // namespace dualight
