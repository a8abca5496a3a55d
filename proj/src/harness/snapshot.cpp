#include "rclass/harness/snapshot.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rclass/errors.hpp"

namespace rclass::harness {

namespace {

constexpr char kMagic[4] = {'R', 'C', 'L', 'S'};

class Writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void u64(std::uint64_t v) {
    for (int b = 0; b < 8; ++b) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void boolean(bool v) { u8(v ? 1 : 0); }
  void str(const std::string& s) {
    u64(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void vec(const Vector& v) {
    u64(static_cast<std::uint64_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void mat(const Matrix& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) f64(m(r, c));
    }
  }
  void reals(const std::vector<double>& v) {
    u64(v.size());
    for (double d : v) f64(d);
  }
  void stats(const RunningStats& s) {
    f64(s.mean);
    f64(s.m2);
    u64(s.n_obs);
  }
  std::vector<std::uint8_t>& bytes() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : p_(data), end_(data + size) {}

  std::uint8_t u8() {
    need(1);
    return *p_++;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(*p_++) << (8 * b);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(*p_++) << (8 * b);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  bool boolean() { return u8() != 0; }
  std::string str() {
    const auto n = count(1);
    std::string s(reinterpret_cast<const char*>(p_), n);
    p_ += n;
    return s;
  }
  Vector vec() {
    const auto n = count(8);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = f64();
    return v;
  }
  Matrix mat() {
    const auto r = u64();
    const auto c = u64();
    if (r > (1u << 20) || c > (1u << 20) || r * c * 8 > remaining()) {
      throw CorruptSnapshot("matrix dimensions exceed the payload");
    }
    Matrix m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = f64();
    }
    return m;
  }
  std::vector<double> reals() {
    const auto n = count(8);
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
  }
  RunningStats stats() {
    RunningStats s;
    s.mean = f64();
    s.m2 = f64();
    s.n_obs = u64();
    return s;
  }
  // Element count prefix, checked against the bytes left.
  std::size_t count(std::size_t elem_size) {
    const auto n = u64();
    if (n > remaining() / elem_size) throw CorruptSnapshot("length prefix exceeds the payload");
    return static_cast<std::size_t>(n);
  }
  std::size_t remaining() const { return static_cast<std::size_t>(end_ - p_); }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) throw CorruptSnapshot("snapshot payload is truncated");
  }
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

std::string rng_state(const std::mt19937_64& rng) {
  std::ostringstream ss;
  ss << rng;
  return ss.str();
}

void write_rule(Writer& w, const Rule& r) {
  w.u64(r.id);
  w.vec(r.centroid);
  w.mat(r.inv_cov);
  w.mat(r.out_weights);
  w.vec(r.rec_weights);
  w.mat(r.out_cov);
  w.f64(r.support);
  w.vec(r.class_support);
  w.vec(r.prev_temporal);
  w.f64(r.pplus.value);
  w.f64(r.pplus.prev_value);
  w.stats(r.pplus.history);
  w.u64(r.pplus.n_obs);
  w.boolean(r.pplus.declining);
  w.stats(r.ers);
  w.u64(r.age);
}

Rule read_rule(Reader& rd) {
  Rule r;
  r.id = rd.u64();
  r.centroid = rd.vec();
  r.inv_cov = rd.mat();
  r.out_weights = rd.mat();
  r.rec_weights = rd.vec();
  r.out_cov = rd.mat();
  r.support = rd.f64();
  r.class_support = rd.vec();
  r.prev_temporal = rd.vec();
  r.pplus.value = rd.f64();
  r.pplus.prev_value = rd.f64();
  r.pplus.history = rd.stats();
  r.pplus.n_obs = rd.u64();
  r.pplus.declining = rd.boolean();
  r.ers = rd.stats();
  r.age = rd.u64();
  return r;
}

void write_config(Writer& w, const HyperParams& c) {
  for (double v : {c.budget, c.threshold_step, c.window, c.imbalance_gate, c.minority_share}) {
    w.f64(v);
  }
  w.boolean(c.imbalance_override);
  for (double v : {c.split_tolerance, c.split_offset, c.chi2_alpha, c.initial_radius,
                   c.nonoverlap_factor, c.min_radius, c.max_radius, c.overlap_shift}) {
    w.f64(v);
  }
  w.u64(c.prune_grace);
  for (double v : {c.init_cov_big, c.decay_weight, c.min_update_firing, c.gamma_init, c.gamma_floor,
                   c.eta_init, c.parzen_h, c.lr_up, c.lr_down, c.fda_rate}) {
    w.f64(v);
  }
  w.u8(static_cast<std::uint8_t>(c.within_scatter));
  w.u64(c.seed);
  w.u64(c.reserve_capacity);
}

HyperParams read_config(Reader& rd) {
  HyperParams c;
  for (double* v : {&c.budget, &c.threshold_step, &c.window, &c.imbalance_gate,
                    &c.minority_share}) {
    *v = rd.f64();
  }
  c.imbalance_override = rd.boolean();
  for (double* v : {&c.split_tolerance, &c.split_offset, &c.chi2_alpha, &c.initial_radius,
                    &c.nonoverlap_factor, &c.min_radius, &c.max_radius, &c.overlap_shift}) {
    *v = rd.f64();
  }
  c.prune_grace = rd.u64();
  for (double* v : {&c.init_cov_big, &c.decay_weight, &c.min_update_firing, &c.gamma_init,
                    &c.gamma_floor, &c.eta_init, &c.parzen_h, &c.lr_up, &c.lr_down, &c.fda_rate}) {
    *v = rd.f64();
  }
  const auto ws = rd.u8();
  if (ws > 1) throw CorruptSnapshot("unknown within-scatter mode");
  c.within_scatter = static_cast<WithinScatter>(ws);
  c.seed = rd.u64();
  c.reserve_capacity = rd.u64();
  return c;
}

void write_sample(Writer& w, const StreamSample& s) {
  w.vec(s.x);
  w.i32(s.label ? *s.label : -1);
  w.u64(s.index);
}

StreamSample read_sample(Reader& rd) {
  StreamSample s;
  s.x = rd.vec();
  const auto label = rd.i32();
  if (label >= 0) s.label = label;
  s.index = rd.u64();
  return s;
}

template <typename T, typename F>
void write_list(Writer& w, const std::vector<T>& items, F&& each) {
  w.u64(items.size());
  for (const auto& it : items) each(w, it);
}

std::vector<std::uint8_t> payload(const ModelState& m) {
  Writer w;
  write_config(w, m.config);
  w.i32(m.n_classes);
  w.i32(m.n_features);
  write_list(w, m.rules, write_rule);
  write_list(w, m.archive, write_rule);

  const SelectionState& s = m.selection;
  for (double v : {s.theta, s.budget, s.Z, s.b, s.window, s.step}) w.f64(v);
  w.reals(s.class_counts);
  w.u64(s.n_queried);

  const FeatureWeightState& f = m.fweights;
  w.vec(f.omega);
  write_list(w, f.class_means, [](Writer& ww, const Vector& v) { ww.vec(v); });
  w.vec(f.global_mean);
  write_list(w, f.scatter, [](Writer& ww, const Vector& v) { ww.vec(v); });
  w.reals(f.class_counts);
  w.f64(f.total);
  w.vec(f.weights);
  w.u64(f.since_refresh);
  w.str(rng_state(f.rng));

  w.f64(m.zedm.A);
  w.f64(m.zedm.eta);
  w.f64(m.zedm.f0_prev);
  w.u64(m.zedm.n);

  w.f64(m.dq.U);
  w.vec(m.dq.moment1);
  w.mat(m.dq.moment2);
  w.f64(m.dq.prev_dq);
  w.vec(m.dq.prev_x);
  w.u64(m.dq.n);
  w.boolean(m.dq.clamped);

  w.reals(m.class_potential.cb);
  write_list(w, m.class_potential.dd, [](Writer& ww, const Vector& v) { ww.vec(v); });
  w.reals(m.class_potential.count);

  w.u64(m.reserved.items.size());
  for (const auto& it : m.reserved.items) {
    write_sample(w, it.sample);
    w.u8(static_cast<std::uint8_t>(it.reason));
    w.u64(it.stored_at);
  }
  w.u64(m.reserved.capacity);
  w.u64(m.reserved.evicted);

  w.u64(m.n_seen);
  w.u64(m.n_learned);
  w.u64(m.next_rule_id);
  return std::move(w.bytes());
}

std::vector<Vector> read_vectors(Reader& rd) {
  const auto n = rd.count(8);
  std::vector<Vector> out(n);
  for (auto& v : out) v = rd.vec();
  return out;
}

std::vector<Rule> read_rules(Reader& rd) {
  const auto n = rd.count(8);
  std::vector<Rule> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(read_rule(rd));
  return out;
}

ModelState from_payload(Reader& rd) {
  ModelState m;
  m.config = read_config(rd);
  m.n_classes = rd.i32();
  m.n_features = rd.i32();
  m.rules = read_rules(rd);
  m.archive = read_rules(rd);

  SelectionState& s = m.selection;
  for (double* v : {&s.theta, &s.budget, &s.Z, &s.b, &s.window, &s.step}) *v = rd.f64();
  s.class_counts = rd.reals();
  s.n_queried = rd.u64();

  FeatureWeightState& f = m.fweights;
  f.omega = rd.vec();
  f.class_means = read_vectors(rd);
  f.global_mean = rd.vec();
  f.scatter = read_vectors(rd);
  f.class_counts = rd.reals();
  f.total = rd.f64();
  f.weights = rd.vec();
  f.since_refresh = rd.u64();
  std::istringstream rs(rd.str());
  rs >> f.rng;
  if (!rs) throw CorruptSnapshot("bad generator state");

  m.zedm.A = rd.f64();
  m.zedm.eta = rd.f64();
  m.zedm.f0_prev = rd.f64();
  m.zedm.n = rd.u64();

  m.dq.U = rd.f64();
  m.dq.moment1 = rd.vec();
  m.dq.moment2 = rd.mat();
  m.dq.prev_dq = rd.f64();
  m.dq.prev_x = rd.vec();
  m.dq.n = rd.u64();
  m.dq.clamped = rd.boolean();

  m.class_potential.cb = rd.reals();
  m.class_potential.dd = read_vectors(rd);
  m.class_potential.count = rd.reals();

  const auto n_reserved = rd.count(8);
  for (std::size_t i = 0; i < n_reserved; ++i) {
    ReservedSample it;
    it.sample = read_sample(rd);
    if (rd.u8() != 0) throw CorruptSnapshot("unknown reserve reason");
    it.stored_at = rd.u64();
    m.reserved.items.push_back(std::move(it));
  }
  m.reserved.capacity = rd.u64();
  m.reserved.evicted = rd.u64();

  m.n_seen = rd.u64();
  m.n_learned = rd.u64();
  m.next_rule_id = rd.u64();
  if (rd.remaining() != 0) throw CorruptSnapshot("trailing bytes after the model state");
  if (m.n_classes < 2 || m.n_features < 1) throw CorruptSnapshot("bad model dimensions");
  return m;
}

std::uint32_t checksum(const std::uint8_t* data, std::size_t n) {
  return static_cast<std::uint32_t>(crc32(0L, data, static_cast<uInt>(n)));
}

}  // namespace

std::vector<std::uint8_t> snapshot_bytes(const ModelState& model) {
  const std::vector<std::uint8_t> body = payload(model);
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u32(kSnapshotVersion);
  w.u64(body.size());
  auto& out = w.bytes();
  out.insert(out.end(), body.begin(), body.end());
  w.u32(checksum(body.data(), body.size()));
  return std::move(out);
}

ModelState snapshot_from_bytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CorruptSnapshot("not a model snapshot");
  }
  Reader head(bytes.data() + 4, 12);
  const auto version = head.u32();
  if (version != kSnapshotVersion) {
    throw VersionMismatch("snapshot version " + std::to_string(version) + ", expected " +
                          std::to_string(kSnapshotVersion));
  }
  const auto len = head.u64();
  if (len > bytes.size() || bytes.size() - 16 < len || bytes.size() - 16 - len != 4) {
    throw CorruptSnapshot("snapshot length does not match its header");
  }
  const std::uint8_t* body = bytes.data() + 16;
  Reader tail(body + len, 4);
  if (tail.u32() != checksum(body, static_cast<std::size_t>(len))) {
    throw CorruptSnapshot("snapshot checksum mismatch");
  }
  Reader rd(body, static_cast<std::size_t>(len));
  return from_payload(rd);
}

void snapshot_save(const ModelState& model, const std::string& path) {
  const auto bytes = snapshot_bytes(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write snapshot " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing snapshot " + path);
}

ModelState snapshot_load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return snapshot_from_bytes(bytes);
}

}  // namespace rclass::harness
