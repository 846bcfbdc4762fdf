#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <boost/crc.hpp>

#include "cmaes/cma.hpp"
#include "cmaes/cmawm.hpp"
#include "cmaes/snapshot.hpp"

namespace cmaes::state_io {

// Layout (all integers and IEEE-754 doubles little-endian):
//   "CMAESNAP" | u32 version | u32 rng id | u8 flags | payload | u32 crc32
// The CRC covers every byte before it. Symmetric matrices are stored as the
// row-major upper triangle. The eigendecomposition is never written.
inline constexpr char kMagic[8] = {'C', 'M', 'A', 'E', 'S', 'N', 'A', 'P'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kVersionOffset = 8;

enum Flags : std::uint8_t {
  kHasLra = 1,
  kHasMargin = 2,
  kHasMaxGenerations = 4,
  kNoStagnation = 8,
};

using Bytes = std::vector<std::uint8_t>;

namespace detail {

class Writer {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void vec(const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) f64(v[i]);
  }
  void upper(const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = r; c < m.cols(); ++c) f64(m(r, c));
  }
  void full(const Matrix& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
  }
  Bytes finish() {
    boost::crc_32_type crc;
    crc.process_bytes(out_.data(), out_.size());
    u32(crc.checksum());
    return std::move(out_);
  }

 private:
  Bytes out_;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw DecodeError(std::string("truncated snapshot while reading ") + what, pos_);
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return data_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }
  std::int64_t i64(const char* what) { return static_cast<std::int64_t>(u64(what)); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }

  Vector vec(Eigen::Index n, const char* what) {
    need(static_cast<std::size_t>(n) * 8, what);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = f64(what);
    return v;
  }
  Matrix upper(Eigen::Index n, const char* what) {
    need(static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2 * 8, what);
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = r; c < n; ++c) m(r, c) = m(c, r) = f64(what);
    return m;
  }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Serialize a snapshot. Deterministic: equal snapshots give equal bytes.
inline Bytes encode(const Snapshot& s) {
  detail::Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(kVersion);
  w.u32(Rng::kAlgorithmId);
  std::uint8_t flags = 0;
  if (s.lra) flags |= kHasLra;
  if (s.margin) flags |= kHasMargin;
  if (s.max_generations) flags |= kHasMaxGenerations;
  if (!s.stagnation) flags |= kNoStagnation;
  w.u8(flags);

  w.i32(s.dim);
  w.i32(s.lambda);
  w.i32(s.mu);
  w.vec(s.weights);
  for (double v : {s.mu_w, s.c_sigma, s.d_sigma, s.c_c, s.c_1, s.c_mu, s.c_m}) w.f64(v);
  for (double v : {s.tol_fun, s.tol_x_rel, s.tol_x_up_rel, s.tol_condition}) w.f64(v);
  if (s.max_generations) w.i64(*s.max_generations);
  w.f64(s.sigma0);

  w.vec(s.mean);
  w.f64(s.sigma);
  w.upper(s.cov);
  w.i64(s.generation);
  w.vec(s.p_sigma);
  w.vec(s.p_c);
  for (auto word : s.rng_state) w.u64(word);

  w.u32(static_cast<std::uint32_t>(s.history_window.size()));
  for (double v : s.history_window) w.f64(v);
  w.i64(s.history_count);
  w.f64(s.best_ever);
  w.i64(s.last_improvement);

  if (s.lra) {
    const auto& l = *s.lra;
    for (double v : {l.alpha, l.beta_mean, l.beta_sigma, l.gamma}) w.f64(v);
    w.u8(l.adapt ? 1 : 0);
    w.f64(l.eta_mean);
    w.f64(l.eta_sigma);
    w.vec(l.ema_mean);
    w.upper(l.ema_sigma);
    w.f64(l.ema_sq_mean);
    w.f64(l.ema_sq_sigma);
  }
  if (s.margin) {
    const auto& m = *s.margin;
    w.vec(m.lower);
    w.vec(m.upper);
    w.vec(m.steps);
    w.f64(m.alpha);
    w.i32(m.max_resamples);
  }
  return w.finish();
}

/// Parse bytes produced by encode(). Throws VersionError for a foreign
/// version and DecodeError (with the byte offset) for anything malformed.
inline Snapshot decode(const std::uint8_t* data, std::size_t size) {
  detail::Reader r(data, size);
  r.need(sizeof kMagic, "magic");
  if (std::memcmp(data, kMagic, sizeof kMagic) != 0) throw DecodeError("bad snapshot magic", 0);
  for (std::size_t i = 0; i < sizeof kMagic; ++i) r.u8("magic");

  const std::uint32_t version = r.u32("version");
  if (version != kVersion) throw VersionError(version, kVersion, kVersionOffset);

  if (size < 4 + r.offset()) throw DecodeError("truncated snapshot while reading checksum", size);
  {
    boost::crc_32_type crc;
    crc.process_bytes(data, size - 4);
    detail::Reader tail(data + size - 4, 4);
    if (crc.checksum() != tail.u32("checksum"))
      throw DecodeError("snapshot checksum mismatch", size - 4);
  }
  detail::Reader body(data, size - 4);
  for (std::size_t i = 0; i < r.offset(); ++i) body.u8("header");

  const std::size_t rng_at = body.offset();
  if (body.u32("rng id") != Rng::kAlgorithmId)
    throw DecodeError("snapshot was written with a different random generator", rng_at);
  const std::size_t flags_at = body.offset();
  const std::uint8_t flags = body.u8("flags");
  if (flags & ~(kHasLra | kHasMargin | kHasMaxGenerations | kNoStagnation))
    throw DecodeError("unknown snapshot flags", flags_at);

  Snapshot s;
  const std::size_t dim_at = body.offset();
  s.dim = body.i32("dim");
  s.lambda = body.i32("lambda");
  s.mu = body.i32("mu");
  if (s.dim < 1 || s.lambda < 2 || s.mu < 1 || s.mu > s.lambda)
    throw DecodeError("snapshot sizes are out of range", dim_at);
  // Reject sizes the remaining bytes cannot possibly hold before allocating.
  const auto d = static_cast<std::size_t>(s.dim);
  if (d * (d + 1) / 2 * 8 > body.remaining() || static_cast<std::size_t>(s.lambda) * 8 > body.remaining())
    throw DecodeError("snapshot sizes exceed the payload", dim_at);

  s.weights = body.vec(s.lambda, "weights");
  s.mu_w = body.f64("mu_w");
  s.c_sigma = body.f64("c_sigma");
  s.d_sigma = body.f64("d_sigma");
  s.c_c = body.f64("c_c");
  s.c_1 = body.f64("c_1");
  s.c_mu = body.f64("c_mu");
  s.c_m = body.f64("c_m");
  s.tol_fun = body.f64("tol_fun");
  s.tol_x_rel = body.f64("tol_x");
  s.tol_x_up_rel = body.f64("tol_x_up");
  s.tol_condition = body.f64("tol_condition");
  if (flags & kHasMaxGenerations) s.max_generations = body.i64("max_generations");
  s.stagnation = !(flags & kNoStagnation);
  s.sigma0 = body.f64("sigma0");

  s.mean = body.vec(s.dim, "mean");
  s.sigma = body.f64("sigma");
  s.cov = body.upper(s.dim, "cov");
  s.generation = body.i64("generation");
  s.p_sigma = body.vec(s.dim, "p_sigma");
  s.p_c = body.vec(s.dim, "p_c");
  const std::size_t rng_state_at = body.offset();
  for (auto& word : s.rng_state) word = body.u64("rng state");
  if (s.rng_state == std::array<std::uint64_t, 4>{})
    throw DecodeError("random generator state is all zero", rng_state_at);

  const std::size_t window_at = body.offset();
  const std::uint32_t window = body.u32("history length");
  if (static_cast<std::size_t>(window) * 8 > body.remaining())
    throw DecodeError("history length exceeds the payload", window_at);
  s.history_window.resize(window);
  for (auto& v : s.history_window) v = body.f64("history");
  s.history_count = body.i64("history count");
  s.best_ever = body.f64("best value");
  s.last_improvement = body.i64("last improvement");

  if (flags & kHasLra) {
    Snapshot::Lra l;
    l.alpha = body.f64("lra alpha");
    l.beta_mean = body.f64("lra beta");
    l.beta_sigma = body.f64("lra beta");
    l.gamma = body.f64("lra gamma");
    l.adapt = body.u8("lra flag") != 0;
    l.eta_mean = body.f64("eta");
    l.eta_sigma = body.f64("eta");
    l.ema_mean = body.vec(s.dim, "lra averages");
    l.ema_sigma = body.upper(s.dim, "lra averages");
    l.ema_sq_mean = body.f64("lra averages");
    l.ema_sq_sigma = body.f64("lra averages");
    s.lra = std::move(l);
  }
  if (flags & kHasMargin) {
    Snapshot::Margin m;
    m.lower = body.vec(s.dim, "bounds");
    m.upper = body.vec(s.dim, "bounds");
    m.steps = body.vec(s.dim, "steps");
    m.alpha = body.f64("margin");
    m.max_resamples = body.i32("max resamples");
    s.margin = std::move(m);
  }
  if (body.remaining() != 0) throw DecodeError("trailing bytes after snapshot", body.offset());
  return s;
}

inline Snapshot decode(const Bytes& bytes) { return decode(bytes.data(), bytes.size()); }

inline Bytes save(const CMA& opt) { return encode(opt.snapshot()); }
inline Bytes save(const CMAwM& opt) { return encode(opt.snapshot()); }

namespace detail {
template <class F>
auto restore_or_decode_error(F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw DecodeError(std::string("inconsistent snapshot content: ") + e.what(), 0);
  }
}
}  // namespace detail

inline CMA load_cma(const Bytes& bytes) {
  const Snapshot s = decode(bytes);
  return detail::restore_or_decode_error([&] { return CMA::restore(s); });
}

inline CMAwM load_cmawm(const Bytes& bytes) {
  const Snapshot s = decode(bytes);
  return detail::restore_or_decode_error([&] { return CMAwM::restore(s); });
}

/// Size-comparison dump in the style of a plain object dump: the compact
/// record followed by the square C and the eigendecomposition cache
/// (B, D and C^{-1/2}). No compatibility promise.
inline Bytes encode_with_cache(const Snapshot& s, const EigenCache& cache) {
  const Bytes compact = encode(s);
  detail::Writer w;
  w.raw(compact.data(), compact.size());
  w.full(s.cov);
  w.full(cache.B);
  w.vec(cache.D);
  w.full(cache.inv_sqrt());
  return w.finish();
}

inline void write_file(const std::string& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for reading");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace cmaes::state_io
