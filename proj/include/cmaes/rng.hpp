#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace cmaes {

/// xoshiro256** stream seeded through splitmix64.
///
/// The generator is written out rather than taken from <random> because the
/// optimizer state (including the stream position) is serialized, and the
/// standard distributions are not bit-reproducible across library vendors.
/// Normals come from Box-Muller with no cached second variate, so the state is
/// fully described by the four state words.
class Rng {
 public:
  using result_type = std::uint64_t;
  static constexpr std::uint32_t kAlgorithmId = 0x78733235;  // "xs25"

  explicit Rng(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate.
  double normal() {
    // u1 in (0, 1] keeps the log finite.
    const double u1 = static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>((*this)());
    return lo + static_cast<std::int64_t>((*this)() % span);
  }

  /// Derive an independent child stream; advances this stream.
  Rng split() {
    Rng child(0);
    std::uint64_t sm = (*this)() ^ 0x6a09e667f3bcc909ULL;
    for (auto& w : child.s_) w = splitmix64(sm);
    return child;
  }

  const std::array<std::uint64_t, 4>& state() const { return s_; }
  void set_state(const std::array<std::uint64_t, 4>& s) { s_ = s; }

  friend bool operator==(const Rng&, const Rng&) = default;

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace cmaes
