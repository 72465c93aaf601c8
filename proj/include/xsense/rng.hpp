#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace xsense {

/// Counter-based random stream (SplitMix64 finalizer over a keyed counter).
///
/// A stream is identified by a 64-bit key derived from (seed, stream id).
/// Drawing advances only the counter, so any replica can be reproduced from
/// (master seed, replica index) alone. Substreams are derived by rehashing
/// the key, never by sharing counters, so streams can be handed to workers
/// in any order without affecting the values produced.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x1b873593u))) {}

  /// Independent stream for replica/worker `index`.
  RngStream substream(std::uint64_t index) const {
    RngStream s(0);
    s.key_ = mix64(key_ ^ mix64(index * kGolden + 0x85ebca6bu));
    s.ctr_ = 0;
    return s;
  }

  std::uint64_t next_u64() { return mix64(key_ + (++ctr_) * kGolden); }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool next_bool() { return (next_u64() >> 63) != 0; }

  bool bernoulli(double p) { return next_double() < p; }

  /// Uniform integer in [0, n). Rejection sampling, exactly uniform.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::next_below: n == 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Exponential with the given rate.
  double exponential(double rate) {
    if (!(rate > 0)) throw std::invalid_argument("RngStream::exponential: rate <= 0");
    double u;
    do {
      u = next_double();
    } while (u <= 0.0);
    return -std::log(u) / rate;
  }

  /// Binomial(trials, p) by direct Bernoulli counting. Intended for the
  /// moderate trial counts used by the couplings; exact in distribution.
  std::uint64_t binomial(std::uint64_t trials, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("RngStream::binomial: p outside [0,1]");
    std::uint64_t k = 0;
    for (std::uint64_t i = 0; i < trials; ++i) k += bernoulli(p) ? 1 : 0;
    return k;
  }

  /// Poisson(mean) via Knuth's product method; fine for the small means
  /// used per site/edge.
  std::uint64_t poisson(double mean) {
    if (mean < 0) throw std::invalid_argument("RngStream::poisson: mean < 0");
    if (mean == 0) return 0;
    const double threshold = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = 1.0;
    for (;;) {
      prod *= next_double();
      if (prod <= threshold) return k;
      ++k;
    }
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

}  // namespace xsense
