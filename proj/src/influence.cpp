#include "xsense/influence.hpp"

#include <bit>
#include <cmath>

namespace xsense {

InfluenceReport influences(const BooleanFunction& f) {
  f.require_table("influences");
  const std::uint32_t n = f.input_bits();
  const std::uint64_t size = std::uint64_t{1} << n;
  const auto& table = f.table();

  InfluenceReport rep;
  rep.influence.resize(n);
  const double half_space = static_cast<double>(std::uint64_t{1} << (n - 1));
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    std::uint64_t disagree = 0;
    for (std::uint64_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      if (table[mask] != table[mask | bit]) ++disagree;
    }
    rep.edge_boundary += disagree;
    rep.influence[i] = static_cast<double>(disagree) / half_space;
    rep.total += rep.influence[i];
    rep.ii += rep.influence[i] * rep.influence[i];
  }
  return rep;
}

InfluenceReport influences_mc(const BooleanFunction& f, std::uint64_t samples, RngStream rng) {
  if (samples < 2) throw std::invalid_argument("influences_mc: samples < 2");
  const std::uint32_t n = f.input_bits();
  InfluenceReport rep;
  rep.influence.assign(n, 0.0);
  rep.stderrs.assign(n, 0.0);
  std::vector<std::uint64_t> hits(n, 0);
  Bits omega(n);
  for (std::uint64_t s = 0; s < samples; ++s) {
    omega.fill_random(rng);
    const int base = f.evaluate_bits(omega);
    for (std::uint32_t i = 0; i < n; ++i) {
      omega.toggle(i);
      if (f.evaluate_bits(omega) != base) ++hits[i];
      omega.toggle(i);
    }
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const double p = static_cast<double>(hits[i]) / static_cast<double>(samples);
    rep.influence[i] = p;
    rep.stderrs[i] = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    rep.total += p;
    rep.ii += p * p;
  }
  return rep;
}

bool is_monotone(const BooleanFunction& f) {
  f.require_table("is_monotone");
  const std::uint32_t n = f.input_bits();
  const std::uint64_t size = std::uint64_t{1} << n;
  const auto& table = f.table();
  // Single-bit covering relations suffice.
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      if (table[mask] > table[mask | bit]) return false;
    }
  }
  return true;
}

double jointly_pivotal(const BooleanFunction& f, const SubsetMask& points) {
  f.require_table("jointly_pivotal");
  const std::uint32_t n = f.input_bits();
  if (points.size() != n) throw std::invalid_argument("jointly_pivotal: width mismatch");
  const std::uint32_t p = points.cardinality();
  if (p == 0) throw std::invalid_argument("jointly_pivotal: empty point set");
  if (p > 20) throw std::invalid_argument("jointly_pivotal: point set too large");

  const auto pos = points.bits.positions_of(true);
  std::vector<std::uint32_t> rest;
  for (std::uint32_t i = 0; i < n; ++i)
    if (!points.bits.get(i)) rest.push_back(i);

  const std::uint64_t rest_count = std::uint64_t{1} << rest.size();
  const std::uint64_t sub_count = std::uint64_t{1} << p;
  std::vector<std::int8_t> induced(sub_count);
  std::uint64_t good = 0;

  for (std::uint64_t r = 0; r < rest_count; ++r) {
    std::uint64_t base = 0;
    for (std::size_t j = 0; j < rest.size(); ++j)
      if ((r >> j) & 1u) base |= std::uint64_t{1} << rest[j];
    for (std::uint64_t s = 0; s < sub_count; ++s) {
      std::uint64_t mask = base;
      for (std::uint32_t j = 0; j < p; ++j)
        if ((s >> j) & 1u) mask |= std::uint64_t{1} << pos[j];
      induced[s] = static_cast<std::int8_t>(f.value_at(mask));
    }
    bool depends_on_all = true;
    for (std::uint32_t j = 0; j < p && depends_on_all; ++j) {
      const std::uint64_t bit = std::uint64_t{1} << j;
      bool relevant = false;
      for (std::uint64_t s = 0; s < sub_count && !relevant; ++s) {
        if (s & bit) continue;
        relevant = induced[s] != induced[s | bit];
      }
      depends_on_all = relevant;
    }
    if (depends_on_all) ++good;
  }
  return static_cast<double>(good) / static_cast<double>(rest_count);
}

double bias_profile(const BooleanFunction& f, double p) {
  f.require_table("bias_profile");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("bias_profile: p outside [0,1]");
  const std::uint32_t n = f.input_bits();
  const std::uint64_t size = std::uint64_t{1} << n;
  // Group by |omega|; the level sums are exact integers.
  std::vector<std::int64_t> level_sum(n + 1, 0);
  for (std::uint64_t mask = 0; mask < size; ++mask)
    level_sum[std::popcount(mask)] += f.value_at(mask);
  double out = 0.0;
  for (std::uint32_t j = 0; j <= n; ++j) {
    if (level_sum[j] == 0) continue;
    out += static_cast<double>(level_sum[j]) * std::pow(p, static_cast<double>(j)) *
           std::pow(1.0 - p, static_cast<double>(n - j));
  }
  return out;
}

}  // namespace xsense
