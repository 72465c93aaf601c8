#pragma once

#include <cstdint>
#include <vector>

#include "xsense/boolfn.hpp"
#include "xsense/rng.hpp"

namespace xsense {

struct InfluenceReport {
  std::vector<double> influence;       // I_i, 1-based vertex i at index i-1
  double total = 0.0;                  // sum_i I_i
  double ii = 0.0;                     // sum_i I_i^2
  std::uint64_t edge_boundary = 0;     // |E_n|, hypercube edges crossing {f=1}
  std::vector<double> stderrs;         // nonempty only for the MC fallback
};

/// Exact influences over all 2^n inputs. The integer edge counts make the
/// identity |E_n| = 2^{n-1} * sum_i I_i hold exactly.
InfluenceReport influences(const BooleanFunction& f);

/// Monte Carlo fallback for predicate-form functions; reports per-bit
/// standard errors alongside the estimates.
InfluenceReport influences_mc(const BooleanFunction& f, std::uint64_t samples, RngStream rng);

/// True iff f(omega) <= f(omega with bit i raised) for every omega, i.
bool is_monotone(const BooleanFunction& f);

/// Probability, over uniform complementary bits, that the function induced
/// on `points` depends on every one of its bits. Exact dyadic rational.
double jointly_pivotal(const BooleanFunction& f, const SubsetMask& points);

/// E_{pi_p}[f] = sum_omega f(omega) p^|omega| (1-p)^(n-|omega|).
double bias_profile(const BooleanFunction& f, double p);

}  // namespace xsense
