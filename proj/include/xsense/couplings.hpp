#pragma once

#include <cstdint>
#include <vector>

#include "xsense/dynamics.hpp"
#include "xsense/estimators.hpp"

namespace xsense {

/// One draw of the maximal triple coupling (omega, omega^eps, eta_t) on the
/// complete graph with eps = 1 - e^{-t}. The construction guarantees
/// d(omega^eps, eta_t) = |N01_eps - N01_t| + |N10_eps - N01_t| exactly.
struct TripleSample {
  Bits omega;
  Bits omega_eps;
  Bits eta_t;
  std::uint32_t n01_eps = 0;  // zeros of omega raised in omega^eps
  std::uint32_t n10_eps = 0;  // ones of omega lowered in omega^eps
  std::uint32_t n01_t = 0;    // zeros of omega raised in eta_t
  double t = 0.0;
  double eps = 0.0;

  std::uint32_t hamming_eps_vs_exclusion() const;
};

/// The count N01_t is drawn by running one true exclusion path from omega
/// (the only exact sampler of its conditional law); positions are then
/// assigned by nested uniform prefixes, which realizes the maximal-coupling
/// case analysis in all four counter orderings at once. Requires the
/// complete graph: the construction leans on exchangeability.
TripleSample triple_sample(std::uint32_t n, double t, const DynamicsGraph& g, RngStream& rng);

struct N01BucketStats {
  std::uint32_t ones_at_start = 0;       // |eta_0| for this bucket
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
  double predicted_mean = 0.0;           // (1-e^{-t}) |eta_0| (n-|eta_0|) / n
  double variance_bound = 0.0;           // n (1-e^{-t})
};

struct N01Report {
  double t = 0.0;
  std::uint32_t n = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<N01BucketStats> buckets;   // indexed by |eta_0|, empty buckets dropped
};

/// Conditional mean/variance of N01_t given |eta_0|, against the exact
/// conditional-mean formula and the variance bound.
N01Report n01_statistics(const DynamicsGraph& g, double t, std::uint64_t samples,
                         std::uint64_t seed, const RunOptions& opt = {});

struct DominationReport {
  double eps = 0.0;            // the dominating Binomial's success probability
  double t = 0.0;
  std::uint32_t set_size = 0;
  std::uint32_t vertices = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double max_cdf_violation = 0.0;  // max_x ( F_sim(x) - F_Bin(x) )
  double dkw_band = 0.0;           // sqrt(ln(1/delta) / 2N) at delta = 0.01
  bool dominated = false;          // violation within the band
};

/// Checks Bin(|S|, eps) <= |S_t \ S| in distribution by one-sided
/// empirical-CDF domination with a DKW band at 99% confidence; a stochastic
/// order cannot be asserted pointwise from samples, so the band is the
/// contract. Requires |S| < |V|/2.
DominationReport binomial_domination_check(const DynamicsGraph& g, const SubsetMask& S, double t,
                              std::uint64_t samples, std::uint64_t seed,
                              const RunOptions& opt = {});

/// The up-then-down hypercube path: the first m01 steps raise uniformly
/// chosen zeros, the remaining m10 steps lower uniformly chosen coordinates
/// that were ones at the start. No coordinate changes twice.
struct UpDownPath {
  Bits start;
  std::uint32_t m01 = 0;
  std::uint32_t m10 = 0;
  std::vector<std::uint32_t> flips;  // coordinates in step order

  Bits endpoint() const;
  std::vector<Bits> visited() const;
};

UpDownPath updown_path(const Bits& start, std::uint32_t m01, std::uint32_t m10, RngStream& rng);

struct BoundaryHitReport {
  double hit_rate = 0.0;        // P(f changes somewhere along the path)
  double endpoint_flip = 0.0;   // P(f(start) != f(end))
  double direct_flip = 0.0;     // P(f(omega^eps) != f(eta_t)) from the coupling
  double ii = 0.0;              // II(f), for the sqrt(II) comparison
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

/// Draws triple couplings, walks the up-down path from omega^eps with the
/// coupling's disagreement counters, and measures how often the path meets
/// the edge boundary of f.
BoundaryHitReport boundary_hit_rate(const BooleanFunction& f, double t, std::uint64_t samples,
                                    std::uint64_t seed, const RunOptions& opt = {});

}  // namespace xsense
