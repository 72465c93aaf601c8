#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xsense/dynamics.hpp"
#include "xsense/zoo.hpp"

namespace xsense {

struct RunOptions {
  int workers = 1;
};

/// Deterministic seed for a derived task (grid row, nested stage, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct EstimatorResult {
  double estimate = 0.0;        // split-sample unbiased form
  double stderr_ = 0.0;         // batch-means standard error of the estimate
  double naive_estimate = 0.0;  // plug-in meanXY - mean^2 (biased by O(1/samples))
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;    // excluded from file outputs
};

/// mean f(eta_0) f(eta_t) minus the squared mean of f, the latter estimated
/// by the product of the even-replica and odd-replica means (unbiased; the
/// naive plug-in square is also reported).
EstimatorResult estimate_exclusion_correlation(const BooleanFunction& f, const DynamicsGraph& g,
                                               double t, std::uint64_t samples,
                                               std::uint64_t seed, const RunOptions& opt = {});

EstimatorResult estimate_noise_correlation(const BooleanFunction& f, double eps,
                                           std::uint64_t samples, std::uint64_t seed,
                                           const RunOptions& opt = {});

/// Same estimator with the SNPS trajectory at time t in place of the
/// one-shot eps-resampling; the two agree when eps = 1 - e^{-t}.
EstimatorResult estimate_snps_correlation(const BooleanFunction& f, double t,
                                          std::uint64_t samples, std::uint64_t seed,
                                          const RunOptions& opt = {});

/// P(f(eta_0) != f(eta_t)); the identity E[f f_t] = 1 - 2 P(neq) holds
/// sample by sample.
EstimatorResult estimate_flip_probability(const BooleanFunction& f, const DynamicsGraph& g,
                                          double t, std::uint64_t samples, std::uint64_t seed,
                                          const RunOptions& opt = {});

struct ConditionalMeanProfile {
  double mean_of_means = 0.0;
  double raw_variance = 0.0;       // sample variance of the conditional means
  double debiased_variance = 0.0;  // raw minus mean(within-variance)/inner
  double debiased_stderr = 0.0;
  std::uint64_t outer = 0;
  std::uint64_t inner = 0;
  std::uint64_t seed = 0;
};

/// For `outer` draws of eta_0, estimates E[f(eta_t) | eta_0] with `inner`
/// fresh paths each. The debiased variance of the conditional mean equals
/// the exact correlation at time 2t (the conditional mean is the
/// half-semigroup applied to f, and squaring it doubles the decay).
ConditionalMeanProfile conditional_mean_profile(const BooleanFunction& f, const DynamicsGraph& g,
                                                double t, std::uint64_t outer, std::uint64_t inner,
                                                std::uint64_t seed, const RunOptions& opt = {});

/// Replica runner for custom +-1 pair estimators (x, y per replica):
/// deterministic chunked execution, split-sample unbiased mean product,
/// batch-means standard error. Used by the percolation experiments.
EstimatorResult run_pair_replicas(std::uint64_t samples, std::uint64_t seed,
                                  const RunOptions& opt,
                                  const std::function<std::pair<double, double>(RngStream&)>& per_replica);

/// Replica runner for a plain mean.
EstimatorResult run_mean_replicas(std::uint64_t samples, std::uint64_t seed,
                                  const RunOptions& opt,
                                  const std::function<double(RngStream&)>& per_replica);

struct SweepSpec {
  std::string function_family;  // zoo family; n comes from n_list
  ZooParams zoo;                // family parameters other than n
  std::string graph_family;     // complete | path | grid2d | isolated_edges | iid
  std::vector<std::uint32_t> n_list;
  std::vector<double> t_list;    // exclusion times (ignored for iid)
  std::vector<double> eps_list;  // iid noise levels (used when graph_family == "iid")
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct SweepRow {
  std::string function;
  std::string graph;
  std::uint32_t n = 0;
  std::string kind;  // "t" or "eps"
  double level = 0.0;
  EstimatorResult result;
};

/// Zoo function of the given family sized to n bits.
BooleanFunction make_zoo_for_bits(const std::string& family, const ZooParams& base,
                                  std::uint32_t n);
/// Graph of the given family with exactly n vertices.
DynamicsGraph graph_for_bits(const std::string& family, std::uint32_t n);

/// Full factorial table over n x (t or eps).
std::vector<SweepRow> sensitivity_sweep(const SweepSpec& spec);

}  // namespace xsense
