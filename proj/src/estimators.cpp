#include "xsense/estimators.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "xsense/parallel.hpp"

namespace xsense {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  RngStream s = RngStream(seed).substream(0x5eed5eedull + index);
  return s.next_u64();
}

namespace {

constexpr std::uint64_t kBatch = 1024;

/// Per-batch sums for a +-1 product estimator. Replica index parity gives
/// the two half-samples for the unbiased mean-squared product.
struct PairBatch {
  double sum_xy = 0.0;
  double sum_x = 0.0;
  double sum_x_even = 0.0, sum_x_odd = 0.0;
  std::uint64_t n = 0, n_even = 0, n_odd = 0;

  void add(std::uint64_t replica, double x, double y) {
    sum_xy += x * y;
    sum_x += x;
    ++n;
    if (replica % 2 == 0) {
      sum_x_even += x;
      ++n_even;
    } else {
      sum_x_odd += x;
      ++n_odd;
    }
  }
};

struct PairTotals {
  double estimate, stderr_, naive;
};

PairTotals reduce_batches(const std::vector<PairBatch>& batches, std::uint64_t samples) {
  double sum_xy = 0.0, sum_x = 0.0, sum_even = 0.0, sum_odd = 0.0;
  std::uint64_t n_even = 0, n_odd = 0;
  for (const auto& b : batches) {
    sum_xy += b.sum_xy;
    sum_x += b.sum_x;
    sum_even += b.sum_x_even;
    sum_odd += b.sum_x_odd;
    n_even += b.n_even;
    n_odd += b.n_odd;
  }
  const double mean_xy = sum_xy / static_cast<double>(samples);
  const double mean_x = sum_x / static_cast<double>(samples);
  const double product = (n_even && n_odd)
                             ? (sum_even / static_cast<double>(n_even)) *
                                   (sum_odd / static_cast<double>(n_odd))
                             : mean_x * mean_x;
  PairTotals out;
  out.estimate = mean_xy - product;
  out.naive = mean_xy - mean_x * mean_x;

  // Batch-means standard error: each full batch yields an independent
  // unbiased estimate of the same quantity; their spread calibrates the
  // error of the pooled estimate including the product term.
  RunningMoments bm;
  for (const auto& b : batches) {
    if (b.n_even == 0 || b.n_odd == 0) continue;
    const double est = b.sum_xy / static_cast<double>(b.n) -
                       (b.sum_x_even / static_cast<double>(b.n_even)) *
                           (b.sum_x_odd / static_cast<double>(b.n_odd));
    bm.add(est);
  }
  if (bm.count >= 2) {
    out.stderr_ = bm.stderr_of_mean();
  } else {
    // Too few batches for spread: bound Var(XY) by 1 - mean^2 for +-1 data.
    out.stderr_ =
        std::sqrt(std::max(0.0, 1.0 - mean_xy * mean_xy) / static_cast<double>(samples));
  }
  return out;
}

template <class PerReplica>
EstimatorResult run_pair_estimator(std::uint64_t samples, std::uint64_t seed,
                                   const RunOptions& opt, PerReplica&& per_replica) {
  if (samples < 2) throw std::invalid_argument("estimator: samples must be >= 2");
  const auto start = std::chrono::steady_clock::now();
  const RngStream root(seed);
  const std::uint64_t chunks = chunk_count(samples, kBatch);
  std::vector<PairBatch> batches(chunks);
  for_each_chunk(samples, kBatch, opt.workers, [&](const ChunkRange& range) {
    PairBatch& batch = batches[range.index];
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      const auto [x, y] = per_replica(stream);
      batch.add(r, x, y);
    }
  });
  const PairTotals totals = reduce_batches(batches, samples);
  EstimatorResult res;
  res.estimate = totals.estimate;
  res.stderr_ = totals.stderr_;
  res.naive_estimate = totals.naive;
  res.samples = samples;
  res.seed = seed;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace

EstimatorResult run_pair_replicas(
    std::uint64_t samples, std::uint64_t seed, const RunOptions& opt,
    const std::function<std::pair<double, double>(RngStream&)>& per_replica) {
  return run_pair_estimator(samples, seed, opt, per_replica);
}

EstimatorResult run_mean_replicas(std::uint64_t samples, std::uint64_t seed,
                                  const RunOptions& opt,
                                  const std::function<double(RngStream&)>& per_replica) {
  if (samples < 2) throw std::invalid_argument("run_mean_replicas: samples < 2");
  const auto start = std::chrono::steady_clock::now();
  const RngStream root(seed);
  const std::uint64_t chunks = chunk_count(samples, kBatch);
  std::vector<RunningMoments> partial(chunks);
  for_each_chunk(samples, kBatch, opt.workers, [&](const ChunkRange& range) {
    RunningMoments& m = partial[range.index];
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      m.add(per_replica(stream));
    }
  });
  RunningMoments total;
  for (const auto& m : partial) total.merge(m);
  EstimatorResult res;
  res.estimate = total.mean;
  res.naive_estimate = total.mean;
  res.stderr_ = total.stderr_of_mean();
  res.samples = samples;
  res.seed = seed;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

EstimatorResult estimate_exclusion_correlation(const BooleanFunction& f, const DynamicsGraph& g,
                                               double t, std::uint64_t samples,
                                               std::uint64_t seed, const RunOptions& opt) {
  if (f.input_bits() != g.vertices())
    throw std::invalid_argument("estimate_exclusion_correlation: function/graph width mismatch");
  if (t < 0) throw std::invalid_argument("estimate_exclusion_correlation: negative time");
  return run_pair_estimator(samples, seed, opt, [&](RngStream& stream) {
    Configuration omega(g.vertices());
    omega.bits.fill_random(stream);
    const double x = f.evaluate_bits(omega.bits);
    const Configuration eta = simulate_exclusion(omega, g, t, stream);
    const double y = f.evaluate_bits(eta.bits);
    return std::pair<double, double>(x, y);
  });
}

EstimatorResult estimate_noise_correlation(const BooleanFunction& f, double eps,
                                           std::uint64_t samples, std::uint64_t seed,
                                           const RunOptions& opt) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("estimate_noise_correlation: eps outside [0,1]");
  return run_pair_estimator(samples, seed, opt, [&](RngStream& stream) {
    Configuration omega(f.input_bits());
    omega.bits.fill_random(stream);
    const double x = f.evaluate_bits(omega.bits);
    const Configuration noisy = snps(omega, eps, stream);
    const double y = f.evaluate_bits(noisy.bits);
    return std::pair<double, double>(x, y);
  });
}

EstimatorResult estimate_snps_correlation(const BooleanFunction& f, double t,
                                          std::uint64_t samples, std::uint64_t seed,
                                          const RunOptions& opt) {
  if (t < 0) throw std::invalid_argument("estimate_snps_correlation: negative time");
  return run_pair_estimator(samples, seed, opt, [&](RngStream& stream) {
    Configuration omega(f.input_bits());
    omega.bits.fill_random(stream);
    const double x = f.evaluate_bits(omega.bits);
    const Configuration noisy = snps_trajectory(omega, t, stream);
    const double y = f.evaluate_bits(noisy.bits);
    return std::pair<double, double>(x, y);
  });
}

EstimatorResult estimate_flip_probability(const BooleanFunction& f, const DynamicsGraph& g,
                                          double t, std::uint64_t samples, std::uint64_t seed,
                                          const RunOptions& opt) {
  if (f.input_bits() != g.vertices())
    throw std::invalid_argument("estimate_flip_probability: function/graph width mismatch");
  if (samples < 2) throw std::invalid_argument("estimate_flip_probability: samples < 2");
  const auto start = std::chrono::steady_clock::now();
  const RngStream root(seed);
  const std::uint64_t chunks = chunk_count(samples, kBatch);
  std::vector<std::uint64_t> flips(chunks, 0);
  std::vector<std::uint64_t> product_sum(chunks, 0);
  for_each_chunk(samples, kBatch, opt.workers, [&](const ChunkRange& range) {
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      Configuration omega(g.vertices());
      omega.bits.fill_random(stream);
      const int x = f.evaluate_bits(omega.bits);
      const Configuration eta = simulate_exclusion(omega, g, t, stream);
      const int y = f.evaluate_bits(eta.bits);
      if (x != y) ++flips[range.index];
      product_sum[range.index] += static_cast<std::uint64_t>(x == y);
    }
  });
  std::uint64_t total_flips = 0, total_agree = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    total_flips += flips[c];
    total_agree += product_sum[c];
  }
  // E[f f_t] = 1 - 2 P(neq) holds sample by sample: agree + flip = samples.
  if (total_agree + total_flips != samples)
    throw std::logic_error("estimate_flip_probability: internal identity violated");
  const double p = static_cast<double>(total_flips) / static_cast<double>(samples);
  EstimatorResult res;
  res.estimate = p;
  res.naive_estimate = p;
  res.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  res.samples = samples;
  res.seed = seed;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

ConditionalMeanProfile conditional_mean_profile(const BooleanFunction& f, const DynamicsGraph& g,
                                                double t, std::uint64_t outer, std::uint64_t inner,
                                                std::uint64_t seed, const RunOptions& opt) {
  if (outer < 2 || inner < 2)
    throw std::invalid_argument("conditional_mean_profile: outer and inner must be >= 2");
  if (f.input_bits() != g.vertices())
    throw std::invalid_argument("conditional_mean_profile: function/graph width mismatch");
  const RngStream root(seed);
  std::vector<double> cond_mean(outer), within_var(outer);
  for_each_chunk(outer, 64, opt.workers, [&](const ChunkRange& range) {
    for (std::uint64_t i = range.begin; i < range.end; ++i) {
      RngStream stream = root.substream(i);
      Configuration omega(g.vertices());
      omega.bits.fill_random(stream);
      RunningMoments inner_stats;
      for (std::uint64_t j = 0; j < inner; ++j) {
        RngStream path_stream = stream.substream(j + 1);
        const Configuration eta = simulate_exclusion(omega, g, t, path_stream);
        inner_stats.add(f.evaluate_bits(eta.bits));
      }
      cond_mean[i] = inner_stats.mean;
      within_var[i] = inner_stats.variance();
    }
  });

  RunningMoments outer_stats;
  double mean_within = 0.0;
  for (std::uint64_t i = 0; i < outer; ++i) {
    outer_stats.add(cond_mean[i]);
    mean_within += within_var[i];
  }
  mean_within /= static_cast<double>(outer);

  ConditionalMeanProfile prof;
  prof.outer = outer;
  prof.inner = inner;
  prof.seed = seed;
  prof.mean_of_means = outer_stats.mean;
  prof.raw_variance = outer_stats.variance();
  // Standard nested-MC debiasing: E[raw] = Var(cond mean) + E[within]/inner.
  prof.debiased_variance = prof.raw_variance - mean_within / static_cast<double>(inner);

  RunningMoments spread;
  for (std::uint64_t i = 0; i < outer; ++i) {
    const double d = cond_mean[i] - outer_stats.mean;
    spread.add(d * d - within_var[i] / static_cast<double>(inner));
  }
  prof.debiased_stderr = spread.stderr_of_mean();
  return prof;
}

BooleanFunction make_zoo_for_bits(const std::string& family, const ZooParams& base,
                                  std::uint32_t n) {
  ZooParams p = base;
  p.n = n;
  if (family == "flipped_pairs") {
    if (n % 2 != 0) throw std::invalid_argument("make_zoo_for_bits: flipped_pairs needs even n");
    p.edges = n / 2;
  } else if (family == "tribes") {
    if (base.tribe_size == 0 || n % base.tribe_size != 0)
      throw std::invalid_argument("make_zoo_for_bits: tribes needs n divisible by tribe size");
    p.tribe_count = n / base.tribe_size;
  }
  return zoo_build(family, p);
}

DynamicsGraph graph_for_bits(const std::string& family, std::uint32_t n) {
  if (family == "complete") return complete_graph(n);
  if (family == "path") return path_graph(n);
  if (family == "isolated_edges") {
    if (n % 2 != 0) throw std::invalid_argument("graph_for_bits: isolated_edges needs even n");
    return isolated_edges_graph(n / 2);
  }
  if (family == "grid2d") {
    const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(double(n))));
    if (side * side != n) throw std::invalid_argument("graph_for_bits: grid2d needs square n");
    return grid2d_graph(side);
  }
  throw std::invalid_argument("graph_for_bits: unknown family '" + family + "'");
}

std::vector<SweepRow> sensitivity_sweep(const SweepSpec& spec) {
  if (spec.n_list.empty()) throw std::invalid_argument("sensitivity_sweep: empty n grid");
  const bool iid = spec.graph_family == "iid";
  const auto& levels = iid ? spec.eps_list : spec.t_list;
  if (levels.empty()) throw std::invalid_argument("sensitivity_sweep: empty t/eps grid");

  RunOptions opt;
  opt.workers = spec.workers;
  std::vector<SweepRow> rows;
  std::uint64_t row_index = 0;
  for (std::uint32_t n : spec.n_list) {
    const BooleanFunction f = make_zoo_for_bits(spec.function_family, spec.zoo, n);
    for (double level : levels) {
      SweepRow row;
      row.function = f.name();
      row.n = n;
      row.kind = iid ? "eps" : "t";
      row.level = level;
      const std::uint64_t row_seed = derive_seed(spec.seed, row_index++);
      if (iid) {
        row.graph = "iid";
        row.result = estimate_noise_correlation(f, level, spec.samples, row_seed, opt);
      } else {
        const DynamicsGraph g = graph_for_bits(spec.graph_family, n);
        row.graph = g.family();
        row.result = estimate_exclusion_correlation(f, g, level, spec.samples, row_seed, opt);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace xsense
