#include "xsense/couplings.hpp"

#include <algorithm>
#include <cmath>

#include "xsense/influence.hpp"
#include "xsense/parallel.hpp"

namespace xsense {

namespace {

/// Uniform random prefix of length `prefix` via partial Fisher-Yates; the
/// first `prefix` entries are a uniform ordered sample without replacement.
void partial_shuffle(std::vector<std::uint32_t>& items, std::uint32_t prefix, RngStream& rng) {
  const std::uint32_t m = static_cast<std::uint32_t>(items.size());
  prefix = std::min(prefix, m);
  for (std::uint32_t i = 0; i < prefix; ++i) {
    const std::uint32_t j = i + static_cast<std::uint32_t>(rng.next_below(m - i));
    std::swap(items[i], items[j]);
  }
}

void require_complete(const DynamicsGraph& g, const char* where) {
  const std::size_t n = g.vertices();
  if (g.family().rfind("complete", 0) != 0 || g.edge_count() != n * (n - 1) / 2)
    throw std::invalid_argument(std::string(where) +
                                ": the construction needs the complete graph");
}

double binomial_cdf(std::uint32_t trials, double p, std::uint32_t x) {
  if (p <= 0.0) return 1.0;
  if (p >= 1.0) return x >= trials ? 1.0 : 0.0;
  // Direct pmf recursion; trials stays small here.
  double pmf = std::pow(1.0 - p, static_cast<double>(trials));
  double cdf = pmf;
  for (std::uint32_t k = 0; k < x && k < trials; ++k) {
    pmf *= (static_cast<double>(trials - k) / static_cast<double>(k + 1)) * (p / (1.0 - p));
    cdf += pmf;
  }
  return std::min(cdf, 1.0);
}

}  // namespace

std::uint32_t TripleSample::hamming_eps_vs_exclusion() const {
  return omega_eps.count_xor(eta_t);
}

TripleSample triple_sample(std::uint32_t n, double t, const DynamicsGraph& g, RngStream& rng) {
  require_complete(g, "triple_sample");
  if (g.vertices() != n) throw std::invalid_argument("triple_sample: width mismatch");
  if (!(t > 0)) throw std::invalid_argument("triple_sample: need t > 0");

  TripleSample s;
  s.t = t;
  s.eps = 1.0 - std::exp(-t);
  s.omega = Bits(n);
  s.omega.fill_random(rng);

  auto zeros = s.omega.positions_of(false);
  auto ones = s.omega.positions_of(true);

  // The eps-resampling counters, conditionally independent given omega.
  s.n01_eps = static_cast<std::uint32_t>(rng.binomial(zeros.size(), s.eps / 2.0));
  s.n10_eps = static_cast<std::uint32_t>(rng.binomial(ones.size(), s.eps / 2.0));

  // N01_t from one true exclusion run; only the count is kept, positions are
  // re-assigned below with their exact exchangeable law.
  {
    Configuration eta0(s.omega);
    const Configuration eta = simulate_exclusion(eta0, g, t, rng);
    s.n01_t = s.omega.count_gained(eta.bits);
  }

  // Nested uniform prefixes realize the maximal coupling: whichever of the
  // two flip sets is smaller sits inside the larger one.
  partial_shuffle(zeros, std::max(s.n01_t, s.n01_eps), rng);
  partial_shuffle(ones, std::max(s.n01_t, s.n10_eps), rng);

  s.eta_t = s.omega;
  for (std::uint32_t i = 0; i < s.n01_t; ++i) s.eta_t.toggle(zeros[i]);
  for (std::uint32_t i = 0; i < s.n01_t; ++i) s.eta_t.toggle(ones[i]);

  s.omega_eps = s.omega;
  for (std::uint32_t i = 0; i < s.n01_eps; ++i) s.omega_eps.toggle(zeros[i]);
  for (std::uint32_t i = 0; i < s.n10_eps; ++i) s.omega_eps.toggle(ones[i]);
  return s;
}

N01Report n01_statistics(const DynamicsGraph& g, double t, std::uint64_t samples,
                         std::uint64_t seed, const RunOptions& opt) {
  require_complete(g, "n01_statistics");
  if (samples < 2) throw std::invalid_argument("n01_statistics: samples < 2");
  const std::uint32_t n = g.vertices();
  const RngStream root(seed);

  struct Bucket {
    std::uint64_t count = 0;
    double sum = 0.0, sum_sq = 0.0;
  };
  const std::uint64_t chunks = chunk_count(samples, 1024);
  std::vector<std::vector<Bucket>> partial(chunks, std::vector<Bucket>(n + 1));
  for_each_chunk(samples, 1024, opt.workers, [&](const ChunkRange& range) {
    auto& buckets = partial[range.index];
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      Configuration eta0(n);
      eta0.bits.fill_random(stream);
      const Configuration eta = simulate_exclusion(eta0, g, t, stream);
      const std::uint32_t n01 = eta0.bits.count_gained(eta.bits);
      Bucket& b = buckets[eta0.ones()];
      ++b.count;
      b.sum += n01;
      b.sum_sq += static_cast<double>(n01) * n01;
    }
  });

  N01Report report;
  report.t = t;
  report.n = n;
  report.samples = samples;
  report.seed = seed;
  const double eps = 1.0 - std::exp(-t);
  for (std::uint32_t ones = 0; ones <= n; ++ones) {
    Bucket total;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      total.count += partial[c][ones].count;
      total.sum += partial[c][ones].sum;
      total.sum_sq += partial[c][ones].sum_sq;
    }
    if (total.count == 0) continue;
    N01BucketStats stats;
    stats.ones_at_start = ones;
    stats.count = total.count;
    stats.mean = total.sum / static_cast<double>(total.count);
    stats.variance =
        total.count > 1
            ? (total.sum_sq - total.sum * stats.mean) / static_cast<double>(total.count - 1)
            : 0.0;
    stats.predicted_mean =
        eps * static_cast<double>(ones) * static_cast<double>(n - ones) / static_cast<double>(n);
    stats.variance_bound = static_cast<double>(n) * eps;
    report.buckets.push_back(stats);
  }
  return report;
}

DominationReport binomial_domination_check(const DynamicsGraph& g, const SubsetMask& S, double t,
                              std::uint64_t samples, std::uint64_t seed, const RunOptions& opt) {
  require_complete(g, "binomial_domination_check");
  if (S.size() != g.vertices()) throw std::invalid_argument("binomial_domination_check: width mismatch");
  const std::uint32_t nv = g.vertices();
  const std::uint32_t k = S.cardinality();
  if (2 * k >= nv) throw std::invalid_argument("binomial_domination_check: requires |S| < |V|/2");
  if (samples < 2) throw std::invalid_argument("binomial_domination_check: samples < 2");

  DominationReport report;
  report.t = t;
  report.set_size = k;
  report.vertices = nv;
  report.samples = samples;
  report.seed = seed;
  const double frac = static_cast<double>(k) / static_cast<double>(nv);
  report.eps = (1.0 - std::exp(-(1.0 - frac) * t)) *
               (1.0 - static_cast<double>(k) / static_cast<double>(nv - k));

  const RngStream root(seed);
  const std::uint64_t chunks = chunk_count(samples, 1024);
  std::vector<std::vector<std::uint64_t>> partial(chunks,
                                                  std::vector<std::uint64_t>(k + 1, 0));
  for_each_chunk(samples, 1024, opt.workers, [&](const ChunkRange& range) {
    auto& hist = partial[range.index];
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      const SubsetMask st = simulate_transport(S, g, t, stream);
      // |S_t \ S| = |S| - |S_t cap S|
      const std::uint32_t escaped = k - st.bits.count_and(S.bits);
      ++hist[escaped];
    }
  });
  std::vector<std::uint64_t> hist(k + 1, 0);
  for (std::uint64_t c = 0; c < chunks; ++c)
    for (std::uint32_t x = 0; x <= k; ++x) hist[x] += partial[c][x];

  // One-sided check of F_sim(x) <= F_Bin(x) for all x up to a DKW band.
  report.dkw_band = std::sqrt(std::log(1.0 / 0.01) / (2.0 * static_cast<double>(samples)));
  std::uint64_t cum = 0;
  double worst = -1.0;
  for (std::uint32_t x = 0; x <= k; ++x) {
    cum += hist[x];
    const double f_sim = static_cast<double>(cum) / static_cast<double>(samples);
    const double f_bin = binomial_cdf(k, report.eps, x);
    worst = std::max(worst, f_sim - f_bin);
  }
  report.max_cdf_violation = worst;
  report.dominated = worst <= report.dkw_band;
  return report;
}

Bits UpDownPath::endpoint() const {
  Bits end = start;
  for (std::uint32_t pos : flips) end.toggle(pos);
  return end;
}

std::vector<Bits> UpDownPath::visited() const {
  std::vector<Bits> out;
  out.reserve(flips.size() + 1);
  Bits cur = start;
  out.push_back(cur);
  for (std::uint32_t pos : flips) {
    cur.toggle(pos);
    out.push_back(cur);
  }
  return out;
}

UpDownPath updown_path(const Bits& start, std::uint32_t m01, std::uint32_t m10, RngStream& rng) {
  auto zeros = start.positions_of(false);
  auto ones = start.positions_of(true);
  if (m01 > zeros.size()) throw std::invalid_argument("updown_path: m01 exceeds available zeros");
  if (m10 > ones.size()) throw std::invalid_argument("updown_path: m10 exceeds available ones");
  // Sequential uniform choice without replacement is exactly a uniform
  // prefix; down-moves draw only from the coordinates that were 1 at the
  // start, so nothing changes twice.
  partial_shuffle(zeros, m01, rng);
  partial_shuffle(ones, m10, rng);
  UpDownPath path;
  path.start = start;
  path.m01 = m01;
  path.m10 = m10;
  path.flips.reserve(m01 + m10);
  for (std::uint32_t i = 0; i < m01; ++i) path.flips.push_back(zeros[i]);
  for (std::uint32_t i = 0; i < m10; ++i) path.flips.push_back(ones[i]);
  return path;
}

BoundaryHitReport boundary_hit_rate(const BooleanFunction& f, double t, std::uint64_t samples,
                                    std::uint64_t seed, const RunOptions& opt) {
  const std::uint32_t n = f.input_bits();
  const DynamicsGraph g = complete_graph(n);
  const RngStream root(seed);
  const std::uint64_t chunks = chunk_count(samples, 1024);
  struct Counts {
    std::uint64_t hits = 0, endpoint = 0, direct = 0;
  };
  std::vector<Counts> partial(chunks);
  for_each_chunk(samples, 1024, opt.workers, [&](const ChunkRange& range) {
    Counts& c = partial[range.index];
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      const TripleSample trip = triple_sample(n, t, g, stream);
      if (f.evaluate_bits(trip.omega_eps) != f.evaluate_bits(trip.eta_t)) ++c.direct;
      // Up-down walk from omega^eps with the coupling's disagreement counts.
      const std::uint32_t m01 = trip.omega_eps.count_gained(trip.eta_t);
      const std::uint32_t m10 = trip.eta_t.count_gained(trip.omega_eps);
      const UpDownPath path = updown_path(trip.omega_eps, m01, m10, stream);
      Bits cur = path.start;
      int sign = f.evaluate_bits(cur);
      const int start_sign = sign;
      bool hit = false;
      for (std::uint32_t pos : path.flips) {
        cur.toggle(pos);
        const int s = f.evaluate_bits(cur);
        hit = hit || s != sign;
        sign = s;
      }
      if (hit) ++c.hits;
      if (sign != start_sign) ++c.endpoint;
    }
  });
  Counts total;
  for (const auto& c : partial) {
    total.hits += c.hits;
    total.endpoint += c.endpoint;
    total.direct += c.direct;
  }
  BoundaryHitReport report;
  report.samples = samples;
  report.seed = seed;
  report.hit_rate = static_cast<double>(total.hits) / static_cast<double>(samples);
  report.endpoint_flip = static_cast<double>(total.endpoint) / static_cast<double>(samples);
  report.direct_flip = static_cast<double>(total.direct) / static_cast<double>(samples);
  report.ii = influences(f).ii;
  return report;
}

}  // namespace xsense
