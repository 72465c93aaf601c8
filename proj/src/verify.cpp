#include "xsense/verify.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <Eigen/Dense>

#include "xsense/couplings.hpp"
#include "xsense/estimators.hpp"
#include "xsense/influence.hpp"
#include "xsense/kernel.hpp"
#include "xsense/parallel.hpp"
#include "xsense/percolation.hpp"
#include "xsense/report.hpp"
#include "xsense/spectral.hpp"
#include "xsense/zoo.hpp"

namespace xsense {

namespace {

struct Check {
  bool ok = true;
  std::string failure;
  std::ostringstream notes;

  void require(bool cond, const std::string& msg) {
    if (!cond && ok) {
      ok = false;
      failure = msg;
    }
  }
  std::string detail() const { return ok ? notes.str() : failure; }
};

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/// Zoo instances used across the oracle criteria. The sizes are the largest
/// each criterion allows.
std::vector<BooleanFunction> zoo_at_16() {
  std::vector<BooleanFunction> fs;
  fs.push_back(make_parity(16, "all"));
  fs.push_back(make_parity(16, "first_half"));
  fs.push_back(make_dictator(16, 1));
  fs.push_back(make_majority(15));
  fs.push_back(make_tribes(4, 4));
  fs.push_back(make_count_band(16, 2));
  fs.push_back(make_count_band(15, 2));  // 15 = -1 mod 4: antisymmetric bands
  fs.push_back(make_iterated_majority(2));
  fs.push_back(make_flipped_pairs(8));
  fs.push_back(crossing_function(patch_build(1, 1, 3)));  // 16 sites
  return fs;
}

std::vector<BooleanFunction> zoo_at_12() {
  std::vector<BooleanFunction> fs;
  fs.push_back(make_parity(12, "all"));
  fs.push_back(make_parity(12, "first_half"));
  fs.push_back(make_dictator(12, 1));
  fs.push_back(make_majority(11));
  fs.push_back(make_tribes(3, 4));
  fs.push_back(make_count_band(12, 2));
  return fs;
}

CriterionResult timed(const std::string& name, Check& check,
                      std::chrono::steady_clock::time_point start) {
  CriterionResult res;
  res.name = name;
  res.pass = check.ok;
  res.detail = check.detail();
  res.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

// 1. Parseval within 1e-12 and exact inverse round trip, zoo at n <= 16.
CriterionResult criterion_spectral_exactness(const VerifyOptions&) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  const std::vector<BooleanFunction> zoo = zoo_at_16();
  double worst = 0.0;
  for (const auto& f : zoo) {
    const Spectrum sp = transform(f);
    const double gap = std::abs(sp.parseval_sum() - 1.0);
    worst = std::max(worst, gap);
    check.require(gap <= 1e-12, f.name() + ": Parseval gap " + fmt(gap));
    const BooleanFunction back = inverse_transform(sp);
    check.require(back.table() == f.table(), f.name() + ": inverse transform not exact");
  }
  check.notes << "max Parseval gap " << fmt(worst) << " over " << zoo.size() << " functions";
  return timed("spectral-exactness", check, start);
}

// 2. Closed-form noise correlation vs Monte Carlo within 3 sigma.
CriterionResult criterion_noise_oracle(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  RunOptions run{opt.workers};
  double worst_z = 0.0;
  std::uint64_t cell = 0;
  for (const auto& f : zoo_at_12()) {
    const Spectrum sp = transform(f);
    for (double eps : {0.1, 0.3, 0.7}) {
      const double exact = noise_correlation(sp, eps);
      const EstimatorResult mc = estimate_noise_correlation(
          f, eps, 100000, derive_seed(opt.seed, 0x201 + cell++), run);
      const double z = std::abs(mc.estimate - exact) / std::max(mc.stderr_, 1e-12);
      worst_z = std::max(worst_z, z);
      check.require(z <= 3.0, f.name() + " eps=" + fmt(eps) + ": z=" + fmt(z) + " exact=" +
                                  fmt(exact) + " mc=" + fmt(mc.estimate));
    }
  }
  check.notes << "max |z| " << fmt(worst_z) << " over 18 cells";
  return timed("noise-oracle", check, start);
}

// 3. Exact exclusion correlation vs Monte Carlo within 3 sigma.
CriterionResult criterion_exclusion_oracle(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  RunOptions run{opt.workers};
  const std::uint64_t samples = 50000;
  double worst_z = 0.0;
  std::uint64_t cell = 0;
  std::uint64_t cells = 0;

  auto test_cell = [&](const BooleanFunction& f, const Spectrum& sp, const DynamicsGraph& g,
                       double t) {
    const double exact = exact_exclusion_correlation(sp, g, t);
    const EstimatorResult mc =
        estimate_exclusion_correlation(f, g, t, samples, derive_seed(opt.seed, 0x301 + cell++), run);
    const double z = std::abs(mc.estimate - exact) / std::max(mc.stderr_, 1e-12);
    worst_z = std::max(worst_z, z);
    ++cells;
    check.require(z <= 3.0, f.name() + " " + g.family() + " t=" + fmt(t) + ": z=" + fmt(z) +
                                " exact=" + fmt(exact) + " mc=" + fmt(mc.estimate));
  };

  std::vector<BooleanFunction> fs;
  fs.push_back(make_parity(10, "all"));
  fs.push_back(make_parity(10, "first_half"));
  fs.push_back(make_dictator(10, 1));
  fs.push_back(make_count_band(10, 2));
  fs.push_back(make_tribes(2, 5));
  fs.push_back(make_flipped_pairs(5));
  for (const auto& f : fs) {
    const Spectrum sp = transform(f);
    for (const auto* family : {"complete", "path", "isolated_edges"}) {
      const DynamicsGraph g = graph_for_bits(family, 10);
      for (double t : {0.25, 1.0, 4.0}) test_cell(f, sp, g, t);
    }
  }
  const BooleanFunction maj = make_majority(9);
  const Spectrum maj_sp = transform(maj);
  for (const auto* family : {"complete", "path"}) {
    const DynamicsGraph g = graph_for_bits(family, 9);
    for (double t : {0.25, 1.0, 4.0}) test_cell(maj, maj_sp, g, t);
  }
  check.notes << "max |z| " << fmt(worst_z) << " over " << cells << " cells";
  return timed("exclusion-oracle", check, start);
}

// 4. Kernel structure: symmetric, stochastic, PSD, rate-0 eigenvector
//    uniform, and the min-eigenvalue >= 1/2 bound when e^{-kt} >= 3/4.
CriterionResult criterion_kernel_structure(const VerifyOptions&) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  std::vector<DynamicsGraph> graphs;
  graphs.push_back(complete_graph(5));
  graphs.push_back(complete_graph(8));
  graphs.push_back(path_graph(8));
  graphs.push_back(isolated_edges_graph(4));
  graphs.push_back(grid2d_graph(2));

  double worst_sym = 0.0, worst_row = 0.0, worst_psd = 0.0, worst_bound = 1.0;
  for (const auto& g : graphs) {
    check.require(g.assumption_ok(), g.family() + ": rate assumption unexpectedly violated");
    for (std::uint32_t k = 1; k <= 3 && k <= g.vertices() - 1; ++k) {
      const LevelGenerator gen(g, k);
      const LevelEigen eig = level_eigen(gen);
      check.require(std::abs(eig.rates(0)) <= 1e-10,
                    g.family() + " k=" + std::to_string(k) + ": smallest rate not 0");
      // The uniform vector must lie in the rate-0 eigenspace.
      Eigen::VectorXd uniform = Eigen::VectorXd::Constant(
          static_cast<Eigen::Index>(gen.states()), 1.0 / std::sqrt(double(gen.states())));
      Eigen::VectorXd residual = uniform;
      for (Eigen::Index l = 0; l < eig.rates.size() && eig.rates(l) <= 1e-10; ++l)
        residual -= eig.vectors.col(l).dot(uniform) * eig.vectors.col(l);
      check.require(residual.norm() <= 1e-8,
                    g.family() + " k=" + std::to_string(k) + ": uniform not conserved");

      const double t_bound = std::log(4.0 / 3.0) / k;
      for (double t : {0.1 / k, t_bound, 0.5, 2.0}) {
        const LevelKernel kernel = kernel_at(gen, t);
        const auto& P = kernel.matrix;
        worst_sym = std::max(worst_sym, (P - P.transpose()).cwiseAbs().maxCoeff());
        worst_row =
            std::max(worst_row, (P.rowwise().sum().array() - 1.0).abs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(P);
        const double min_eig = solver.eigenvalues().minCoeff();
        worst_psd = std::min(worst_psd, min_eig);
        check.require((P - P.transpose()).cwiseAbs().maxCoeff() <= 1e-10, "kernel not symmetric");
        check.require((P.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12,
                      "kernel not stochastic");
        check.require(min_eig >= -1e-10, "kernel not PSD");
        if (std::exp(-double(k) * t) >= 0.75 - 1e-12) {
          // All levels j <= k sit in the bound's regime at this t.
          for (std::uint32_t j = 1; j <= k; ++j) {
            const LevelKernel kj = j == k ? kernel : kernel_at(LevelGenerator(g, j), t);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sj(kj.matrix);
            const double me = sj.eigenvalues().minCoeff();
            worst_bound = std::min(worst_bound, me);
            check.require(me >= 0.5 - 1e-10,
                          g.family() + " level " + std::to_string(j) + " t=" + fmt(t) +
                              ": min eigenvalue " + fmt(me) + " below 1/2");
          }
        }
      }
    }
  }
  check.notes << "max asym " << fmt(worst_sym) << ", max row gap " << fmt(worst_row)
              << ", min kernel eig " << fmt(worst_psd) << ", min bounded-regime eig "
              << fmt(worst_bound);
  return timed("kernel-structure", check, start);
}

// 5. E[chi_S(eta_0) chi_S'(eta_t)] = P_t(S,S') within 3 sigma.
CriterionResult criterion_pair_correlation(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  const std::uint32_t n = 8;
  const double t = 0.75;
  const DynamicsGraph g = complete_graph(n);
  RngStream pick(derive_seed(opt.seed, 0x501));

  struct Pair {
    std::uint64_t s, sp;
    double exact;
  };
  std::vector<Pair> pairs;
  std::vector<LevelKernel> kernels;  // by level-1 index
  for (std::uint32_t k = 1; k <= 3; ++k) kernels.push_back(kernel_at(LevelGenerator(g, k), t));
  auto random_mask = [&](std::uint32_t size) {
    std::uint64_t mask = 0;
    while (static_cast<std::uint32_t>(std::popcount(mask)) < size)
      mask |= std::uint64_t{1} << pick.next_below(n);
    return mask;
  };
  for (int i = 0; i < 15; ++i) {
    const std::uint32_t size = 1 + static_cast<std::uint32_t>(pick.next_below(3));
    const std::uint64_t s = random_mask(size);
    const std::uint64_t sp = random_mask(size);
    pairs.push_back({s, sp, kernels[size - 1].entry(s, sp)});
  }
  for (int i = 0; i < 5; ++i) {
    // Mismatched sizes: the identity forces exact zero.
    const std::uint64_t s = random_mask(1 + static_cast<std::uint32_t>(pick.next_below(2)));
    std::uint64_t sp;
    do {
      sp = random_mask(1 + static_cast<std::uint32_t>(pick.next_below(3)));
    } while (std::popcount(sp) == std::popcount(s));
    pairs.push_back({s, sp, 0.0});
  }

  const std::uint64_t samples = 100000;
  const RngStream root(derive_seed(opt.seed, 0x502));
  const std::uint64_t chunks = chunk_count(samples, 1024);
  std::vector<std::vector<std::int64_t>> partial(chunks,
                                                 std::vector<std::int64_t>(pairs.size(), 0));
  for_each_chunk(samples, 1024, opt.workers, [&](const ChunkRange& range) {
    auto& acc = partial[range.index];
    for (std::uint64_t r = range.begin; r < range.end; ++r) {
      RngStream stream = root.substream(r);
      Configuration eta0(n);
      eta0.bits.fill_random(stream);
      const Configuration eta = simulate_exclusion(eta0, g, t, stream);
      const std::uint64_t m0 = eta0.bits.low64();
      const std::uint64_t mt = eta.bits.low64();
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const int chi0 = (std::popcount(m0 & pairs[p].s) & 1) ? -1 : 1;
        const int chit = (std::popcount(mt & pairs[p].sp) & 1) ? -1 : 1;
        acc[p] += chi0 * chit;
      }
    }
  });
  double worst_z = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::int64_t sum = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) sum += partial[c][p];
    const double mean = static_cast<double>(sum) / static_cast<double>(samples);
    const double se =
        std::sqrt(std::max(1e-12, 1.0 - mean * mean) / static_cast<double>(samples));
    const double z = std::abs(mean - pairs[p].exact) / se;
    worst_z = std::max(worst_z, z);
    check.require(z <= 3.0, "pair " + std::to_string(p) + ": z=" + fmt(z) + " exact=" +
                                fmt(pairs[p].exact) + " mc=" + fmt(mean));
  }
  check.notes << "max |z| " << fmt(worst_z) << " over " << pairs.size() << " pairs";
  return timed("pair-correlation", check, start);
}

// 6. Conservation: full parity has exclusion correlation exactly 1 and flip
//    probability exactly 0.
CriterionResult criterion_conservation(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  struct Case {
    DynamicsGraph g;
    std::uint32_t n;
  };
  std::vector<Case> cases;
  cases.push_back({complete_graph(8), 8});
  cases.push_back({path_graph(8), 8});
  cases.push_back({isolated_edges_graph(4), 8});
  cases.push_back({grid2d_graph(2), 4});
  for (const auto& c : cases) {
    const Spectrum sp = transform(make_parity(c.n, "all"));
    for (double t : {0.25, 1.0, 4.0}) {
      const double exact = exact_exclusion_correlation(sp, c.g, t);
      check.require(exact == 1.0, c.g.family() + " t=" + fmt(t) + ": exact correlation " +
                                      fmt(exact) + " != 1");
    }
  }
  const BooleanFunction parity10 = make_parity(10, "all");
  const EstimatorResult flip = estimate_flip_probability(
      parity10, complete_graph(10), 1.0, 1000000, derive_seed(opt.seed, 0x601),
      RunOptions{opt.workers});
  check.require(flip.estimate == 0.0,
                "parity flip probability " + fmt(flip.estimate) + " != 0 in 1e6 samples");
  check.notes << "exact correlations all 1, zero flips in 1e6 samples";
  return timed("conservation", check, start);
}

// 7. Half-parity contrast: complete-graph estimates strictly decrease over
//    n in {8,16,32}; path-graph estimate at n=32 stays >= half the n=8 one.
CriterionResult criterion_parity_contrast(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  RunOptions run{opt.workers};
  const std::uint64_t samples = 100000;
  auto estimate = [&](const char* family, std::uint32_t n, std::uint64_t salt) {
    const BooleanFunction f = make_parity(n, "first_half");
    return estimate_exclusion_correlation(f, graph_for_bits(family, n), 1.0, samples,
                                          derive_seed(opt.seed, salt), run);
  };
  const EstimatorResult c8 = estimate("complete", 8, 0x701);
  const EstimatorResult c16 = estimate("complete", 16, 0x702);
  const EstimatorResult c32 = estimate("complete", 32, 0x703);
  auto separated = [](const EstimatorResult& hi, const EstimatorResult& lo) {
    return hi.estimate - lo.estimate >
           3.0 * std::sqrt(hi.stderr_ * hi.stderr_ + lo.stderr_ * lo.stderr_);
  };
  check.require(separated(c8, c16), "complete 8 -> 16 not separated: " + fmt(c8.estimate) +
                                        " vs " + fmt(c16.estimate));
  check.require(separated(c16, c32), "complete 16 -> 32 not separated: " + fmt(c16.estimate) +
                                         " vs " + fmt(c32.estimate));
  const EstimatorResult p8 = estimate("path", 8, 0x704);
  const EstimatorResult p32 = estimate("path", 32, 0x705);
  const double slack = 3.0 * std::sqrt(p32.stderr_ * p32.stderr_ +
                                       0.25 * p8.stderr_ * p8.stderr_);
  check.require(p32.estimate >= 0.5 * p8.estimate - slack,
                "path n=32 value " + fmt(p32.estimate) + " below half of n=8 value " +
                    fmt(p8.estimate));
  check.notes << "complete " << fmt(c8.estimate) << " > " << fmt(c16.estimate) << " > "
              << fmt(c32.estimate) << "; path " << fmt(p8.estimate) << " -> "
              << fmt(p32.estimate);
  return timed("parity-graph-contrast", check, start);
}

// 8. Paired-edges cancellation: signed correlation of the conjugated
//    function strictly below the symmetric one, absolute correlations equal.
CriterionResult criterion_cancellation_pair(const VerifyOptions&) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  for (std::uint32_t m : {2u, 3u, 4u}) {
    const DynamicsGraph g = isolated_edges_graph(m);
    const Spectrum f_sp = transform(make_count_band(2 * m, 2));
    const Spectrum g_sp = transform(make_flipped_pairs(m));
    const double t = 1.0;
    const double signed_f = exact_exclusion_correlation(f_sp, g, t);
    const double signed_g = exact_exclusion_correlation(g_sp, g, t);
    const double abs_f = exact_absolute_correlation(f_sp, g, t);
    const double abs_g = exact_absolute_correlation(g_sp, g, t);
    check.require(signed_g < signed_f - 1e-9,
                  "m=" + std::to_string(m) + ": signed " + fmt(signed_g) + " !< " +
                      fmt(signed_f));
    check.require(std::abs(abs_f - abs_g) <= 1e-10,
                  "m=" + std::to_string(m) + ": absolute gap " + fmt(std::abs(abs_f - abs_g)));
    if (m == 4)
      check.notes << "m=4: signed " << fmt(signed_f) << " vs " << fmt(signed_g)
                  << ", absolute gap " << fmt(std::abs(abs_f - abs_g));
  }
  return timed("cancellation-pair", check, start);
}

// 9. Triple coupling: the Hamming identity on every sample, the conditional
//    mean formula, and the conditional variance bound.
CriterionResult criterion_triple_coupling(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;

  auto hamming_violations = [&](std::uint32_t n, double t, std::uint64_t samples,
                                std::uint64_t salt) {
    const DynamicsGraph g = complete_graph(n);
    const RngStream root(derive_seed(opt.seed, salt));
    const std::uint64_t chunks = chunk_count(samples, 1024);
    std::vector<std::uint64_t> bad(chunks, 0);
    for_each_chunk(samples, 1024, opt.workers, [&](const ChunkRange& range) {
      for (std::uint64_t r = range.begin; r < range.end; ++r) {
        RngStream stream = root.substream(r);
        const TripleSample s = triple_sample(n, t, g, stream);
        const std::int64_t lhs = s.hamming_eps_vs_exclusion();
        const std::int64_t rhs =
            std::abs(std::int64_t(s.n01_eps) - std::int64_t(s.n01_t)) +
            std::abs(std::int64_t(s.n10_eps) - std::int64_t(s.n01_t));
        const bool conserved = s.eta_t.count() == s.omega.count();
        if (lhs != rhs || !conserved) ++bad[range.index];
      }
    });
    std::uint64_t total = 0;
    for (std::uint64_t b : bad) total += b;
    return total;
  };
  const std::uint64_t bad10 = hamming_violations(10, std::log(2.0), 1000000, 0x901);
  const std::uint64_t bad100 = hamming_violations(100, 1.0, 1000000, 0x902);
  check.require(bad10 == 0, "n=10: " + std::to_string(bad10) + " Hamming violations");
  check.require(bad100 == 0, "n=100: " + std::to_string(bad100) + " Hamming violations");

  // Conditional mean at n=10, |eta_0| = 5, t = ln 2: exactly 1.25.
  const N01Report rep10 = n01_statistics(complete_graph(10), std::log(2.0), 200000,
                                         derive_seed(opt.seed, 0x903), RunOptions{opt.workers});
  bool found = false;
  for (const auto& b : rep10.buckets) {
    if (b.ones_at_start != 5) continue;
    found = true;
    const double se = std::sqrt(b.variance / static_cast<double>(b.count));
    check.require(std::abs(b.mean - 1.25) <= 3.0 * se,
                  "conditional mean " + fmt(b.mean) + " vs 1.25, se " + fmt(se));
    check.notes << "mean(N01 | ones=5) = " << fmt(b.mean) << " (target 1.25); ";
  }
  check.require(found, "bucket |eta_0| = 5 empty");

  // Conditional variance bound at n=100, t=1.
  const N01Report rep100 = n01_statistics(complete_graph(100), 1.0, 100000,
                                          derive_seed(opt.seed, 0x904), RunOptions{opt.workers});
  double worst_ratio = 0.0;
  for (const auto& b : rep100.buckets) {
    if (b.count < 50) continue;
    const double var_se = b.variance * std::sqrt(2.0 / static_cast<double>(b.count - 1));
    check.require(b.variance <= b.variance_bound + 3.0 * var_se,
                  "ones=" + std::to_string(b.ones_at_start) + ": variance " + fmt(b.variance) +
                      " above bound " + fmt(b.variance_bound));
    worst_ratio = std::max(worst_ratio, b.variance / b.variance_bound);
  }
  check.notes << "max variance/bound ratio " << fmt(worst_ratio);
  return timed("triple-coupling", check, start);
}

// 10. Binomial domination on the full 3x3x3 grid.
CriterionResult criterion_binomial_domination(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  RunOptions run{opt.workers};
  std::uint64_t salt = 0xa01;
  double worst = -1.0;
  for (std::uint32_t nv : {20u, 60u, 100u}) {
    const DynamicsGraph g = complete_graph(nv);
    for (double frac : {0.1, 0.3, 0.45}) {
      const auto k = static_cast<std::uint32_t>(std::lround(frac * nv));
      SubsetMask S(nv);
      for (std::uint32_t i = 0; i < k; ++i) S.bits.set(i, true);
      for (double t : {0.5, 1.0, 2.0}) {
        const DominationReport rep =
            binomial_domination_check(g, S, t, 100000, derive_seed(opt.seed, salt++), run);
        worst = std::max(worst, rep.max_cdf_violation);
        check.require(rep.dominated, "|V|=" + std::to_string(nv) + " |S|=" + std::to_string(k) +
                                         " t=" + fmt(t) + ": violation " +
                                         fmt(rep.max_cdf_violation) + " > band " +
                                         fmt(rep.dkw_band));
      }
    }
  }
  check.notes << "max CDF violation " << fmt(worst) << " (band "
              << fmt(std::sqrt(std::log(100.0) / (2.0 * 100000.0))) << ") over 27 cells";
  return timed("binomial-domination", check, start);
}

// 11. sum_{S >= P} fhat(S)^2 <= P(P jointly pivotal), exactly, |P| <= 3.
CriterionResult criterion_pivotal_bound(const VerifyOptions&) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  std::vector<BooleanFunction> fs = zoo_at_12();
  fs.push_back(make_iterated_majority(2));
  fs.push_back(make_flipped_pairs(6));
  fs.push_back(crossing_function(patch_build(1, 1, 2)));  // 9 sites
  std::uint64_t sets = 0;
  double worst_gap = 1.0;
  for (const auto& f : fs) {
    const std::uint32_t n = f.input_bits();
    const Spectrum sp = transform(f);
    std::vector<std::uint64_t> points;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      const int size = std::popcount(mask);
      if (size > 3) continue;
      points.push_back(mask);
    }
    for (std::uint64_t pmask : points) {
      // Superset mass: P plus any submask of its complement.
      const std::uint64_t comp = ((std::uint64_t{1} << n) - 1) & ~pmask;
      double mass = 0.0;
      std::uint64_t sub = comp;
      for (;;) {
        const double c = sp.coef[pmask | sub];
        mass += c * c;
        if (sub == 0) break;
        sub = (sub - 1) & comp;
      }
      const double jp = jointly_pivotal(f, SubsetMask::from_mask(n, pmask));
      ++sets;
      worst_gap = std::min(worst_gap, jp - mass);
      check.require(mass <= jp, f.name() + " P=" + std::to_string(pmask) + ": mass " +
                                    fmt(mass) + " > pivotal " + fmt(jp));
    }
  }
  check.notes << sets << " point sets, min slack " << fmt(worst_gap);
  return timed("pivotal-bound", check, start);
}

// 12. Percolation: self-dual crossing probability, complete-graph
//     decorrelation and switch growth, medium-range decorrelation.
CriterionResult criterion_percolation_trends(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  RunOptions run{opt.workers};

  const EstimatorResult duality =
      crossing_probability(32, 100000, derive_seed(opt.seed, 0xc01), run);
  check.require(std::abs(duality.estimate - 0.5) <= 3.0 * duality.stderr_,
                "self-dual crossing probability " + fmt(duality.estimate));
  check.notes << "P(cross) = " << fmt(duality.estimate) << "; ";

  auto separated = [](const EstimatorResult& hi, const EstimatorResult& lo) {
    return hi.estimate - lo.estimate >
           3.0 * std::sqrt(hi.stderr_ * hi.stderr_ + lo.stderr_ * lo.stderr_);
  };

  {
    std::vector<EstimatorResult> corr;
    std::uint64_t salt = 0xc11;
    for (std::int32_t n : {16, 32, 64})
      corr.push_back(
          crossing_exclusion_correlation(n, 1.0, 150000, derive_seed(opt.seed, salt++), run));
    check.require(separated(corr[0], corr[1]) && separated(corr[1], corr[2]),
                  "complete-graph crossing correlation not decreasing: " +
                      fmt(corr[0].estimate) + ", " + fmt(corr[1].estimate) + ", " +
                      fmt(corr[2].estimate));
    check.notes << "complete corr " << fmt(corr[0].estimate) << " > " << fmt(corr[1].estimate)
                << " > " << fmt(corr[2].estimate) << "; ";
  }

  {
    std::vector<EstimatorResult> sw;
    std::uint64_t salt = 0xc21;
    for (std::int32_t n : {16, 32, 64})
      sw.push_back(crossing_switch_count(n, 1.0, 300, derive_seed(opt.seed, salt++), run));
    check.require(separated(sw[1], sw[0]) && separated(sw[2], sw[1]),
                  "switch counts not increasing: " + fmt(sw[0].estimate) + ", " +
                      fmt(sw[1].estimate) + ", " + fmt(sw[2].estimate));
    check.notes << "switches " << fmt(sw[0].estimate) << " < " << fmt(sw[1].estimate) << " < "
                << fmt(sw[2].estimate) << "; ";
  }

  {
    const auto rows =
        medium_range_experiment({32, 64, 128}, 0.5, 1.0, 100000,
                                derive_seed(opt.seed, 0xc31), run, 300000);
    check.require(separated(rows[0].exclusion, rows[1].exclusion) &&
                      separated(rows[1].exclusion, rows[2].exclusion),
                  "medium-range correlation not decreasing: " + fmt(rows[0].exclusion.estimate) +
                      ", " + fmt(rows[1].exclusion.estimate) + ", " +
                      fmt(rows[2].exclusion.estimate));
    check.require(separated(rows[0].iid, rows[1].iid) && separated(rows[1].iid, rows[2].iid),
                  "iid baseline not decreasing");
    check.notes << "medium-range corr " << fmt(rows[0].exclusion.estimate) << " > "
                << fmt(rows[1].exclusion.estimate) << " > " << fmt(rows[2].exclusion.estimate)
                << " (iid " << fmt(rows[0].iid.estimate) << " > " << fmt(rows[1].iid.estimate)
                << " > " << fmt(rows[2].iid.estimate) << ")";
  }
  return timed("percolation-trends", check, start);
}

// 13. Byte-identical CSV/JSON outputs for any worker count.
CriterionResult criterion_determinism(const VerifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  Check check;
  SweepSpec spec;
  spec.function_family = "majority";
  spec.graph_family = "complete";
  spec.n_list = {5, 9};
  spec.t_list = {0.5, 1.0};
  spec.samples = 2000;
  spec.seed = derive_seed(opt.seed, 0xd01);

  auto render = [&](int workers) {
    SweepSpec s = spec;
    s.workers = workers;
    const auto rows = sensitivity_sweep(s);
    const CsvTable table = sweep_table(rows);
    const std::uint64_t hash = fnv1a64("determinism-check");
    const auto dir = std::filesystem::path(opt.scratch_dir);
    const auto csv_path = dir / ("xsense_det_w" + std::to_string(workers) + ".csv");
    write_csv(table, csv_path.string(), hash, s.seed);
    const std::string json_text = sweep_json(rows, hash, s.seed);
    return std::pair<std::string, std::string>(read_text_file(csv_path.string()), json_text);
  };

  const auto [csv1, json1] = render(1);
  const auto [csv4, json4] = render(4);
  const auto [csv1b, json1b] = render(1);
  check.require(csv1 == csv4, "CSV differs between 1 and 4 workers");
  check.require(json1 == json4, "JSON differs between 1 and 4 workers");
  check.require(csv1 == csv1b && json1 == json1b, "repeat run with same seed differs");
  check.notes << "CSV/JSON byte-identical across worker counts and repeats";
  return timed("determinism", check, start);
}

}  // namespace

std::vector<CriterionResult> run_verification(const VerifyOptions& opt,
                                              void (*progress)(const CriterionResult&)) {
  using Runner = CriterionResult (*)(const VerifyOptions&);
  const std::pair<const char*, Runner> criteria[] = {
      {"spectral-exactness", &criterion_spectral_exactness},
      {"noise-oracle", &criterion_noise_oracle},
      {"exclusion-oracle", &criterion_exclusion_oracle},
      {"kernel-structure", &criterion_kernel_structure},
      {"pair-correlation", &criterion_pair_correlation},
      {"conservation", &criterion_conservation},
      {"parity-graph-contrast", &criterion_parity_contrast},
      {"cancellation-pair", &criterion_cancellation_pair},
      {"triple-coupling", &criterion_triple_coupling},
      {"binomial-domination", &criterion_binomial_domination},
      {"pivotal-bound", &criterion_pivotal_bound},
      {"percolation-trends", &criterion_percolation_trends},
      {"determinism", &criterion_determinism},
  };
  std::vector<CriterionResult> results;
  for (const auto& [name, runner] : criteria) {
    if (!opt.only.empty() && std::string(name).find(opt.only) == std::string::npos) continue;
    results.push_back(runner(opt));
    if (progress) progress(results.back());
  }
  return results;
}

std::vector<CriterionResult> run_verification(const VerifyOptions& opt) {
  return run_verification(opt, nullptr);
}

}  // namespace xsense
