#include <doctest.h>

#include <cmath>

#include "xsense/estimators.hpp"
#include "xsense/kernel.hpp"
#include "xsense/spectral.hpp"

using namespace xsense;

namespace {
double zscore(const EstimatorResult& r, double target) {
  return std::abs(r.estimate - target) / std::max(r.stderr_, 1e-12);
}
}  // namespace

TEST_CASE("exclusion correlation: conservation and t = 0") {
  const BooleanFunction parity = make_parity(8, "all");
  const DynamicsGraph g = complete_graph(8);
  const EstimatorResult r = estimate_exclusion_correlation(parity, g, 1.0, 20000, 1);
  // Every replica contributes f(eta_0)^2 = 1; only the mean term is noisy.
  CHECK(std::abs(r.estimate - 1.0) <= 4 * r.stderr_ + 1e-3);
  CHECK(r.naive_estimate <= 1.0);

  const Spectrum band = transform(make_count_band(8, 2));
  const EstimatorResult r0 = estimate_exclusion_correlation(make_count_band(8, 2), g, 0.0,
                                                            50000, 2);
  CHECK(zscore(r0, 1.0 - band.coef[0] * band.coef[0]) <= 3.0);
}

TEST_CASE("exclusion correlation: cross-oracle against the exact kernel") {
  // majority is a symmetric function of the conserved particle count, so
  // its correlation is pinned at 1 - fhat(empty)^2; both routes agree.
  const BooleanFunction maj = make_majority(3);
  const Spectrum maj_sp = transform(maj);
  const DynamicsGraph g3 = complete_graph(3);
  CHECK(exact_exclusion_correlation(maj_sp, g3, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  const EstimatorResult maj_mc = estimate_exclusion_correlation(maj, g3, 1.0, 100000, 3);
  CHECK(zscore(maj_mc, 1.0) <= 3.0);

  // tribes is not symmetric, so the value is nontrivial.
  const BooleanFunction tr = make_tribes(2, 4);
  const Spectrum tr_sp = transform(tr);
  const DynamicsGraph g8 = complete_graph(8);
  const double exact = exact_exclusion_correlation(tr_sp, g8, 1.0);
  CHECK(exact > 0.01);
  CHECK(exact < 1.0 - tr_sp.coef[0] * tr_sp.coef[0] - 0.01);
  const EstimatorResult mc = estimate_exclusion_correlation(tr, g8, 1.0, 100000, 33);
  CHECK(zscore(mc, exact) <= 3.0);
}

TEST_CASE("noise correlation estimates") {
  // eps = 1: fully fresh sample, zero correlation.
  const EstimatorResult indep = estimate_noise_correlation(make_majority(9), 1.0, 40000, 4);
  CHECK(zscore(indep, 0.0) <= 3.0);

  // Full parity at eps = 1/2 on 6 bits: (1/2)^6.
  const EstimatorResult par =
      estimate_noise_correlation(make_parity(6, "all"), 0.5, 100000, 5);
  CHECK(zscore(par, std::pow(0.5, 6)) <= 3.0);

  // majority(3) at eps = 1/2: 0.40625 from the closed form.
  const EstimatorResult maj = estimate_noise_correlation(make_majority(3), 0.5, 100000, 6);
  CHECK(zscore(maj, 0.40625) <= 3.0);

  CHECK_THROWS_AS(estimate_noise_correlation(make_majority(3), -0.1, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_noise_correlation(make_majority(3), 0.5, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("snps trajectory matches the eps time change") {
  const BooleanFunction f = make_majority(9);
  const double t = 0.7;
  const double eps = 1.0 - std::exp(-t);
  const EstimatorResult direct = estimate_noise_correlation(f, eps, 60000, 7);
  const EstimatorResult traj = estimate_snps_correlation(f, t, 60000, 8);
  const double se = std::sqrt(direct.stderr_ * direct.stderr_ + traj.stderr_ * traj.stderr_);
  CHECK(std::abs(direct.estimate - traj.estimate) <= 3 * se);
}

TEST_CASE("flip probability") {
  const BooleanFunction parity = make_parity(8, "all");
  const DynamicsGraph g8 = complete_graph(8);
  CHECK(estimate_flip_probability(parity, g8, 1.0, 20000, 9).estimate == 0.0);
  CHECK(estimate_flip_probability(make_majority(9), complete_graph(9), 0.0, 5000, 10).estimate ==
        0.0);

  // Dictator on complete(5): P(flip) = (1 - P_t(x,x))/2 with
  // P_t(x,x) = 1/5 + (4/5) e^{-t}.
  const double expected = (1.0 - (0.2 + 0.8 * std::exp(-1.0))) / 2.0;
  const EstimatorResult r =
      estimate_flip_probability(make_dictator(5, 1), complete_graph(5), 1.0, 100000, 11);
  CHECK(zscore(r, expected) <= 3.0);
}

TEST_CASE("conditional mean profile") {
  const DynamicsGraph g3 = complete_graph(3);

  // Constant function: all conditional means equal, variance 0.
  const BooleanFunction constant =
      BooleanFunction::from_table(3, std::vector<std::int8_t>(8, 1), "const");
  const ConditionalMeanProfile flat = conditional_mean_profile(constant, g3, 0.5, 50, 10, 12);
  CHECK(flat.raw_variance == 0.0);
  CHECK(flat.debiased_variance == 0.0);
  CHECK(flat.mean_of_means == 1.0);

  // Full parity: the conditional mean is f(eta_0) itself, variance 1.
  const ConditionalMeanProfile par =
      conditional_mean_profile(make_parity(3, "all"), g3, 0.5, 3000, 8, 13);
  CHECK(std::abs(par.debiased_variance - 1.0) <= 0.1);

  // majority(3) at time t: the variance of the conditional mean is the
  // exact correlation at 2t (conditioning applies the half-time semigroup
  // to each side).
  const BooleanFunction maj = make_majority(3);
  const Spectrum sp = transform(maj);
  const double t = 0.5;
  const double target = exact_exclusion_correlation(sp, g3, 2 * t);
  const ConditionalMeanProfile prof = conditional_mean_profile(maj, g3, t, 4000, 32, 14);
  CHECK(std::abs(prof.debiased_variance - target) <= 3 * prof.debiased_stderr);
  CHECK_THROWS_AS(conditional_mean_profile(maj, g3, 0.5, 1, 10, 1), std::invalid_argument);
}

TEST_CASE("determinism across worker counts and seeds") {
  const BooleanFunction f = make_majority(9);
  const DynamicsGraph g = complete_graph(9);
  RunOptions serial{1}, threaded{3};
  const EstimatorResult a = estimate_exclusion_correlation(f, g, 1.0, 5000, 99, serial);
  const EstimatorResult b = estimate_exclusion_correlation(f, g, 1.0, 5000, 99, threaded);
  CHECK(a.estimate == b.estimate);
  CHECK(a.stderr_ == b.stderr_);
  CHECK(a.naive_estimate == b.naive_estimate);
  const EstimatorResult c = estimate_exclusion_correlation(f, g, 1.0, 5000, 100, serial);
  CHECK(a.estimate != c.estimate);
}

TEST_CASE("sensitivity sweep") {
  SweepSpec spec;
  spec.function_family = "parity";
  spec.zoo.support = "first_half";
  spec.graph_family = "complete";
  spec.n_list = {8, 12};
  spec.t_list = {0.0, 1.0};
  spec.samples = 20000;
  spec.seed = 77;
  const auto rows = sensitivity_sweep(spec);
  REQUIRE(rows.size() == 4);
  // The t = 0 column estimates 1 - E[f]^2 = 1 for mean-zero parity.
  for (const auto& row : rows)
    if (row.level == 0.0) CHECK(zscore(row.result, 1.0) <= 3.0);
  // Same spec reruns byte-identically.
  const auto again = sensitivity_sweep(spec);
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].result.estimate == again[i].result.estimate);

  SweepSpec bad = spec;
  bad.n_list.clear();
  CHECK_THROWS_AS(sensitivity_sweep(bad), std::invalid_argument);
  SweepSpec iid = spec;
  iid.graph_family = "iid";
  iid.eps_list = {0.5};
  const auto iid_rows = sensitivity_sweep(iid);
  CHECK(iid_rows.size() == 2);
  CHECK(iid_rows[0].graph == "iid");
}
