#include <doctest.h>

#include <cmath>
#include <map>

#include "xsense/couplings.hpp"
#include "xsense/influence.hpp"

using namespace xsense;

TEST_CASE("triple coupling: structural identities") {
  RngStream rng(41);
  const std::uint32_t n = 12;
  const DynamicsGraph g = complete_graph(n);
  bool saw_matched = false;
  for (int i = 0; i < 20000; ++i) {
    const TripleSample s = triple_sample(n, 0.8, g, rng);
    const std::uint32_t lhs = s.hamming_eps_vs_exclusion();
    const std::uint32_t rhs =
        static_cast<std::uint32_t>(std::abs(int(s.n01_eps) - int(s.n01_t))) +
        static_cast<std::uint32_t>(std::abs(int(s.n10_eps) - int(s.n01_t)));
    REQUIRE(lhs == rhs);
    REQUIRE(s.eta_t.count() == s.omega.count());
    if (s.n01_eps == s.n10_eps && s.n10_eps == s.n01_t) {
      saw_matched = true;
      CHECK(s.omega_eps == s.eta_t);  // matched counters glue the marginals
    }
  }
  CHECK(saw_matched);
  CHECK_THROWS_AS(triple_sample(12, 0.8, path_graph(12), rng), std::invalid_argument);
  CHECK_THROWS_AS(triple_sample(12, 0.0, g, rng), std::invalid_argument);
}

TEST_CASE("triple coupling: resampling marginal") {
  // (omega, omega^eps) disagreement count is Bin(n, eps/2).
  RngStream rng(43);
  const std::uint32_t n = 100;
  const double t = 1.0;
  const double eps = 1.0 - std::exp(-t);
  const DynamicsGraph g = complete_graph(n);
  const int reps = 20000;
  double total = 0.0;
  for (int i = 0; i < reps; ++i) {
    const TripleSample s = triple_sample(n, t, g, rng);
    total += s.omega.count_xor(s.omega_eps);
  }
  const double mean = total / reps;
  const double expected = n * eps / 2.0;
  const double se = std::sqrt(n * (eps / 2) * (1 - eps / 2) / reps);
  CHECK(std::abs(mean - expected) <= 3 * se);
}

TEST_CASE("triple coupling: exclusion marginal against a direct simulation") {
  // E[f(eta_0) f(eta_t)] from the coupling matches an independent
  // simulation for majority(9).
  RngStream rng(47);
  const std::uint32_t n = 9;
  const double t = 0.6;
  const DynamicsGraph g = complete_graph(n);
  const BooleanFunction f = make_majority(n);
  const int reps = 40000;
  double coupled = 0.0, direct = 0.0;
  for (int i = 0; i < reps; ++i) {
    const TripleSample s = triple_sample(n, t, g, rng);
    coupled += f.evaluate_bits(s.omega) * f.evaluate_bits(s.eta_t);
    Configuration omega(n);
    omega.bits.fill_random(rng);
    const Configuration eta = simulate_exclusion(omega, g, t, rng);
    direct += f.evaluate_bits(omega.bits) * f.evaluate_bits(eta.bits);
  }
  const double se = std::sqrt(2.0 / reps);  // bound for +-1 products
  CHECK(std::abs(coupled / reps - direct / reps) <= 3 * se);
}

TEST_CASE("triple coupling: flipped positions are exchangeable") {
  // Conditioned on the counters, the raised zero sits uniformly among the
  // zeros; chi-square over its rank.
  RngStream rng(53);
  const std::uint32_t n = 8;
  const DynamicsGraph g = complete_graph(n);
  std::uint64_t rank_counts[8] = {};
  std::uint64_t total = 0;
  while (total < 8000) {
    const TripleSample s = triple_sample(n, 0.9, g, rng);
    if (s.omega.count() != 4 || s.n01_eps != 1) continue;
    const auto zeros = s.omega.positions_of(false);
    for (std::size_t r = 0; r < zeros.size(); ++r)
      if (s.omega_eps.get(zeros[r])) {
        ++rank_counts[r];
        ++total;
      }
  }
  const double expected = total / 4.0;
  double chi2 = 0.0;
  for (int r = 0; r < 4; ++r)
    chi2 += (rank_counts[r] - expected) * (rank_counts[r] - expected) / expected;
  CHECK(chi2 < 21.1);  // chi^2_3 at p ~ 1e-4
}

TEST_CASE("n01_statistics: conditional mean formula") {
  const N01Report rep = n01_statistics(complete_graph(10), std::log(2.0), 60000, 55);
  bool found = false;
  for (const auto& b : rep.buckets) {
    CHECK(b.predicted_mean ==
          doctest::Approx(0.5 * b.ones_at_start * (10.0 - b.ones_at_start) / 10.0));
    if (b.ones_at_start == 5) {
      found = true;
      CHECK(b.predicted_mean == 1.25);
      const double se = std::sqrt(b.variance / double(b.count));
      CHECK(std::abs(b.mean - 1.25) <= 3 * se);
    }
  }
  CHECK(found);

  // t = 0: no exchanges at all.
  const N01Report zero = n01_statistics(complete_graph(10), 0.0, 2000, 56);
  for (const auto& b : zero.buckets) {
    CHECK(b.mean == 0.0);
    CHECK(b.variance == 0.0);
  }
}

TEST_CASE("binomial_domination_check: epsilon formula and domination") {
  const DominationReport trivial =
      binomial_domination_check(complete_graph(100), SubsetMask::from_mask(100, (1ull << 10) - 1), 0.0, 2000,
                   57);
  CHECK(trivial.eps == 0.0);
  CHECK(trivial.dominated);

  SubsetMask S(100);
  for (std::uint32_t i = 0; i < 10; ++i) S.bits.set(i, true);
  const DominationReport rep = binomial_domination_check(complete_graph(100), S, 1.0, 20000, 58);
  CHECK(rep.eps == doctest::Approx(0.5274936358).epsilon(1e-9));
  CHECK(rep.dominated);

  SubsetMask S60(60);
  for (std::uint32_t i = 0; i < 20; ++i) S60.bits.set(i, true);
  CHECK(binomial_domination_check(complete_graph(60), S60, 2.0, 20000, 59).dominated);

  SubsetMask half(10);
  for (std::uint32_t i = 0; i < 5; ++i) half.bits.set(i, true);
  CHECK_THROWS_AS(binomial_domination_check(complete_graph(10), half, 1.0, 100, 1), std::invalid_argument);
}

TEST_CASE("updown_path: structure") {
  RngStream rng(61);
  const Bits zero4 = Bits::from_mask(4, 0b0000);
  const UpDownPath still = updown_path(zero4, 0, 0, rng);
  CHECK(still.flips.empty());
  CHECK(still.endpoint() == zero4);
  CHECK(updown_path(zero4, 4, 0, rng).endpoint().count() == 4);

  for (int trial = 0; trial < 200; ++trial) {
    Bits start(10);
    start.fill_random(rng);
    const std::uint32_t zeros = 10 - start.count();
    const std::uint32_t m01 = static_cast<std::uint32_t>(rng.next_below(zeros + 1));
    const std::uint32_t m10 = static_cast<std::uint32_t>(rng.next_below(start.count() + 1));
    const UpDownPath path = updown_path(start, m01, m10, rng);
    // No coordinate changes twice.
    std::vector<bool> seen(10, false);
    for (std::uint32_t pos : path.flips) {
      CHECK_FALSE(seen[pos]);
      seen[pos] = true;
    }
    // The first m01 raise, the rest lower original ones.
    for (std::uint32_t i = 0; i < path.flips.size(); ++i)
      CHECK(start.get(path.flips[i]) == (i >= m01));
    CHECK(path.endpoint().count() == start.count() + m01 - m10);
    CHECK(path.visited().size() == path.flips.size() + 1);
  }
  CHECK_THROWS_AS(updown_path(zero4, 5, 0, rng), std::invalid_argument);
  CHECK_THROWS_AS(updown_path(zero4, 0, 1, rng), std::invalid_argument);
}

TEST_CASE("updown_path: uniform over moves") {
  // start 0011 with one up and one down move: four equally likely
  // endpoints.
  RngStream rng(67);
  const Bits start = Bits::from_mask(4, 0b0011);
  std::map<std::uint64_t, int> counts;
  const int reps = 8000;
  for (int i = 0; i < reps; ++i)
    ++counts[updown_path(start, 1, 1, rng).endpoint().low64()];
  REQUIRE(counts.size() == 4);
  const double expected = reps / 4.0;
  double chi2 = 0.0;
  for (const auto& [mask, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.1);
}

TEST_CASE("boundary_hit_rate: endpoint law matches the coupling") {
  const BooleanFunction f = make_majority(9);
  const BoundaryHitReport rep = boundary_hit_rate(f, 0.7, 30000, 68);
  // The endpoint pair is distributed as (omega^eps, eta_t), so the two flip
  // frequencies agree.
  const double se = std::sqrt(2.0 * 0.25 / 30000.0);
  CHECK(std::abs(rep.endpoint_flip - rep.direct_flip) <= 3 * se);
  CHECK(rep.hit_rate >= rep.endpoint_flip);
  // Generous-constant form of the boundary bound.
  CHECK(rep.hit_rate <= 0.1 + 2.0 * std::sqrt(rep.ii));
  CHECK(rep.ii == influences(f).ii);
}
