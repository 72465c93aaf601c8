#include <doctest.h>

#include <bit>
#include <cstdio>

#include "xsense/influence.hpp"
#include "xsense/rng.hpp"
#include "xsense/zoo.hpp"

using namespace xsense;

namespace {

// Independent brute-force influence: direct double loop over inputs.
double oracle_influence(const BooleanFunction& f, std::uint32_t i) {
  const std::uint64_t size = std::uint64_t{1} << f.input_bits();
  std::uint64_t disagree = 0;
  for (std::uint64_t mask = 0; mask < size; ++mask)
    if (f.value_at(mask) != f.value_at(mask ^ (std::uint64_t{1} << i))) ++disagree;
  return static_cast<double>(disagree) / static_cast<double>(size);
}

}  // namespace

TEST_CASE("zoo: parity conventions") {
  const BooleanFunction full = make_parity(4, "all");
  CHECK(full.value_at(0b0000) == 1);  // even count of ones -> +1
  CHECK(full.value_at(0b0111) == -1);
  CHECK(full.value_at(0b1111) == 1);

  const BooleanFunction half = make_parity(4, "first_half");
  // chi_{1,2}: sign from bits 1 and 2 only.
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    const int expected = (std::popcount(mask & 0b0011ull) % 2 == 0) ? 1 : -1;
    CHECK(half.value_at(mask) == expected);
  }
}

TEST_CASE("zoo: count_band rule") {
  const BooleanFunction f = make_count_band(8, 2);
  CHECK(f.value_at(0) == 1);
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    const int ones = std::popcount(mask);
    CHECK(f.value_at(mask) == (((ones / 2) % 2 == 0) ? 1 : -1));
  }
}

TEST_CASE("zoo: count_band antisymmetric parameters give mean zero") {
  // n = -1 mod 2w: complementation flips the sign, so the mean vanishes.
  for (auto [n, w] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{{7, 2}, {9, 5}, {11, 3}}) {
    const BooleanFunction f = make_count_band(n, w);
    std::int64_t sum = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) sum += f.value_at(mask);
    CHECK(sum == 0);
  }
}

TEST_CASE("zoo: tribes and iterated majority evaluate") {
  const BooleanFunction tr = make_tribes(2, 3);
  CHECK(tr.input_bits() == 6);
  CHECK(tr.value_at(0b000011) == 1);   // first tribe full
  CHECK(tr.value_at(0b000101) == -1);  // no full tribe
  const BooleanFunction it = make_iterated_majority(2);
  CHECK(it.input_bits() == 9);
  CHECK(it.value_at(0b111111111) == 1);
  CHECK(it.value_at(0) == -1);
  // Per-triple majorities 1,1,0 -> top majority 1.
  CHECK(it.value_at(0b000011011) == 1);
}

TEST_CASE("zoo: flipped_pairs matches band composed with the flip set") {
  const std::uint32_t m = 3;
  const BooleanFunction g = make_flipped_pairs(m);
  const BooleanFunction f = make_count_band(2 * m, 2);
  const SubsetMask B = flipped_pairs_mask(m);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (2 * m)); ++mask) {
    const Configuration omega = Configuration::from_mask(2 * m, mask);
    const Configuration flipped = flip(omega, B);
    CHECK(g.value_at(mask) == f.value_at(flipped.bits.low64()));
  }
}

TEST_CASE("zoo: invalid parameters") {
  CHECK_THROWS_AS(zoo_build("nope", ZooParams{}), std::invalid_argument);
  CHECK_THROWS_AS(make_majority(4), std::invalid_argument);
  CHECK_THROWS_AS(make_parity(5, "first_half"), std::invalid_argument);
  CHECK_THROWS_AS(make_dictator(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_dictator(3, 4), std::invalid_argument);
}

TEST_CASE("influences: dictator, parity, majority") {
  const InfluenceReport dict = influences(make_dictator(3, 1));
  CHECK(dict.influence[0] == 1.0);
  CHECK(dict.influence[1] == 0.0);
  CHECK(dict.influence[2] == 0.0);
  CHECK(dict.ii == 1.0);

  const InfluenceReport par = influences(make_parity(4, "all"));
  for (double i : par.influence) CHECK(i == 1.0);
  CHECK(par.ii == 4.0);

  const BooleanFunction maj = make_majority(3);
  const InfluenceReport rep = influences(maj);
  for (std::uint32_t i = 0; i < 3; ++i) {
    CHECK(rep.influence[i] == 0.5);
    CHECK(rep.influence[i] == oracle_influence(maj, i));
  }
  CHECK(rep.ii == 0.75);
}

TEST_CASE("influences: edge boundary identity is exact") {
  RngStream rng(7);
  for (const auto& f : {make_majority(7), make_tribes(2, 4), make_count_band(9, 3),
                        make_iterated_majority(2)}) {
    const InfluenceReport rep = influences(f);
    const double scaled = std::ldexp(rep.total, static_cast<int>(f.input_bits()) - 1);
    CHECK(static_cast<double>(rep.edge_boundary) == scaled);
    double ii = 0.0;
    for (double i : rep.influence) ii += i * i;
    CHECK(rep.ii == ii);
  }
}

TEST_CASE("influences: predicate form refuses exact op, MC fallback works") {
  const BooleanFunction pred = BooleanFunction::from_predicate(
      30, [](const Bits& b) { return b.get(0) ? 1 : -1; }, "big dictator");
  CHECK_THROWS_AS(influences(pred), NotTabulatedError);
  RngStream rng(11);
  const InfluenceReport mc = influences_mc(pred, 4000, rng);
  CHECK(mc.influence[0] == doctest::Approx(1.0));
  CHECK(mc.influence[1] == doctest::Approx(0.0));
  CHECK(mc.stderrs.size() == 30);
}

TEST_CASE("flip: examples and involution") {
  const auto c = [](std::uint64_t m) { return Configuration::from_mask(4, m); };
  const auto s = [](std::uint64_t m) { return SubsetMask::from_mask(4, m); };
  CHECK(flip(c(0b0000), s(0b0000)).bits.low64() == 0b0000);
  CHECK(flip(c(0b1010), s(0b1111)).bits.low64() == 0b0101);
  CHECK(flip(c(0b1100), s(0b0110)).bits.low64() == 0b1010);
  CHECK_THROWS_AS(flip(c(0), SubsetMask::from_mask(5, 0)), std::invalid_argument);

  RngStream rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng.next_below(80));
    Configuration omega(n);
    omega.bits.fill_random(rng);
    SubsetMask B(n);
    B.bits.fill_random(rng);
    CHECK(flip(flip(omega, B), B).bits == omega.bits);
  }
}

TEST_CASE("is_monotone") {
  CHECK(is_monotone(make_majority(3)));
  CHECK(is_monotone(make_dictator(4, 2)));
  CHECK(is_monotone(make_tribes(2, 3)));
  CHECK_FALSE(is_monotone(make_parity(2, "all")));
  CHECK_FALSE(is_monotone(make_count_band(6, 2)));
}

TEST_CASE("jointly_pivotal: dictator and majority") {
  const BooleanFunction dict = make_dictator(3, 1);
  CHECK(jointly_pivotal(dict, SubsetMask::from_mask(3, 0b001)) == 1.0);
  CHECK(jointly_pivotal(dict, SubsetMask::from_mask(3, 0b010)) == 0.0);
  // majority(3) on {1,2}: both complementary assignments induce AND / OR,
  // each depending on both bits.
  CHECK(jointly_pivotal(make_majority(3), SubsetMask::from_mask(3, 0b011)) == 1.0);
  CHECK_THROWS_AS(jointly_pivotal(dict, SubsetMask::from_mask(3, 0)), std::invalid_argument);
}

TEST_CASE("jointly_pivotal: singleton equals influence exactly") {
  for (const auto& f : {make_majority(5), make_tribes(2, 3), make_count_band(6, 2),
                        make_parity(6, "first_half")}) {
    const InfluenceReport rep = influences(f);
    for (std::uint32_t i = 0; i < f.input_bits(); ++i) {
      const double jp = jointly_pivotal(f, SubsetMask::from_mask(f.input_bits(),
                                                                 std::uint64_t{1} << i));
      CHECK(jp == rep.influence[i]);
    }
  }
}

TEST_CASE("bias_profile") {
  const BooleanFunction dict = make_dictator(5, 3);
  for (double p : {0.0, 0.25, 0.5, 0.9, 1.0})
    CHECK(bias_profile(dict, p) == doctest::Approx(2 * p - 1).epsilon(1e-12));

  CHECK(bias_profile(make_majority(3), 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(bias_profile(dict, 1.5), std::invalid_argument);

  // Monotone functions have nondecreasing profiles.
  for (const auto& f : {make_majority(5), make_tribes(2, 3), make_iterated_majority(2)}) {
    double prev = -2.0;
    for (int step = 0; step <= 20; ++step) {
      const double value = bias_profile(f, step / 20.0);
      CHECK(value >= prev - 1e-12);
      prev = value;
    }
  }
}

TEST_CASE("truth table file round trip") {
  const BooleanFunction f = make_tribes(2, 3);
  const std::string path = "/tmp/xsense_test_table.xsbf";
  save_truth_table(f, path);
  const BooleanFunction g = load_truth_table(path);
  CHECK(g.input_bits() == f.input_bits());
  CHECK(g.table() == f.table());
  std::remove(path.c_str());
}

TEST_CASE("configuration invariants") {
  CHECK_THROWS_AS(Bits(0), std::invalid_argument);
  CHECK_THROWS_AS(Bits::from_mask(3, 0b1000), std::invalid_argument);
  Bits b(70);
  b.set(69, true);
  CHECK(b.count() == 1);
  b.swap_bits(69, 0);
  CHECK(b.get(0));
  CHECK_FALSE(b.get(69));
}
