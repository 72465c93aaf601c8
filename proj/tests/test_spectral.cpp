#include <doctest.h>

#include <bit>
#include <cmath>

#include "xsense/spectral.hpp"
#include "xsense/zoo.hpp"

using namespace xsense;

namespace {

// Independent oracle: coefficients by direct inner products.
double oracle_coefficient(const BooleanFunction& f, std::uint64_t S) {
  const std::uint64_t size = std::uint64_t{1} << f.input_bits();
  std::int64_t sum = 0;
  for (std::uint64_t mask = 0; mask < size; ++mask) {
    const int chi = (std::popcount(mask & S) % 2 == 0) ? 1 : -1;
    sum += f.value_at(mask) * chi;
  }
  return static_cast<double>(sum) / static_cast<double>(size);
}

}  // namespace

TEST_CASE("transform: point masses") {
  const Spectrum parity = transform(make_parity(3, "all"));
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    CHECK(parity.coef[mask] == (mask == 0b111 ? 1.0 : 0.0));

  // The monotone dictator is minus the character at its bit.
  const Spectrum dict = transform(make_dictator(3, 1));
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    CHECK(dict.coef[mask] == (mask == 0b001 ? -1.0 : 0.0));
}

TEST_CASE("transform: majority(3) against brute-force inner products") {
  const BooleanFunction maj = make_majority(3);
  const Spectrum sp = transform(maj);
  for (std::uint64_t mask = 0; mask < 8; ++mask)
    CHECK(sp.coef[mask] == oracle_coefficient(maj, mask));
  // Singletons -1/2, the full triple +1/2 under this character convention.
  CHECK(sp.coef[0b001] == -0.5);
  CHECK(sp.coef[0b010] == -0.5);
  CHECK(sp.coef[0b100] == -0.5);
  CHECK(sp.coef[0b111] == 0.5);
  CHECK(sp.coef[0] == 0.0);
}

TEST_CASE("transform: Parseval and exact round trip across the zoo") {
  const std::vector<BooleanFunction> fs = {
      make_parity(10, "all"),  make_parity(10, "first_half"), make_dictator(10, 2),
      make_majority(9),        make_tribes(2, 5),             make_count_band(10, 2),
      make_iterated_majority(2), make_flipped_pairs(5)};
  for (const auto& f : fs) {
    const Spectrum sp = transform(f);
    CHECK(std::abs(sp.parseval_sum() - 1.0) <= 1e-12);
    const BooleanFunction back = inverse_transform(sp);
    CHECK(back.table() == f.table());
  }
}

TEST_CASE("transform refuses predicate-form functions") {
  const BooleanFunction pred = BooleanFunction::from_predicate(
      30, [](const Bits& b) { return b.get(0) ? 1 : -1; }, "pred");
  CHECK_THROWS_AS(transform(pred), NotTabulatedError);
}

TEST_CASE("count_band symmetric parameters have exact zero mean") {
  CHECK(transform(make_count_band(7, 2)).coef[0] == 0.0);
  CHECK(transform(make_count_band(11, 3)).coef[0] == 0.0);
}

TEST_CASE("level_energy") {
  const Spectrum parity = transform(make_parity(4, "all"));
  CHECK(parity.level_energy(4) == 1.0);
  CHECK(parity.level_energy(2) == 0.0);
  CHECK_THROWS_AS(parity.level_energy(5), std::invalid_argument);

  const Spectrum maj = transform(make_majority(3));
  CHECK(maj.level_energy(1) == 0.75);
  CHECK(maj.level_energy(3) == 0.25);
}

TEST_CASE("noise_correlation") {
  const Spectrum parity = transform(make_parity(4, "all"));
  CHECK(noise_correlation(parity, 0.5) == doctest::Approx(0.0625).epsilon(1e-12));
  for (double eps : {0.0, 0.2, 0.9})
    CHECK(noise_correlation(parity, eps) ==
          doctest::Approx(std::pow(1 - eps, 4)).epsilon(1e-12));

  const Spectrum maj = transform(make_majority(3));
  CHECK(noise_correlation(maj, 0.5) == doctest::Approx(0.40625).epsilon(1e-12));
  // eps = 0 gives the full non-constant mass.
  CHECK(noise_correlation(maj, 0.0) == doctest::Approx(1.0 - maj.coef[0] * maj.coef[0]));
  CHECK_THROWS_AS(noise_correlation(maj, 1.5), std::invalid_argument);

  // Nonincreasing in eps.
  const Spectrum band = transform(make_count_band(8, 2));
  double prev = 2.0;
  for (int step = 0; step <= 10; ++step) {
    const double value = noise_correlation(band, step / 10.0);
    CHECK(value <= prev + 1e-15);
    CHECK(value >= -1e-15);
    prev = value;
  }
}

TEST_CASE("flip_conjugate") {
  const Spectrum dict = transform(make_dictator(3, 1));
  const Spectrum same = flip_conjugate(dict, SubsetMask::from_mask(3, 0));
  CHECK(same.coef == dict.coef);
  const Spectrum flipped = flip_conjugate(dict, SubsetMask::from_mask(3, 0b001));
  CHECK(flipped.coef[0b001] == 1.0);  // sign flip of the -1 coefficient

  // The paired-edges function: conjugation of the spectrum equals the
  // spectrum of the composed function, coefficient by coefficient.
  const std::uint32_t m = 3;
  const Spectrum f_sp = transform(make_count_band(2 * m, 2));
  const Spectrum g_sp = transform(make_flipped_pairs(m));
  const Spectrum conj = flip_conjugate(f_sp, flipped_pairs_mask(m));
  for (std::size_t i = 0; i < conj.coef.size(); ++i) CHECK(conj.coef[i] == g_sp.coef[i]);

  // Parseval is preserved exactly.
  CHECK(conj.parseval_sum() == f_sp.parseval_sum());
}

TEST_CASE("disjoint_mass") {
  const Spectrum maj = transform(make_majority(5));
  CHECK(disjoint_mass(maj, SubsetMask::from_mask(5, 0)) ==
        doctest::Approx(maj.parseval_sum()));
  CHECK(disjoint_mass(maj, SubsetMask::from_mask(5, 0b11111)) ==
        doctest::Approx(maj.coef[0] * maj.coef[0]));

  // Antitone under inclusion.
  RngStream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t t1 = rng.next_below(32);
    const std::uint64_t t2 = t1 | rng.next_below(32);
    CHECK(disjoint_mass(maj, SubsetMask::from_mask(5, t1)) >=
          disjoint_mass(maj, SubsetMask::from_mask(5, t2)) - 1e-15);
  }
}

TEST_CASE("spectral sampling: point masses and majority frequencies") {
  RngStream rng(17);
  const SpectralSampler dict(transform(make_dictator(4, 2)));
  for (int i = 0; i < 32; ++i) CHECK(dict.draw(rng).subset.bits.low64() == 0b0010);

  const SpectralSampler parity(transform(make_parity(4, "all")));
  for (int i = 0; i < 32; ++i) CHECK(parity.draw(rng).subset.bits.low64() == 0b1111);

  // majority(3): each singleton has mass 1/4, the triple 1/4.
  const SpectralSampler maj(transform(make_majority(3)));
  std::uint64_t counts[8] = {};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[maj.draw(rng).subset.bits.low64()];
  const double se = std::sqrt(0.25 * 0.75 / draws);
  for (std::uint64_t mask : {0b001ull, 0b010ull, 0b100ull, 0b111ull}) {
    const double freq = static_cast<double>(counts[mask]) / draws;
    CHECK(std::abs(freq - 0.25) <= 3 * se);
  }
  CHECK(counts[0] == 0);
  CHECK(counts[0b011] == 0);
}

TEST_CASE("spectrum csv export") {
  const Spectrum sp = transform(make_dictator(2, 1));
  const std::string path = "/tmp/xsense_test_spectrum.csv";
  export_spectrum_csv(sp, path, "test");
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  REQUIRE(fp != nullptr);
  char line[128];
  CHECK(std::fgets(line, sizeof(line), fp) != nullptr);  // comment
  CHECK(std::fgets(line, sizeof(line), fp) != nullptr);
  CHECK(std::string(line) == "mask,size,coefficient\n");
  std::fclose(fp);
  std::remove(path.c_str());
}
