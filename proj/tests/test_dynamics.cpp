#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <map>

#include "xsense/dynamics.hpp"
#include "xsense/zoo.hpp"

using namespace xsense;

TEST_CASE("graph families") {
  const DynamicsGraph complete = complete_graph(4);
  CHECK(complete.vertices() == 4);
  CHECK(complete.edge_count() == 6);
  CHECK(complete.rate(0) == 0.25);
  CHECK(complete.assumption_ok());  // 1/4 <= 1/3

  const DynamicsGraph path = path_graph(3);
  CHECK(path.edge_count() == 2);
  CHECK(path.rate(0) == 0.5);
  CHECK(path.assumption_ok());  // 1/2 <= 1/2

  const DynamicsGraph iso = isolated_edges_graph(2);
  CHECK(iso.vertices() == 4);
  CHECK(iso.edge_count() == 2);
  CHECK(iso.rate(0) == 1.0);
  CHECK(iso.assumption_ok());

  const DynamicsGraph grid = grid2d_graph(3);
  CHECK(grid.vertices() == 9);
  CHECK(grid.edge_count() == 12);
  CHECK(grid.rate(0) == 0.25);
  CHECK(grid.max_degree() == 4);

  CHECK_THROWS_AS(graph_build("unknown", GraphParams{4}), std::invalid_argument);
  CHECK_THROWS_AS(complete_graph(1), std::invalid_argument);
  CHECK_THROWS_AS(DynamicsGraph(3, {{0, 0}}, 1.0, "loop"), std::invalid_argument);
  CHECK_THROWS_AS(DynamicsGraph(3, {{0, 1}, {1, 0}}, 1.0, "dup"), std::invalid_argument);
}

TEST_CASE("sample_path: empty horizon and Poisson counts") {
  RngStream rng(101);
  const DynamicsGraph g = complete_graph(100);
  CHECK(sample_path(g, 0.0, rng).events.empty());
  CHECK_THROWS_AS(sample_path(g, -1.0, rng), std::invalid_argument);

  // Superposition mean: R*t = (100*99/2)*(1/100) = 49.5 per unit time.
  const int reps = 10000;
  double total = 0.0;
  for (int i = 0; i < reps; ++i) total += sample_path(g, 1.0, rng).events.size();
  const double mean = total / reps;
  const double se = std::sqrt(49.5 / reps);  // Poisson variance = mean
  CHECK(std::abs(mean - 49.5) <= 3 * se);

  // Single edge at rate 1/2: P(no event by 1) = e^{-1/2}.
  const DynamicsGraph tiny = path_graph(2);
  int empty = 0;
  for (int i = 0; i < reps; ++i) empty += sample_path(tiny, 1.0, rng).events.empty();
  const double p = std::exp(-0.5);
  CHECK(std::abs(empty / double(reps) - p) <= 3 * std::sqrt(p * (1 - p) / reps));
}

TEST_CASE("evolve: examples and conservation") {
  PermutationPath empty;
  const Configuration omega = Configuration::from_mask(2, 0b01);
  CHECK(evolve(omega, empty).bits.low64() == 0b01);

  PermutationPath single;
  single.horizon = 1.0;
  single.events.push_back({0.5, 0, 1});
  CHECK(evolve(omega, single).bits.low64() == 0b10);

  RngStream rng(7);
  const DynamicsGraph g = complete_graph(12);
  for (int trial = 0; trial < 100; ++trial) {
    Configuration start(12);
    start.bits.fill_random(rng);
    const PermutationPath path = sample_path(g, 2.0, rng);
    const Configuration end = evolve(start, path);
    CHECK(end.ones() == start.ones());
  }
}

TEST_CASE("transport: fixed points and indicator consistency") {
  RngStream rng(13);
  const DynamicsGraph g = complete_graph(10);
  const PermutationPath path = sample_path(g, 1.5, rng);
  SubsetMask empty(10), full(10);
  for (std::uint32_t i = 0; i < 10; ++i) full.bits.set(i, true);
  CHECK(transport(empty, path).bits.count() == 0);
  CHECK(transport(full, path).bits.count() == 10);

  // evolve(1_S, p) = 1_{transport(S, p)} with this orientation pairing.
  for (int trial = 0; trial < 100; ++trial) {
    SubsetMask S(10);
    S.bits.fill_random(rng);
    const PermutationPath p = sample_path(g, 1.0, rng);
    const Configuration moved = evolve(Configuration(S.bits), p);
    const SubsetMask image = transport(S, p);
    CHECK(moved.bits == image.bits);
    CHECK(image.cardinality() == S.cardinality());
  }
}

TEST_CASE("transport symmetry of the kernel") {
  // P(pi_t(S) = S') = P(pi_t(S') = S), checked empirically.
  RngStream rng(19);
  const DynamicsGraph g = complete_graph(6);
  const SubsetMask S = SubsetMask::from_mask(6, 0b000011);
  const SubsetMask T = SubsetMask::from_mask(6, 0b110000);
  const int reps = 40000;
  int fwd = 0, bwd = 0;
  for (int i = 0; i < reps; ++i) {
    if (simulate_transport(S, g, 0.8, rng).bits == T.bits) ++fwd;
    if (simulate_transport(T, g, 0.8, rng).bits == S.bits) ++bwd;
  }
  const double pf = fwd / double(reps), pb = bwd / double(reps);
  const double se = std::sqrt((pf * (1 - pf) + pb * (1 - pb)) / reps);
  CHECK(std::abs(pf - pb) <= 3 * std::max(se, 1e-4));
}

TEST_CASE("uniform stationarity of the exclusion flow") {
  // From a uniform start the time-t state is uniform: chi-square over all
  // 16 states at n = 4.
  RngStream rng(23);
  const DynamicsGraph g = complete_graph(4);
  const int reps = 100000;
  std::uint64_t counts[16] = {};
  for (int i = 0; i < reps; ++i) {
    Configuration omega(4);
    omega.bits.fill_random(rng);
    const Configuration eta = simulate_exclusion(omega, g, 0.7, rng);
    ++counts[eta.bits.low64()];
  }
  const double expected = reps / 16.0;
  double chi2 = 0.0;
  for (std::uint64_t c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 45.0);  // chi^2_15 at p ~ 1e-4
}

TEST_CASE("snps") {
  RngStream rng(29);
  Configuration omega(64);
  omega.bits.fill_random(rng);
  CHECK(snps(omega, 0.0, rng).bits == omega.bits);
  CHECK_THROWS_AS(snps(omega, 1.2, rng), std::invalid_argument);

  // Expected disagreement count n*eps/2.
  const std::uint32_t n = 10000;
  Configuration big(n);
  big.bits.fill_random(rng);
  const int reps = 200;
  double total = 0.0;
  for (int i = 0; i < reps; ++i) total += big.bits.count_xor(snps(big, 0.3, rng).bits);
  const double mean = total / reps;
  const double var_one = n * 0.15 * 0.85;
  CHECK(std::abs(mean - 1500.0) <= 3 * std::sqrt(var_one / reps));

  // eps = 1: fresh fair sample, ones count near n/2.
  double ones = 0.0;
  for (int i = 0; i < reps; ++i) ones += snps(big, 1.0, rng).ones();
  CHECK(std::abs(ones / reps - n / 2.0) <= 3 * std::sqrt(n / 4.0 / reps));
}

TEST_CASE("count_switches") {
  RngStream rng(31);
  const DynamicsGraph g = complete_graph(8);

  // Constant function: never switches.
  const BooleanFunction constant =
      BooleanFunction::from_table(8, std::vector<std::int8_t>(256, 1), "const");
  for (int i = 0; i < 20; ++i) CHECK(count_switches(constant, g, 1.0, rng).switches == 0);

  // Full parity: conserved along every exclusion path.
  const BooleanFunction parity = make_parity(8, "all");
  for (int i = 0; i < 50; ++i) CHECK(count_switches(parity, g, 2.0, rng).switches == 0);

  // Dictator switches exactly when its tracked bit changes value: replay
  // the same stream (uniform start, then the event sequence) and count.
  const BooleanFunction dict = make_dictator(8, 3);
  for (int trial = 0; trial < 20; ++trial) {
    RngStream a(777, trial);
    RngStream b(777, trial);
    const TrajectoryStats stats = count_switches(dict, g, 1.5, a);
    Configuration omega(8);
    omega.bits.fill_random(b);
    bool value = omega.bits.get(2);
    std::uint64_t bit_changes = 0;
    stream_events(g, 1.5, b, [&](std::uint32_t u, std::uint32_t v) {
      omega.bits.swap_bits(u, v);
      if (omega.bits.get(2) != value) {
        ++bit_changes;
        value = omega.bits.get(2);
      }
    });
    CHECK(stats.switches == bit_changes);
  }
}

TEST_CASE("medium_range_graph geometry") {
  // Sites on the integer grid: interior neighbor count approximates the
  // disk area pi r^2, and the per-site swap rate deg * n^{-2a} stays O(1).
  for (std::int32_t n : {16, 32}) {
    const double alpha = 0.5;
    const double radius = std::pow(double(n), alpha);
    const double rate = std::pow(double(n), -2 * alpha);
    std::vector<SiteCoord> sites;
    const std::int32_t side = n + 1;
    for (std::int32_t y = 0; y < side; ++y)
      for (std::int32_t x = 0; x < side; ++x) sites.push_back({double(x), double(y)});
    const DynamicsGraph g = medium_range_graph(sites, radius, rate);
    CHECK_FALSE(g.assumption_ok());

    std::vector<std::uint32_t> degree(sites.size(), 0);
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      ++degree[g.edge(e).u];
      ++degree[g.edge(e).v];
    }
    const std::uint32_t center =
        static_cast<std::uint32_t>((side / 2) * side + side / 2);
    const double disk = 3.14159265358979 * radius * radius;
    CHECK(degree[center] > 0.7 * disk);
    CHECK(degree[center] < 1.3 * disk);
    const double per_site_rate = degree[center] * rate;
    CHECK(per_site_rate > 2.0);
    CHECK(per_site_rate < 4.5);
  }
}

TEST_CASE("graph and path csv export") {
  const DynamicsGraph g = path_graph(3);
  g.export_csv("/tmp/xsense_test_graph.csv", "edges");
  RngStream rng(9);
  const PermutationPath p = sample_path(g, 2.0, rng);
  p.export_csv("/tmp/xsense_test_path.csv");
  std::FILE* fp = std::fopen("/tmp/xsense_test_graph.csv", "rb");
  REQUIRE(fp != nullptr);
  char line[64];
  CHECK(std::fgets(line, sizeof(line), fp) != nullptr);
  CHECK(std::fgets(line, sizeof(line), fp) != nullptr);
  CHECK(std::string(line) == "u,v,rate\n");
  std::fclose(fp);
  std::remove("/tmp/xsense_test_graph.csv");
  std::remove("/tmp/xsense_test_path.csv");
}

TEST_CASE("paths are reproducible from their stream") {
  const DynamicsGraph g = complete_graph(6);
  RngStream a(42, 5), b(42, 5);
  const PermutationPath p1 = sample_path(g, 3.0, a);
  const PermutationPath p2 = sample_path(g, 3.0, b);
  REQUIRE(p1.events.size() == p2.events.size());
  for (std::size_t i = 0; i < p1.events.size(); ++i) {
    CHECK(p1.events[i].time == p2.events[i].time);
    CHECK(p1.events[i].u == p2.events[i].u);
    CHECK(p1.events[i].v == p2.events[i].v);
  }
  // Distinct substreams diverge.
  RngStream c = RngStream(42).substream(1);
  RngStream d = RngStream(42).substream(2);
  CHECK(c.next_u64() != d.next_u64());
}
