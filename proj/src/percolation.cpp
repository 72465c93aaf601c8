#include "xsense/percolation.hpp"

#include <cmath>
#include <cstdio>

namespace xsense {

namespace {
// Triangular adjacency in the square-grid embedding: right, up, and the
// (+1,+1) diagonal enumerate each edge once.
constexpr std::int32_t kHalfOffsets[3][2] = {{1, 0}, {0, 1}, {1, 1}};
}  // namespace

std::vector<SiteCoord> LatticePatch::coordinates() const {
  std::vector<SiteCoord> out;
  out.reserve(sites());
  for (std::int32_t y = 0; y < height; ++y)
    for (std::int32_t x = 0; x < width; ++x)
      out.push_back({static_cast<double>(x), static_cast<double>(y)});
  return out;
}

std::vector<std::uint32_t> LatticePatch::left_boundary() const {
  std::vector<std::uint32_t> out;
  for (std::int32_t y = 0; y < height; ++y) out.push_back(index(0, y));
  return out;
}

std::vector<std::uint32_t> LatticePatch::right_boundary() const {
  std::vector<std::uint32_t> out;
  for (std::int32_t y = 0; y < height; ++y) out.push_back(index(width - 1, y));
  return out;
}

std::uint32_t LatticePatch::degree(std::int32_t x, std::int32_t y) const {
  std::uint32_t d = 0;
  for (const auto& off : kHalfOffsets) {
    if (in_patch(x + off[0], y + off[1])) ++d;
    if (in_patch(x - off[0], y - off[1])) ++d;
  }
  return d;
}

void LatticePatch::export_csv(const std::string& path, const std::string& header_comment) const {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("LatticePatch::export_csv: cannot open " + path);
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "site,x,y\n");
  for (std::int32_t y = 0; y < height; ++y)
    for (std::int32_t x = 0; x < width; ++x) std::fprintf(fp, "%u,%d,%d\n", index(x, y), x, y);
  std::fclose(fp);
}

LatticePatch patch_build(double a, double b, std::int32_t n) {
  if (a <= 0 || b <= 0 || n < 1) throw std::invalid_argument("patch_build: need a,b > 0, n >= 1");
  LatticePatch patch;
  patch.width = static_cast<std::int32_t>(std::floor(a * n)) + 1;
  patch.height = static_cast<std::int32_t>(std::floor(b * n)) + 1;
  if (patch.width < 2 || patch.height < 1)
    throw std::invalid_argument("patch_build: empty patch");
  return patch;
}

std::uint32_t CrossingScratch::find(std::uint32_t s) {
  while (parent_[s] != s) {
    parent_[s] = parent_[parent_[s]];
    s = parent_[s];
  }
  return s;
}

void CrossingScratch::unite(std::uint32_t a, std::uint32_t b) {
  a = find(a);
  b = find(b);
  if (a != b) parent_[a] = b;
}

bool CrossingScratch::left_right_connected(const LatticePatch& patch, const Bits& open_sites) {
  return window_left_right_connected(patch, patch, 0, 0, open_sites);
}

bool CrossingScratch::window_left_right_connected(const LatticePatch& window,
                                                  const LatticePatch& padded,
                                                  std::int32_t origin_x, std::int32_t origin_y,
                                                  const Bits& padded_open) {
  const std::uint32_t n_sites = static_cast<std::uint32_t>(window.sites());
  const std::uint32_t left = n_sites;
  const std::uint32_t right = n_sites + 1;
  parent_.resize(n_sites + 2);
  for (std::uint32_t s = 0; s < n_sites + 2; ++s) parent_[s] = s;

  auto open_at = [&](std::int32_t x, std::int32_t y) {
    return padded_open.get(padded.index(origin_x + x, origin_y + y));
  };

  for (std::int32_t y = 0; y < window.height; ++y) {
    for (std::int32_t x = 0; x < window.width; ++x) {
      if (!open_at(x, y)) continue;
      const std::uint32_t s = window.index(x, y);
      if (x == 0) unite(s, left);
      if (x == window.width - 1) unite(s, right);
      // Predecessor neighbors only, so each adjacency is examined once.
      if (x > 0 && open_at(x - 1, y)) unite(s, window.index(x - 1, y));
      if (y > 0 && open_at(x, y - 1)) unite(s, window.index(x, y - 1));
      if (x > 0 && y > 0 && open_at(x - 1, y - 1)) unite(s, window.index(x - 1, y - 1));
    }
  }
  return find(left) == find(right);
}

bool crossing(const LatticePatch& patch, const Configuration& omega) {
  if (omega.size() != static_cast<std::uint32_t>(patch.sites()))
    throw std::invalid_argument("crossing: configuration width != site count");
  thread_local CrossingScratch scratch;
  return scratch.left_right_connected(patch, omega.bits);
}

BooleanFunction crossing_function(const LatticePatch& patch, std::uint32_t tab_cap) {
  const auto shared = std::make_shared<LatticePatch>(patch);
  auto pred = [shared](const Bits& omega) {
    thread_local CrossingScratch scratch;
    return scratch.left_right_connected(*shared, omega) ? 1 : -1;
  };
  const std::string name = "crossing(" + std::to_string(patch.width) + "x" +
                           std::to_string(patch.height) + ")";
  const auto n = static_cast<std::uint32_t>(patch.sites());
  if (n <= tab_cap) return BooleanFunction::tabulate(n, pred, name, tab_cap);
  return BooleanFunction::from_predicate(n, pred, name);
}

BooleanFunction coarse_majority_crossing(std::uint32_t n, std::uint32_t subbox) {
  if (subbox % 2 != 1) throw std::invalid_argument("coarse_majority_crossing: subbox side even");
  if (n == 0 || n % subbox != 0)
    throw std::invalid_argument("coarse_majority_crossing: subbox must tile the box");
  const std::uint32_t cells = n / subbox;
  auto pred = [n, subbox, cells](const Bits& omega) {
    // Majority per subbox, then 4-neighbor left-right crossing of the
    // coarse grid.
    std::vector<std::uint8_t> coarse(static_cast<std::size_t>(cells) * cells, 0);
    const std::uint32_t threshold = (subbox * subbox) / 2 + 1;
    for (std::uint32_t cy = 0; cy < cells; ++cy)
      for (std::uint32_t cx = 0; cx < cells; ++cx) {
        std::uint32_t ones = 0;
        for (std::uint32_t dy = 0; dy < subbox; ++dy)
          for (std::uint32_t dx = 0; dx < subbox; ++dx)
            ones += omega.get((cy * subbox + dy) * n + cx * subbox + dx);
        coarse[cy * cells + cx] = ones >= threshold ? 1 : 0;
      }
    // BFS from the left column over majority-1 cells.
    std::vector<std::uint32_t> stack;
    std::vector<std::uint8_t> seen(coarse.size(), 0);
    for (std::uint32_t cy = 0; cy < cells; ++cy)
      if (coarse[cy * cells]) {
        stack.push_back(cy * cells);
        seen[cy * cells] = 1;
      }
    while (!stack.empty()) {
      const std::uint32_t cell = stack.back();
      stack.pop_back();
      const std::uint32_t cx = cell % cells, cy = cell / cells;
      if (cx == cells - 1) return 1;
      const std::int64_t moves[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      for (const auto& mv : moves) {
        const std::int64_t nx = static_cast<std::int64_t>(cx) + mv[0];
        const std::int64_t ny = static_cast<std::int64_t>(cy) + mv[1];
        if (nx < 0 || ny < 0 || nx >= cells || ny >= cells) continue;
        const std::uint32_t t = static_cast<std::uint32_t>(ny) * cells +
                                static_cast<std::uint32_t>(nx);
        if (coarse[t] && !seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
    return -1;
  };
  const std::string name = "coarse_majority_crossing(n=" + std::to_string(n) +
                           ",s=" + std::to_string(subbox) + ")";
  const std::uint32_t bits = n * n;
  if (bits <= 20) return BooleanFunction::tabulate(bits, pred, name);
  return BooleanFunction::from_predicate(bits, pred, name);
}

std::uint32_t transfer_count(const PermutationPath& path, const SubsetMask& E,
                             const SubsetMask& F) {
  E.bits.require_same_width(F.bits);
  if (E.bits.count_and(F.bits) != 0)
    throw std::invalid_argument("transfer_count: E and F must be disjoint");
  const SubsetMask image = transport(E, path);
  return image.bits.count_and(F.bits);
}

bool MediumRangeSetup::window_crossing(const Bits& padded_config,
                                       CrossingScratch& scratch) const {
  return scratch.window_left_right_connected(window, padded, pad, pad, padded_config);
}

MediumRangeSetup make_medium_range_setup(std::int32_t n, double alpha, double pad_factor,
                                         std::size_t edge_budget) {
  if (n < 2) throw std::invalid_argument("make_medium_range_setup: n too small");
  if (alpha <= 0 || alpha >= 1)
    throw std::invalid_argument("make_medium_range_setup: alpha must lie in (0,1)");
  MediumRangeSetup setup;
  setup.n = n;
  setup.alpha = alpha;
  setup.radius = std::pow(static_cast<double>(n), alpha);
  setup.rate = std::pow(static_cast<double>(n), -2.0 * alpha);
  setup.pad = static_cast<std::int32_t>(std::ceil(pad_factor * setup.radius));
  setup.window = patch_build(1.0, 1.0, n);
  setup.padded.width = setup.window.width + 2 * setup.pad;
  setup.padded.height = setup.window.height + 2 * setup.pad;
  setup.graph = std::make_shared<DynamicsGraph>(
      medium_range_graph(setup.padded.coordinates(), setup.radius, setup.rate, edge_budget));
  return setup;
}

EstimatorResult travel_escape_frequency(const MediumRangeSetup& setup, const SubsetMask& S,
                                        const SquareRegion& Q, double t, std::uint64_t samples,
                                        std::uint64_t seed, const RunOptions& opt) {
  if (S.size() != static_cast<std::uint32_t>(setup.padded.sites()))
    throw std::invalid_argument("travel_escape_frequency: mask width != padded sites");
  const auto coords = setup.padded.coordinates();
  for (std::uint32_t i = 0; i < S.size(); ++i)
    if (S.bits.get(i) && !Q.contains(coords[i].x, coords[i].y))
      throw std::invalid_argument("travel_escape_frequency: S not inside Q");
  const SquareRegion big = Q.doubled();
  const DynamicsGraph& g = *setup.graph;
  return run_mean_replicas(samples, seed, opt, [&](RngStream& stream) {
    const SubsetMask st = simulate_transport(S, g, t, stream);
    for (std::uint32_t i = 0; i < st.size(); ++i)
      if (st.bits.get(i) && !big.contains(coords[i].x, coords[i].y)) return 1.0;
    return 0.0;
  });
}

std::vector<MediumRangeRow> medium_range_experiment(const std::vector<std::int32_t>& n_list,
                                                    double alpha, double t,
                                                    std::uint64_t samples, std::uint64_t seed,
                                                    const RunOptions& opt,
                                                    std::uint64_t iid_samples) {
  if (n_list.empty()) throw std::invalid_argument("medium_range_experiment: empty grid");
  if (iid_samples == 0) iid_samples = samples;
  std::vector<MediumRangeRow> rows;
  std::uint64_t row_index = 0;
  for (std::int32_t n : n_list) {
    const MediumRangeSetup setup = make_medium_range_setup(n, alpha);
    const DynamicsGraph& g = *setup.graph;
    const auto padded_sites = static_cast<std::uint32_t>(setup.padded.sites());

    MediumRangeRow row;
    row.n = n;
    row.exclusion = run_pair_replicas(
        samples, derive_seed(seed, row_index++), opt, [&](RngStream& stream) {
          thread_local CrossingScratch scratch;
          Bits config(padded_sites);
          config.fill_random(stream);
          const double x = setup.window_crossing(config, scratch) ? 1.0 : -1.0;
          stream_events(g, t, stream,
                        [&](std::uint32_t u, std::uint32_t v) { config.swap_bits(u, v); });
          const double y = setup.window_crossing(config, scratch) ? 1.0 : -1.0;
          return std::pair<double, double>(x, y);
        });

    // i.i.d. baseline on the window alone at the time-changed noise level.
    const BooleanFunction f = crossing_function(setup.window, 0);
    const double eps = 1.0 - std::exp(-t);
    row.iid = estimate_noise_correlation(f, eps, iid_samples, derive_seed(seed, row_index++), opt);
    rows.push_back(std::move(row));
  }
  return rows;
}

EstimatorResult crossing_exclusion_correlation(std::int32_t n, double t, std::uint64_t samples,
                                               std::uint64_t seed, const RunOptions& opt) {
  const LatticePatch patch = patch_build(1.0, 1.0, n);
  const BooleanFunction f = crossing_function(patch, 0);
  const DynamicsGraph g = complete_graph(static_cast<std::uint32_t>(patch.sites()));
  return estimate_exclusion_correlation(f, g, t, samples, seed, opt);
}

EstimatorResult crossing_switch_count(std::int32_t n, double horizon, std::uint64_t samples,
                                      std::uint64_t seed, const RunOptions& opt) {
  const LatticePatch patch = patch_build(1.0, 1.0, n);
  const BooleanFunction f = crossing_function(patch, 0);
  const auto g = std::make_shared<DynamicsGraph>(
      complete_graph(static_cast<std::uint32_t>(patch.sites())));
  return run_mean_replicas(samples, seed, opt, [f, g, horizon](RngStream& stream) {
    return static_cast<double>(count_switches(f, *g, horizon, stream).switches);
  });
}

EstimatorResult crossing_probability(std::int32_t n, std::uint64_t samples, std::uint64_t seed,
                                     const RunOptions& opt) {
  const LatticePatch patch = patch_build(1.0, 1.0, n);
  const auto sites = static_cast<std::uint32_t>(patch.sites());
  return run_mean_replicas(samples, seed, opt, [patch, sites](RngStream& stream) {
    thread_local CrossingScratch scratch;
    Bits config(sites);
    config.fill_random(stream);
    return scratch.left_right_connected(patch, config) ? 1.0 : 0.0;
  });
}

EstimatorResult subbox_flip_probability(std::uint32_t s, double t, std::uint32_t margin,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const RunOptions& opt) {
  if (s % 2 != 1) throw std::invalid_argument("subbox_flip_probability: s must be odd");
  const std::uint32_t side = s + 2 * margin;
  const auto g = std::make_shared<DynamicsGraph>(grid2d_graph(side));
  const std::uint32_t threshold = (s * s) / 2 + 1;
  auto center_majority = [s, side, margin, threshold](const Bits& config) {
    std::uint32_t ones = 0;
    for (std::uint32_t y = 0; y < s; ++y)
      for (std::uint32_t x = 0; x < s; ++x)
        ones += config.get((y + margin) * side + (x + margin));
    return ones >= threshold;
  };
  return run_mean_replicas(samples, seed, opt, [=](RngStream& stream) {
    Bits config(side * side);
    config.fill_random(stream);
    const bool before = center_majority(config);
    stream_events(*g, t, stream,
                  [&](std::uint32_t u, std::uint32_t v) { config.swap_bits(u, v); });
    return center_majority(config) != before ? 1.0 : 0.0;
  });
}

}  // namespace xsense
