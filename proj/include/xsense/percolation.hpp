#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "xsense/dynamics.hpp"
#include "xsense/estimators.hpp"

namespace xsense {

/// Sites of the triangular lattice inside [0, a*n] x [0, b*n], realized as
/// the square grid with a (+1,+1) diagonal per cell; interior sites have
/// the 6-neighbor adjacency of the triangular lattice. Site (x, y) has
/// index y*width + x; the left/right boundaries are the x = 0 and
/// x = width-1 columns.
struct LatticePatch {
  std::int32_t width = 0;
  std::int32_t height = 0;

  std::int32_t sites() const { return width * height; }
  std::uint32_t index(std::int32_t x, std::int32_t y) const {
    return static_cast<std::uint32_t>(y * width + x);
  }
  bool in_patch(std::int32_t x, std::int32_t y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  std::vector<SiteCoord> coordinates() const;
  std::vector<std::uint32_t> left_boundary() const;
  std::vector<std::uint32_t> right_boundary() const;
  std::uint32_t degree(std::int32_t x, std::int32_t y) const;

  void export_csv(const std::string& path, const std::string& header_comment = "") const;
};

LatticePatch patch_build(double a, double b, std::int32_t n);

/// Reusable union-find workspace; one per replica/thread.
class CrossingScratch {
 public:
  bool left_right_connected(const LatticePatch& patch, const Bits& open_sites);
  /// Crossing of a window inside a larger (padded) patch; `origin_x/y` place
  /// the window in padded coordinates and the configuration indexes the
  /// padded patch.
  bool window_left_right_connected(const LatticePatch& window, const LatticePatch& padded,
                                   std::int32_t origin_x, std::int32_t origin_y,
                                   const Bits& padded_open);

 private:
  std::uint32_t find(std::uint32_t s);
  void unite(std::uint32_t a, std::uint32_t b);
  std::vector<std::uint32_t> parent_;
};

/// Left-to-right crossing by open sites under the 6-neighbor rule.
bool crossing(const LatticePatch& patch, const Configuration& omega);

/// f = 2 * I_{crossing} - 1, tabulated when the patch is small enough for
/// spectral work.
BooleanFunction crossing_function(const LatticePatch& patch, std::uint32_t tab_cap = 20);

/// Crossings on majority: partition the side-n square grid (Z^2, 4-neighbor
/// at both scales) into subboxes of odd side `subbox`, take the majority in
/// each, and ask for a left-right crossing of majority-1 subboxes.
/// subbox = 1 reduces to plain site crossing of the square grid.
BooleanFunction coarse_majority_crossing(std::uint32_t n, std::uint32_t subbox);

/// |{x in E : pi_t(x) in F}| for disjoint E, F.
std::uint32_t transfer_count(const PermutationPath& path, const SubsetMask& E,
                             const SubsetMask& F);

/// Medium-range exclusion on a padded patch: the crossing window is
/// [0,n]^2, the dynamics runs on the window padded by pad = ceil(2 n^alpha)
/// sites per side (all site pairs within Euclidean distance n^alpha, each at
/// rate n^{-2 alpha}).
struct MediumRangeSetup {
  std::int32_t n = 0;
  double alpha = 0.0;
  double radius = 0.0;
  double rate = 0.0;
  std::int32_t pad = 0;
  LatticePatch window;
  LatticePatch padded;
  std::shared_ptr<const DynamicsGraph> graph;

  bool window_crossing(const Bits& padded_config, CrossingScratch& scratch) const;
};

MediumRangeSetup make_medium_range_setup(std::int32_t n, double alpha,
                                         double pad_factor = 2.0,
                                         std::size_t edge_budget = 40000000);

struct SquareRegion {
  double x0 = 0, y0 = 0, side = 0;
  bool contains(double x, double y) const {
    return x >= x0 && y >= y0 && x <= x0 + side && y <= y0 + side;
  }
  SquareRegion doubled() const {  // concentric, twice the side
    return SquareRegion{x0 - side / 2, y0 - side / 2, 2 * side};
  }
};

/// Fraction of runs in which transport(S) leaves 2Q. S must sit inside Q.
EstimatorResult travel_escape_frequency(const MediumRangeSetup& setup, const SubsetMask& S,
                                        const SquareRegion& Q, double t, std::uint64_t samples,
                                        std::uint64_t seed, const RunOptions& opt = {});

struct MediumRangeRow {
  std::int32_t n = 0;
  EstimatorResult exclusion;  // crossing correlation under medium-range dynamics
  EstimatorResult iid;        // SNPS baseline at eps = 1 - e^{-t}
};

/// iid_samples = 0 reuses `samples` for the baseline column (the baseline
/// replicas are far cheaper, so trend checks may want more of them).
std::vector<MediumRangeRow> medium_range_experiment(const std::vector<std::int32_t>& n_list,
                                                    double alpha, double t,
                                                    std::uint64_t samples, std::uint64_t seed,
                                                    const RunOptions& opt = {},
                                                    std::uint64_t iid_samples = 0);

/// Crossing correlation on [0,n]^2 under complete-graph dynamics on the
/// patch sites (rate 1/|sites|).
EstimatorResult crossing_exclusion_correlation(std::int32_t n, double t, std::uint64_t samples,
                                               std::uint64_t seed, const RunOptions& opt = {});

/// Mean number of crossing-state switches over [0, horizon] under
/// complete-graph dynamics.
EstimatorResult crossing_switch_count(std::int32_t n, double horizon, std::uint64_t samples,
                                      std::uint64_t seed, const RunOptions& opt = {});

/// Monte Carlo crossing probability at p = 1/2 on the rhombic (a = b)
/// patch, which is exactly 1/2 by self-duality.
EstimatorResult crossing_probability(std::int32_t n, std::uint64_t samples, std::uint64_t seed,
                                     const RunOptions& opt = {});

/// P(majority of the center s x s box flips by time t) under
/// nearest-neighbor exclusion on the box padded by `margin`; the decay of
/// this probability in s is the mechanism that blocks 2-NN sensitivity for
/// coarse-grained functions.
EstimatorResult subbox_flip_probability(std::uint32_t s, double t, std::uint32_t margin,
                                        std::uint64_t samples, std::uint64_t seed,
                                        const RunOptions& opt = {});

}  // namespace xsense
