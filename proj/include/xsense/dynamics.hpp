#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xsense/bits.hpp"
#include "xsense/boolfn.hpp"
#include "xsense/rng.hpp"

namespace xsense {

struct GraphEdge {
  std::uint32_t u, v;
};

struct SiteCoord {
  double x, y;
};

/// (G_n, alpha_n): vertices plus rate-weighted edges. Immutable after
/// construction; the alias table for non-uniform rates is built once.
class DynamicsGraph {
 public:
  /// Uniform rate on every edge.
  DynamicsGraph(std::uint32_t vertices, std::vector<GraphEdge> edges, double rate,
                std::string family);
  /// Per-edge rates.
  DynamicsGraph(std::uint32_t vertices, std::vector<GraphEdge> edges, std::vector<double> rates,
                std::string family);

  std::uint32_t vertices() const { return nv_; }
  std::size_t edge_count() const { return edges_.size(); }
  const GraphEdge& edge(std::size_t e) const { return edges_[e]; }
  double rate(std::size_t e) const { return rates_.empty() ? uniform_rate_ : rates_[e]; }
  double total_rate() const { return total_rate_; }
  std::uint32_t max_degree() const { return max_degree_; }
  const std::string& family() const { return family_; }

  /// Whether the rates satisfy alpha <= 1/maxdeg (uniform-rate form of the
  /// standing assumption). Reported, never enforced: the medium-range
  /// dynamics violates it on purpose.
  bool assumption_ok() const { return assumption_ok_; }

  /// Edge index with probability proportional to its rate.
  std::size_t sample_edge(RngStream& rng) const;

  void export_csv(const std::string& path, const std::string& header_comment = "") const;

 private:
  void finish_setup();
  void build_alias();

  std::uint32_t nv_;
  std::vector<GraphEdge> edges_;
  std::vector<double> rates_;  // empty when uniform
  double uniform_rate_ = 0.0;
  double total_rate_ = 0.0;
  std::uint32_t max_degree_ = 0;
  bool assumption_ok_ = false;
  std::string family_;
  std::vector<double> alias_prob_;
  std::vector<std::uint32_t> alias_idx_;
};

DynamicsGraph complete_graph(std::uint32_t n);          // rate 1/n
DynamicsGraph path_graph(std::uint32_t n);              // rate 1/2
DynamicsGraph grid2d_graph(std::uint32_t side);         // side x side box, rate 1/4
DynamicsGraph isolated_edges_graph(std::uint32_t m);    // 2m vertices, rate 1
/// All site pairs within Euclidean distance `radius`, each at `rate`.
DynamicsGraph medium_range_graph(const std::vector<SiteCoord>& sites, double radius, double rate,
                                 std::size_t edge_budget = 40000000);

struct GraphParams {
  std::uint32_t n = 0;
};

/// Families by name: complete, path, grid2d, isolated_edges. The
/// medium-range family needs site coordinates and is built through
/// medium_range_graph (the percolation module wires patches in).
DynamicsGraph graph_build(const std::string& family, const GraphParams& params);

struct TranspositionEvent {
  double time;
  std::uint32_t u, v;
};

/// Time-ordered transpositions realizing pi_t on [0, horizon].
struct PermutationPath {
  double horizon = 0.0;
  std::vector<TranspositionEvent> events;

  void export_csv(const std::string& path, const std::string& header_comment = "") const;
};

PermutationPath sample_path(const DynamicsGraph& g, double t, RngStream& rng);

/// Streams the same event sequence sample_path would record, without
/// materializing it. on_event(u, v) is called in time order.
template <class OnEvent>
void stream_events(const DynamicsGraph& g, double t, RngStream& rng, OnEvent&& on_event) {
  if (t < 0) throw std::invalid_argument("stream_events: negative horizon");
  const double total = g.total_rate();
  if (total <= 0 || t == 0) return;
  double now = rng.exponential(total);
  while (now <= t) {
    const auto& e = g.edge(g.sample_edge(rng));
    on_event(e.u, e.v);
    now += rng.exponential(total);
  }
}

/// eta_t(x) = eta_0(pi_t^{-1}(x)): value transport by swapping endpoint
/// values event by event. Conserves the particle count exactly.
Configuration evolve(const Configuration& omega, const PermutationPath& path);

/// S_t = pi_t(S): forward image of a subset under the same event list.
SubsetMask transport(const SubsetMask& S, const PermutationPath& path);

/// One exclusion run to time t without materializing the path.
Configuration simulate_exclusion(const Configuration& omega, const DynamicsGraph& g, double t,
                                 RngStream& rng);
SubsetMask simulate_transport(const SubsetMask& S, const DynamicsGraph& g, double t,
                              RngStream& rng);

/// Resample each bit independently with probability eps (realized as a flip
/// with probability eps/2, which has exactly the same joint law).
Configuration snps(const Configuration& omega, double eps, RngStream& rng);

/// SNPS run to time t via per-site Poisson update counts. Distinct route
/// from snps(), used to cross-check the eps = 1 - e^{-t} time change.
Configuration snps_trajectory(const Configuration& omega, double t, RngStream& rng);

struct TrajectoryStats {
  std::uint64_t switches = 0;        // sign changes of f along the path
  std::uint64_t events = 0;          // transpositions seen
  std::vector<std::int8_t> history;  // sojourn sign after each event (optional)
};

/// Evaluates f after every transposition from a uniform start and counts
/// sign changes. Only value-changing swaps can change f, so evaluation is
/// skipped when the swap is a no-op.
TrajectoryStats count_switches(const BooleanFunction& f, const DynamicsGraph& g, double horizon,
                               RngStream& rng, bool record_history = false);

}  // namespace xsense
