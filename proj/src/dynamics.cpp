#include "xsense/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace xsense {

DynamicsGraph::DynamicsGraph(std::uint32_t vertices, std::vector<GraphEdge> edges, double rate,
                             std::string family)
    : nv_(vertices), edges_(std::move(edges)), uniform_rate_(rate), family_(std::move(family)) {
  if (rate <= 0) throw std::invalid_argument("DynamicsGraph: rate must be positive");
  finish_setup();
  total_rate_ = uniform_rate_ * static_cast<double>(edges_.size());
  assumption_ok_ = max_degree_ == 0 || uniform_rate_ <= 1.0 / max_degree_ + 1e-12;
}

DynamicsGraph::DynamicsGraph(std::uint32_t vertices, std::vector<GraphEdge> edges,
                             std::vector<double> rates, std::string family)
    : nv_(vertices), edges_(std::move(edges)), rates_(std::move(rates)),
      family_(std::move(family)) {
  if (rates_.size() != edges_.size())
    throw std::invalid_argument("DynamicsGraph: rates/edges size mismatch");
  for (double r : rates_)
    if (r <= 0) throw std::invalid_argument("DynamicsGraph: rates must be positive");
  finish_setup();
  total_rate_ = std::accumulate(rates_.begin(), rates_.end(), 0.0);
  // Generalized-rate form of the assumption: per-vertex rate sums at most 1.
  std::vector<double> vertex_rate(nv_, 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    vertex_rate[edges_[e].u] += rates_[e];
    vertex_rate[edges_[e].v] += rates_[e];
  }
  assumption_ok_ = *std::max_element(vertex_rate.begin(), vertex_rate.end()) <= 1.0 + 1e-12;
  build_alias();
}

void DynamicsGraph::finish_setup() {
  if (nv_ < 2) throw std::invalid_argument("DynamicsGraph: need at least 2 vertices");
  std::vector<std::uint32_t> degree(nv_, 0);
  std::vector<std::uint64_t> seen;
  seen.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (e.u >= nv_ || e.v >= nv_) throw std::invalid_argument("DynamicsGraph: vertex out of range");
    if (e.u == e.v) throw std::invalid_argument("DynamicsGraph: self loop");
    ++degree[e.u];
    ++degree[e.v];
    const std::uint64_t key = (std::uint64_t{std::min(e.u, e.v)} << 32) | std::max(e.u, e.v);
    seen.push_back(key);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument("DynamicsGraph: duplicate edge");
  max_degree_ = edges_.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

void DynamicsGraph::build_alias() {
  // Walker alias table over edge rates.
  const std::size_t m = edges_.size();
  alias_prob_.assign(m, 0.0);
  alias_idx_.assign(m, 0);
  std::vector<double> scaled(m);
  for (std::size_t e = 0; e < m; ++e) scaled[e] = rates_[e] * static_cast<double>(m) / total_rate_;
  std::vector<std::uint32_t> small, large;
  for (std::size_t e = 0; e < m; ++e)
    (scaled[e] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(e));
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    alias_prob_[s] = scaled[s];
    alias_idx_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t e : large) alias_prob_[e] = 1.0;
  for (std::uint32_t e : small) alias_prob_[e] = 1.0;
}

std::size_t DynamicsGraph::sample_edge(RngStream& rng) const {
  if (rates_.empty()) return static_cast<std::size_t>(rng.next_below(edges_.size()));
  const std::size_t slot = static_cast<std::size_t>(rng.next_below(edges_.size()));
  return rng.next_double() < alias_prob_[slot] ? slot : alias_idx_[slot];
}

void DynamicsGraph::export_csv(const std::string& path, const std::string& header_comment) const {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("DynamicsGraph::export_csv: cannot open " + path);
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "u,v,rate\n");
  for (std::size_t e = 0; e < edges_.size(); ++e)
    std::fprintf(fp, "%u,%u,%.17g\n", edges_[e].u + 1, edges_[e].v + 1, rate(e));
  std::fclose(fp);
}

DynamicsGraph complete_graph(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("complete_graph: need n >= 2");
  std::vector<GraphEdge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) edges.push_back({u, v});
  return DynamicsGraph(n, std::move(edges), 1.0 / n, "complete(" + std::to_string(n) + ")");
}

DynamicsGraph path_graph(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("path_graph: need n >= 2");
  std::vector<GraphEdge> edges;
  edges.reserve(n - 1);
  for (std::uint32_t u = 0; u + 1 < n; ++u) edges.push_back({u, u + 1});
  return DynamicsGraph(n, std::move(edges), 0.5, "path(" + std::to_string(n) + ")");
}

DynamicsGraph grid2d_graph(std::uint32_t side) {
  if (side < 2) throw std::invalid_argument("grid2d_graph: need side >= 2");
  std::vector<GraphEdge> edges;
  auto id = [side](std::uint32_t x, std::uint32_t y) { return y * side + x; };
  for (std::uint32_t y = 0; y < side; ++y)
    for (std::uint32_t x = 0; x < side; ++x) {
      if (x + 1 < side) edges.push_back({id(x, y), id(x + 1, y)});
      if (y + 1 < side) edges.push_back({id(x, y), id(x, y + 1)});
    }
  return DynamicsGraph(side * side, std::move(edges), 0.25,
                       "grid2d(" + std::to_string(side) + ")");
}

DynamicsGraph isolated_edges_graph(std::uint32_t m) {
  if (m < 1) throw std::invalid_argument("isolated_edges_graph: need m >= 1");
  std::vector<GraphEdge> edges;
  edges.reserve(m);
  for (std::uint32_t k = 0; k < m; ++k) edges.push_back({2 * k, 2 * k + 1});
  return DynamicsGraph(2 * m, std::move(edges), 1.0,
                       "isolated_edges(" + std::to_string(m) + ")");
}

DynamicsGraph medium_range_graph(const std::vector<SiteCoord>& sites, double radius, double rate,
                                 std::size_t edge_budget) {
  if (sites.size() < 2) throw std::invalid_argument("medium_range_graph: need >= 2 sites");
  if (radius <= 0) throw std::invalid_argument("medium_range_graph: radius must be positive");
  // Cell grid so neighbor search is O(sites * r^2) not O(sites^2).
  double min_x = sites[0].x, min_y = sites[0].y, max_x = sites[0].x, max_y = sites[0].y;
  for (const auto& s : sites) {
    min_x = std::min(min_x, s.x);
    min_y = std::min(min_y, s.y);
    max_x = std::max(max_x, s.x);
    max_y = std::max(max_y, s.y);
  }
  const double cell = radius;
  const int cols = static_cast<int>((max_x - min_x) / cell) + 1;
  const int rows = static_cast<int>((max_y - min_y) / cell) + 1;
  std::vector<std::vector<std::uint32_t>> buckets(static_cast<std::size_t>(cols) * rows);
  auto bucket_of = [&](double x, double y) {
    const int cx = static_cast<int>((x - min_x) / cell);
    const int cy = static_cast<int>((y - min_y) / cell);
    return static_cast<std::size_t>(cy) * cols + cx;
  };
  for (std::uint32_t i = 0; i < sites.size(); ++i)
    buckets[bucket_of(sites[i].x, sites[i].y)].push_back(i);

  const double r2 = radius * radius;
  std::vector<GraphEdge> edges;
  for (std::uint32_t i = 0; i < sites.size(); ++i) {
    const int cx = static_cast<int>((sites[i].x - min_x) / cell);
    const int cy = static_cast<int>((sites[i].y - min_y) / cell);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = cx + dx, ny = cy + dy;
        if (nx < 0 || ny < 0 || nx >= cols || ny >= rows) continue;
        for (std::uint32_t j : buckets[static_cast<std::size_t>(ny) * cols + nx]) {
          if (j <= i) continue;
          const double ddx = sites[i].x - sites[j].x;
          const double ddy = sites[i].y - sites[j].y;
          if (ddx * ddx + ddy * ddy <= r2 + 1e-12) {
            edges.push_back({i, j});
            if (edges.size() > edge_budget)
              throw std::invalid_argument(
                  "medium_range_graph: edge budget exceeded (" +
                  std::to_string(edge_budget) + "); shrink the patch or radius");
          }
        }
      }
  }
  return DynamicsGraph(static_cast<std::uint32_t>(sites.size()), std::move(edges), rate,
                       "medium_range(sites=" + std::to_string(sites.size()) + ")");
}

DynamicsGraph graph_build(const std::string& family, const GraphParams& params) {
  if (family == "complete") return complete_graph(params.n);
  if (family == "path") return path_graph(params.n);
  if (family == "grid2d") return grid2d_graph(params.n);
  if (family == "isolated_edges") return isolated_edges_graph(params.n);
  throw std::invalid_argument("graph_build: unknown family '" + family + "'");
}

PermutationPath sample_path(const DynamicsGraph& g, double t, RngStream& rng) {
  if (t < 0) throw std::invalid_argument("sample_path: negative horizon");
  PermutationPath path;
  path.horizon = t;
  const double total = g.total_rate();
  if (total <= 0 || t == 0) return path;
  double now = rng.exponential(total);
  while (now <= t) {
    const auto& e = g.edge(g.sample_edge(rng));
    path.events.push_back({now, e.u, e.v});
    now += rng.exponential(total);
  }
  return path;
}

void PermutationPath::export_csv(const std::string& path, const std::string& header_comment) const {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("PermutationPath::export_csv: cannot open " + path);
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "time,u,v\n");
  for (const auto& e : events) std::fprintf(fp, "%.17g,%u,%u\n", e.time, e.u + 1, e.v + 1);
  std::fclose(fp);
}

Configuration evolve(const Configuration& omega, const PermutationPath& path) {
  Configuration out = omega;
  for (const auto& e : path.events) {
    if (e.u >= out.size() || e.v >= out.size())
      throw std::invalid_argument("evolve: width mismatch");
    out.bits.swap_bits(e.u, e.v);
  }
  return out;
}

SubsetMask transport(const SubsetMask& S, const PermutationPath& path) {
  // The forward image pi_t(S) is realized by the same membership swaps that
  // move values in evolve; the two orientations come from one event list.
  SubsetMask out = S;
  for (const auto& e : path.events) {
    if (e.u >= out.size() || e.v >= out.size())
      throw std::invalid_argument("transport: width mismatch");
    out.bits.swap_bits(e.u, e.v);
  }
  return out;
}

Configuration simulate_exclusion(const Configuration& omega, const DynamicsGraph& g, double t,
                                 RngStream& rng) {
  if (omega.size() != g.vertices())
    throw std::invalid_argument("simulate_exclusion: width mismatch");
  Configuration out = omega;
  stream_events(g, t, rng, [&](std::uint32_t u, std::uint32_t v) { out.bits.swap_bits(u, v); });
  return out;
}

SubsetMask simulate_transport(const SubsetMask& S, const DynamicsGraph& g, double t,
                              RngStream& rng) {
  if (S.size() != g.vertices()) throw std::invalid_argument("simulate_transport: width mismatch");
  SubsetMask out = S;
  stream_events(g, t, rng, [&](std::uint32_t u, std::uint32_t v) { out.bits.swap_bits(u, v); });
  return out;
}

Configuration snps(const Configuration& omega, double eps, RngStream& rng) {
  if (eps < 0.0 || eps > 1.0) throw std::invalid_argument("snps: eps outside [0,1]");
  Configuration out = omega;
  const double flip_prob = eps / 2.0;
  for (std::uint32_t i = 0; i < out.size(); ++i)
    if (rng.bernoulli(flip_prob)) out.bits.toggle(i);
  return out;
}

Configuration snps_trajectory(const Configuration& omega, double t, RngStream& rng) {
  if (t < 0) throw std::invalid_argument("snps_trajectory: negative horizon");
  Configuration out = omega;
  for (std::uint32_t i = 0; i < out.size(); ++i) {
    const std::uint64_t rings = rng.poisson(t);
    bool value = out.bits.get(i);
    for (std::uint64_t r = 0; r < rings; ++r) value = rng.next_bool();
    out.bits.set(i, value);
  }
  return out;
}

TrajectoryStats count_switches(const BooleanFunction& f, const DynamicsGraph& g, double horizon,
                               RngStream& rng, bool record_history) {
  if (horizon < 0) throw std::invalid_argument("count_switches: negative horizon");
  Configuration omega(g.vertices());
  omega.bits.fill_random(rng);
  int sign = f.evaluate_bits(omega.bits);
  TrajectoryStats stats;
  stream_events(g, horizon, rng, [&](std::uint32_t u, std::uint32_t v) {
    ++stats.events;
    if (omega.bits.get(u) != omega.bits.get(v)) {
      omega.bits.swap_bits(u, v);
      const int s = f.evaluate_bits(omega.bits);
      if (s != sign) {
        ++stats.switches;
        sign = s;
      }
    }
    if (record_history) stats.history.push_back(static_cast<std::int8_t>(sign));
  });
  return stats;
}

}  // namespace xsense
