#include "xsense/kernel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace xsense {

namespace {

constexpr double kPoissonTail = 1e-14;

double binomial_count(std::uint32_t n, std::uint32_t k) {
  if (k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (std::uint32_t i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// All k-subset masks of [0,n) in ascending numeric order (Gosper's hack).
std::vector<std::uint64_t> enumerate_level(std::uint32_t n, std::uint32_t k) {
  std::vector<std::uint64_t> out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t limit = (n == 64) ? ~0ull : (std::uint64_t{1} << n);
  std::uint64_t mask = (std::uint64_t{1} << k) - 1;
  while (mask < limit) {
    out.push_back(mask);
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    if (r >= limit || r == 0) break;
    mask = (((r ^ mask) >> 2) / c) | r;
  }
  return out;
}

struct PoissonSeries {
  double a;          // uniformization rate times t
  double weight;     // current Poisson weight
  double remaining;  // 1 - cumulative weight
  std::uint64_t m = 0;

  explicit PoissonSeries(double a_) : a(a_), weight(std::exp(-a_)), remaining(1.0 - weight) {
    if (!(weight > 0.0))
      throw std::runtime_error("uniformization: horizon too large for the Poisson series");
  }
  void advance() {
    ++m;
    weight *= a / static_cast<double>(m);
    remaining -= weight;
  }
  bool done() const { return remaining <= kPoissonTail; }
};

}  // namespace

LevelGenerator::LevelGenerator(const DynamicsGraph& g, std::uint32_t k, const KernelCaps& caps)
    : k_(k) {
  const std::uint32_t n = g.vertices();
  if (n > 64) throw std::invalid_argument("LevelGenerator: vertex count above 64");
  if (k < 1 || k > n) throw std::invalid_argument("LevelGenerator: level out of range");
  const double count = binomial_count(n, k);
  if (count > static_cast<double>(caps.level_state_cap))
    throw CapExceededError("LevelGenerator: level " + std::to_string(k) + " has " +
                           std::to_string(static_cast<std::uint64_t>(count)) +
                           " states, above the cap of " + std::to_string(caps.level_state_cap) +
                           "; use the Monte Carlo estimator instead");

  states_ = enumerate_level(n, k);
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  index.reserve(states_.size() * 2);
  for (std::uint32_t s = 0; s < states_.size(); ++s) index.emplace(states_[s], s);

  row_ptr_.assign(states_.size() + 1, 0);
  diag_.assign(states_.size(), 0.0);
  std::vector<std::pair<std::uint32_t, double>> scratch;
  for (std::uint32_t s = 0; s < states_.size(); ++s) {
    const std::uint64_t mask = states_[s];
    double out_rate = 0.0;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
      const auto& edge = g.edge(e);
      const bool in_u = (mask >> edge.u) & 1u;
      const bool in_v = (mask >> edge.v) & 1u;
      if (in_u == in_v) continue;
      const std::uint64_t target = mask ^ ((std::uint64_t{1} << edge.u) |
                                           (std::uint64_t{1} << edge.v));
      scratch.emplace_back(index.at(target), g.rate(e));
      out_rate += g.rate(e);
    }
    diag_[s] = -out_rate;
    max_diag_ = std::max(max_diag_, out_rate);
    row_ptr_[s + 1] = row_ptr_[s] + scratch.size();
    for (const auto& [c, r] : scratch) {
      col_.push_back(c);
      rate_.push_back(r);
    }
    scratch.clear();
  }
}

std::size_t LevelGenerator::state_index(std::uint64_t mask) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), mask);
  if (it == states_.end() || *it != mask)
    throw std::invalid_argument("LevelGenerator: mask is not a level-" + std::to_string(k_) +
                                " state");
  return static_cast<std::size_t>(std::distance(states_.begin(), it));
}

Eigen::MatrixXd LevelGenerator::dense(const KernelCaps& caps) const {
  if (states_.size() > caps.dense_cap)
    throw CapExceededError("LevelGenerator::dense: " + std::to_string(states_.size()) +
                           " states, above the dense cap of " + std::to_string(caps.dense_cap));
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(states_.size(), states_.size());
  for (std::size_t s = 0; s < states_.size(); ++s) {
    L(s, s) = diag_[s];
    for (std::size_t j = row_ptr_[s]; j < row_ptr_[s + 1]; ++j) L(s, col_[j]) += rate_[j];
  }
  return L;
}

std::vector<double> LevelGenerator::jump_apply(const std::vector<double>& v) const {
  // J = I + L / Lambda, stochastic and nonnegative by construction.
  std::vector<double> out(v.size());
  const double inv = 1.0 / max_diag_;
  for (std::size_t s = 0; s < v.size(); ++s) {
    double acc = (1.0 + diag_[s] * inv) * v[s];
    for (std::size_t j = row_ptr_[s]; j < row_ptr_[s + 1]; ++j)
      acc += rate_[j] * inv * v[col_[j]];
    out[s] = acc;
  }
  return out;
}

std::vector<double> LevelGenerator::apply_exp(double t, const std::vector<double>& v) const {
  if (t < 0) throw std::invalid_argument("LevelGenerator::apply_exp: negative time");
  if (v.size() != states_.size())
    throw std::invalid_argument("LevelGenerator::apply_exp: vector size mismatch");
  if (max_diag_ == 0.0 || t == 0.0) return v;
  PoissonSeries series(max_diag_ * t);
  std::vector<double> power = v;
  std::vector<double> acc(v.size());
  for (std::size_t s = 0; s < v.size(); ++s) acc[s] = series.weight * v[s];
  while (!series.done()) {
    power = jump_apply(power);
    series.advance();
    for (std::size_t s = 0; s < v.size(); ++s) acc[s] += series.weight * power[s];
  }
  return acc;
}

double LevelGenerator::quadratic_form(double t, const std::vector<double>& v) const {
  const std::vector<double> w = apply_exp(t, v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * w[i];
  return s;
}

LevelGenerator level_generator(const DynamicsGraph& g, std::uint32_t k, const KernelCaps& caps) {
  return LevelGenerator(g, k, caps);
}

double LevelKernel::entry(std::uint64_t mask_from, std::uint64_t mask_to) const {
  const auto find = [this](std::uint64_t m) {
    const auto it = std::lower_bound(states.begin(), states.end(), m);
    if (it == states.end() || *it != m)
      throw std::invalid_argument("LevelKernel::entry: mask is not a state of this level");
    return static_cast<Eigen::Index>(std::distance(states.begin(), it));
  };
  return matrix(find(mask_from), find(mask_to));
}

LevelKernel kernel_at(const LevelGenerator& gen, double t, const KernelCaps& caps) {
  if (t < 0) throw std::invalid_argument("kernel_at: negative time");
  if (gen.states() > caps.dense_cap)
    throw CapExceededError("kernel_at: " + std::to_string(gen.states()) +
                           " states, above the dense cap of " + std::to_string(caps.dense_cap));
  LevelKernel kernel;
  kernel.level = gen.level();
  kernel.t = t;
  kernel.states = gen.state_masks();
  const Eigen::Index m = static_cast<Eigen::Index>(gen.states());
  if (gen.max_diagonal_magnitude() == 0.0 || t == 0.0) {
    kernel.matrix = Eigen::MatrixXd::Identity(m, m);
    return kernel;
  }
  const double lambda = gen.max_diagonal_magnitude();
  Eigen::MatrixXd jump = gen.dense(caps) / lambda;
  jump.diagonal().array() += 1.0;

  PoissonSeries series(lambda * t);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m, m);
  kernel.matrix = series.weight * power;
  while (!series.done()) {
    power = power * jump;
    series.advance();
    kernel.matrix += series.weight * power;
  }
  return kernel;
}

LevelEigen level_eigen(const LevelGenerator& gen, const KernelCaps& caps) {
  if (gen.states() > caps.dense_cap)
    throw CapExceededError("level_eigen: " + std::to_string(gen.states()) +
                           " states, above the dense cap of " + std::to_string(caps.dense_cap));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gen.dense(caps));
  if (solver.info() != Eigen::Success) throw std::runtime_error("level_eigen: solver failed");
  // Eigenvalues of L ascend (most negative first); rates = -eigenvalues must
  // ascend instead, so reverse.
  const Eigen::Index m = solver.eigenvalues().size();
  LevelEigen out;
  out.level = gen.level();
  out.states = gen.state_masks();
  out.rates.resize(m);
  out.vectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.rates(i) = -solver.eigenvalues()(m - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(m - 1 - i);
  }
  return out;
}

namespace {

/// Level-k coefficient vector in state order; empty when the level carries
/// no spectral mass.
std::vector<double> level_vector(const Spectrum& sp, const std::vector<std::uint64_t>& states,
                                 bool absolute) {
  std::vector<double> v(states.size());
  bool any = false;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const double c = sp.coef[states[s]];
    v[s] = absolute ? std::abs(c) : c;
    any = any || c != 0.0;
  }
  if (!any) v.clear();
  return v;
}

double exact_correlation_impl(const Spectrum& sp, const DynamicsGraph& g, double t, bool absolute,
                              const KernelCaps& caps) {
  if (t < 0) throw std::invalid_argument("exact correlation: negative time");
  if (sp.n != g.vertices())
    throw std::invalid_argument("exact correlation: spectrum/graph width mismatch");
  const auto energies = sp.level_energies();
  double total = 0.0;
  for (std::uint32_t k = 1; k <= sp.n; ++k) {
    if (energies[k] == 0.0) continue;
    LevelGenerator gen(g, k, caps);
    const std::vector<double> v = level_vector(sp, gen.state_masks(), absolute);
    if (v.empty()) continue;
    total += gen.quadratic_form(t, v);
  }
  return total;
}

}  // namespace

double exact_exclusion_correlation(const Spectrum& sp, const DynamicsGraph& g, double t,
                                   const KernelCaps& caps) {
  return exact_correlation_impl(sp, g, t, /*absolute=*/false, caps);
}

double exact_absolute_correlation(const Spectrum& sp, const DynamicsGraph& g, double t,
                                  const KernelCaps& caps) {
  return exact_correlation_impl(sp, g, t, /*absolute=*/true, caps);
}

LowRateMassReport low_rate_mass(const Spectrum& sp, const DynamicsGraph& g, double rate_threshold,
                       const KernelCaps& caps) {
  if (sp.n != g.vertices()) throw std::invalid_argument("low_rate_mass: spectrum/graph width mismatch");
  const auto energies = sp.level_energies();
  LowRateMassReport report;
  for (std::uint32_t k = 1; k <= sp.n; ++k) {
    if (energies[k] == 0.0) continue;
    LevelGenerator gen(g, k, caps);
    const std::vector<double> v = level_vector(sp, gen.state_masks(), false);
    if (v.empty()) continue;
    const LevelEigen eig = level_eigen(gen, caps);
    const Eigen::Map<const Eigen::VectorXd> vec(v.data(), static_cast<Eigen::Index>(v.size()));
    for (Eigen::Index l = 0; l < eig.rates.size(); ++l) {
      if (eig.rates(l) > rate_threshold + 1e-12) break;
      const double proj = eig.vectors.col(l).dot(vec);
      report.mass += proj * proj;
      if (eig.rates(l) <= 1e-10) report.conserved_mass += proj * proj;
    }
  }
  return report;
}

SingularityReport singularity_diagnostic(const Spectrum& sp, const DynamicsGraph& g, double t,
                                         const std::function<bool(std::uint64_t)>& predicate,
                                         const KernelCaps& caps) {
  if (sp.n != g.vertices())
    throw std::invalid_argument("singularity_diagnostic: spectrum/graph width mismatch");
  SingularityReport report;
  std::vector<std::vector<std::uint64_t>> members(sp.n + 1);
  for (std::uint64_t mask = 1; mask < sp.coef.size(); ++mask) {
    if (predicate(mask)) {
      members[std::popcount(mask)].push_back(mask);
      ++report.set_size;
    } else {
      report.spectral_mass_outside += sp.coef[mask] * sp.coef[mask];
    }
  }
  for (std::uint32_t k = 1; k <= sp.n; ++k) {
    if (members[k].empty()) continue;
    LevelGenerator gen(g, k, caps);
    const LevelKernel kernel = kernel_at(gen, t, caps);
    std::vector<std::size_t> idx;
    idx.reserve(members[k].size());
    for (std::uint64_t m : members[k]) idx.push_back(gen.state_index(m));
    for (std::size_t a = 0; a < idx.size(); ++a) {
      double row_mass = 0.0;
      for (std::size_t b = 0; b < idx.size(); ++b)
        row_mass += kernel.matrix(static_cast<Eigen::Index>(idx[a]),
                                  static_cast<Eigen::Index>(idx[b]));
      if (row_mass > report.max_return_mass) {
        report.max_return_mass = row_mass;
        report.argmax_mask = members[k][a];
      }
    }
  }
  return report;
}

}  // namespace xsense
