#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "xsense/dynamics.hpp"
#include "xsense/spectral.hpp"

namespace xsense {

struct KernelCaps {
  /// Per-level state count for sparse kernel computations (quadratic forms).
  std::size_t level_state_cap = 20000;
  /// Per-level state count for dense kernel matrices and eigendecomposition.
  /// A dense matrix at the sparse cap would be 3.2 GB, so dense work gets
  /// the tighter default.
  std::size_t dense_cap = 5000;
};

class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

/// Restriction of the exclusion generator to k-subsets of V:
/// L(S, S xor {x,y}) = alpha({x,y}) for edges with exactly one endpoint in
/// S, diagonal = -(row sum). Symmetric, rows sum to zero. Stored sparse.
class LevelGenerator {
 public:
  LevelGenerator(const DynamicsGraph& g, std::uint32_t k, const KernelCaps& caps = {});

  std::uint32_t level() const { return k_; }
  std::size_t states() const { return states_.size(); }
  const std::vector<std::uint64_t>& state_masks() const { return states_; }
  /// Index of a k-subset mask in the ascending-mask state order.
  std::size_t state_index(std::uint64_t mask) const;
  double diagonal(std::size_t s) const { return diag_[s]; }
  double max_diagonal_magnitude() const { return max_diag_; }

  Eigen::MatrixXd dense(const KernelCaps& caps = {}) const;

  /// v^T exp(tL) v by the uniformized Poisson series over the sparse jump
  /// matrix; Poisson tail cut at 1e-14.
  double quadratic_form(double t, const std::vector<double>& v) const;

  /// w = exp(tL) v.
  std::vector<double> apply_exp(double t, const std::vector<double>& v) const;

 private:
  std::vector<double> jump_apply(const std::vector<double>& v) const;

  std::uint32_t k_;
  std::vector<std::uint64_t> states_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> col_;
  std::vector<double> rate_;
  std::vector<double> diag_;
  double max_diag_ = 0.0;
};

/// Dense P_t = exp(t L_k): symmetric, doubly stochastic, positive
/// semidefinite; computed by uniformization so those properties survive
/// numerically.
struct LevelKernel {
  std::uint32_t level = 0;
  double t = 0.0;
  std::vector<std::uint64_t> states;
  Eigen::MatrixXd matrix;

  double entry(std::uint64_t mask_from, std::uint64_t mask_to) const;
};

LevelGenerator level_generator(const DynamicsGraph& g, std::uint32_t k,
                               const KernelCaps& caps = {});
LevelKernel kernel_at(const LevelGenerator& gen, double t, const KernelCaps& caps = {});

/// Decay rates lambda = -(eigenvalues of L) ascending, with the matching
/// orthonormal eigenvectors as columns.
struct LevelEigen {
  std::uint32_t level = 0;
  std::vector<std::uint64_t> states;
  Eigen::VectorXd rates;
  Eigen::MatrixXd vectors;
};

LevelEigen level_eigen(const LevelGenerator& gen, const KernelCaps& caps = {});

/// N(f,t,G,alpha) = sum_{k>=1} v_k^T exp(t L_k) v_k where v_k collects the
/// level-k coefficients. Nonnegative and nonincreasing in t.
double exact_exclusion_correlation(const Spectrum& sp, const DynamicsGraph& g, double t,
                                   const KernelCaps& caps = {});

/// Same bilinear form with |fhat| in place of fhat: the quantity whose
/// failure to vanish detects sensitivity driven purely by sign
/// cancellation.
double exact_absolute_correlation(const Spectrum& sp, const DynamicsGraph& g, double t,
                                  const KernelCaps& caps = {});

struct LowRateMassReport {
  /// Squared projection of f onto eigenfunctions with rate <= C over levels
  /// k >= 1 (only the global constant is excluded).
  double mass = 0.0;
  /// The part carried by rate-0 eigenfunctions at levels k >= 1
  /// (conservation eigenfunctions), reported separately.
  double conserved_mass = 0.0;
};

LowRateMassReport low_rate_mass(const Spectrum& sp, const DynamicsGraph& g, double rate_threshold,
                       const KernelCaps& caps = {});

struct SingularityReport {
  /// nu(A^c) = sum over S outside A (and nonempty) of fhat(S)^2.
  double spectral_mass_outside = 0.0;
  /// max over S in A of P_t(S, A).
  double max_return_mass = 0.0;
  std::uint64_t argmax_mask = 0;
  std::size_t set_size = 0;
};

/// The two quantities the singularity criterion needs to vanish, for
/// A = { S != empty : predicate(S) }.
SingularityReport singularity_diagnostic(const Spectrum& sp, const DynamicsGraph& g, double t,
                                         const std::function<bool(std::uint64_t)>& predicate,
                                         const KernelCaps& caps = {});

}  // namespace xsense
