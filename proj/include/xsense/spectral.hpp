#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xsense/boolfn.hpp"
#include "xsense/rng.hpp"

namespace xsense {

/// All 2^n Fourier-Walsh coefficients, entry at mask S holding
/// fhat(S) = E[f chi_S] with chi_i(omega) = -1 if omega_i = 1 and +1 if
/// omega_i = 0. The butterfly accumulates integers and divides by 2^n once
/// at the end, so every coefficient is an exact dyadic rational for n <= 24.
struct Spectrum {
  std::uint32_t n = 0;
  std::vector<double> coef;  // size 2^n, index = subset mask

  double at(std::uint64_t mask) const { return coef[mask]; }
  double mean() const { return coef[0]; }
  double parseval_sum() const;
  /// sum over |S| = k of fhat(S)^2.
  double level_energy(std::uint32_t k) const;
  std::vector<double> level_energies() const;
};

Spectrum transform(const BooleanFunction& f);

/// Exact reconstruction; throws if the spectrum does not describe a
/// {-1,+1}-valued function bit for bit.
BooleanFunction inverse_transform(const Spectrum& sp);

/// sum_{S != empty} (1-eps)^{|S|} fhat(S)^2.
double noise_correlation(const Spectrum& sp, double eps);

/// Coefficientwise (-1)^{|S cap B|} fhat(S); equals transform(f o sigma_B).
Spectrum flip_conjugate(const Spectrum& sp, const SubsetMask& B);

/// g(S) = E[f(omega) f(omega^S)] = sum over S' disjoint from S of fhat(S')^2.
double disjoint_mass(const Spectrum& sp, const SubsetMask& S);

/// A subset drawn with P(S) = fhat(S)^2. The empty set is included with its
/// mass fhat(empty)^2; callers condition on S != empty where needed.
struct SpectralSample {
  SubsetMask subset;
};

/// Draws spectral samples in O(log 2^n) after an O(2^n) prefix pass.
class SpectralSampler {
 public:
  explicit SpectralSampler(const Spectrum& sp);
  SpectralSample draw(RngStream& rng) const;

 private:
  std::uint32_t n_;
  std::vector<double> cumulative_;
};

SpectralSample sample_spectral(const Spectrum& sp, RngStream& rng);

/// CSV columns: mask(hex), size, coefficient.
void export_spectrum_csv(const Spectrum& sp, const std::string& path,
                         const std::string& header_comment = "");

}  // namespace xsense
