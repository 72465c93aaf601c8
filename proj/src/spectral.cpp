#include "xsense/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

namespace xsense {

namespace {

/// In-place Walsh-Hadamard butterfly: v[S] <- sum_omega (-1)^<omega,S> v[omega].
template <class T>
void butterfly(std::vector<T>& v) {
  const std::size_t size = v.size();
  for (std::size_t len = 1; len < size; len <<= 1) {
    for (std::size_t block = 0; block < size; block += len << 1) {
      for (std::size_t i = block; i < block + len; ++i) {
        const T a = v[i];
        const T b = v[i + len];
        v[i] = a + b;
        v[i + len] = a - b;
      }
    }
  }
}

}  // namespace

double Spectrum::parseval_sum() const {
  double s = 0.0;
  for (double c : coef) s += c * c;
  return s;
}

double Spectrum::level_energy(std::uint32_t k) const {
  if (k > n) throw std::invalid_argument("Spectrum::level_energy: level out of range");
  double s = 0.0;
  for (std::uint64_t mask = 0; mask < coef.size(); ++mask)
    if (static_cast<std::uint32_t>(std::popcount(mask)) == k) s += coef[mask] * coef[mask];
  return s;
}

std::vector<double> Spectrum::level_energies() const {
  std::vector<double> out(n + 1, 0.0);
  for (std::uint64_t mask = 0; mask < coef.size(); ++mask)
    out[std::popcount(mask)] += coef[mask] * coef[mask];
  return out;
}

Spectrum transform(const BooleanFunction& f) {
  f.require_table("transform");
  const std::uint32_t n = f.input_bits();
  const std::size_t size = std::size_t{1} << n;
  // chi_S(omega) = (-1)^{|omega cap S|}, so fhat(S) is exactly the
  // Walsh-Hadamard sum of the +-1 table divided by 2^n. Integer accumulation
  // keeps every intermediate exact (|values| <= 2^n < 2^53).
  std::vector<std::int64_t> work(size);
  for (std::size_t i = 0; i < size; ++i) work[i] = f.table()[i];
  butterfly(work);
  Spectrum sp;
  sp.n = n;
  sp.coef.resize(size);
  const double scale = 1.0 / static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) sp.coef[i] = static_cast<double>(work[i]) * scale;
  return sp;
}

BooleanFunction inverse_transform(const Spectrum& sp) {
  // f(omega) = sum_S fhat(S) chi_S(omega): the same butterfly. For dyadic
  // coefficients the double arithmetic is exact (numerators < 2^53).
  std::vector<double> work = sp.coef;
  butterfly(work);
  std::vector<std::int8_t> table(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) {
    if (work[i] == 1.0)
      table[i] = 1;
    else if (work[i] == -1.0)
      table[i] = -1;
    else
      throw std::invalid_argument("inverse_transform: spectrum is not a +-1 function");
  }
  return BooleanFunction::from_table(sp.n, std::move(table), "inverse_transform");
}

double noise_correlation(const Spectrum& sp, double eps) {
  if (eps < 0.0 || eps > 1.0)
    throw std::invalid_argument("noise_correlation: eps outside [0,1]");
  const auto energies = sp.level_energies();
  double s = 0.0;
  for (std::uint32_t k = 1; k <= sp.n; ++k)
    s += energies[k] * std::pow(1.0 - eps, static_cast<double>(k));
  return s;
}

Spectrum flip_conjugate(const Spectrum& sp, const SubsetMask& B) {
  if (B.size() != sp.n) throw std::invalid_argument("flip_conjugate: width mismatch");
  const std::uint64_t bmask = B.bits.low64();
  Spectrum out;
  out.n = sp.n;
  out.coef.resize(sp.coef.size());
  for (std::uint64_t mask = 0; mask < sp.coef.size(); ++mask) {
    const int sign = (std::popcount(mask & bmask) & 1) ? -1 : 1;
    out.coef[mask] = sign * sp.coef[mask];
  }
  return out;
}

double disjoint_mass(const Spectrum& sp, const SubsetMask& S) {
  if (S.size() != sp.n) throw std::invalid_argument("disjoint_mass: width mismatch");
  const std::uint64_t full = (sp.n == 64) ? ~0ull : ((std::uint64_t{1} << sp.n) - 1);
  const std::uint64_t comp = full & ~S.bits.low64();
  // Enumerate submasks of the complement.
  double s = 0.0;
  std::uint64_t sub = comp;
  for (;;) {
    s += sp.coef[sub] * sp.coef[sub];
    if (sub == 0) break;
    sub = (sub - 1) & comp;
  }
  return s;
}

SpectralSampler::SpectralSampler(const Spectrum& sp) : n_(sp.n) {
  cumulative_.resize(sp.coef.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < sp.coef.size(); ++i) {
    acc += sp.coef[i] * sp.coef[i];
    cumulative_[i] = acc;
  }
  if (std::abs(acc - 1.0) > 1e-9)
    throw std::invalid_argument("SpectralSampler: spectrum violates Parseval");
  cumulative_.back() = 1.0;
}

SpectralSample SpectralSampler::draw(RngStream& rng) const {
  const double u = rng.next_double();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const std::uint64_t mask =
      static_cast<std::uint64_t>(std::distance(cumulative_.begin(), it));
  return SpectralSample{SubsetMask::from_mask(n_, std::min<std::uint64_t>(
                                                      mask, cumulative_.size() - 1))};
}

SpectralSample sample_spectral(const Spectrum& sp, RngStream& rng) {
  return SpectralSampler(sp).draw(rng);
}

void export_spectrum_csv(const Spectrum& sp, const std::string& path,
                         const std::string& header_comment) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("export_spectrum_csv: cannot open " + path);
  if (!header_comment.empty()) std::fprintf(fp, "# %s\n", header_comment.c_str());
  std::fprintf(fp, "mask,size,coefficient\n");
  for (std::uint64_t mask = 0; mask < sp.coef.size(); ++mask)
    std::fprintf(fp, "%llx,%d,%.17g\n", static_cast<unsigned long long>(mask),
                 std::popcount(mask), sp.coef[mask]);
  std::fclose(fp);
}

}  // namespace xsense
