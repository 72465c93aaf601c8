#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "xsense/rng.hpp"

namespace xsense {

/// Fixed-width bit vector. Vertex i (1-based in all tables and file formats)
/// lives at bit position i-1; every module shares this indexing.
class Bits {
 public:
  Bits() = default;

  explicit Bits(std::uint32_t n) : n_(n), w_((n + 63) / 64, 0) {
    if (n == 0) throw std::invalid_argument("Bits: width must be >= 1");
  }

  static Bits from_mask(std::uint32_t n, std::uint64_t mask) {
    Bits b(n);
    if (n < 64 && (mask >> n) != 0)
      throw std::invalid_argument("Bits::from_mask: mask has bits above width");
    b.w_[0] = mask;
    return b;
  }

  std::uint32_t size() const { return n_; }

  bool get(std::uint32_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }

  void set(std::uint32_t i, bool v) {
    const std::uint64_t m = 1ull << (i & 63);
    if (v)
      w_[i >> 6] |= m;
    else
      w_[i >> 6] &= ~m;
  }

  void toggle(std::uint32_t i) { w_[i >> 6] ^= 1ull << (i & 63); }

  /// Swap the values at positions i and j.
  void swap_bits(std::uint32_t i, std::uint32_t j) {
    const bool a = get(i), b = get(j);
    if (a != b) {
      toggle(i);
      toggle(j);
    }
  }

  std::uint32_t count() const {
    std::uint64_t c = 0;
    for (std::uint64_t w : w_) c += std::popcount(w);
    return static_cast<std::uint32_t>(c);
  }

  /// Low 64 bits; only valid when the width fits one word.
  std::uint64_t low64() const {
    if (n_ > 64) throw std::logic_error("Bits::low64: width exceeds 64");
    return w_[0];
  }

  void xor_with(const Bits& o) {
    require_same_width(o);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
  }

  void and_with(const Bits& o) {
    require_same_width(o);
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
  }

  std::uint32_t count_xor(const Bits& o) const {
    require_same_width(o);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] ^ o.w_[i]);
    return static_cast<std::uint32_t>(c);
  }

  std::uint32_t count_and(const Bits& o) const {
    require_same_width(o);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
    return static_cast<std::uint32_t>(c);
  }

  /// Count positions where this is 0 and `o` is 1.
  std::uint32_t count_gained(const Bits& o) const {
    require_same_width(o);
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(~w_[i] & o.w_[i]);
    return static_cast<std::uint32_t>(c);
  }

  /// Each bit fair and independent.
  void fill_random(RngStream& rng) {
    for (auto& w : w_) w = rng.next_u64();
    trim();
  }

  std::vector<std::uint32_t> positions_of(bool value) const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < n_; ++i)
      if (get(i) == value) out.push_back(i);
    return out;
  }

  bool operator==(const Bits& o) const { return n_ == o.n_ && w_ == o.w_; }
  bool operator!=(const Bits& o) const { return !(*this == o); }

  std::string to_string() const {
    std::string s(n_, '0');
    for (std::uint32_t i = 0; i < n_; ++i)
      if (get(i)) s[n_ - 1 - i] = '1';
    return s;
  }

  void require_same_width(const Bits& o) const {
    if (n_ != o.n_) throw std::invalid_argument("Bits: width mismatch");
  }

 private:
  void trim() {
    const std::uint32_t tail = n_ & 63;
    if (tail != 0) w_.back() &= (~0ull) >> (64 - tail);
  }

  std::uint32_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

/// A point of {0,1}^V; the basic state of all dynamics.
struct Configuration {
  Bits bits;

  Configuration() = default;
  explicit Configuration(std::uint32_t n) : bits(n) {}
  explicit Configuration(Bits b) : bits(std::move(b)) {}
  static Configuration from_mask(std::uint32_t n, std::uint64_t mask) {
    return Configuration(Bits::from_mask(n, mask));
  }

  std::uint32_t size() const { return bits.size(); }
  std::uint32_t ones() const { return bits.count(); }
};

/// A subset S of the vertex set, same width rules as Configuration.
struct SubsetMask {
  Bits bits;

  SubsetMask() = default;
  explicit SubsetMask(std::uint32_t n) : bits(n) {}
  explicit SubsetMask(Bits b) : bits(std::move(b)) {}
  static SubsetMask from_mask(std::uint32_t n, std::uint64_t mask) {
    return SubsetMask(Bits::from_mask(n, mask));
  }

  std::uint32_t size() const { return bits.size(); }
  std::uint32_t cardinality() const { return bits.count(); }
};

/// sigma_B: flip exactly the bits in B.
inline Configuration flip(const Configuration& omega, const SubsetMask& B) {
  omega.bits.require_same_width(B.bits);
  Configuration out = omega;
  out.bits.xor_with(B.bits);
  return out;
}

}  // namespace xsense
