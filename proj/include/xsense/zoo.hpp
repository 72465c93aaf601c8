#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "xsense/boolfn.hpp"

namespace xsense {

/// Sign convention used throughout: an event maps to +1, f = 2*I_A - 1.
/// For parity the event is "even number of ones in the support", so
/// parity(full support) equals the top character chi_V exactly.
/// The dictator is the monotone one, f = +1 iff the named bit is 1; under
/// the character normalization chi_i = -1 at omega_i = 1 this means the
/// dictator's single coefficient sits at {i} with value -1.

BooleanFunction make_parity(std::uint32_t n, const Bits& support,
                            std::uint32_t cap = kDefaultTabulationCap);
/// support_spec: "all" or "first_half".
BooleanFunction make_parity(std::uint32_t n, const std::string& support_spec,
                            std::uint32_t cap = kDefaultTabulationCap);
BooleanFunction make_dictator(std::uint32_t n, std::uint32_t bit_1based,
                              std::uint32_t cap = kDefaultTabulationCap);
BooleanFunction make_majority(std::uint32_t n, std::uint32_t cap = kDefaultTabulationCap);
/// k tribes of b bits each (n = b*k); +1 iff some tribe is all ones.
BooleanFunction make_tribes(std::uint32_t b, std::uint32_t k,
                            std::uint32_t cap = kDefaultTabulationCap);
/// +1 iff floor(|omega| / width) is even. With n = -1 (mod 2*width) the
/// band pattern is antisymmetric under complementation and the mean is 0.
BooleanFunction make_count_band(std::uint32_t n, std::uint32_t width,
                                std::uint32_t cap = kDefaultTabulationCap);
/// Recursive ternary majority on n = 3^height bits.
BooleanFunction make_iterated_majority(std::uint32_t height,
                                       std::uint32_t cap = kDefaultTabulationCap);
/// The paired-edges construction: count_band(2m, 2) composed with the flip
/// of every second endpoint (bits 2,4,...,2m in 1-based indexing). Lives on
/// the isolated-edges graph with edge k joining bits 2k-1 and 2k.
BooleanFunction make_flipped_pairs(std::uint32_t edges,
                                   std::uint32_t cap = kDefaultTabulationCap);

/// The flip set used by make_flipped_pairs.
SubsetMask flipped_pairs_mask(std::uint32_t edges);

struct ZooParams {
  std::uint32_t n = 0;
  std::string support = "all";          // parity
  std::uint32_t bit = 1;                // dictator
  std::uint32_t tribe_size = 0;         // tribes b
  std::uint32_t tribe_count = 0;        // tribes k
  std::uint32_t width = 2;              // count_band
  std::uint32_t height = 1;             // iterated_majority
  std::uint32_t edges = 0;              // flipped_pairs
  std::uint32_t tabulation_cap = kDefaultTabulationCap;
};

/// Families: parity, dictator, majority, tribes, count_band,
/// iterated_majority, flipped_pairs. Percolation crossings are wired in by
/// the percolation module. Throws std::invalid_argument on unknown family
/// or invalid parameters.
BooleanFunction zoo_build(const std::string& family, const ZooParams& params);

}  // namespace xsense
