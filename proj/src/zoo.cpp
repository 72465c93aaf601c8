#include "xsense/zoo.hpp"

#include <bit>

namespace xsense {

namespace {

BooleanFunction build(std::uint32_t n, std::uint32_t cap, BooleanFunction::Predicate pred,
                      std::string name) {
  if (n <= cap) return BooleanFunction::tabulate(n, pred, std::move(name), cap);
  return BooleanFunction::from_predicate(n, std::move(pred), std::move(name));
}

}  // namespace

BooleanFunction make_parity(std::uint32_t n, const Bits& support, std::uint32_t cap) {
  if (support.size() != n) throw std::invalid_argument("make_parity: support width mismatch");
  Bits supp = support;
  auto pred = [supp](const Bits& omega) {
    return (omega.count_and(supp) & 1u) == 0 ? 1 : -1;
  };
  return build(n, cap, pred, "parity(n=" + std::to_string(n) + ",|S|=" +
                                 std::to_string(support.count()) + ")");
}

BooleanFunction make_parity(std::uint32_t n, const std::string& support_spec, std::uint32_t cap) {
  Bits supp(n);
  if (support_spec == "all") {
    for (std::uint32_t i = 0; i < n; ++i) supp.set(i, true);
  } else if (support_spec == "first_half") {
    if (n % 2 != 0) throw std::invalid_argument("make_parity: first_half needs even n");
    for (std::uint32_t i = 0; i < n / 2; ++i) supp.set(i, true);
  } else {
    throw std::invalid_argument("make_parity: unknown support spec '" + support_spec + "'");
  }
  return make_parity(n, supp, cap);
}

BooleanFunction make_dictator(std::uint32_t n, std::uint32_t bit_1based, std::uint32_t cap) {
  if (bit_1based < 1 || bit_1based > n)
    throw std::invalid_argument("make_dictator: bit index out of range");
  const std::uint32_t pos = bit_1based - 1;
  auto pred = [pos](const Bits& omega) { return omega.get(pos) ? 1 : -1; };
  return build(n, cap, pred,
               "dictator(n=" + std::to_string(n) + ",i=" + std::to_string(bit_1based) + ")");
}

BooleanFunction make_majority(std::uint32_t n, std::uint32_t cap) {
  if (n % 2 == 0) throw std::invalid_argument("make_majority: n must be odd");
  const std::uint32_t threshold = n / 2 + 1;
  auto pred = [threshold](const Bits& omega) { return omega.count() >= threshold ? 1 : -1; };
  return build(n, cap, pred, "majority(n=" + std::to_string(n) + ")");
}

BooleanFunction make_tribes(std::uint32_t b, std::uint32_t k, std::uint32_t cap) {
  if (b < 1 || k < 1) throw std::invalid_argument("make_tribes: need b,k >= 1");
  const std::uint32_t n = b * k;
  auto pred = [b, k](const Bits& omega) {
    for (std::uint32_t t = 0; t < k; ++t) {
      bool all = true;
      for (std::uint32_t j = 0; j < b && all; ++j) all = omega.get(t * b + j);
      if (all) return 1;
    }
    return -1;
  };
  return build(n, cap, pred, "tribes(b=" + std::to_string(b) + ",k=" + std::to_string(k) + ")");
}

BooleanFunction make_count_band(std::uint32_t n, std::uint32_t width, std::uint32_t cap) {
  if (width < 1) throw std::invalid_argument("make_count_band: width must be >= 1");
  auto pred = [width](const Bits& omega) {
    return ((omega.count() / width) & 1u) == 0 ? 1 : -1;
  };
  return build(n, cap, pred,
               "count_band(n=" + std::to_string(n) + ",w=" + std::to_string(width) + ")");
}

BooleanFunction make_iterated_majority(std::uint32_t height, std::uint32_t cap) {
  if (height < 1 || height > 12)
    throw std::invalid_argument("make_iterated_majority: height out of range");
  std::uint32_t n = 1;
  for (std::uint32_t h = 0; h < height; ++h) n *= 3;
  auto pred = [n](const Bits& omega) {
    std::vector<std::int8_t> level(n);
    for (std::uint32_t i = 0; i < n; ++i) level[i] = omega.get(i) ? 1 : -1;
    while (level.size() > 1) {
      std::vector<std::int8_t> next(level.size() / 3);
      for (std::size_t i = 0; i < next.size(); ++i) {
        const int s = level[3 * i] + level[3 * i + 1] + level[3 * i + 2];
        next[i] = s > 0 ? 1 : -1;
      }
      level = std::move(next);
    }
    return static_cast<int>(level[0]);
  };
  return build(n, cap, pred, "iterated_majority(h=" + std::to_string(height) + ")");
}

SubsetMask flipped_pairs_mask(std::uint32_t edges) {
  if (edges < 1) throw std::invalid_argument("flipped_pairs_mask: need >= 1 edge");
  SubsetMask B(2 * edges);
  for (std::uint32_t k = 0; k < edges; ++k) B.bits.set(2 * k + 1, true);
  return B;
}

BooleanFunction make_flipped_pairs(std::uint32_t edges, std::uint32_t cap) {
  if (edges < 1) throw std::invalid_argument("make_flipped_pairs: need >= 1 edge");
  const std::uint32_t n = 2 * edges;
  const Bits B = flipped_pairs_mask(edges).bits;
  auto pred = [B](const Bits& omega) {
    Bits flipped = omega;
    flipped.xor_with(B);
    return ((flipped.count() / 2) & 1u) == 0 ? 1 : -1;
  };
  return build(n, cap, pred, "flipped_pairs(m=" + std::to_string(edges) + ")");
}

BooleanFunction zoo_build(const std::string& family, const ZooParams& p) {
  if (family == "parity") return make_parity(p.n, p.support, p.tabulation_cap);
  if (family == "dictator") return make_dictator(p.n, p.bit, p.tabulation_cap);
  if (family == "majority") return make_majority(p.n, p.tabulation_cap);
  if (family == "tribes") return make_tribes(p.tribe_size, p.tribe_count, p.tabulation_cap);
  if (family == "count_band") return make_count_band(p.n, p.width, p.tabulation_cap);
  if (family == "iterated_majority") return make_iterated_majority(p.height, p.tabulation_cap);
  if (family == "flipped_pairs") return make_flipped_pairs(p.edges, p.tabulation_cap);
  throw std::invalid_argument("zoo_build: unknown family '" + family + "'");
}

}  // namespace xsense
