#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "xsense/bits.hpp"

namespace xsense {

/// Default cap on truth-table width: a 2^24 table is 16 MiB at one byte per
/// value. Larger functions stay in predicate form.
inline constexpr std::uint32_t kDefaultTabulationCap = 24;

class NotTabulatedError : public std::logic_error {
 public:
  explicit NotTabulatedError(const std::string& op)
      : std::logic_error(op + ": function is in predicate form (no truth table)") {}
};

/// A function {0,1}^n -> {-1,+1}: either a full truth table (mask order) or
/// an evaluable predicate for patches too large to tabulate. Immutable after
/// construction and safe to share across workers.
class BooleanFunction {
 public:
  using Predicate = std::function<int(const Bits&)>;

  static BooleanFunction from_table(std::uint32_t n, std::vector<std::int8_t> table,
                                    std::string name = "");
  static BooleanFunction from_predicate(std::uint32_t n, Predicate pred, std::string name = "");

  /// Tabulates a predicate exhaustively; n must be within the cap.
  static BooleanFunction tabulate(std::uint32_t n, const Predicate& pred, std::string name = "",
                                  std::uint32_t cap = kDefaultTabulationCap);

  std::uint32_t input_bits() const { return n_; }
  bool tabulated() const { return !table_.empty(); }
  const std::string& name() const { return name_; }

  int evaluate(const Configuration& omega) const {
    if (omega.size() != n_) throw std::invalid_argument("BooleanFunction: width mismatch");
    return evaluate_bits(omega.bits);
  }

  int evaluate_bits(const Bits& bits) const {
    if (!table_.empty()) return table_[bits.low64()];
    return pred_(bits);
  }

  /// Tabulated lookup by input mask.
  int value_at(std::uint64_t mask) const {
    require_table("BooleanFunction::value_at");
    return table_[mask];
  }

  const std::vector<std::int8_t>& table() const {
    require_table("BooleanFunction::table");
    return table_;
  }

  void require_table(const std::string& op) const {
    if (table_.empty()) throw NotTabulatedError(op);
  }

 private:
  std::uint32_t n_ = 0;
  std::vector<std::int8_t> table_;
  Predicate pred_;
  std::string name_;
};

/// Truth-table binary format: 8-byte header (magic "XSBF", version byte,
/// width byte, two reserved zero bytes), then 2^n signed bytes in mask order.
void save_truth_table(const BooleanFunction& f, const std::string& path);
BooleanFunction load_truth_table(const std::string& path);

}  // namespace xsense
