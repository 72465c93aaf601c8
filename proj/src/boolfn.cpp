#include "xsense/boolfn.hpp"

#include <cstdio>
#include <cstring>

namespace xsense {

BooleanFunction BooleanFunction::from_table(std::uint32_t n, std::vector<std::int8_t> table,
                                            std::string name) {
  if (n < 1 || n > kDefaultTabulationCap + 8)
    throw std::invalid_argument("BooleanFunction: unreasonable table width");
  if (table.size() != (std::size_t{1} << n))
    throw std::invalid_argument("BooleanFunction: table size != 2^n");
  for (std::int8_t v : table)
    if (v != 1 && v != -1)
      throw std::invalid_argument("BooleanFunction: table values must be exactly +-1");
  BooleanFunction f;
  f.n_ = n;
  f.table_ = std::move(table);
  f.name_ = std::move(name);
  return f;
}

BooleanFunction BooleanFunction::from_predicate(std::uint32_t n, Predicate pred,
                                                std::string name) {
  if (n < 1) throw std::invalid_argument("BooleanFunction: width must be >= 1");
  if (!pred) throw std::invalid_argument("BooleanFunction: empty predicate");
  BooleanFunction f;
  f.n_ = n;
  f.pred_ = std::move(pred);
  f.name_ = std::move(name);
  return f;
}

BooleanFunction BooleanFunction::tabulate(std::uint32_t n, const Predicate& pred,
                                          std::string name, std::uint32_t cap) {
  if (n > cap) throw std::invalid_argument("BooleanFunction::tabulate: width above cap");
  std::vector<std::int8_t> table(std::size_t{1} << n);
  for (std::uint64_t mask = 0; mask < table.size(); ++mask) {
    const int v = pred(Bits::from_mask(n, mask));
    if (v != 1 && v != -1)
      throw std::invalid_argument("BooleanFunction::tabulate: predicate returned non +-1");
    table[mask] = static_cast<std::int8_t>(v);
  }
  return from_table(n, std::move(table), std::move(name));
}

namespace {
constexpr char kMagic[4] = {'X', 'S', 'B', 'F'};
constexpr std::uint8_t kVersion = 1;
}  // namespace

void save_truth_table(const BooleanFunction& f, const std::string& path) {
  f.require_table("save_truth_table");
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("save_truth_table: cannot open " + path);
  std::uint8_t header[8] = {};
  std::memcpy(header, kMagic, 4);
  header[4] = kVersion;
  header[5] = static_cast<std::uint8_t>(f.input_bits());
  bool ok = std::fwrite(header, 1, 8, fp) == 8;
  ok = ok && std::fwrite(f.table().data(), 1, f.table().size(), fp) == f.table().size();
  std::fclose(fp);
  if (!ok) throw std::runtime_error("save_truth_table: short write to " + path);
}

BooleanFunction load_truth_table(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw std::runtime_error("load_truth_table: cannot open " + path);
  std::uint8_t header[8];
  if (std::fread(header, 1, 8, fp) != 8) {
    std::fclose(fp);
    throw std::runtime_error("load_truth_table: truncated header in " + path);
  }
  if (std::memcmp(header, kMagic, 4) != 0) {
    std::fclose(fp);
    throw std::runtime_error("load_truth_table: bad magic in " + path);
  }
  if (header[4] != kVersion) {
    std::fclose(fp);
    throw std::runtime_error("load_truth_table: unsupported version in " + path);
  }
  const std::uint32_t n = header[5];
  if (n < 1 || n > 30) {
    std::fclose(fp);
    throw std::runtime_error("load_truth_table: bad width in " + path);
  }
  std::vector<std::int8_t> table(std::size_t{1} << n);
  const std::size_t got = std::fread(table.data(), 1, table.size(), fp);
  std::fclose(fp);
  if (got != table.size()) throw std::runtime_error("load_truth_table: truncated table in " + path);
  return BooleanFunction::from_table(n, std::move(table), path);
}

}  // namespace xsense
