#include "xsense/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xsense {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns.size())
    throw std::invalid_argument("CsvTable::add_row: column count mismatch");
  rows.push_back(std::move(row));
}

void write_csv(const CsvTable& table, const std::string& path, std::uint64_t config_hash,
               std::uint64_t seed) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("write_csv: cannot open " + path);
  std::fprintf(fp, "# config_hash=%016llx seed=%llu\n",
               static_cast<unsigned long long>(config_hash),
               static_cast<unsigned long long>(seed));
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    std::fprintf(fp, "%s%s", table.columns[c].c_str(),
                 c + 1 < table.columns.size() ? "," : "\n");
  for (const auto& row : table.rows)
    for (std::size_t c = 0; c < row.size(); ++c)
      std::fprintf(fp, "%s%s", row[c].c_str(), c + 1 < row.size() ? "," : "\n");
  std::fclose(fp);
}

void write_text_file(const std::string& text, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw std::runtime_error("write_text_file: cannot open " + path);
  const bool ok = std::fwrite(text.data(), 1, text.size(), fp) == text.size();
  std::fclose(fp);
  if (!ok) throw std::runtime_error("write_text_file: short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_text_file: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace xsense
