#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xsense {

/// FNV-1a 64 over the canonical config text; embedded in every output file
/// so runs are diffable and attributable.
std::uint64_t fnv1a64(const std::string& text);

std::string format_double(double v);  // %.17g, byte-stable round trip

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
};

/// First line is "# config_hash=<hex> seed=<dec>", then the header row.
void write_csv(const CsvTable& table, const std::string& path, std::uint64_t config_hash,
               std::uint64_t seed);

/// Serialized JSON document with the same hash/seed stamp embedded.
void write_text_file(const std::string& text, const std::string& path);

std::string read_text_file(const std::string& path);

}  // namespace xsense
