#include "xsense/report.hpp"

#include <cstdio>

#include <json.hpp>

namespace xsense {

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
  CsvTable table;
  table.columns = {"function", "graph",    "n",       "kind", "level",
                   "estimate", "stderr",   "naive",   "samples", "seed"};
  for (const auto& row : rows) {
    table.add_row({row.function, row.graph, std::to_string(row.n), row.kind,
                   format_double(row.level), format_double(row.result.estimate),
                   format_double(row.result.stderr_), format_double(row.result.naive_estimate),
                   std::to_string(row.result.samples), std::to_string(row.result.seed)});
  }
  return table;
}

std::string sweep_json(const std::vector<SweepRow>& rows, std::uint64_t config_hash,
                       std::uint64_t seed) {
  nlohmann::json doc;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(config_hash));
  doc["config_hash"] = hash_hex;
  doc["seed"] = seed;
  doc["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json j;
    j["function"] = row.function;
    j["graph"] = row.graph;
    j["n"] = row.n;
    j["kind"] = row.kind;
    j["level"] = row.level;
    j["estimate"] = row.result.estimate;
    j["stderr"] = row.result.stderr_;
    j["naive"] = row.result.naive_estimate;
    j["samples"] = row.result.samples;
    j["seed"] = row.result.seed;
    doc["rows"].push_back(j);
  }
  return doc.dump(2) + "\n";
}

CsvTable estimate_table(const std::vector<std::pair<std::string, EstimatorResult>>& rows) {
  CsvTable table;
  table.columns = {"label", "estimate", "stderr", "naive", "samples", "seed"};
  for (const auto& [label, res] : rows) {
    table.add_row({label, format_double(res.estimate), format_double(res.stderr_),
                   format_double(res.naive_estimate), std::to_string(res.samples),
                   std::to_string(res.seed)});
  }
  return table;
}

}  // namespace xsense
