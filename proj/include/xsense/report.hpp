#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xsense/estimators.hpp"
#include "xsense/io.hpp"

namespace xsense {

/// One row per grid point: params, estimate, stderr, samples, seed. Wall
/// time is deliberately not serialized so identical runs produce identical
/// bytes.
CsvTable sweep_table(const std::vector<SweepRow>& rows);

/// JSON report mirroring the CSV table, stamped with the config hash.
std::string sweep_json(const std::vector<SweepRow>& rows, std::uint64_t config_hash,
                       std::uint64_t seed);

CsvTable estimate_table(const std::vector<std::pair<std::string, EstimatorResult>>& rows);

}  // namespace xsense
