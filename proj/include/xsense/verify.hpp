#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xsense {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifyOptions {
  int workers = 1;
  std::uint64_t seed = 94286201;
  std::string scratch_dir = "/tmp";
  /// When set, only criteria whose name contains the filter run.
  std::string only;
};

/// Runs the full verification suite: exact spectral identities, the
/// Monte-Carlo-versus-closed-form oracles, kernel structure, conservation
/// laws, the coupling constructions, domination, the pivotal bound, the
/// percolation trend experiments and the determinism contract. One result
/// per criterion; when a progress callback is given it fires as each
/// criterion finishes.
std::vector<CriterionResult> run_verification(const VerifyOptions& opt);
std::vector<CriterionResult> run_verification(const VerifyOptions& opt,
                                              void (*progress)(const CriterionResult&));

}  // namespace xsense
