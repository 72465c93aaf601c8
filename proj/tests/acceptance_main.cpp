// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Never compiled out; the checks run at full sample counts.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

#include "xsense/verify.hpp"

int main(int argc, char** argv) {
  xsense::VerifyOptions opt;
  opt.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto value = [&](const char* name) -> const char* {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", name);
        std::exit(2);
      }
      return argv[++i];
    };
    if (arg == "--workers")
      opt.workers = std::atoi(value("--workers"));
    else if (arg == "--seed")
      opt.seed = std::strtoull(value("--seed"), nullptr, 10);
    else if (arg == "--only")
      opt.only = value("--only");
    else if (arg == "--scratch")
      opt.scratch_dir = value("--scratch");
    else {
      std::fprintf(stderr, "unknown argument %s\n", arg.c_str());
      return 2;
    }
  }

  const auto results = xsense::run_verification(opt, [](const xsense::CriterionResult& r) {
    std::printf("[%s] %-22s (%6.1fs)  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
  });
  bool all_pass = !results.empty();
  double total = 0.0;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    total += r.seconds;
  }
  std::printf("%s: %zu criteria in %.1fs\n", all_pass ? "OK" : "FAILED", results.size(), total);
  return all_pass ? 0 : 1;
}
