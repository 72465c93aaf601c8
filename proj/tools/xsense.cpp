// xsense: batch front end for the sensitivity laboratory.
//
//   xsense spectrum|sweep|exact|couple|perc|verify --config FILE
//          [--seed N] [--workers K] [--out DIR] [--set /path=value ...]
//
// Configs are single JSON documents; --set overrides any field by JSON
// pointer, the seed flag wins over the XSENSE_SEED environment variable,
// which wins over the config. Identical configs and seeds produce
// byte-identical output files at any worker count.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xsense/couplings.hpp"
#include "xsense/estimators.hpp"
#include "xsense/kernel.hpp"
#include "xsense/percolation.hpp"
#include "xsense/report.hpp"
#include "xsense/spectral.hpp"
#include "xsense/verify.hpp"
#include "xsense/zoo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xsense;

namespace {

struct CommandContext {
  json config;
  std::uint64_t seed = 1;
  int workers = 1;
  fs::path out_dir;
  std::uint64_t config_hash = 0;

  RunOptions run_options() const { return RunOptions{workers}; }
  std::string out(const std::string& file) const { return (out_dir / file).string(); }
};

json field(const json& j, const std::string& key) {
  if (!j.contains(key)) throw std::invalid_argument("config: missing field '" + key + "'");
  return j.at(key);
}

std::vector<double> double_list(const json& j, const std::string& key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  return out;
}

std::vector<std::uint32_t> u32_list(const json& j, const std::string& key) {
  std::vector<std::uint32_t> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.get<std::uint32_t>());
  return out;
}

ZooParams zoo_params_from(const json& f) {
  ZooParams p;
  p.n = f.value("n", 0u);
  p.support = f.value("support", "all");
  p.bit = f.value("bit", 1u);
  p.tribe_size = f.value("tribe_size", 0u);
  p.tribe_count = f.value("tribe_count", 0u);
  p.width = f.value("width", 2u);
  p.height = f.value("height", 1u);
  p.edges = f.value("edges", 0u);
  p.tabulation_cap = f.value("tabulation_cap", kDefaultTabulationCap);
  return p;
}

BooleanFunction function_from(const json& f) {
  const std::string family = field(f, "family").get<std::string>();
  if (family == "crossing") {
    const LatticePatch patch =
        patch_build(f.value("a", 1.0), f.value("b", 1.0), f.value("n", 3));
    return crossing_function(patch, f.value("tabulation_cap", 20u));
  }
  if (family == "coarse_majority")
    return coarse_majority_crossing(field(f, "n").get<std::uint32_t>(),
                                    field(f, "subbox").get<std::uint32_t>());
  return zoo_build(family, zoo_params_from(f));
}

DynamicsGraph graph_from(const json& g, std::uint32_t bits) {
  return graph_for_bits(field(g, "family").get<std::string>(), bits);
}

void cmd_spectrum(const CommandContext& ctx) {
  const BooleanFunction f = function_from(field(ctx.config, "function"));
  const Spectrum sp = transform(f);

  CsvTable coeffs;
  coeffs.columns = {"mask", "size", "coefficient"};
  for (std::uint64_t mask = 0; mask < sp.coef.size(); ++mask) {
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%llx", static_cast<unsigned long long>(mask));
    int size = 0;
    for (std::uint64_t m = mask; m; m &= m - 1) ++size;
    coeffs.add_row({hex, std::to_string(size), format_double(sp.coef[mask])});
  }
  write_csv(coeffs, ctx.out("spectrum.csv"), ctx.config_hash, ctx.seed);

  CsvTable levels;
  levels.columns = {"level", "energy"};
  const auto energies = sp.level_energies();
  for (std::uint32_t k = 0; k <= sp.n; ++k)
    levels.add_row({std::to_string(k), format_double(energies[k])});
  write_csv(levels, ctx.out("levels.csv"), ctx.config_hash, ctx.seed);

  if (ctx.config.value("dump_table", false))
    save_truth_table(f, ctx.out("function.xsbf"));
  std::printf("spectrum: %s, %zu coefficients\n", f.name().c_str(), sp.coef.size());
}

void cmd_sweep(const CommandContext& ctx) {
  SweepSpec spec;
  const json fconf = field(ctx.config, "function");
  spec.function_family = field(fconf, "family").get<std::string>();
  spec.zoo = zoo_params_from(fconf);
  spec.graph_family = field(field(ctx.config, "graph"), "family").get<std::string>();
  spec.n_list = u32_list(ctx.config, "n_grid");
  spec.t_list = double_list(ctx.config, "t_grid");
  spec.eps_list = double_list(ctx.config, "eps_grid");
  spec.samples = ctx.config.value("samples", 100000ull);
  spec.seed = ctx.seed;
  spec.workers = ctx.workers;
  const auto rows = sensitivity_sweep(spec);
  write_csv(sweep_table(rows), ctx.out("sweep.csv"), ctx.config_hash, ctx.seed);
  write_text_file(sweep_json(rows, ctx.config_hash, ctx.seed), ctx.out("sweep.json"));
  std::printf("sweep: %zu rows\n", rows.size());
}

void cmd_exact(const CommandContext& ctx) {
  const BooleanFunction f = function_from(field(ctx.config, "function"));
  const Spectrum sp = transform(f);
  const DynamicsGraph g = graph_from(field(ctx.config, "graph"), f.input_bits());
  const auto t_grid = double_list(ctx.config, "t_grid");
  const auto thresholds = double_list(ctx.config, "rate_thresholds");
  if (t_grid.empty() && thresholds.empty())
    throw std::invalid_argument("config: exact needs t_grid or rate_thresholds");

  CsvTable table;
  table.columns = {"quantity", "argument", "value"};
  for (double t : t_grid) {
    table.add_row({"signed_correlation", format_double(t),
                   format_double(exact_exclusion_correlation(sp, g, t))});
    table.add_row({"absolute_correlation", format_double(t),
                   format_double(exact_absolute_correlation(sp, g, t))});
  }
  for (double c : thresholds) {
    const LowRateMassReport rep = low_rate_mass(sp, g, c);
    table.add_row({"low_rate_mass", format_double(c), format_double(rep.mass)});
    table.add_row({"conserved_mass", format_double(c), format_double(rep.conserved_mass)});
  }
  write_csv(table, ctx.out("exact.csv"), ctx.config_hash, ctx.seed);

  if (ctx.config.value("debug_dump", false)) {
    const auto energies = sp.level_energies();
    for (std::uint32_t k = 1; k <= sp.n; ++k) {
      if (energies[k] == 0.0) continue;
      const LevelGenerator gen(g, k);
      const LevelEigen eig = level_eigen(gen);
      CsvTable rates;
      rates.columns = {"index", "rate"};
      for (Eigen::Index l = 0; l < eig.rates.size(); ++l)
        rates.add_row({std::to_string(l), format_double(eig.rates(l))});
      write_csv(rates, ctx.out("eigen_level" + std::to_string(k) + ".csv"), ctx.config_hash,
                ctx.seed);
      if (!t_grid.empty()) {
        const LevelKernel kernel = kernel_at(gen, t_grid.front());
        CsvTable kt;
        kt.columns = {"from", "to", "probability"};
        for (std::size_t a = 0; a < gen.states(); ++a)
          for (std::size_t b = 0; b < gen.states(); ++b)
            kt.add_row({std::to_string(gen.state_masks()[a]),
                        std::to_string(gen.state_masks()[b]),
                        format_double(kernel.matrix(static_cast<Eigen::Index>(a),
                                                    static_cast<Eigen::Index>(b)))});
        write_csv(kt, ctx.out("kernel_level" + std::to_string(k) + ".csv"), ctx.config_hash,
                  ctx.seed);
      }
    }
  }
  std::printf("exact: %s on %s\n", f.name().c_str(), g.family().c_str());
}

void cmd_couple(const CommandContext& ctx) {
  const auto samples = ctx.config.value("samples", 100000ull);
  json report;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(ctx.config_hash));
  report["config_hash"] = hash_hex;
  report["seed"] = ctx.seed;

  if (ctx.config.contains("n")) {
    const auto n = field(ctx.config, "n").get<std::uint32_t>();
    const double t = ctx.config.value("t", 1.0);
    const N01Report stats = n01_statistics(complete_graph(n), t, samples,
                                           derive_seed(ctx.seed, 1), ctx.run_options());
    CsvTable table;
    table.columns = {"ones", "count", "mean", "variance", "predicted_mean", "variance_bound"};
    for (const auto& b : stats.buckets)
      table.add_row({std::to_string(b.ones_at_start), std::to_string(b.count),
                     format_double(b.mean), format_double(b.variance),
                     format_double(b.predicted_mean), format_double(b.variance_bound)});
    write_csv(table, ctx.out("couple_n01.csv"), ctx.config_hash, ctx.seed);
    report["n01"] = {{"n", n}, {"t", t}, {"samples", samples}};
  }

  if (ctx.config.contains("domination")) {
    const json dom = ctx.config.at("domination");
    report["domination"] = json::array();
    std::uint64_t salt = 100;
    for (std::uint32_t nv : u32_list(dom, "vertices")) {
      const DynamicsGraph g = complete_graph(nv);
      for (double frac : double_list(dom, "fractions")) {
        const auto k = static_cast<std::uint32_t>(std::lround(frac * nv));
        SubsetMask S(nv);
        for (std::uint32_t i = 0; i < k; ++i) S.bits.set(i, true);
        for (double t : double_list(dom, "times")) {
          const DominationReport rep = binomial_domination_check(g, S, t, samples,
                                                    derive_seed(ctx.seed, salt++),
                                                    ctx.run_options());
          json cell;
          cell["vertices"] = rep.vertices;
          cell["set_size"] = rep.set_size;
          cell["t"] = rep.t;
          cell["eps"] = rep.eps;
          cell["max_cdf_violation"] = rep.max_cdf_violation;
          cell["dkw_band"] = rep.dkw_band;
          cell["dominated"] = rep.dominated;
          cell["samples"] = rep.samples;
          report["domination"].push_back(cell);
        }
      }
    }
  }
  write_text_file(report.dump(2) + "\n", ctx.out("couple.json"));
  std::printf("couple: report written\n");
}

void cmd_perc(const CommandContext& ctx) {
  const std::string experiment = field(ctx.config, "experiment").get<std::string>();
  const auto samples = ctx.config.value("samples", 10000ull);
  std::vector<std::pair<std::string, EstimatorResult>> rows;
  std::uint64_t salt = 1;

  if (experiment == "medium_range") {
    std::vector<std::int32_t> ns;
    for (std::uint32_t n : u32_list(ctx.config, "n_grid")) ns.push_back(n);
    const auto result = medium_range_experiment(ns, ctx.config.value("alpha", 0.5),
                                                ctx.config.value("t", 1.0), samples, ctx.seed,
                                                ctx.run_options());
    for (const auto& row : result) {
      rows.emplace_back("n=" + std::to_string(row.n) + " exclusion", row.exclusion);
      rows.emplace_back("n=" + std::to_string(row.n) + " iid", row.iid);
    }
  } else if (experiment == "complete_correlation") {
    for (std::uint32_t n : u32_list(ctx.config, "n_grid"))
      rows.emplace_back("n=" + std::to_string(n),
                        crossing_exclusion_correlation(static_cast<std::int32_t>(n),
                                                       ctx.config.value("t", 1.0), samples,
                                                       derive_seed(ctx.seed, salt++),
                                                       ctx.run_options()));
  } else if (experiment == "switches") {
    for (std::uint32_t n : u32_list(ctx.config, "n_grid"))
      rows.emplace_back("n=" + std::to_string(n),
                        crossing_switch_count(static_cast<std::int32_t>(n),
                                              ctx.config.value("horizon", 1.0), samples,
                                              derive_seed(ctx.seed, salt++),
                                              ctx.run_options()));
  } else if (experiment == "duality") {
    rows.emplace_back("n=" + std::to_string(ctx.config.value("n", 32)),
                      crossing_probability(ctx.config.value("n", 32), samples,
                                           derive_seed(ctx.seed, salt++), ctx.run_options()));
  } else if (experiment == "subbox_flip") {
    for (std::uint32_t s : u32_list(ctx.config, "s_grid"))
      rows.emplace_back("s=" + std::to_string(s),
                        subbox_flip_probability(s, ctx.config.value("t", 1.0),
                                                ctx.config.value("margin", 10u), samples,
                                                derive_seed(ctx.seed, salt++),
                                                ctx.run_options()));
  } else {
    throw std::invalid_argument("config: unknown perc experiment '" + experiment + "'");
  }
  write_csv(estimate_table(rows), ctx.out("perc.csv"), ctx.config_hash, ctx.seed);
  std::printf("perc %s: %zu rows\n", experiment.c_str(), rows.size());
}

int cmd_verify(const CommandContext& ctx, bool write_report) {
  VerifyOptions opt;
  opt.workers = ctx.workers;
  opt.seed = ctx.config.value("seed", ctx.seed);
  opt.only = ctx.config.value("only", "");
  const auto results = run_verification(opt, [](const CriterionResult& r) {
    std::printf("[%s] %-22s (%6.1fs)  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                r.seconds, r.detail.c_str());
    std::fflush(stdout);
  });
  bool all = !results.empty();
  for (const auto& r : results) all = all && r.pass;
  if (write_report) {
    json doc;
    doc["seed"] = opt.seed;
    doc["criteria"] = json::array();
    for (const auto& r : results)
      doc["criteria"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
    doc["pass"] = all;
    write_text_file(doc.dump(2) + "\n", ctx.out("verify.json"));
  }
  std::printf("%s\n", all ? "OK" : "FAILED");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"xsense: exact and Monte Carlo sensitivity experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed_flag = 0;
  bool seed_set = false;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> overrides;

  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t s) { seed_flag = s; seed_set = true; },
         "Master seed (wins over XSENSE_SEED and the config)");
  app.add_option("--workers", workers, "Worker pool size");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--set", overrides, "Override a config field: /json/pointer=value");

  for (const char* name : {"spectrum", "sweep", "exact", "couple", "perc", "verify"})
    app.add_subcommand(name)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    CommandContext ctx;
    ctx.config = json::object();
    if (!config_path.empty()) ctx.config = json::parse(read_text_file(config_path));
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--set expects /pointer=value, got '" + kv + "'");
      const json::json_pointer ptr(kv.substr(0, eq));
      const std::string raw = kv.substr(eq + 1);
      json value;
      try {
        value = json::parse(raw);
      } catch (const json::parse_error&) {
        value = raw;  // plain string
      }
      ctx.config[ptr] = value;
    }
    if (ctx.config.contains("command") &&
        ctx.config.at("command").get<std::string>() != command)
      throw std::invalid_argument("config command '" +
                                  ctx.config.at("command").get<std::string>() +
                                  "' does not match subcommand '" + command + "'");

    ctx.seed = ctx.config.value("seed", 1ull);
    if (const char* env = std::getenv("XSENSE_SEED"); env && *env)
      ctx.seed = std::strtoull(env, nullptr, 10);
    if (seed_set) ctx.seed = seed_flag;
    ctx.workers = std::max(1, workers);
    ctx.out_dir = out_dir;

    json effective = ctx.config;
    effective["command"] = command;
    effective["seed"] = ctx.seed;
    ctx.config = effective;
    ctx.config_hash = fnv1a64(effective.dump());

    // Validate-then-write: commands construct everything before the first
    // file is opened, so rejected configs leave no outputs.
    if (command == "verify") {
      const bool wants_report = app.count("--out") > 0;
      if (wants_report) fs::create_directories(ctx.out_dir);
      return cmd_verify(ctx, wants_report);
    }
    fs::create_directories(ctx.out_dir);
    if (command == "spectrum")
      cmd_spectrum(ctx);
    else if (command == "sweep")
      cmd_sweep(ctx);
    else if (command == "exact")
      cmd_exact(ctx);
    else if (command == "couple")
      cmd_couple(ctx);
    else if (command == "perc")
      cmd_perc(ctx);
    return 0;
  } catch (const CapExceededError& e) {
    std::fprintf(stderr, "refused: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
