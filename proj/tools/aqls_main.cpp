#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aqls/evolve.hpp"
#include "aqls/experiment.hpp"
#include "aqls/pauli.hpp"

namespace {

using aqls::ConfigError;

// --seeds accepts either a count ("20" -> base..base+19) or an explicit
// comma-separated list; a trailing comma forces list interpretation for a
// single seed ("42," -> just 42).
std::vector<std::uint64_t> parse_seeds(const std::string& arg,
                                       std::uint64_t base) {
  auto parse_one = [](const std::string& token) {
    std::size_t used = 0;
    std::uint64_t value = 0;
    try {
      value = std::stoull(token, &used);
    } catch (const std::exception&) {
      throw ConfigError("--seeds: \"" + token + "\" is not an integer");
    }
    if (used != token.size()) {
      throw ConfigError("--seeds: \"" + token + "\" is not an integer");
    }
    return value;
  };

  if (arg.find(',') == std::string::npos) {
    const std::uint64_t count = parse_one(arg);
    if (count > 1000000) {
      throw ConfigError("--seeds: count " + arg + " is unreasonably large");
    }
    std::vector<std::uint64_t> seeds;
    seeds.reserve(count);
    for (std::uint64_t k = 0; k < count; ++k) seeds.push_back(base + k);
    return seeds;
  }
  std::vector<std::uint64_t> seeds;
  std::string token;
  std::istringstream in(arg);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    seeds.push_back(parse_one(token));
  }
  if (seeds.empty()) {
    throw ConfigError("--seeds: no seeds in \"" + arg + "\"");
  }
  return seeds;
}

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::optional<int> algorithm;
  std::optional<int> steps;
  std::optional<double> kappa;
  std::optional<std::string> schedule_kind;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
  auto* config =
      cmd->add_option("--config", flags->config_path, "Experiment config JSON file");
  auto* preset = cmd->add_option("--preset", flags->preset,
                                 "Named preset (e.g. alg1_paper, alg2_paper)");
  config->excludes(preset);
  preset->excludes(config);
  cmd->add_option("--algorithm", flags->algorithm, "Override algorithm (1 or 2)");
  cmd->add_option("--steps", flags->steps, "Override the number of steps");
  cmd->add_option("--kappa", flags->kappa, "Override the condition number");
  cmd->add_option("--schedule", flags->schedule_kind,
                  "Schedule grid: natural (default) or linear baseline");
}

aqls::ExperimentConfig resolve_config(const CommonFlags& flags) {
  if (flags.config_path.empty() == flags.preset.empty()) {
    throw ConfigError("exactly one of --config or --preset is required");
  }
  const std::filesystem::path path = flags.config_path.empty()
                                         ? aqls::resolve_preset(flags.preset)
                                         : std::filesystem::path(flags.config_path);
  aqls::ExperimentConfig cfg = aqls::load_config(path);
  if (flags.algorithm) {
    if (*flags.algorithm != 1 && *flags.algorithm != 2) {
      throw ConfigError("--algorithm: expected 1 or 2");
    }
    cfg.algorithm = *flags.algorithm == 1 ? aqls::Algorithm::kAlg1
                                          : aqls::Algorithm::kAlg2;
  }
  if (flags.steps) {
    if (*flags.steps < 1) throw ConfigError("--steps: expected >= 1");
    cfg.steps = *flags.steps;
  }
  if (flags.kappa) cfg.kappa_override = *flags.kappa;
  if (flags.schedule_kind) {
    if (*flags.schedule_kind == "natural") {
      cfg.linear_schedule = false;
    } else if (*flags.schedule_kind == "linear") {
      cfg.linear_schedule = true;
    } else {
      throw ConfigError("--schedule: expected natural or linear");
    }
  }
  return cfg;
}

void write_or_print(const std::optional<std::string>& out_dir,
                    const std::string& filename, const std::string& text) {
  if (!out_dir) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(*out_dir);
  const std::filesystem::path path = std::filesystem::path(*out_dir) / filename;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw aqls::IoError("cannot open " + path.string() + " for writing");
  }
  out << text;
  std::cout << path.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Classical simulator for adiabatic-inspired quantum linear-system solvers"};
  app.require_subcommand(1);

  // ---- solve ----
  auto* solve = app.add_subcommand(
      "solve", "Run the randomized evolution and emit CSVs plus report.json");
  CommonFlags solve_flags;
  add_common(solve, &solve_flags);
  std::optional<std::string> seeds_spec;
  std::uint64_t base_seed = 1;
  std::optional<std::string> mode;
  std::optional<double> target_error;
  std::optional<int> jobs;
  std::optional<std::string> out_dir;
  solve->add_option("--seeds", seeds_spec,
                    "Seed count (N, from --base-seed) or explicit list (a,b,c)");
  solve->add_option("--base-seed", base_seed,
                    "First seed when --seeds is a count (default 1)");
  solve->add_option("--mode", mode, "trajectory, channel or both");
  solve->add_option("--target-error", target_error,
                    "Precision target recorded in the report");
  solve->add_option("--jobs", jobs, "Worker threads for multi-seed sweeps");
  solve->add_option("--out", out_dir, "Output directory");

  // ---- spectrum ----
  auto* spectrum = app.add_subcommand(
      "spectrum", "Tabulate eigenvalues of H(s) or H'(s) on a uniform s grid");
  CommonFlags spectrum_flags;
  add_common(spectrum, &spectrum_flags);
  int points = 51;
  std::string which = "h";
  std::optional<int> levels;
  std::optional<std::string> spectrum_out;
  spectrum->add_option("--points", points, "Number of s samples (default 51)");
  spectrum->add_option("--hamiltonian", which, "h (default) or hprime");
  spectrum->add_option("--levels", levels,
                       "How many levels nearest zero (default 4 for h, 8 for hprime; 0 = all)");
  spectrum->add_option("--out", spectrum_out,
                       "Directory for spectrum.csv (default: print to stdout)");

  // ---- schedule ----
  auto* schedule = app.add_subcommand(
      "schedule", "Dump the annealing grid (j, v, s, gap bound, t_max)");
  CommonFlags schedule_flags;
  add_common(schedule, &schedule_flags);
  std::optional<std::string> schedule_out;
  schedule->add_option("--out", schedule_out,
                       "Directory for schedule.csv (default: print to stdout)");

  // ---- oracle ----
  auto* oracle = app.add_subcommand(
      "oracle", "Solve A x = b directly and print the normalized solution");
  CommonFlags oracle_flags;
  add_common(oracle, &oracle_flags);
  std::optional<std::string> oracle_out;
  oracle->add_option("--out", oracle_out,
                     "Directory for oracle.json (default: print to stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      aqls::ExperimentConfig cfg = resolve_config(solve_flags);
      if (seeds_spec) cfg.seeds = parse_seeds(*seeds_spec, base_seed);
      if (mode) cfg.mode = aqls::run_mode_from_string(*mode);
      if (target_error) cfg.target_error = *target_error;
      if (jobs) {
        if (*jobs < 1) throw ConfigError("--jobs: expected >= 1");
        cfg.jobs = *jobs;
      }
      if (out_dir) cfg.output_dir = *out_dir;

      const aqls::EmittedArtifacts artifacts = aqls::run_experiment(cfg);
      std::cout << "report: " << artifacts.report.string() << "\n";
      std::cout << "trajectory csvs: " << artifacts.trajectory_csvs.size()
                << "\n";
      if (artifacts.channel_csv) {
        std::cout << "channel csv: " << artifacts.channel_csv->string() << "\n";
      }
      if (artifacts.any_failed) {
        std::cerr << "warning: at least one run failed post-selection\n";
        return 3;
      }
      return 0;
    }

    if (spectrum->parsed()) {
      const aqls::ExperimentConfig cfg = resolve_config(spectrum_flags);
      const aqls::ProblemInstance inst = aqls::make_instance(cfg);
      if (which != "h" && which != "hprime") {
        throw ConfigError("--hamiltonian: expected h or hprime");
      }
      const bool hprime = which == "hprime";
      const int kept = levels ? *levels : (hprime ? 8 : 4);
      write_or_print(spectrum_out, "spectrum.csv",
                     aqls::render_spectrum_csv(inst, points, hprime, kept));
      return 0;
    }

    if (schedule->parsed()) {
      const aqls::ExperimentConfig cfg = resolve_config(schedule_flags);
      const aqls::ProblemInstance inst = aqls::make_instance(cfg);
      write_or_print(schedule_out, "schedule.csv",
                     aqls::render_schedule_csv(aqls::make_schedule(cfg, inst)));
      return 0;
    }

    if (oracle->parsed()) {
      const aqls::ExperimentConfig cfg = resolve_config(oracle_flags);
      const aqls::ProblemInstance inst = aqls::make_instance(cfg);
      const aqls::ComplexVector x = aqls::oracle_solve(inst);
      nlohmann::ordered_json out;
      if (!inst.expression.empty()) out["expression"] = inst.expression;
      out["dim"] = inst.dim();
      out["kappa"] = inst.kappa;
      out["scale"] = inst.scale;
      nlohmann::ordered_json sol = nlohmann::ordered_json::array();
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        sol.push_back({x(i).real(), x(i).imag()});
      }
      out["solution"] = std::move(sol);
      write_or_print(oracle_out, "oracle.json", out.dump(2) + "\n");
      return 0;
    }
  } catch (const aqls::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
