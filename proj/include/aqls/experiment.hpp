#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "aqls/evolve.hpp"
#include "aqls/hamiltonian.hpp"

namespace aqls {

enum class RunMode { kTrajectory, kChannel, kBoth };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);

/// One experiment, as described by a config file or preset. "matrix" is
/// either a Pauli-expression string or explicit entries; "b" is either the
/// literal string "uniform" or an explicit vector.
struct ExperimentConfig {
  std::variant<std::string, ComplexMatrix> matrix;
  std::variant<std::string, ComplexVector> b{std::string("uniform")};
  Algorithm algorithm = Algorithm::kAlg1;
  int steps = 300;
  std::vector<std::uint64_t> seeds{42};
  RunMode mode = RunMode::kTrajectory;
  std::optional<double> kappa_override;
  std::optional<double> target_error;  // reporting only
  bool linear_schedule = false;        // uniform-in-s baseline grid
  std::filesystem::path output_dir;    // empty: resolved by the caller
  int jobs = 1;
};

/// Parses a config JSON file. Unknown keys are rejected.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

/// Maps a preset name (e.g. "alg1_paper") to its JSON file. Looks in
/// $AQLS_PRESET_DIR, then ./presets, then the source-tree presets directory
/// recorded at build time. Names with a path separator or a .json suffix are
/// treated as literal paths.
std::filesystem::path resolve_preset(const std::string& name);

/// Builds the normalized problem instance the config describes.
ProblemInstance make_instance(const ExperimentConfig& cfg);
Schedule make_schedule(const ExperimentConfig& cfg,
                       const ProblemInstance& inst);

struct EmittedArtifacts {
  std::filesystem::path report;  // JSON
  std::vector<std::filesystem::path> trajectory_csvs;
  std::optional<std::filesystem::path> channel_csv;
  bool any_failed = false;
};

/// $AQLS_OUT_DIR if set, else ./aqls_out. Used when neither the config nor
/// the command line names an output directory.
std::filesystem::path default_output_dir();

/// Runs the experiment and writes per-run CSVs plus report.json into
/// cfg.output_dir. Trajectory runs are distributed over cfg.jobs threads;
/// outputs are merged in seed order, so the artifacts are byte-identical
/// for any jobs value.
EmittedArtifacts run_experiment(const ExperimentConfig& cfg);

/// The versioned JSON report for a finished set of runs. Deterministic:
/// fixed key order, shortest round-trip number formatting, no timestamps.
std::string render_report(const ExperimentConfig& cfg,
                          const ProblemInstance& inst, const Schedule& sched,
                          const std::vector<RunReport>& runs,
                          const std::vector<std::string>& csv_names);

/// Per-step CSV with the exact column contract
/// step, v, s, t_drawn, t_max, energy, e1, ground_fidelity.
/// t_drawn is empty in channel mode.
std::string render_run_csv(const RunReport& run);

/// Eigenvalues on a uniform s-grid with `points` rows, columns
/// s, lambda_1, ..., lambda_K, delta_star. The K levels closest to zero are
/// kept (levels <= 0 keeps all), listed in ascending order; for the PSD H
/// that is the bottom of the spectrum, for H' the ±sqrt(gamma) ladder.
std::string render_spectrum_csv(const ProblemInstance& inst, int points,
                                bool hprime = false, int levels = 0);

/// The schedule grid as CSV: j, v, s, gap_bound, t_max.
std::string render_schedule_csv(const Schedule& sched);

/// Linear-interpolation quantile (h = (n-1)p) of an unsorted sample.
double quantile(std::vector<double> sample, double p);

}  // namespace aqls
