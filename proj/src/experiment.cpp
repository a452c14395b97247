#include "aqls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "aqls/pauli.hpp"
#include "aqls/util.hpp"

namespace aqls {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

ordered_json to_json(Complex z) {
  return ordered_json::array({z.real(), z.imag()});
}

ordered_json to_json(const ComplexVector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

ordered_json to_json(const ComplexMatrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

// A JSON number, or an [re, im] pair, read as one complex scalar.
Complex complex_from_json(const ordered_json& node, const std::string& path) {
  if (node.is_number()) return Complex(node.get<double>(), 0.0);
  if (node.is_array() && node.size() == 2 && node[0].is_number() &&
      node[1].is_number()) {
    return Complex(node[0].get<double>(), node[1].get<double>());
  }
  throw ConfigError(path + ": expected a number or an [re, im] pair");
}

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

void require_fields(const ordered_json& obj,
                    const std::vector<std::string>& known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
      throw ConfigError(it.key() + ": unknown config field");
    }
  }
}

std::string run_status_name(RunStatus status) {
  return status == RunStatus::kOk ? "ok" : "failed_postselection";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out << text;
  if (!out) {
    throw IoError("write to " + path.string() + " failed");
  }
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::kTrajectory:
      return "trajectory";
    case RunMode::kChannel:
      return "channel";
    case RunMode::kBoth:
      return "both";
  }
  throw Error("unknown run mode");
}

RunMode run_mode_from_string(const std::string& text) {
  if (text == "trajectory") return RunMode::kTrajectory;
  if (text == "channel") return RunMode::kChannel;
  if (text == "both") return RunMode::kBoth;
  throw ConfigError("mode: expected trajectory, channel or both, got \"" +
                    text + "\"");
}

ExperimentConfig config_from_json(const std::string& text) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  require_fields(root,
                 {"matrix", "b", "algorithm", "steps", "seeds", "base_seed",
                  "mode", "kappa", "target_error", "schedule", "output_dir",
                  "jobs"});

  ExperimentConfig cfg;

  if (!root.contains("matrix")) {
    throw ConfigError("matrix: required field is missing");
  }
  const ordered_json& m = root["matrix"];
  if (m.is_string()) {
    cfg.matrix = m.get<std::string>();
  } else if (m.is_array()) {
    const Eigen::Index n = static_cast<Eigen::Index>(m.size());
    if (!is_power_of_two(n)) {
      throw ConfigError("matrix: dimension must be a power of two, got " +
                        std::to_string(n));
    }
    ComplexMatrix entries(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const ordered_json& row = m[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw ConfigError("matrix: row " + std::to_string(i) +
                          " must have " + std::to_string(n) + " entries");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        entries(i, j) =
            complex_from_json(row[static_cast<std::size_t>(j)],
                              "matrix[" + std::to_string(i) + "][" +
                                  std::to_string(j) + "]");
      }
    }
    cfg.matrix = std::move(entries);
  } else {
    throw ConfigError(
        "matrix: expected a Pauli-expression string or an array of rows");
  }

  if (root.contains("b")) {
    const ordered_json& b = root["b"];
    if (b.is_string()) {
      if (b.get<std::string>() != "uniform") {
        throw ConfigError("b: the only keyword value is \"uniform\"");
      }
      cfg.b = std::string("uniform");
    } else if (b.is_array()) {
      ComplexVector vec(static_cast<Eigen::Index>(b.size()));
      for (Eigen::Index i = 0; i < vec.size(); ++i) {
        vec(i) = complex_from_json(b[static_cast<std::size_t>(i)],
                                   "b[" + std::to_string(i) + "]");
      }
      cfg.b = std::move(vec);
    } else {
      throw ConfigError("b: expected \"uniform\" or an array of entries");
    }
  }

  if (root.contains("algorithm")) {
    const ordered_json& a = root["algorithm"];
    if (!a.is_number_integer() ||
        (a.get<int>() != 1 && a.get<int>() != 2)) {
      throw ConfigError("algorithm: expected 1 or 2");
    }
    cfg.algorithm = a.get<int>() == 1 ? Algorithm::kAlg1 : Algorithm::kAlg2;
  }

  if (root.contains("steps")) {
    if (!root["steps"].is_number_integer() || root["steps"].get<int>() < 1) {
      throw ConfigError("steps: expected an integer >= 1");
    }
    cfg.steps = root["steps"].get<int>();
  }

  std::uint64_t base_seed = 1;
  if (root.contains("base_seed")) {
    if (!root["base_seed"].is_number_unsigned()) {
      throw ConfigError("base_seed: expected a nonnegative integer");
    }
    base_seed = root["base_seed"].get<std::uint64_t>();
  }
  if (root.contains("seeds")) {
    const ordered_json& s = root["seeds"];
    cfg.seeds.clear();
    if (s.is_number_unsigned()) {
      const std::uint64_t count = s.get<std::uint64_t>();
      for (std::uint64_t k = 0; k < count; ++k) {
        cfg.seeds.push_back(base_seed + k);
      }
    } else if (s.is_array()) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (!s[i].is_number_unsigned()) {
          throw ConfigError("seeds[" + std::to_string(i) +
                            "]: expected a nonnegative integer");
        }
        cfg.seeds.push_back(s[i].get<std::uint64_t>());
      }
    } else {
      throw ConfigError("seeds: expected a count or a list of seeds");
    }
  } else if (root.contains("base_seed")) {
    throw ConfigError("base_seed: only meaningful with a seed count");
  }
  std::sort(cfg.seeds.begin(), cfg.seeds.end());
  if (std::adjacent_find(cfg.seeds.begin(), cfg.seeds.end()) !=
      cfg.seeds.end()) {
    throw ConfigError("seeds: duplicate seed values");
  }

  if (root.contains("mode")) {
    if (!root["mode"].is_string()) {
      throw ConfigError("mode: expected a string");
    }
    cfg.mode = run_mode_from_string(root["mode"].get<std::string>());
  }

  if (root.contains("kappa")) {
    if (!root["kappa"].is_number()) {
      throw ConfigError("kappa: expected a number");
    }
    cfg.kappa_override = root["kappa"].get<double>();
    if (!(*cfg.kappa_override >= 1.0)) {
      throw ConfigError("kappa: override must be >= 1");
    }
  }

  if (root.contains("target_error")) {
    if (!root["target_error"].is_number()) {
      throw ConfigError("target_error: expected a number");
    }
    cfg.target_error = root["target_error"].get<double>();
  }

  if (root.contains("schedule")) {
    const std::string kind = root["schedule"].is_string()
                                 ? root["schedule"].get<std::string>()
                                 : std::string();
    if (kind == "natural") {
      cfg.linear_schedule = false;
    } else if (kind == "linear") {
      cfg.linear_schedule = true;
    } else {
      throw ConfigError("schedule: expected \"natural\" or \"linear\"");
    }
  }

  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) {
      throw ConfigError("output_dir: expected a string");
    }
    cfg.output_dir = root["output_dir"].get<std::string>();
  }

  if (root.contains("jobs")) {
    if (!root["jobs"].is_number_integer() || root["jobs"].get<int>() < 1) {
      throw ConfigError("jobs: expected an integer >= 1");
    }
    cfg.jobs = root["jobs"].get<int>();
  }

  if (cfg.mode != RunMode::kChannel && cfg.seeds.empty()) {
    throw ConfigError("seeds: trajectory mode needs at least one seed");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot read config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json root;
  if (const auto* expr = std::get_if<std::string>(&cfg.matrix)) {
    root["matrix"] = *expr;
  } else {
    root["matrix"] = to_json(std::get<ComplexMatrix>(cfg.matrix));
  }
  if (const auto* uniform = std::get_if<std::string>(&cfg.b)) {
    root["b"] = *uniform;
  } else {
    root["b"] = to_json(std::get<ComplexVector>(cfg.b));
  }
  root["algorithm"] = cfg.algorithm == Algorithm::kAlg1 ? 1 : 2;
  root["steps"] = cfg.steps;
  root["seeds"] = cfg.seeds;
  root["mode"] = to_string(cfg.mode);
  if (cfg.kappa_override) root["kappa"] = *cfg.kappa_override;
  if (cfg.target_error) root["target_error"] = *cfg.target_error;
  root["schedule"] = cfg.linear_schedule ? "linear" : "natural";
  if (!cfg.output_dir.empty()) root["output_dir"] = cfg.output_dir.string();
  root["jobs"] = cfg.jobs;
  return root.dump(2) + "\n";
}

std::filesystem::path resolve_preset(const std::string& name) {
  const std::filesystem::path given(name);
  if (given.has_parent_path() || given.extension() == ".json") {
    return given;
  }
  std::vector<std::filesystem::path> roots;
  if (const char* env = std::getenv("AQLS_PRESET_DIR")) {
    roots.emplace_back(env);
  }
  roots.emplace_back("presets");
#ifdef AQLS_SOURCE_PRESET_DIR
  roots.emplace_back(AQLS_SOURCE_PRESET_DIR);
#endif
  for (const auto& root : roots) {
    const std::filesystem::path candidate = root / (name + ".json");
    if (std::filesystem::exists(candidate)) {
      return candidate;
    }
  }
  throw ConfigError("preset \"" + name + "\" not found (set AQLS_PRESET_DIR " +
                    "or run from the repository root)");
}

ProblemInstance make_instance(const ExperimentConfig& cfg) {
  HermitianOperator a = [&] {
    if (const auto* expr = std::get_if<std::string>(&cfg.matrix)) {
      return PauliExpr::parse(*expr).to_matrix();
    }
    const ComplexMatrix& entries = std::get<ComplexMatrix>(cfg.matrix);
    if (!is_power_of_two(entries.rows())) {
      throw ConfigError("matrix: dimension must be a power of two");
    }
    return HermitianOperator(entries);
  }();
  ComplexVector b;
  if (std::holds_alternative<std::string>(cfg.b)) {
    b = ComplexVector::Constant(a.dim(),
                                Complex(1.0 / std::sqrt(double(a.dim())), 0.0));
  } else {
    b = std::get<ComplexVector>(cfg.b);
  }
  const auto* expr = std::get_if<std::string>(&cfg.matrix);
  return normalize_instance(a, b,
                            cfg.algorithm,
                            cfg.kappa_override,
                            expr ? *expr : std::string());
}

Schedule make_schedule(const ExperimentConfig& cfg,
                       const ProblemInstance& inst) {
  const ScheduleVariant variant = cfg.linear_schedule
                                      ? ScheduleVariant::kLinearBaseline
                                      : inst.schedule_variant();
  return build_grid(inst.kappa, cfg.steps, variant);
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("AQLS_OUT_DIR")) {
    return std::filesystem::path(env);
  }
  return "aqls_out";
}

std::string render_run_csv(const RunReport& run) {
  std::string out = "step,v,s,t_drawn,t_max,energy,e1,ground_fidelity\n";
  for (const StepRecord& rec : run.steps) {
    out += std::to_string(rec.j);
    out += ',';
    out += format_double(rec.v);
    out += ',';
    out += format_double(rec.s);
    out += ',';
    if (rec.t) out += format_double(*rec.t);
    out += ',';
    out += format_double(rec.t_max);
    out += ',';
    out += format_double(rec.energy);
    out += ',';
    out += format_double(rec.e1);
    out += ',';
    out += format_double(rec.ground_fidelity);
    out += '\n';
  }
  return out;
}

std::string render_spectrum_csv(const ProblemInstance& inst, int points,
                                bool hprime, int levels) {
  if (points < 2) {
    throw Error("spectrum needs at least 2 points");
  }
  const Eigen::Index dim = hprime ? 4 * inst.dim() : 2 * inst.dim();
  const int kept = levels <= 0 ? static_cast<int>(dim)
                               : std::min<int>(levels, static_cast<int>(dim));

  std::string out = "s";
  for (int k = 1; k <= kept; ++k) {
    out += ",lambda_" + std::to_string(k);
  }
  out += ",delta_star\n";

  for (int p = 0; p < points; ++p) {
    const double s = static_cast<double>(p) / (points - 1);
    const HermitianOperator h =
        hprime ? Hprime_of_s(s, inst) : H_of_s(s, inst);
    const EigenSystem sys = eigh(h);

    // Keep the `kept` levels nearest zero, report them in ascending order.
    std::vector<double> all(sys.eigenvalues.data(),
                            sys.eigenvalues.data() + sys.eigenvalues.size());
    std::sort(all.begin(), all.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });
    all.resize(static_cast<std::size_t>(kept));
    std::sort(all.begin(), all.end());

    out += format_double(s);
    for (double lambda : all) {
      out += ',';
      out += format_double(lambda);
    }
    out += ',';
    out += format_double(gap_bound(s, inst.kappa));
    out += '\n';
  }
  return out;
}

std::string render_schedule_csv(const Schedule& sched) {
  std::string out = "j,v,s,gap_bound,t_max\n";
  for (std::size_t i = 0; i < sched.grid.size(); ++i) {
    const ScheduleStep& step = sched.grid[i];
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(step.v);
    out += ',';
    out += format_double(step.s);
    out += ',';
    out += format_double(step.gap_bound);
    out += ',';
    out += format_double(step.t_max);
    out += '\n';
  }
  return out;
}

double quantile(std::vector<double> sample, double p) {
  if (sample.empty()) {
    throw Error("quantile of an empty sample");
  }
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error("quantile: p must lie in [0, 1]");
  }
  std::sort(sample.begin(), sample.end());
  const double h = (static_cast<double>(sample.size()) - 1.0) * p;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sample.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return sample[lo] + frac * (sample[hi] - sample[lo]);
}

std::string render_report(const ExperimentConfig& cfg,
                          const ProblemInstance& inst, const Schedule& sched,
                          const std::vector<RunReport>& runs,
                          const std::vector<std::string>& csv_names) {
  if (runs.size() != csv_names.size()) {
    throw Error("render_report: one CSV name per run required");
  }
  ordered_json root;
  root["schema"] = "aqls-report";
  root["schema_version"] = kReportSchemaVersion;
  root["mode"] = to_string(cfg.mode);

  ordered_json instance;
  instance["source"] =
      inst.expression.empty() ? "entries" : "expression";
  if (!inst.expression.empty()) instance["expression"] = inst.expression;
  instance["dim"] = inst.dim();
  instance["algorithm"] = inst.algorithm == Algorithm::kAlg1 ? 1 : 2;
  instance["kappa"] = inst.kappa;
  instance["kappa_computed"] = inst.kappa_computed;
  instance["kappa_overridden"] = inst.kappa_overridden;
  instance["scale"] = inst.scale;
  instance["b"] = to_json(inst.b.amplitudes());
  instance["b_was_rescaled"] = inst.b_was_rescaled;
  root["instance"] = std::move(instance);

  ordered_json schedule;
  schedule["variant"] = std::string(to_string(sched.variant));
  schedule["kappa"] = sched.kappa;
  schedule["steps"] = sched.steps;
  schedule["v_a"] = sched.v_a;
  schedule["v_b"] = sched.v_b;
  ordered_json grid = ordered_json::array();
  for (const ScheduleStep& step : sched.grid) {
    ordered_json g;
    g["v"] = step.v;
    g["s"] = step.s;
    g["gap_bound"] = step.gap_bound;
    g["t_max"] = step.t_max;
    grid.push_back(std::move(g));
  }
  schedule["grid"] = std::move(grid);
  root["schedule"] = std::move(schedule);

  if (cfg.target_error) {
    root["target_error"] = *cfg.target_error;
  } else {
    root["target_error"] = nullptr;
  }
  root["seeds"] = cfg.seeds;

  ComplexVector x_oracle;
  ordered_json run_list = ordered_json::array();
  std::vector<double> fidelities;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const RunReport& run = runs[i];
    x_oracle = run.x_oracle;
    ordered_json r;
    r["kind"] = run.kind == RunKind::kTrajectory ? "trajectory" : "channel";
    if (run.seed) {
      r["seed"] = *run.seed;
    } else {
      r["seed"] = nullptr;
    }
    r["status"] = run_status_name(run.status);
    r["csv"] = csv_names[i];
    r["steps_recorded"] = run.steps.size();
    r["success_probability"] = run.success_probability;
    r["solution"] = to_json(run.solution);
    r["solution_fidelity"] = run.solution_fidelity;
    r["traced_fidelity"] = run.traced_fidelity;
    if (run.kind == RunKind::kTrajectory) {
      r["final_state"] = to_json(run.final_state);
    } else {
      r["final_density"] = to_json(run.final_density);
    }
    run_list.push_back(std::move(r));
    if (run.kind == RunKind::kTrajectory && run.status == RunStatus::kOk) {
      fidelities.push_back(run.solution_fidelity);
    }
  }
  root["oracle_solution"] = to_json(x_oracle);
  root["runs"] = std::move(run_list);

  ordered_json aggregate;
  aggregate["trajectory_runs"] = fidelities.size();
  if (fidelities.empty()) {
    aggregate["solution_fidelity"] = nullptr;
  } else {
    ordered_json stats;
    stats["min"] = quantile(fidelities, 0.0);
    stats["q1"] = quantile(fidelities, 0.25);
    stats["median"] = quantile(fidelities, 0.5);
    stats["q3"] = quantile(fidelities, 0.75);
    stats["max"] = quantile(fidelities, 1.0);
    aggregate["solution_fidelity"] = std::move(stats);
  }
  root["aggregate"] = std::move(aggregate);

  return root.dump(2) + "\n";
}

EmittedArtifacts run_experiment(const ExperimentConfig& cfg) {
  if (cfg.steps < 1) {
    throw ConfigError("steps: expected an integer >= 1");
  }
  if (cfg.mode != RunMode::kChannel && cfg.seeds.empty()) {
    throw ConfigError("seeds: trajectory mode needs at least one seed");
  }

  const ProblemInstance inst = make_instance(cfg);
  const Schedule sched = make_schedule(cfg, inst);
  const CompiledEvolution compiled(inst, sched);

  std::vector<std::uint64_t> seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());

  std::vector<RunReport> trajectories;
  if (cfg.mode != RunMode::kChannel) {
    trajectories.resize(seeds.size());
    const int jobs = std::max(
        1, std::min<int>(cfg.jobs, static_cast<int>(seeds.size())));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= seeds.size()) break;
        try {
          trajectories[i] = run_trajectory(compiled, RngSeed{seeds[i]});
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(jobs));
      for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);
  }

  std::optional<RunReport> channel;
  if (cfg.mode != RunMode::kTrajectory) {
    channel = run_channel(compiled);
  }

  const std::filesystem::path out_dir =
      cfg.output_dir.empty() ? default_output_dir() : cfg.output_dir;
  std::filesystem::create_directories(out_dir);

  EmittedArtifacts artifacts;
  std::vector<RunReport> all_runs;
  std::vector<std::string> csv_names;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const std::string name =
        "trajectory_seed" + std::to_string(seeds[i]) + ".csv";
    write_file(out_dir / name, render_run_csv(trajectories[i]));
    artifacts.trajectory_csvs.push_back(out_dir / name);
    csv_names.push_back(name);
    all_runs.push_back(std::move(trajectories[i]));
  }
  if (channel) {
    const std::string name = "channel.csv";
    write_file(out_dir / name, render_run_csv(*channel));
    artifacts.channel_csv = out_dir / name;
    csv_names.push_back(name);
    all_runs.push_back(std::move(*channel));
  }

  artifacts.report = out_dir / "report.json";
  write_file(artifacts.report,
             render_report(cfg, inst, sched, all_runs, csv_names));
  for (const RunReport& run : all_runs) {
    if (run.status != RunStatus::kOk) artifacts.any_failed = true;
  }
  return artifacts;
}

}  // namespace aqls
