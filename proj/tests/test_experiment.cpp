#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aqls/experiment.hpp"

using namespace aqls;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("aqls_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig tiny_config(const std::string& tag) {
  ExperimentConfig cfg;
  cfg.matrix = std::string("(3II+2ZI+3XI-3XY)/4");
  ComplexVector b(4);
  b << 0.5, 0.5, 0.5, 0.5;
  cfg.b = b;
  cfg.algorithm = Algorithm::kAlg2;
  cfg.steps = 12;
  cfg.seeds = {1, 2, 3};
  cfg.mode = RunMode::kBoth;
  cfg.output_dir = fresh_dir(tag);
  return cfg;
}

}  // namespace

TEST_CASE("presets load with documented defaults") {
  const ExperimentConfig a1 = load_config(resolve_preset("alg1_paper"));
  CHECK(std::get<std::string>(a1.matrix) == "(3III+XII-2XYI+3XYZ)/4");
  CHECK(std::get<std::string>(a1.b) == "uniform");
  CHECK(a1.algorithm == Algorithm::kAlg1);
  CHECK(a1.steps == 300);
  CHECK(a1.seeds == std::vector<std::uint64_t>{42});
  CHECK(a1.mode == RunMode::kTrajectory);
  CHECK_FALSE(a1.kappa_override.has_value());
  CHECK_FALSE(a1.linear_schedule);
  CHECK(a1.jobs == 1);

  const ExperimentConfig a2 = load_config(resolve_preset("alg2_paper"));
  CHECK(std::get<std::string>(a2.matrix) == "(3II+2ZI+3XI-3XY)/4");
  CHECK(a2.algorithm == Algorithm::kAlg2);
  const auto& b = std::get<ComplexVector>(a2.b);
  REQUIRE(b.size() == 4);
  CHECK(b(0) == Complex(0.5, 0.0));

  CHECK_THROWS_AS(resolve_preset("no_such_preset"), Error);
}

TEST_CASE("config_from_json defaults and validation") {
  const ExperimentConfig cfg =
      config_from_json(R"({"matrix": "(3II+2ZI+3XI-3XY)/4"})");
  CHECK(cfg.steps == 300);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{42});
  CHECK(cfg.mode == RunMode::kTrajectory);
  CHECK(cfg.algorithm == Algorithm::kAlg1);
  CHECK(std::get<std::string>(cfg.b) == "uniform");

  // Unknown keys are rejected loudly.
  CHECK_THROWS_AS(
      config_from_json(R"({"matrix": "X", "stepz": 10})"), ConfigError);
  // Required key.
  CHECK_THROWS_AS(config_from_json(R"({"steps": 10})"), ConfigError);
  // Wrong types and out-of-range values.
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "steps": 0})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "steps": "many"})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "algorithm": 3})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "mode": "warp"})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "jobs": 0})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "kappa": 0.5})"),
                  ConfigError);
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
}

TEST_CASE("seed list forms") {
  ExperimentConfig cfg = config_from_json(
      R"({"matrix": "X", "seeds": [5, 1, 3]})");
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 3, 5});  // sorted

  cfg = config_from_json(R"({"matrix": "X", "seeds": 3})");
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1, 2, 3});  // base_seed 1

  cfg = config_from_json(R"({"matrix": "X", "seeds": 3, "base_seed": 10})");
  CHECK(cfg.seeds == std::vector<std::uint64_t>{10, 11, 12});

  // Duplicates would collide on CSV names.
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "seeds": [2, 2]})"),
                  ConfigError);
  // base_seed without a count is meaningless.
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "base_seed": 7})"),
                  ConfigError);
  // Trajectory mode requires at least one seed.
  CHECK_THROWS_AS(config_from_json(R"({"matrix": "X", "seeds": []})"),
                  ConfigError);
  // Channel mode does not.
  CHECK_NOTHROW(config_from_json(
      R"({"matrix": "X", "seeds": [], "mode": "channel"})"));
}

TEST_CASE("config round trips through its JSON form") {
  ExperimentConfig cfg;
  ComplexMatrix m(2, 2);
  m << Complex(1.0, 0.0), Complex(0.25, -0.5), Complex(0.25, 0.5),
      Complex(-0.75, 0.0);
  cfg.matrix = m;
  ComplexVector b(2);
  b << Complex(0.6, 0.0), Complex(0.0, 0.8);
  cfg.b = b;
  cfg.algorithm = Algorithm::kAlg2;
  cfg.steps = 77;
  cfg.seeds = {4, 9};
  cfg.mode = RunMode::kBoth;
  cfg.kappa_override = 12.5;
  cfg.target_error = 0.01;
  cfg.jobs = 3;

  const std::string text = config_to_json(cfg);
  const ExperimentConfig back = config_from_json(text);
  CHECK((std::get<ComplexMatrix>(back.matrix) - m).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK((std::get<ComplexVector>(back.b) - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.algorithm == cfg.algorithm);
  CHECK(back.steps == cfg.steps);
  CHECK(back.seeds == cfg.seeds);
  CHECK(back.mode == cfg.mode);
  CHECK(back.kappa_override == cfg.kappa_override);
  CHECK(back.target_error == cfg.target_error);
  CHECK(back.linear_schedule == cfg.linear_schedule);
  CHECK(back.jobs == cfg.jobs);
  // Serialization is stable.
  CHECK(config_to_json(back) == text);
}

TEST_CASE("make_instance resolves the uniform b") {
  ExperimentConfig cfg;
  cfg.matrix = std::string("(3III+XII-2XYI+3XYZ)/4");
  const ProblemInstance inst = make_instance(cfg);
  CHECK(inst.dim() == 8);
  CHECK(inst.kappa == doctest::Approx(9.0).epsilon(1e-12));
  for (int k = 0; k < 8; ++k) {
    CHECK(inst.b.amplitudes()(k).real() ==
          doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-14));
  }
  CHECK(inst.expression == "(3III+XII-2XYI+3XYZ)/4");

  // Explicit matrices must be square with power-of-two size.
  ExperimentConfig bad;
  bad.matrix = ComplexMatrix::Identity(3, 3);
  CHECK_THROWS_AS(make_instance(bad), ConfigError);
}

TEST_CASE("make_schedule honors the linear baseline flag") {
  ExperimentConfig cfg;
  cfg.matrix = std::string("(3III+XII-2XYI+3XYZ)/4");
  cfg.steps = 10;
  const ProblemInstance inst = make_instance(cfg);
  CHECK(make_schedule(cfg, inst).variant == ScheduleVariant::kAlg1);
  cfg.linear_schedule = true;
  CHECK(make_schedule(cfg, inst).variant == ScheduleVariant::kLinearBaseline);
  cfg.linear_schedule = false;
  cfg.algorithm = Algorithm::kAlg2;
  ExperimentConfig cfg2 = cfg;
  cfg2.matrix = std::string("(3II+2ZI+3XI-3XY)/4");
  const ProblemInstance inst2 = make_instance(cfg2);
  CHECK(make_schedule(cfg2, inst2).variant == ScheduleVariant::kAlg2);
}

TEST_CASE("run CSV header and shape") {
  ExperimentConfig cfg = tiny_config("csv");
  cfg.seeds = {42};
  cfg.mode = RunMode::kBoth;
  const ProblemInstance inst = make_instance(cfg);
  const Schedule sched = make_schedule(cfg, inst);
  const CompiledEvolution ce(inst, sched);

  const RunReport traj = run_trajectory(ce, RngSeed{42});
  const std::string csv = render_run_csv(traj);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "step,v,s,t_drawn,t_max,energy,e1,ground_fidelity");
  int rows = 0;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
  }
  CHECK(rows == 12);

  // Channel CSV leaves t_drawn empty.
  const std::string chan = render_run_csv(run_channel(ce));
  std::istringstream clines(chan);
  std::getline(clines, line);  // header
  std::getline(clines, line);
  const auto first = line.find(',');
  const auto second = line.find(',', first + 1);
  const auto third = line.find(',', second + 1);
  const auto fourth = line.find(',', third + 1);
  CHECK(fourth == third + 1);  // empty t_drawn field
  CHECK(line.substr(0, first) == "1");

  fs::remove_all(cfg.output_dir);
}

TEST_CASE("quantile uses linear interpolation") {
  const std::vector<double> sample{4.0, 1.0, 3.0, 2.0};  // unsorted on entry
  CHECK(quantile(sample, 0.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(quantile(sample, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(quantile(sample, 0.75) == doctest::Approx(3.25).epsilon(1e-15));
  CHECK(quantile(sample, 0.0) == 1.0);
  CHECK(quantile(sample, 1.0) == 4.0);
  CHECK(quantile({7.0}, 0.3) == 7.0);
  CHECK_THROWS_AS(quantile({}, 0.5), Error);
  CHECK_THROWS_AS(quantile({1.0}, -0.1), Error);
}

TEST_CASE("run_experiment emits the documented artifacts") {
  const ExperimentConfig cfg = tiny_config("artifacts");
  const EmittedArtifacts out = run_experiment(cfg);

  CHECK(out.report.filename() == "report.json");
  REQUIRE(out.trajectory_csvs.size() == 3);
  CHECK(out.trajectory_csvs[0].filename() == "trajectory_seed1.csv");
  CHECK(out.trajectory_csvs[2].filename() == "trajectory_seed3.csv");
  REQUIRE(out.channel_csv.has_value());
  CHECK(out.channel_csv->filename() == "channel.csv");
  CHECK_FALSE(out.any_failed);
  for (const auto& p : out.trajectory_csvs) CHECK(fs::exists(p));
  CHECK(fs::exists(*out.channel_csv));

  // The report parses as JSON and matches the schema basics.
  const nlohmann::json rep = nlohmann::json::parse(slurp(out.report));
  CHECK(rep.at("schema") == "aqls-report");
  CHECK(rep.at("schema_version") == 1);
  CHECK(rep.at("instance").at("dim") == 4);
  CHECK(rep.at("instance").at("algorithm") == 2);
  CHECK(rep.at("schedule").at("steps") == 12);
  CHECK(rep.at("schedule").at("grid").size() == 12);
  CHECK(rep.at("seeds").size() == 3);
  REQUIRE(rep.at("runs").size() == 4);  // 3 trajectories + 1 channel
  CHECK(rep.at("runs")[0].at("kind") == "trajectory");
  CHECK(rep.at("runs")[3].at("kind") == "channel");
  CHECK(rep.at("runs")[0].at("csv") == "trajectory_seed1.csv");
  CHECK(rep.at("aggregate").at("trajectory_runs") == 3);
  CHECK(rep.at("aggregate").at("solution_fidelity").contains("median"));

  // No volatile fields (timestamps, host info, thread counts).
  CHECK_FALSE(rep.contains("jobs"));
  CHECK_FALSE(rep.contains("output_dir"));
  const std::string raw = slurp(out.report);
  CHECK(raw.find("time") == std::string::npos);

  // Run invariants hold in the serialized form.
  for (const auto& run : rep.at("runs")) {
    const double p = run.at("success_probability").get<double>();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    const double fid = run.at("solution_fidelity").get<double>();
    CHECK(fid >= 0.0);
    CHECK(fid <= 1.0);
    CHECK(run.at("status") == "ok");
  }

  // The reported solution_fidelity is recomputable from the stored state.
  const auto& run0 = rep.at("runs")[0];
  const auto& sol = run0.at("solution");
  const auto& oracle = rep.at("oracle_solution");
  REQUIRE(sol.size() == 4);
  Complex overlap(0, 0);
  for (int k = 0; k < 4; ++k) {
    const Complex a(sol[k][0].get<double>(), sol[k][1].get<double>());
    const Complex b(oracle[k][0].get<double>(), oracle[k][1].get<double>());
    overlap += std::conj(a) * b;
  }
  CHECK(std::norm(overlap) ==
        doctest::Approx(run0.at("solution_fidelity").get<double>())
            .epsilon(1e-9));

  fs::remove_all(cfg.output_dir);
}

TEST_CASE("artifacts are byte-identical across runs and job counts") {
  ExperimentConfig cfg = tiny_config("det_a");
  cfg.jobs = 1;
  const EmittedArtifacts a = run_experiment(cfg);
  const std::string report_a = slurp(a.report);
  const std::string traj_a = slurp(a.trajectory_csvs[1]);

  ExperimentConfig cfg_b = cfg;
  cfg_b.output_dir = fresh_dir("det_b");
  cfg_b.jobs = 4;
  const EmittedArtifacts b = run_experiment(cfg_b);
  CHECK(slurp(b.report) == report_a);
  CHECK(slurp(b.trajectory_csvs[1]) == traj_a);
  CHECK(slurp(b.channel_csv.value()) == slurp(a.channel_csv.value()));

  // Same directory, run again: identical bytes again.
  const EmittedArtifacts c = run_experiment(cfg);
  CHECK(slurp(c.report) == report_a);

  fs::remove_all(cfg.output_dir);
  fs::remove_all(cfg_b.output_dir);
}

TEST_CASE("channel-only experiments need no seeds") {
  ExperimentConfig cfg = tiny_config("chan_only");
  cfg.seeds = {};
  cfg.mode = RunMode::kChannel;
  const EmittedArtifacts out = run_experiment(cfg);
  CHECK(out.trajectory_csvs.empty());
  REQUIRE(out.channel_csv.has_value());
  const nlohmann::json rep = nlohmann::json::parse(slurp(out.report));
  CHECK(rep.at("runs").size() == 1);
  CHECK(rep.at("aggregate").at("trajectory_runs") == 0);
  CHECK(rep.at("aggregate").at("solution_fidelity").is_null());
  fs::remove_all(cfg.output_dir);
}

TEST_CASE("spectrum CSV shapes") {
  ExperimentConfig cfg;
  cfg.matrix = std::string("(3II+2ZI+3XI-3XY)/4");
  cfg.algorithm = Algorithm::kAlg2;
  const ProblemInstance inst = make_instance(cfg);

  const std::string h_csv = render_spectrum_csv(inst, 11, false, 4);
  std::istringstream lines(h_csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "s,lambda_1,lambda_2,lambda_3,lambda_4,delta_star");
  int rows = 0;
  std::string line;
  double prev_s = -1.0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    const double s = std::stod(line.substr(0, line.find(',')));
    CHECK(s > prev_s);
    prev_s = s;
  }
  CHECK(rows == 11);
  CHECK(prev_s == 1.0);

  // H' keeps the ladder around zero; 8 levels here.
  const std::string hp_csv = render_spectrum_csv(inst, 5, true, 8);
  std::istringstream hp(hp_csv);
  std::getline(hp, header);
  CHECK(header ==
        "s,lambda_1,lambda_2,lambda_3,lambda_4,lambda_5,lambda_6,lambda_7,"
        "lambda_8,delta_star");

  CHECK_THROWS_AS(render_spectrum_csv(inst, 1, false, 4), Error);
}

TEST_CASE("schedule CSV matches the grid") {
  ExperimentConfig cfg;
  cfg.matrix = std::string("(3III+XII-2XYI+3XYZ)/4");
  cfg.steps = 7;
  const ProblemInstance inst = make_instance(cfg);
  const Schedule sched = make_schedule(cfg, inst);
  const std::string csv = render_schedule_csv(sched);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "j,v,s,gap_bound,t_max");
  int rows = 0;
  std::string line;
  std::string last;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    last = line;
  }
  CHECK(rows == 7);
  CHECK(last.substr(0, 2) == "7,");
  // The last row is the pinned endpoint s = 1.
  CHECK(last.find(",1,") != std::string::npos);
}

TEST_CASE("default_output_dir respects the environment") {
  const char* saved = std::getenv("AQLS_OUT_DIR");
  const std::string saved_copy = saved ? saved : "";
  setenv("AQLS_OUT_DIR", "/tmp/aqls_env_test", 1);
  CHECK(default_output_dir() == fs::path("/tmp/aqls_env_test"));
  unsetenv("AQLS_OUT_DIR");
  CHECK(default_output_dir() == fs::path("aqls_out"));
  if (saved) setenv("AQLS_OUT_DIR", saved_copy.c_str(), 1);
}

TEST_CASE("run mode names") {
  CHECK(to_string(RunMode::kTrajectory) == "trajectory");
  CHECK(to_string(RunMode::kChannel) == "channel");
  CHECK(to_string(RunMode::kBoth) == "both");
  CHECK(run_mode_from_string("trajectory") == RunMode::kTrajectory);
  CHECK(run_mode_from_string("channel") == RunMode::kChannel);
  CHECK(run_mode_from_string("both") == RunMode::kBoth);
  CHECK_THROWS_AS(run_mode_from_string("warp"), Error);
}
