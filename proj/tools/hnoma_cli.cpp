// Command-line driver: single-instance solves, Monte Carlo sweeps, figure
// presets and the two-user grid oracle.

#include "hnoma/bb.hpp"
#include "hnoma/channel.hpp"
#include "hnoma/experiment.hpp"
#include "hnoma/model.hpp"
#include "hnoma/sca.hpp"
#include "hnoma/two_user.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::string out;
  std::string feas_mode = "sra";
  std::optional<double> xi;
  std::optional<int> nmax;
  int jobs = 0;
};

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    hnoma::write_text_file(out, text);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hnoma::ConfigError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

hnoma::FeasMode feas_mode_of(const std::string& s) {
  if (s == "sra") return hnoma::FeasMode::SRA;
  if (s == "sca") return hnoma::FeasMode::SCA;
  throw hnoma::ConfigError("--feas-mode must be sra or sca");
}

void apply_common(hnoma::ExperimentSpec& spec, const CommonFlags& f) {
  if (f.seed) spec.master_seed = *f.seed;
  if (f.trials) spec.trials = *f.trials;
  if (f.xi) spec.xi_rel = *f.xi;
  if (f.nmax) spec.n_max = *f.nmax;
  if (f.jobs > 0) spec.jobs = f.jobs;
  if (feas_mode_of(f.feas_mode) == hnoma::FeasMode::SCA) {
    for (auto& s : spec.solvers) {
      if (s == hnoma::Solver::BBSRA) s = hnoma::Solver::BBSCA;
    }
  }
}

int run_spec(const hnoma::ExperimentSpec& spec, const CommonFlags& f) {
  const auto result = hnoma::run_experiment(spec);
  for (const auto& line : result.failure_log) std::cerr << "trial failure: " << line << '\n';
  emit(f.out, hnoma::to_csv(result));
  return 0;
}

std::string report_text(const hnoma::SolveReport& r) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "status = " << hnoma::to_string(r.status) << '\n'
     << "objective = " << r.objective << '\n'
     << "upper_bound = " << r.upper_bound << '\n'
     << "lower_bound = " << r.lower_bound << '\n'
     << "iterations = " << r.iterations << '\n'
     << "oracle_calls = " << r.oracle.feasibility_calls << '\n'
     << "oracle_work = " << r.oracle.work << '\n';
  return os.str();
}

int run_solve(const std::string& path, const std::string& solver, const CommonFlags& f) {
  const hnoma::SystemInstance inst = hnoma::read_instance_file(path);
  std::string text;
  hnoma::SolveReport rep;
  if (solver == "oma") {
    rep.profile = hnoma::oma_profile(inst);
    rep.objective = rep.upper_bound = rep.lower_bound = hnoma::total_power(rep.profile);
  } else if (solver == "two-user") {
    const auto tu = hnoma::solve_two_user(hnoma::TwoUserInstance::from_system(inst));
    rep = tu.report;
    text += "class = " + hnoma::classify_solution(tu) + "\n";
  } else if (solver == "conventional") {
    if (inst.num_users() != 2) throw hnoma::ConfigError("conventional solver needs M = 2");
    rep = hnoma::solve_conventional_two_user(inst.gamma(0, 0), inst.gamma(1, 1),
                                             inst.target_rate())
              .report;
  } else if (solver == "sca") {
    rep = hnoma::sca_solve(inst);
  } else if (solver == "bb") {
    hnoma::BBConfig cfg;
    cfg.feas_mode = feas_mode_of(f.feas_mode);
    if (f.xi) cfg.xi = *f.xi * hnoma::oma_total_power(inst);
    if (f.nmax) cfg.n_max = *f.nmax;
    const auto bb = hnoma::bb_solve(inst, cfg);
    rep = bb.report;
    text += "verification_failures = " + std::to_string(bb.verification_failures) + "\n";
  } else {
    throw hnoma::ConfigError("unknown solver: " + solver);
  }
  if (rep.status == hnoma::SolveStatus::NumericalFailure ||
      rep.status == hnoma::SolveStatus::Infeasible || !hnoma::is_feasible(inst, rep.profile)) {
    std::cerr << report_text(rep);
    throw SolverFailure("solver did not return a feasible allocation");
  }
  emit(f.out, report_text(rep) + text + hnoma::to_text(rep.profile));
  return 0;
}

int run_oracle(const std::string& path, long max_points, const CommonFlags& f) {
  const hnoma::SystemInstance inst = hnoma::read_instance_file(path);
  if (inst.num_users() != 2) throw hnoma::ConfigError("oracle needs a two-user instance");
  const auto tu = hnoma::TwoUserInstance::from_system(inst);
  const auto g = hnoma::grid_oracle(tu, max_points);
  std::ostringstream os;
  os << std::setprecision(12);
  os << "found = " << g.found << '\n'
     << "objective = " << g.objective << '\n'
     << "p0 = " << g.p0 << "\np1 = " << g.p1 << "\np2 = " << g.p2 << '\n'
     << "coarse_step = " << g.coarse_step << "\nfine_step = " << g.fine_step << '\n';
  for (const auto& c : hnoma::enumerate_candidates(tu)) {
    os << "\n" << hnoma::diagnostic_record(hnoma::certify_kkt(tu, c));
  }
  emit(f.out, os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-power allocation for backscatter-assisted hybrid NOMA uplinks"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", flags.seed, "Master seed");
    sub->add_option("--trials", flags.trials, "Trials per sweep point")->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "Output path (default stdout)");
    sub->add_option("--feas-mode", flags.feas_mode, "BB feasibility oracle")
        ->check(CLI::IsMember({"sra", "sca"}));
    sub->add_option("--xi", flags.xi, "BB gap relative to the OMA total");
    sub->add_option("--nmax", flags.nmax, "BB iteration cap");
    sub->add_option("--jobs", flags.jobs, "Worker threads (0 = all cores)");
  };

  std::string instance_path;
  std::string solver = "bb";
  auto* solve = app.add_subcommand("solve", "Solve one instance read from a file");
  solve->add_option("instance", instance_path, "Instance file")->required();
  solve->add_option("--solver", solver, "oma | two-user | conventional | sca | bb")
      ->check(CLI::IsMember({"oma", "two-user", "conventional", "sca", "bb"}));
  add_common(solve);

  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment described by a config file");
  sweep->add_option("config", config_path, "Experiment config file")->required();
  add_common(sweep);

  std::string fig_name;
  auto* fig = app.add_subcommand("fig", "Run a figure preset");
  fig->add_option("name", fig_name, "fig1 .. fig6")->required();
  add_common(fig);

  long max_points = 10'000'000;
  auto* oracle = app.add_subcommand("oracle", "Two-user grid oracle and candidate diagnostics");
  oracle->add_option("instance", instance_path, "Two-user instance file")->required();
  oracle->add_option("--max-points", max_points, "Coarse grid budget");
  add_common(oracle);

  std::string scenario_path;
  auto* sample = app.add_subcommand("sample", "Draw one instance from a scenario");
  sample->add_option("--scenario", scenario_path, "Scenario key-value file");
  add_common(sample);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*solve) return run_solve(instance_path, solver, flags);
    if (*sweep) {
      auto spec = hnoma::parse_experiment_spec(read_file(config_path));
      apply_common(spec, flags);
      return run_spec(spec, flags);
    }
    if (*fig) {
      auto spec = hnoma::fig_mode(fig_name);
      apply_common(spec, flags);
      return run_spec(spec, flags);
    }
    if (*oracle) return run_oracle(instance_path, max_points, flags);
    if (*sample) {
      hnoma::ScenarioConfig cfg;
      if (!scenario_path.empty()) cfg = hnoma::parse_scenario(read_file(scenario_path));
      if (flags.seed) cfg.seed = *flags.seed;
      emit(flags.out, hnoma::to_text(hnoma::sample_instance(cfg)));
      return 0;
    }
  } catch (const hnoma::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const hnoma::ParseError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
