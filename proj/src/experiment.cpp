#include "hnoma/experiment.hpp"

#include "hnoma/sca.hpp"
#include "hnoma/two_user.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

namespace hnoma {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

constexpr Solver kSolvers[] = {Solver::OMA,   Solver::TwoUserClosedForm, Solver::SCA,
                               Solver::BBSRA, Solver::BBSCA, Solver::ConventionalTwoUser};
constexpr SweepVar kSweepVars[] = {SweepVar::TargetRate, SweepVar::NumUsers,
                                   SweepVar::ClusterSide, SweepVar::ClusterCenter};
constexpr ExperimentMode kModes[] = {ExperimentMode::Power, ExperimentMode::ClassFrequency,
                                     ExperimentMode::Convergence};

}  // namespace

const char* to_string(Solver s) {
  switch (s) {
    case Solver::OMA: return "OMA";
    case Solver::TwoUserClosedForm: return "TwoUserClosedForm";
    case Solver::SCA: return "SCA";
    case Solver::BBSRA: return "BB-SRA";
    case Solver::BBSCA: return "BB-SCA";
    case Solver::ConventionalTwoUser: return "ConventionalTwoUser";
  }
  return "unknown";
}

Solver parse_solver(const std::string& name) {
  for (Solver s : kSolvers) {
    if (lower(name) == lower(to_string(s))) return s;
  }
  throw ConfigError("unknown solver: " + name);
}

bool is_two_user_only(Solver s) {
  return s == Solver::TwoUserClosedForm || s == Solver::ConventionalTwoUser;
}

const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::TargetRate: return "target_rate";
    case SweepVar::NumUsers: return "num_users";
    case SweepVar::ClusterSide: return "cluster_side";
    case SweepVar::ClusterCenter: return "cluster_center";
  }
  return "unknown";
}

SweepVar parse_sweep_var(const std::string& name) {
  for (SweepVar v : kSweepVars) {
    if (lower(name) == to_string(v)) return v;
  }
  throw ConfigError("unknown sweep variable: " + name);
}

void apply_sweep_value(ScenarioConfig& cfg, SweepVar v, double value) {
  switch (v) {
    case SweepVar::TargetRate: cfg.target_rate = value; break;
    case SweepVar::NumUsers:
      if (value != std::floor(value)) throw ConfigError("num_users sweep values must be integers");
      cfg.num_users = static_cast<int>(value);
      break;
    case SweepVar::ClusterSide: cfg.cluster_side = value; break;
    case SweepVar::ClusterCenter: cfg.cluster_center = value; break;
  }
}

const char* to_string(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::Power: return "power";
    case ExperimentMode::ClassFrequency: return "class_frequency";
    case ExperimentMode::Convergence: return "convergence";
  }
  return "unknown";
}

ExperimentMode parse_mode(const std::string& name) {
  for (ExperimentMode m : kModes) {
    if (lower(name) == to_string(m)) return m;
  }
  throw ConfigError("unknown mode: " + name);
}

ScenarioConfig ExperimentSpec::scenario_at(double series_value, double sweep_value) const {
  ScenarioConfig cfg = scenario;
  if (series_var) apply_sweep_value(cfg, *series_var, series_value);
  apply_sweep_value(cfg, sweep_var, sweep_value);
  return cfg;
}

namespace {

std::vector<double> series_or_dummy(const ExperimentSpec& s) {
  return s.series_var ? s.series_values : std::vector<double>{0.0};
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (sweep_values.empty()) throw ConfigError("sweep_values is empty");
  if (series_var && series_values.empty()) throw ConfigError("series_values is empty");
  if (series_var && *series_var == sweep_var) throw ConfigError("series and sweep variable coincide");
  if (solvers.empty()) throw ConfigError("no solvers selected");
  if (!(xi_rel > 0.0)) throw ConfigError("xi_rel must be > 0");
  if (n_max < 0) throw ConfigError("n_max must be >= 0");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  if (mode == ExperimentMode::ClassFrequency &&
      std::find(solvers.begin(), solvers.end(), Solver::TwoUserClosedForm) == solvers.end()) {
    throw ConfigError("class_frequency mode needs the TwoUserClosedForm solver");
  }
  if (mode == ExperimentMode::Convergence) {
    for (Solver s : solvers) {
      if (s != Solver::SCA && s != Solver::BBSRA && s != Solver::BBSCA) {
        throw ConfigError(std::string("convergence mode supports SCA and BB only, got ") +
                          to_string(s));
      }
    }
  }
  for (double sv : series_or_dummy(*this)) {
    for (double v : sweep_values) {
      const ScenarioConfig cfg = scenario_at(sv, v);
      try {
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      for (Solver s : solvers) {
        if (is_two_user_only(s) && cfg.num_users != 2) {
          throw ConfigError(std::string(to_string(s)) + " requires num_users = 2");
        }
      }
    }
  }
}

namespace {

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::string tok;
  while (in >> tok) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw ConfigError("bad number in " + key + ": " + tok);
    } catch (const std::logic_error&) {
      throw ConfigError("bad number in " + key + ": " + tok);
    }
  }
  return out;
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw ConfigError("bad integer for " + key + ": " + value);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError("bad integer for " + key + ": " + value);
  }
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& text, ExperimentSpec spec) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (set_scenario_field(spec.scenario, key, value)) continue;
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
    if (key == "name") {
      spec.name = value;
    } else if (key == "mode") {
      spec.mode = parse_mode(value);
    } else if (key == "sweep_var") {
      spec.sweep_var = parse_sweep_var(value);
    } else if (key == "sweep_values") {
      spec.sweep_values = parse_list(key, value);
    } else if (key == "series_var") {
      if (value.empty() || lower(value) == "none") {
        spec.series_var.reset();
      } else {
        spec.series_var = parse_sweep_var(value);
      }
    } else if (key == "series_values") {
      spec.series_values = parse_list(key, value);
    } else if (key == "trials") {
      spec.trials = static_cast<int>(parse_int(key, value));
    } else if (key == "solvers") {
      spec.solvers.clear();
      std::string v = value;
      std::replace(v.begin(), v.end(), ',', ' ');
      std::istringstream names(v);
      std::string tok;
      while (names >> tok) spec.solvers.push_back(parse_solver(tok));
    } else if (key == "master_seed") {
      spec.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "xi_rel") {
      const auto v = parse_list(key, value);
      if (v.size() != 1) throw ConfigError("xi_rel takes one value");
      spec.xi_rel = v[0];
    } else if (key == "n_max") {
      spec.n_max = static_cast<int>(parse_int(key, value));
    } else if (key == "jobs") {
      spec.jobs = static_cast<int>(parse_int(key, value));
    } else {
      throw ConfigError("unknown key: " + key);
    }
  }
  return spec;
}

ExperimentSpec fig_mode(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  s.scenario.noise_power = 1e-8;
  s.scenario.cluster_center = 15.0;
  const std::vector<double> rates{1, 2, 3, 4, 5};
  if (name == "fig1" || name == "fig2") {
    s.scenario.num_users = 2;
    if (name == "fig2") s.scenario.noise_power = 1e-7;
    s.sweep_var = SweepVar::TargetRate;
    s.sweep_values = rates;
    s.series_var = SweepVar::ClusterSide;
    s.series_values = {2.0, 5.0};
    s.solvers = {Solver::OMA, Solver::TwoUserClosedForm, Solver::BBSRA};
    s.trials = 500;
  } else if (name == "fig3") {
    s.scenario.num_users = 2;
    s.scenario.cluster_side = 2.0;
    s.mode = ExperimentMode::ClassFrequency;
    s.sweep_var = SweepVar::TargetRate;
    s.sweep_values = rates;
    s.solvers = {Solver::TwoUserClosedForm};
    s.trials = 500;
  } else if (name == "fig4") {
    s.scenario.target_rate = 4.0;
    s.scenario.cluster_side = 5.0;
    s.sweep_var = SweepVar::NumUsers;
    s.sweep_values = {1, 2, 3, 4, 5};
    s.series_var = SweepVar::ClusterCenter;
    s.series_values = {15.0, 20.0};
    s.solvers = {Solver::OMA, Solver::SCA, Solver::BBSRA};
    s.trials = 100;
  } else if (name == "fig5") {
    s.scenario.num_users = 5;
    s.scenario.cluster_side = 5.0;
    s.sweep_var = SweepVar::TargetRate;
    s.sweep_values = rates;
    s.solvers = {Solver::OMA, Solver::SCA, Solver::BBSRA};
    s.trials = 100;
  } else if (name == "fig6") {
    s.scenario.num_users = 5;
    s.scenario.target_rate = 4.0;
    s.scenario.cluster_side = 5.0;
    s.scenario.cluster_center = 20.0;
    s.mode = ExperimentMode::Convergence;
    s.sweep_var = SweepVar::TargetRate;
    s.sweep_values = {4.0};
    s.solvers = {Solver::SCA, Solver::BBSRA};
    s.trials = 100;
  } else {
    throw ConfigError("unknown figure preset: " + name);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Running

namespace {

struct TrialOutcome {
  bool ok = false;
  double objective = 0.0;
  int iterations = 0;
  long calls = 0;
  long work = 0;
  long verification_failures = 0;
  std::string label;
  std::string error;
  std::vector<double> upper_trace;
  std::vector<double> lower_trace;
};

TrialOutcome run_solver(Solver s, const SystemInstance& inst, const ExperimentSpec& spec) {
  TrialOutcome t;
  try {
    switch (s) {
      case Solver::OMA:
        t.objective = oma_total_power(inst);
        t.ok = true;
        break;
      case Solver::TwoUserClosedForm: {
        const auto rep = solve_two_user(TwoUserInstance::from_system(inst));
        t.objective = rep.report.objective;
        t.label = classify_solution(rep);
        t.ok = true;
        break;
      }
      case Solver::SCA: {
        const SolveReport rep = sca_solve(inst);
        t.objective = rep.objective;
        t.iterations = rep.iterations;
        t.upper_trace = rep.trace;
        t.lower_trace = rep.trace;
        t.ok = rep.status != SolveStatus::NumericalFailure && is_feasible(inst, rep.profile);
        if (!t.ok) t.error = std::string("SCA ended with status ") + to_string(rep.status);
        break;
      }
      case Solver::BBSRA:
      case Solver::BBSCA: {
        BBConfig cfg;
        cfg.xi = spec.xi_rel * oma_total_power(inst);
        cfg.n_max = spec.n_max;
        cfg.feas_mode = s == Solver::BBSRA ? FeasMode::SRA : FeasMode::SCA;
        const BBReport rep = bb_solve(inst, cfg);
        t.objective = rep.report.objective;
        t.iterations = rep.report.iterations;
        t.calls = rep.report.oracle.feasibility_calls;
        t.work = rep.report.oracle.work;
        t.verification_failures = rep.verification_failures;
        for (const auto& row : rep.trace) {
          t.upper_trace.push_back(row.upper);
          t.lower_trace.push_back(row.lower);
        }
        t.ok = is_feasible(inst, rep.report.profile);
        if (!t.ok) t.error = "BB incumbent failed verification";
        break;
      }
      case Solver::ConventionalTwoUser: {
        const auto sol = solve_conventional_two_user(inst.gamma(0, 0), inst.gamma(1, 1),
                                                     inst.target_rate());
        t.objective = sol.report.objective;
        t.iterations = sol.report.iterations;
        t.work = sol.newton_steps;
        t.ok = sol.report.status == SolveStatus::Optimal;
        if (!t.ok) t.error = "conventional solver did not reach optimality";
        break;
      }
    }
  } catch (const std::exception& e) {
    t.ok = false;
    t.error = e.what();
  }
  return t;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

const std::vector<std::string> kClassLabels = {"OMA",      "P-NOMA I",  "P-NOMA II",
                                               "H-NOMA I", "H-NOMA II", "H-NOMA III"};

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.spec = spec;

  const auto series = series_or_dummy(spec);
  const std::size_t num_points = series.size() * spec.sweep_values.size();
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t num_solvers = spec.solvers.size();

  // outcomes[(point * trials + trial) * num_solvers + solver]
  std::vector<TrialOutcome> outcomes(num_points * trials * num_solvers);
  std::vector<double> oma_totals(num_points * trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= num_points * trials) return;
      const std::size_t point = task / trials;
      const std::size_t trial = task % trials;
      const double sv = series[point / spec.sweep_values.size()];
      const double v = spec.sweep_values[point % spec.sweep_values.size()];
      const ScenarioConfig cfg = spec.scenario_at(sv, v);
      Rng rng(trial_seed(spec.master_seed, point, trial));
      const SystemInstance inst = sample_instance(cfg, rng);
      oma_totals[task] = oma_total_power(inst);
      for (std::size_t k = 0; k < num_solvers; ++k) {
        outcomes[task * num_solvers + k] = run_solver(spec.solvers[k], inst, spec);
      }
    }
  };
  unsigned jobs = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, num_points * trials));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t point = 0; point < num_points; ++point) {
    PointSummary ps;
    ps.series_value = series[point / spec.sweep_values.size()];
    ps.sweep_value = spec.sweep_values[point % spec.sweep_values.size()];
    auto outcome = [&](std::size_t trial, std::size_t k) -> const TrialOutcome& {
      return outcomes[(point * trials + trial) * num_solvers + k];
    };

    for (std::size_t k = 0; k < num_solvers; ++k) {
      for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto& o = outcome(trial, k);
        if (!o.ok) {
          std::ostringstream msg;
          msg << to_string(spec.solvers[k]) << " failed at series=" << ps.series_value
              << " sweep=" << ps.sweep_value << " trial=" << trial << ": " << o.error;
          result.failure_log.push_back(msg.str());
        }
      }
    }

    if (spec.mode == ExperimentMode::Power) {
      for (std::size_t k = 0; k < num_solvers; ++k) {
        SolverSummary s;
        s.solver = spec.solvers[k];
        std::vector<double> power, saving, oma_paired, ratio, iters, calls, work;
        for (std::size_t trial = 0; trial < trials; ++trial) {
          const auto& o = outcome(trial, k);
          s.verification_failures += o.verification_failures;
          if (!o.ok) {
            ++s.failures;
            continue;
          }
          const double oma = oma_totals[point * trials + trial];
          power.push_back(o.objective);
          oma_paired.push_back(oma);
          saving.push_back(oma - o.objective);
          if (o.objective > 0.0) ratio.push_back(oma / o.objective);
          iters.push_back(o.iterations);
          calls.push_back(static_cast<double>(o.calls));
          work.push_back(static_cast<double>(o.work));
        }
        s.trials_ok = static_cast<int>(power.size());
        s.mean_power = mean_of(power);
        s.se_power = se_of(power);
        s.mean_saving = mean_of(saving);
        s.se_saving = se_of(saving);
        s.oma_ratio = s.mean_power > 0.0 ? mean_of(oma_paired) / s.mean_power : 0.0;
        s.mean_trial_ratio = mean_of(ratio);
        s.se_trial_ratio = se_of(ratio);
        s.mean_iterations = mean_of(iters);
        s.mean_calls = mean_of(calls);
        s.mean_work = mean_of(work);
        s.work_per_call = s.mean_calls > 0.0 ? s.mean_work / s.mean_calls : 0.0;
        ps.solvers.push_back(s);
      }
    } else if (spec.mode == ExperimentMode::ClassFrequency) {
      const auto k = static_cast<std::size_t>(
          std::find(spec.solvers.begin(), spec.solvers.end(), Solver::TwoUserClosedForm) -
          spec.solvers.begin());
      std::map<std::string, int> counts;
      int ok = 0;
      for (std::size_t trial = 0; trial < trials; ++trial) {
        const auto& o = outcome(trial, k);
        if (!o.ok) {
          ++ps.class_failures;
          continue;
        }
        ++counts[o.label];
        ++ok;
      }
      for (const auto& label : kClassLabels) {
        ClassCount c;
        c.label = label;
        c.count = counts[label];
        c.frequency = ok > 0 ? static_cast<double>(c.count) / ok : 0.0;
        ps.classes.push_back(c);
      }
    } else {
      for (std::size_t k = 0; k < num_solvers; ++k) {
        TraceSummary ts;
        ts.solver = spec.solvers[k];
        std::size_t len = 0;
        int ok = 0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
          const auto& o = outcome(trial, k);
          if (o.ok) {
            len = std::max(len, o.upper_trace.size());
            ++ok;
          }
        }
        ts.mean_upper.assign(len, 0.0);
        ts.mean_lower.assign(len, 0.0);
        for (std::size_t trial = 0; trial < trials; ++trial) {
          const auto& o = outcome(trial, k);
          if (!o.ok || o.upper_trace.empty()) continue;
          for (std::size_t it = 0; it < len; ++it) {
            const std::size_t src = std::min(it, o.upper_trace.size() - 1);
            ts.mean_upper[it] += o.upper_trace[src] / ok;
            ts.mean_lower[it] += o.lower_trace[src] / ok;
          }
        }
        ps.traces.push_back(std::move(ts));
      }
    }
    result.points.push_back(std::move(ps));
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_csv(const ExperimentResult& result) {
  const ExperimentSpec& spec = result.spec;
  std::ostringstream head;
  head << std::setprecision(17);
  head << "# hnoma experiment\n";
  head << "# name = " << spec.name << '\n';
  head << "# mode = " << to_string(spec.mode) << '\n';
  {
    std::istringstream sc(to_text(spec.scenario));
    std::string line;
    while (std::getline(sc, line)) {
      if (line.rfind("seed", 0) == 0) continue;
      head << "# scenario." << line << '\n';
    }
  }
  head << "# sweep_var = " << to_string(spec.sweep_var) << '\n';
  head << "# sweep_values =";
  for (double v : spec.sweep_values) head << ' ' << v;
  head << '\n';
  if (spec.series_var) {
    head << "# series_var = " << to_string(*spec.series_var) << '\n';
    head << "# series_values =";
    for (double v : spec.series_values) head << ' ' << v;
    head << '\n';
  }
  head << "# trials = " << spec.trials << '\n';
  head << "# solvers =";
  for (Solver s : spec.solvers) head << ' ' << to_string(s);
  head << '\n';
  head << "# master_seed = " << spec.master_seed << '\n';
  head << "# xi_rel = " << spec.xi_rel << '\n';
  head << "# n_max = " << spec.n_max << '\n';
  head << "# failures = " << result.failure_log.size() << '\n';

  std::ostringstream body;
  body << std::setprecision(10);
  const std::string series_name = spec.series_var ? to_string(*spec.series_var) : "none";
  const std::string sweep_name = to_string(spec.sweep_var);
  auto key = [&](const PointSummary& p) {
    std::ostringstream k;
    k << std::setprecision(10) << series_name << ',' << p.series_value << ',' << sweep_name << ','
      << p.sweep_value;
    return k.str();
  };

  if (spec.mode == ExperimentMode::Power) {
    body << "series_var,series_value,sweep_var,sweep_value,solver,trials_ok,failures,mean_power,"
            "se_power,mean_saving_vs_oma,se_saving_vs_oma,oma_over_solver,mean_trial_ratio,"
            "se_trial_ratio,mean_iterations,mean_oracle_calls,mean_oracle_work,oracle_work_per_call,verification_failures\n";
    for (const auto& p : result.points) {
      for (const auto& s : p.solvers) {
        body << key(p) << ',' << to_string(s.solver) << ',' << s.trials_ok << ',' << s.failures
             << ',' << s.mean_power << ',' << s.se_power << ',' << s.mean_saving << ','
             << s.se_saving << ',' << s.oma_ratio << ',' << s.mean_trial_ratio << ','
             << s.se_trial_ratio << ',' << s.mean_iterations << ','
             << s.mean_calls << ',' << s.mean_work << ',' << s.work_per_call << ','
             << s.verification_failures << '\n';
      }
    }
  } else if (spec.mode == ExperimentMode::ClassFrequency) {
    body << "series_var,series_value,sweep_var,sweep_value,class,count,frequency,failures\n";
    for (const auto& p : result.points) {
      for (const auto& c : p.classes) {
        body << key(p) << ',' << c.label << ',' << c.count << ',' << c.frequency << ','
             << p.class_failures << '\n';
      }
    }
  } else {
    body << "series_var,series_value,sweep_var,sweep_value,solver,iteration,mean_upper,"
            "mean_lower\n";
    for (const auto& p : result.points) {
      for (const auto& t : p.traces) {
        for (std::size_t it = 0; it < t.mean_upper.size(); ++it) {
          body << key(p) << ',' << to_string(t.solver) << ',' << it << ',' << t.mean_upper[it]
               << ',' << t.mean_lower[it] << '\n';
        }
      }
    }
  }

  const std::string h = head.str();
  const std::string b = body.str();
  std::ostringstream hash;
  hash << "# content_hash = fnv1a64:" << std::hex << std::setw(16) << std::setfill('0')
       << fnv1a64(h + b) << '\n';
  return h + hash.str() + b;
}

}  // namespace hnoma
