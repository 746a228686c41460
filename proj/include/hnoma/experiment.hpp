#pragma once

#include "hnoma/bb.hpp"
#include "hnoma/channel.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnoma {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Solver { OMA, TwoUserClosedForm, SCA, BBSRA, BBSCA, ConventionalTwoUser };
const char* to_string(Solver s);
/// Accepts the to_string names ("OMA", "TwoUserClosedForm", "SCA", "BB-SRA",
/// "BB-SCA", "ConventionalTwoUser"), case-insensitive. Throws ConfigError.
Solver parse_solver(const std::string& name);
bool is_two_user_only(Solver s);

enum class SweepVar { TargetRate, NumUsers, ClusterSide, ClusterCenter };
const char* to_string(SweepVar v);
SweepVar parse_sweep_var(const std::string& name);
void apply_sweep_value(ScenarioConfig& cfg, SweepVar v, double value);

enum class ExperimentMode {
  Power,           ///< mean total power per solver
  ClassFrequency,  ///< frequency of each two-user solution class
  Convergence      ///< mean per-iteration objective traces
};
const char* to_string(ExperimentMode m);
ExperimentMode parse_mode(const std::string& name);

struct ExperimentSpec {
  std::string name = "sweep";
  ScenarioConfig scenario;
  SweepVar sweep_var = SweepVar::TargetRate;
  std::vector<double> sweep_values{1.0};
  std::optional<SweepVar> series_var;
  std::vector<double> series_values;
  int trials = 500;
  std::vector<Solver> solvers{Solver::OMA};
  ExperimentMode mode = ExperimentMode::Power;
  std::uint64_t master_seed = 1;
  double xi_rel = 1e-3;  ///< BB gap as a fraction of the OMA total
  int n_max = 1000;
  int jobs = 0;          ///< worker threads; 0 = hardware concurrency

  /// Throws ConfigError (bad counts, empty lists, two-user solvers with M != 2,
  /// mode/solver mismatch, invalid scenarios at any sweep point).
  void validate() const;
  /// Scenario at one grid point (series value ignored when no series).
  ScenarioConfig scenario_at(double series_value, double sweep_value) const;
};

/// Applies "key = value" lines (scenario keys plus name, mode, sweep_var,
/// sweep_values, series_var, series_values, trials, solvers, master_seed,
/// xi_rel, n_max, jobs) onto base.
ExperimentSpec parse_experiment_spec(const std::string& text, ExperimentSpec base = {});

/// Preset for fig1 .. fig6. Throws ConfigError for unknown names.
ExperimentSpec fig_mode(const std::string& name);

struct SolverSummary {
  Solver solver = Solver::OMA;
  int trials_ok = 0;
  int failures = 0;
  double mean_power = 0.0;
  double se_power = 0.0;
  double mean_saving = 0.0;  ///< paired OMA minus solver power
  double se_saving = 0.0;
  double oma_ratio = 0.0;    ///< mean OMA / mean solver over the same trials
  double mean_trial_ratio = 0.0;  ///< mean of per-trial OMA / solver
  double se_trial_ratio = 0.0;
  double mean_iterations = 0.0;
  double mean_calls = 0.0;
  double mean_work = 0.0;
  double work_per_call = 0.0;  ///< total oracle work / total oracle calls
  long verification_failures = 0;
};

struct ClassCount {
  std::string label;
  int count = 0;
  double frequency = 0.0;
};

struct TraceSummary {
  Solver solver = Solver::SCA;
  std::vector<double> mean_upper;  ///< objective (SCA) or U (BB) per iteration
  std::vector<double> mean_lower;  ///< L for BB, objective for SCA
};

struct PointSummary {
  double series_value = 0.0;
  double sweep_value = 0.0;
  std::vector<SolverSummary> solvers;
  std::vector<ClassCount> classes;
  int class_failures = 0;
  std::vector<TraceSummary> traces;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<PointSummary> points;
  std::vector<std::string> failure_log;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// CSV with a '#' comment header echoing the configuration and a content hash.
std::string to_csv(const ExperimentResult& result);

/// 64-bit FNV-1a, used for the CSV content hash.
std::uint64_t fnv1a64(const std::string& data);

}  // namespace hnoma
