#pragma once

#include "hnoma/model.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnoma {

/// Two-user problem in aliased form: gamma0 = |h_2|^2 |g_21|^2, gamma1 = |h_1|^2,
/// gamma2 = |h_2|^2 (all noise-normalized). p0 is user 2's reflected power in
/// slot 1, p1 and p2 the users' own-slot powers.
struct TwoUserInstance {
  double gamma0 = 1.0;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double rate = 0.0;

  /// Throws std::invalid_argument unless gains are positive and rate >= 0.
  void validate() const;
  double eps() const;

  static TwoUserInstance from_system(const SystemInstance& inst);
  SystemInstance to_system() const;
};

/// Solution forms, in the order used for tie-breaking.
enum class CandidateKind { OMA, PNomaI, PNomaII, HNomaI, HNomaII, HNomaIII };

inline constexpr std::array<CandidateKind, 6> kAllKinds = {
    CandidateKind::OMA,     CandidateKind::PNomaI,  CandidateKind::PNomaII,
    CandidateKind::HNomaI,  CandidateKind::HNomaII, CandidateKind::HNomaIII};

const char* to_string(CandidateKind k);

/// Multipliers lambda_1..lambda_6 stored at index 0..5 for the constraints
///   g1 = R - log(1+gamma0 p0) - log(1+gamma2 p2) <= 0
///   g2 = eps gamma0 p0 + eps - gamma1 p1 <= 0
///   g3 = p0 - p1 <= 0,  g4 = -p1,  g5 = -p2,  g6 = -p0.
using Multipliers = std::array<double, 6>;

struct KktResiduals {
  double stationarity = 0.0;   ///< inf-norm of grad f + sum lambda_k grad g_k
  double min_multiplier = 0.0;
  double slackness = 0.0;      ///< max |lambda_k g_k| with g_k normalized
  double primal = 0.0;         ///< max normalized constraint violation
};

struct TwoUserCandidate {
  CandidateKind kind = CandidateKind::OMA;
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  bool primal_feasible = false;
  bool kkt_certified = false;

  Multipliers analytic{};   ///< closed-form multipliers
  Multipliers numeric{};    ///< non-negative least-squares fit on the active set
  KktResiduals analytic_residuals;
  KktResiduals numeric_residuals;
  /// Largest |analytic - numeric| over multipliers, relative to max(1, |lambda|).
  double multiplier_disagreement = 0.0;

  double objective() const { return p1 + p2; }
};

inline constexpr double kKktTol = 1e-7;

/// All six candidate forms, degenerate ones flagged with primal_feasible = false.
std::vector<TwoUserCandidate> enumerate_candidates(const TwoUserInstance& inst);

/// Fills the multipliers and residuals of cand and sets kkt_certified.
TwoUserCandidate certify_kkt(const TwoUserInstance& inst, TwoUserCandidate cand,
                             double tol = kKktTol);

class CertificationConflict : public std::runtime_error {
 public:
  CertificationConflict(const std::string& what, std::vector<TwoUserCandidate> candidates)
      : std::runtime_error(what), candidates_(std::move(candidates)) {}
  const std::vector<TwoUserCandidate>& candidates() const { return candidates_; }

 private:
  std::vector<TwoUserCandidate> candidates_;
};

struct TwoUserReport {
  SolveReport report;
  CandidateKind kind = CandidateKind::OMA;
  std::vector<TwoUserCandidate> candidates;  ///< all six, certified
  int num_certified = 0;
};

/// Picks the KKT-certified candidate; ties at region boundaries resolve by
/// objective, then enum order. Throws CertificationConflict when nothing
/// certifies or certified candidates disagree on the objective.
TwoUserReport solve_two_user(const TwoUserInstance& inst, double tol = kKktTol);

/// Table-1 label of the certified solution ("P-NOMA I", ..., "H-NOMA III").
std::string classify_solution(const TwoUserReport& report);

/// Multi-line diagnostic dump of a candidate (powers, multipliers, residuals).
std::string diagnostic_record(const TwoUserCandidate& cand);

// ---------------------------------------------------------------------------
// Conventional H-NOMA: user 2's slot-1 power is battery-drawn and counted.

struct ConventionalSolution {
  SolveReport report;  ///< profile: P(0,0)=p1, P(1,0)=p0, P(1,1)=p2
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  /// Pure-NOMA point P1 = eps(1+eps)/h1sq, P0 = eps/h2sq and its total.
  double pure_noma_p0 = 0.0;
  double pure_noma_p1 = 0.0;
  double pure_noma_total = 0.0;
  double oma_total = 0.0;
  int newton_steps = 0;
};

ConventionalSolution solve_conventional_two_user(double h1sq, double h2sq, double rate);

// ---------------------------------------------------------------------------
// Independent grid oracle for the two-user problem.

struct GridOracleResult {
  bool found = false;
  double p0 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double objective = 0.0;
  double coarse_step = 0.0;
  double fine_step = 0.0;
};

/// Brute-force search over the box [0, 4 * OMA total]^3. p0 runs over a uniform
/// grid of max_points values; for each, p1 and p2 are set to the smallest values
/// meeting their constraints (both are monotone in their own variable), which is
/// exact minimization over those two axes. A 10x finer p0 grid spanning +-2
/// coarse steps around the incumbent follows. Uses no candidate formulas.
GridOracleResult grid_oracle(const TwoUserInstance& inst, long max_points = 10'000'000);

}  // namespace hnoma
