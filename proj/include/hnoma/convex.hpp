#pragma once

#include <Eigen/Core>

#include <functional>
#include <vector>

namespace hnoma {

// ---------------------------------------------------------------------------
// Water-filling for  min sum(eta)  s.t.  sum log(1 + a_i eta_i) >= rho,
//                                       0 <= eta_i <= cap_i.

struct LogSumProblem {
  std::vector<double> coeffs;  ///< a_i >= 0; zero entries are pinned at eta_i = 0
  std::vector<double> caps;    ///< c_i in (0, 1]
  double required_rate = 0.0;  ///< rho, nats
};

struct WaterfillResult {
  bool feasible = false;
  std::vector<double> eta;
  double rate = 0.0;
  double water_level = 0.0;
  int iterations = 0;  ///< bisection steps
};

/// Minimizes the total reflection needed to reach the required rate. The KKT
/// solution is eta_i = clamp(mu - 1/a_i, 0, c_i); mu is found by bisection.
/// The returned eta always satisfies the rate constraint (upper side of the
/// bracket).
WaterfillResult waterfill_min_sum(const LogSumProblem& prob);

// ---------------------------------------------------------------------------
// Log-barrier interior point method for
//   min c'x  s.t.  sum_k log(1 + w_k'x) - (u'x + b) >= rho   (each constraint)
//                  A x <= d,  x >= 0.

struct ConcaveConstraint {
  std::vector<Eigen::VectorXd> log_weights;  ///< w_k, non-negative
  Eigen::VectorXd linear;                    ///< u
  double offset = 0.0;                       ///< b
  double rhs = 0.0;                          ///< rho

  double value(const Eigen::VectorXd& x) const;  ///< lhs - rho
};

struct ConcaveProgram {
  Eigen::VectorXd objective;
  std::vector<ConcaveConstraint> constraints;
  Eigen::MatrixXd A;  ///< rows x num_vars, may have zero rows
  Eigen::VectorXd d;

  explicit ConcaveProgram(int num_vars = 0);
  int num_vars() const { return static_cast<int>(objective.size()); }

  /// Adds a row a'x <= rhs.
  void add_linear(const Eigen::VectorXd& a, double rhs);

  /// Number of barrier terms (concave + linear + bounds).
  int num_inequalities() const;
  /// True if every barrier argument is strictly positive at x.
  bool strictly_feasible(const Eigen::VectorXd& x) const;
  /// Largest violation over all constraints including x >= 0 (<= 0 means feasible).
  double max_violation(const Eigen::VectorXd& x) const;
};

struct BarrierOptions {
  double tol = 1e-8;          ///< target duality gap m/t
  double t0 = 1.0;
  double kappa = 10.0;
  double newton_tol = 1e-9;   ///< stop centering when decrement^2 / 2 <= newton_tol
  int max_newton = 50;        ///< per centering step
  double alpha = 0.01;        ///< Armijo fraction
  double beta = 0.5;          ///< backtracking factor
  std::function<void(int, double, double)> on_centering;  ///< (outer, t, objective)
  /// Checked after every centering step; returning true ends the solve as Optimal.
  std::function<bool(const Eigen::VectorXd&)> stop_when;
};

enum class BarrierStatus { Optimal, Infeasible, NumericalFailure };

struct BarrierResult {
  BarrierStatus status = BarrierStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  double gap = 0.0;       ///< m / t at exit
  int newton_steps = 0;
  int outer_iterations = 0;
};

/// Value, gradient and Hessian of t*c'x + phi(x) with phi the log barrier.
struct BarrierEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// Requires x strictly feasible.
BarrierEval evaluate_barrier(const ConcaveProgram& prog, const Eigen::VectorXd& x, double t);

/// x0 must be strictly feasible; returns NumericalFailure otherwise.
BarrierResult barrier_solve(const ConcaveProgram& prog, const Eigen::VectorXd& x0,
                            const BarrierOptions& opts = {});

/// Finds a strictly feasible point by minimizing a shared slack s over
/// {constraints relaxed by s, x > 0}. Returns x0 unchanged (0 Newton steps) if
/// it is already strictly feasible; Infeasible when the minimal slack is >= 0.
/// The search is confined to sum(x) <= 10 (1 + sum(x0)), so x0 should be of the
/// same order as the feasible region.
BarrierResult phase_one(const ConcaveProgram& prog, const Eigen::VectorXd& x0,
                        const BarrierOptions& opts = {});

}  // namespace hnoma
