#include "hnoma/convex.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace hnoma {

// ---------------------------------------------------------------------------
// Water-filling

namespace {

double clamp_level(double mu, double a, double cap) {
  if (a <= 0.0) return 0.0;
  return std::clamp(mu - 1.0 / a, 0.0, cap);
}

double rate_at(const LogSumProblem& p, double mu) {
  double r = 0.0;
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    r += std::log1p(p.coeffs[i] * clamp_level(mu, p.coeffs[i], p.caps[i]));
  }
  return r;
}

}  // namespace

WaterfillResult waterfill_min_sum(const LogSumProblem& prob) {
  const std::size_t n = prob.coeffs.size();
  if (prob.caps.size() != n) throw std::invalid_argument("waterfill: caps/coeffs size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(prob.coeffs[i] >= 0.0) || !std::isfinite(prob.coeffs[i]) || !(prob.caps[i] > 0.0)) {
      throw std::invalid_argument("waterfill: coefficients must be >= 0 and caps > 0");
    }
  }

  WaterfillResult res;
  res.eta.assign(n, 0.0);
  const double rho = prob.required_rate;
  if (rho <= 0.0) {
    res.feasible = true;
    return res;
  }

  double max_rate = 0.0;
  double min_a = std::numeric_limits<double>::infinity();
  double max_inv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = prob.coeffs[i];
    max_rate += std::log1p(a * prob.caps[i]);
    if (a > 0.0) {
      min_a = std::min(min_a, a);
      max_inv = std::max(max_inv, 1.0 / a);
    }
  }
  if (max_rate < rho - 1e-12 || !std::isfinite(min_a)) {
    res.feasible = false;
    res.rate = max_rate;
    for (std::size_t i = 0; i < n; ++i) res.eta[i] = prob.coeffs[i] > 0.0 ? prob.caps[i] : 0.0;
    return res;
  }

  double lo = 0.0;
  double hi = max_inv + std::exp(rho) / min_a;
  double rate_hi = rate_at(prob, hi);
  if (rate_hi < rho) {
    // Every variable sits at its cap and the cap rate is within 1e-12 of rho.
    res.feasible = true;
    res.water_level = hi;
    res.rate = rate_hi;
    for (std::size_t i = 0; i < n; ++i) res.eta[i] = clamp_level(hi, prob.coeffs[i], prob.caps[i]);
    return res;
  }

  const double rate_slack = 1e-13 * std::max(1.0, rho);
  while (res.iterations < 200 && rate_hi - rho > rate_slack && hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double r = rate_at(prob, mid);
    if (r >= rho) {
      hi = mid;
      rate_hi = r;
    } else {
      lo = mid;
    }
    ++res.iterations;
  }

  res.feasible = true;
  res.water_level = hi;
  res.rate = rate_hi;
  for (std::size_t i = 0; i < n; ++i) res.eta[i] = clamp_level(hi, prob.coeffs[i], prob.caps[i]);
  return res;
}

// ---------------------------------------------------------------------------
// Concave programs

double ConcaveConstraint::value(const Eigen::VectorXd& x) const {
  double v = -((linear.size() ? linear.dot(x) : 0.0) + offset) - rhs;
  for (const auto& w : log_weights) v += std::log1p(w.dot(x));
  return v;
}

ConcaveProgram::ConcaveProgram(int num_vars)
    : objective(Eigen::VectorXd::Zero(num_vars)), A(0, num_vars), d(0) {}

void ConcaveProgram::add_linear(const Eigen::VectorXd& a, double rhs) {
  if (a.size() != num_vars()) throw std::invalid_argument("add_linear: dimension mismatch");
  A.conservativeResize(A.rows() + 1, num_vars());
  A.row(A.rows() - 1) = a.transpose();
  d.conservativeResize(d.size() + 1);
  d(d.size() - 1) = rhs;
}

int ConcaveProgram::num_inequalities() const {
  return static_cast<int>(constraints.size()) + static_cast<int>(A.rows()) + num_vars();
}

namespace {

// Program plus a mask of which variables carry a  x_j > 0  barrier term.
struct BarrierProblem {
  const ConcaveProgram& prog;
  std::vector<bool> bounded;

  int num_terms() const {
    int m = static_cast<int>(prog.constraints.size()) + static_cast<int>(prog.A.rows());
    for (bool b : bounded) m += b ? 1 : 0;
    return m;
  }

  bool in_domain(const Eigen::VectorXd& x) const {
    for (int j = 0; j < x.size(); ++j) {
      if (bounded[j] && !(x(j) > 0.0)) return false;
    }
    for (const auto& c : prog.constraints) {
      for (const auto& w : c.log_weights) {
        if (!(1.0 + w.dot(x) > 0.0)) return false;
      }
      if (!(c.value(x) > 0.0)) return false;
    }
    if (prog.A.rows() > 0) {
      const Eigen::VectorXd s = prog.d - prog.A * x;
      if (!(s.minCoeff() > 0.0)) return false;
    }
    return true;
  }

  double value(const Eigen::VectorXd& x, double t) const {
    double v = t * prog.objective.dot(x);
    for (int j = 0; j < x.size(); ++j) {
      if (bounded[j]) v -= std::log(x(j));
    }
    for (const auto& c : prog.constraints) v -= std::log(c.value(x));
    if (prog.A.rows() > 0) {
      const Eigen::VectorXd s = prog.d - prog.A * x;
      for (int r = 0; r < s.size(); ++r) v -= std::log(s(r));
    }
    return v;
  }

  BarrierEval eval(const Eigen::VectorXd& x, double t) const {
    const int n = static_cast<int>(x.size());
    BarrierEval e;
    e.value = value(x, t);
    e.gradient = t * prog.objective;
    e.hessian = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      if (!bounded[j]) continue;
      e.gradient(j) -= 1.0 / x(j);
      e.hessian(j, j) += 1.0 / (x(j) * x(j));
    }
    for (const auto& c : prog.constraints) {
      const double g = c.value(x);
      Eigen::VectorXd grad_g =
          c.linear.size() ? Eigen::VectorXd(-c.linear) : Eigen::VectorXd::Zero(n);
      Eigen::MatrixXd hess_g = Eigen::MatrixXd::Zero(n, n);
      for (const auto& w : c.log_weights) {
        const double arg = 1.0 + w.dot(x);
        grad_g += w / arg;
        hess_g.noalias() -= (w * w.transpose()) / (arg * arg);
      }
      e.gradient -= grad_g / g;
      e.hessian.noalias() += (grad_g * grad_g.transpose()) / (g * g) - hess_g / g;
    }
    if (prog.A.rows() > 0) {
      const Eigen::VectorXd s = prog.d - prog.A * x;
      for (int r = 0; r < s.size(); ++r) {
        const Eigen::VectorXd a = prog.A.row(r).transpose();
        e.gradient += a / s(r);
        e.hessian.noalias() += (a * a.transpose()) / (s(r) * s(r));
      }
    }
    return e;
  }
};

Eigen::VectorXd newton_direction(const BarrierEval& e) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(e.hessian);
  if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
    Eigen::VectorXd dx = ldlt.solve(-e.gradient);
    if (dx.allFinite()) return dx;
  }
  // Regularize a numerically indefinite Hessian.
  const double scale = std::max(1e-300, e.hessian.diagonal().cwiseAbs().maxCoeff());
  Eigen::MatrixXd h = e.hessian;
  h.diagonal().array() += 1e-10 * scale;
  return h.ldlt().solve(-e.gradient);
}

enum class CenterOutcome { Centered, Stalled };

CenterOutcome center(const BarrierProblem& bp, Eigen::VectorXd& x, double t,
                     const BarrierOptions& opts, int& newton_steps) {
  for (int k = 0; k < opts.max_newton; ++k) {
    const BarrierEval e = bp.eval(x, t);
    const Eigen::VectorXd dx = newton_direction(e);
    const double slope = e.gradient.dot(dx);
    const double dec2 = -slope;
    if (!(dec2 >= 0.0) || !std::isfinite(dec2)) return CenterOutcome::Stalled;
    if (dec2 / 2.0 <= opts.newton_tol) return CenterOutcome::Centered;

    double step = 1.0;
    while (step > 1e-16 && !bp.in_domain(x + step * dx)) step *= opts.beta;
    while (step > 1e-16 && bp.value(x + step * dx, t) > e.value + opts.alpha * step * slope) {
      step *= opts.beta;
    }
    if (step <= 1e-16) return CenterOutcome::Stalled;
    x += step * dx;
    ++newton_steps;
    if (step * dx.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
      return CenterOutcome::Centered;
    }
  }
  return CenterOutcome::Centered;
}

// Runs the t-schedule. stop_early is consulted after every centering and may
// end the run with status Optimal.
template <class EarlyStop>
BarrierResult run_barrier(const BarrierProblem& bp, Eigen::VectorXd x, const BarrierOptions& opts,
                          EarlyStop stop_early) {
  BarrierResult res;
  const int m = bp.num_terms();
  double t = opts.t0;
  while (true) {
    const CenterOutcome outcome = center(bp, x, t, opts, res.newton_steps);
    ++res.outer_iterations;
    const double objective = bp.prog.objective.dot(x);
    if (opts.on_centering) opts.on_centering(res.outer_iterations, t, objective);
    res.x = x;
    res.objective = objective;
    res.gap = m / t;
    if (auto early = stop_early(x, t)) {
      res.status = *early;
      return res;
    }
    if (outcome == CenterOutcome::Stalled) {
      res.status = res.gap <= 100.0 * opts.tol ? BarrierStatus::Optimal
                                               : BarrierStatus::NumericalFailure;
      return res;
    }
    if (res.gap <= opts.tol) {
      res.status = BarrierStatus::Optimal;
      return res;
    }
    t *= opts.kappa;
  }
}

}  // namespace

bool ConcaveProgram::strictly_feasible(const Eigen::VectorXd& x) const {
  if (x.size() != num_vars()) return false;
  return BarrierProblem{*this, std::vector<bool>(num_vars(), true)}.in_domain(x);
}

double ConcaveProgram::max_violation(const Eigen::VectorXd& x) const {
  double v = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < x.size(); ++j) v = std::max(v, -x(j));
  for (const auto& c : constraints) {
    for (const auto& w : c.log_weights) {
      if (!(1.0 + w.dot(x) > 0.0)) return std::numeric_limits<double>::infinity();
    }
    v = std::max(v, -c.value(x));
  }
  if (A.rows() > 0) v = std::max(v, (A * x - d).maxCoeff());
  return v;
}

BarrierEval evaluate_barrier(const ConcaveProgram& prog, const Eigen::VectorXd& x, double t) {
  BarrierProblem bp{prog, std::vector<bool>(prog.num_vars(), true)};
  if (!bp.in_domain(x)) throw std::domain_error("evaluate_barrier: x not strictly feasible");
  return bp.eval(x, t);
}

BarrierResult barrier_solve(const ConcaveProgram& prog, const Eigen::VectorXd& x0,
                            const BarrierOptions& opts) {
  BarrierProblem bp{prog, std::vector<bool>(prog.num_vars(), true)};
  if (x0.size() != prog.num_vars() || !bp.in_domain(x0)) {
    BarrierResult res;
    res.status = BarrierStatus::NumericalFailure;
    res.x = x0;
    return res;
  }
  return run_barrier(bp, x0, opts,
                     [&](const Eigen::VectorXd& x, double) -> std::optional<BarrierStatus> {
                       if (opts.stop_when && opts.stop_when(x)) return BarrierStatus::Optimal;
                       return std::nullopt;
                     });
}

BarrierResult phase_one(const ConcaveProgram& prog, const Eigen::VectorXd& x0,
                        const BarrierOptions& opts) {
  const int n = prog.num_vars();
  if (x0.size() != n) throw std::invalid_argument("phase_one: dimension mismatch");
  if (prog.strictly_feasible(x0)) {
    BarrierResult res;
    res.status = BarrierStatus::Optimal;
    res.x = x0;
    res.objective = prog.objective.dot(x0);
    return res;
  }

  Eigen::VectorXd x = x0;
  const double floor = 1e-6 * std::max(1.0, x0.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j) x(j) = std::max(x(j), floor);

  // Extended variables (x, s); every constraint is relaxed by s and s >= -1
  // keeps the auxiliary problem bounded.
  ConcaveProgram aux(n + 1);
  aux.objective(n) = 1.0;
  for (const auto& c : prog.constraints) {
    ConcaveConstraint e;
    for (const auto& w : c.log_weights) {
      Eigen::VectorXd we = Eigen::VectorXd::Zero(n + 1);
      we.head(n) = w;
      e.log_weights.push_back(std::move(we));
    }
    e.linear = Eigen::VectorXd::Zero(n + 1);
    if (c.linear.size()) e.linear.head(n) = c.linear;
    e.linear(n) = -1.0;
    e.offset = c.offset;
    e.rhs = c.rhs;
    aux.constraints.push_back(std::move(e));
  }
  for (int r = 0; r < prog.A.rows(); ++r) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n + 1);
    a.head(n) = prog.A.row(r).transpose();
    a(n) = -1.0;
    aux.add_linear(a, prog.d(r));
  }
  {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n + 1);
    a(n) = -1.0;
    aux.add_linear(a, 1.0);
  }
  // The relaxed log constraints reward growing x without limit; a generous
  // cap on sum(x) keeps the auxiliary problem bounded.
  {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n + 1);
    a.head(n).setOnes();
    aux.add_linear(a, 10.0 * (1.0 + x.sum()));
  }

  double violation = 0.0;
  for (const auto& c : prog.constraints) {
    for (const auto& w : c.log_weights) {
      if (!(1.0 + w.dot(x) > 0.0)) {
        BarrierResult res;
        res.status = BarrierStatus::NumericalFailure;
        res.x = x0;
        return res;
      }
    }
    violation = std::max(violation, -c.value(x));
  }
  if (prog.A.rows() > 0) violation = std::max(violation, (prog.A * x - prog.d).maxCoeff());
  const double s0 = violation + std::max(1e-3, 0.1 * violation);

  Eigen::VectorXd z(n + 1);
  z.head(n) = x;
  z(n) = s0;

  std::vector<bool> bounded(n + 1, true);
  bounded[n] = false;
  BarrierProblem bp{aux, bounded};
  const int m = bp.num_terms();
  BarrierResult inner = run_barrier(
      bp, z, opts, [&](const Eigen::VectorXd& zc, double t) -> std::optional<BarrierStatus> {
        if (zc(n) < 0.0) return BarrierStatus::Optimal;
        if (zc(n) - m / t > 0.0) return BarrierStatus::Infeasible;
        return std::nullopt;
      });

  BarrierResult res;
  res.newton_steps = inner.newton_steps;
  res.outer_iterations = inner.outer_iterations;
  res.x = inner.x.head(n);
  res.objective = prog.objective.dot(res.x);
  res.gap = inner.gap;
  if (inner.x(n) < 0.0 && prog.strictly_feasible(res.x)) {
    res.status = BarrierStatus::Optimal;
  } else if (inner.status == BarrierStatus::NumericalFailure) {
    res.status = BarrierStatus::NumericalFailure;
  } else {
    res.status = BarrierStatus::Infeasible;
  }
  return res;
}

}  // namespace hnoma
