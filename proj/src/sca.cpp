#include "hnoma/sca.hpp"

#include "hnoma/convex.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hnoma {

double InterferenceLinearization::operator()(const PowerProfile& p) const {
  const auto& x = p.values().packed();
  if (x.size() != u.size()) throw std::invalid_argument("linearization: size mismatch");
  double v = b;
  for (std::size_t k = 0; k < u.size(); ++k) v += u[k] * x[k];
  return v;
}

namespace {

void check_interference_index(const SystemInstance& inst, int m, int i) {
  const int n = inst.num_users();
  if (m < 0 || m >= n - 1 || i < 0 || i > m) {
    throw std::out_of_range("interference index (m=" + std::to_string(m) + ", i=" +
                            std::to_string(i) + ") needs i <= m < M-1, M=" + std::to_string(n));
  }
}

double received_interference(const SystemInstance& inst, const PowerProfile& p, int m, int i) {
  double s = 0.0;
  for (int j = m + 1; j < inst.num_users(); ++j) s += inst.gamma(j, i) * p(j, i);
  return s;
}

}  // namespace

double interference_term(const SystemInstance& inst, const PowerProfile& p, int m, int i) {
  check_interference_index(inst, m, i);
  return std::log1p(received_interference(inst, p, m, i));
}

InterferenceLinearization linearize_interference(const SystemInstance& inst,
                                                 const PowerProfile& p_ref, int m, int i) {
  check_interference_index(inst, m, i);
  if (p_ref.num_users() != inst.num_users()) {
    throw std::invalid_argument("linearize_interference: profile/instance size mismatch");
  }
  const double s = received_interference(inst, p_ref, m, i);
  InterferenceLinearization lin;
  lin.u.assign(LowerTriangular::packed_size(inst.num_users()), 0.0);
  for (int j = m + 1; j < inst.num_users(); ++j) {
    lin.u[LowerTriangular::packed_index(j, i)] = inst.gamma(j, i) / (s + 1.0);
  }
  lin.b = std::log1p(s) - s / (s + 1.0);
  return lin;
}

namespace {

// Inner convex program in variables x = P / scale, linearized around p_ref.
ConcaveProgram build_subproblem(const SystemInstance& inst, const PowerProfile& p_ref,
                                double scale) {
  const int n = inst.num_users();
  const int dim = static_cast<int>(LowerTriangular::packed_size(n));
  ConcaveProgram prog(dim);
  for (int m = 0; m < n; ++m) prog.objective(LowerTriangular::packed_index(m, m)) = 1.0;

  for (int m = 0; m < n; ++m) {
    ConcaveConstraint c;
    c.linear = Eigen::VectorXd::Zero(dim);
    c.rhs = inst.target_rate();
    for (int i = 0; i <= m; ++i) {
      Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
      for (int j = m; j < n; ++j) w(LowerTriangular::packed_index(j, i)) = inst.gamma(j, i) * scale;
      c.log_weights.push_back(std::move(w));
      if (m + 1 < n) {
        const auto lin = linearize_interference(inst, p_ref, m, i);
        for (int k = 0; k < dim; ++k) c.linear(k) += lin.u[k] * scale;
        c.offset += lin.b;
      }
    }
    prog.constraints.push_back(std::move(c));
  }

  for (int m = 1; m < n; ++m) {
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
      a(LowerTriangular::packed_index(m, i)) = 1.0;
      a(LowerTriangular::packed_index(i, i)) = -1.0;
      prog.add_linear(a, 0.0);
    }
  }
  return prog;
}

}  // namespace

SolveReport sca_solve(const SystemInstance& inst, const std::optional<PowerProfile>& init,
                      const ScaOptions& opts) {
  const int n = inst.num_users();
  PowerProfile current = init ? *init : oma_profile(inst);
  if (current.num_users() != n) throw std::invalid_argument("sca_solve: init size mismatch");

  SolveReport rep;
  rep.profile = current;
  rep.objective = total_power(current);
  rep.trace = {rep.objective};
  rep.status = SolveStatus::Converged;

  const double scale = rep.objective;
  if (!(scale > 0.0)) {
    rep.upper_bound = rep.lower_bound = rep.objective;
    return rep;
  }

  BarrierOptions bopts;
  bopts.tol = opts.barrier_tol;
  const int dim = static_cast<int>(LowerTriangular::packed_size(n));

  bool converged = false;
  for (int k = 1; k <= opts.max_iter; ++k) {
    const ConcaveProgram prog = build_subproblem(inst, current, scale);
    Eigen::VectorXd x0(dim);
    for (int q = 0; q < dim; ++q) x0(q) = current.values().packed()[q] / scale;

    ++rep.iterations;
    Eigen::VectorXd start = x0;
    if (!prog.strictly_feasible(x0)) {
      const BarrierResult p1 = phase_one(prog, x0, bopts);
      if (p1.status != BarrierStatus::Optimal) {
        rep.status = SolveStatus::NumericalFailure;
        break;
      }
      start = p1.x;
    }
    const BarrierResult res = barrier_solve(prog, start, bopts);
    if (res.status != BarrierStatus::Optimal) {
      rep.status = SolveStatus::NumericalFailure;
      break;
    }

    LowerTriangular p(n);
    for (int q = 0; q < dim; ++q) p.packed()[q] = std::max(0.0, res.x(q)) * scale;
    PowerProfile next(std::move(p));
    const double obj = total_power(next);
    if (!(obj < rep.objective)) {
      converged = true;
      break;
    }
    const double decrease = (rep.objective - obj) / rep.objective;
    current = next;
    rep.profile = next;
    rep.objective = obj;
    rep.trace.push_back(obj);
    if (opts.on_iterate) opts.on_iterate(k, next, obj);
    if (decrease < opts.rel_tol) {
      converged = true;
      break;
    }
  }
  if (rep.status != SolveStatus::NumericalFailure) {
    rep.status = converged ? SolveStatus::Converged : SolveStatus::IterLimit;
  }
  rep.upper_bound = rep.lower_bound = rep.objective;
  return rep;
}

}  // namespace hnoma
