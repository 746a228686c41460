#include "hnoma/bb.hpp"

#include "hnoma/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace hnoma {

Rectangle::Rectangle(std::vector<double> lo_, std::vector<double> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw std::invalid_argument("Rectangle: size mismatch");
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || lo[k] < 0.0 || lo[k] > hi[k]) {
      throw std::invalid_argument("Rectangle: need finite 0 <= lo <= hi");
    }
  }
}

double Rectangle::volume() const {
  double v = 1.0;
  for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
  return v;
}

int Rectangle::longest_edge() const {
  int best = 0;
  for (int k = 1; k < dim(); ++k) {
    if (hi[k] - lo[k] > hi[best] - lo[best]) best = k;
  }
  return best;
}

std::pair<Rectangle, Rectangle> Rectangle::bisect() const {
  const int k = longest_edge();
  const double mid = 0.5 * (lo[k] + hi[k]);
  Rectangle a = *this;
  Rectangle b = *this;
  a.hi[k] = mid;
  b.lo[k] = mid;
  return {std::move(a), std::move(b)};
}

// ---------------------------------------------------------------------------
// Successive resource allocation

namespace {

LowerTriangular unit_diagonal(int n) {
  LowerTriangular eta(n);
  for (int m = 0; m < n; ++m) eta(m, m) = 1.0;
  return eta;
}

// Rounding allowance on rate comparisons inside the oracles.
double rate_slack(const SystemInstance& inst) { return 1e-12 * std::max(1.0, inst.target_rate()); }

bool meets_all_rates(const SystemInstance& inst, const std::vector<double>& p_diag,
                     const LowerTriangular& eta) {
  const PowerProfile p = from_reflection(p_diag, eta);
  for (int m = 0; m < inst.num_users(); ++m) {
    if (total_rate(inst, p, m) < inst.target_rate() - rate_slack(inst)) return false;
  }
  return true;
}

void check_diag(const SystemInstance& inst, const std::vector<double>& p_diag) {
  if (static_cast<int>(p_diag.size()) != inst.num_users()) {
    throw std::invalid_argument("feasibility: diagonal size mismatch");
  }
  for (double v : p_diag) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("feasibility: bad power");
  }
}

}  // namespace

FeasibilityResult sra_feasibility(const SystemInstance& inst, const std::vector<double>& p_diag) {
  check_diag(inst, p_diag);
  const int n = inst.num_users();
  const double r = inst.target_rate();
  FeasibilityResult out;
  out.eta = unit_diagonal(n);

  // interference[i]: received reflected power in slot i from users already fixed.
  std::vector<double> interference(n, 0.0);
  for (int m = n - 1; m >= 1; --m) {
    const double own = std::log1p(inst.gamma(m, m) * p_diag[m] / (interference[m] + 1.0));
    const double residual = r - own;
    if (residual > rate_slack(inst)) {
      LogSumProblem prob;
      prob.required_rate = residual;
      prob.caps.assign(m, 1.0);
      prob.coeffs.resize(m);
      for (int i = 0; i < m; ++i) {
        prob.coeffs[i] = inst.gamma(m, i) * p_diag[i] / (interference[i] + 1.0);
      }
      const WaterfillResult wf = waterfill_min_sum(prob);
      out.work += wf.iterations;
      if (!wf.feasible) return out;
      for (int i = 0; i < m; ++i) out.eta(m, i) = wf.eta[i];
    }
    for (int i = 0; i <= m; ++i) interference[i] += inst.gamma(m, i) * out.eta(m, i) * p_diag[i];
  }
  const double first = std::log1p(inst.gamma(0, 0) * p_diag[0] / (interference[0] + 1.0));
  out.feasible = first >= r - rate_slack(inst);
  return out;
}

// ---------------------------------------------------------------------------
// SCA feasibility over the reflection coefficients

namespace {

struct EtaLayout {
  int users;
  int num_eta() const { return users * (users - 1) / 2; }
  int dim() const { return num_eta() + users; }
  int eta(int m, int i) const { return m * (m - 1) / 2 + i; }
  int slack(int m) const { return num_eta() + m; }
};

// Rate constraint of user m with the interference terms linearized at eta_ref:
// sum_i log(1 + signal_i) - lin(I_mi) + s_m >= R + margin.
ConcaveProgram build_eta_program(const SystemInstance& inst, const std::vector<double>& p,
                                 const LowerTriangular& eta_ref, double margin) {
  const int n = inst.num_users();
  const EtaLayout L{n};
  ConcaveProgram prog(L.dim());
  for (int m = 0; m < n; ++m) prog.objective(L.slack(m)) = 1.0;

  for (int m = 0; m < n; ++m) {
    ConcaveConstraint c;
    c.linear = Eigen::VectorXd::Zero(L.dim());
    c.linear(L.slack(m)) = -1.0;
    c.rhs = inst.target_rate() + margin;
    for (int i = 0; i <= m; ++i) {
      // Signal plus undecoded interference in slot i; the own-slot transmit
      // term is constant and folded out of the log.
      const double fixed = (i == m) ? inst.gamma(m, m) * p[m] : 0.0;
      Eigen::VectorXd w = Eigen::VectorXd::Zero(L.dim());
      for (int j = std::max(m, i + 1); j < n; ++j) {
        w(L.eta(j, i)) = inst.gamma(j, i) * p[i] / (1.0 + fixed);
      }
      c.offset -= std::log1p(fixed);
      c.log_weights.push_back(std::move(w));

      // Tangent of log(1 + sum_{j>m} gamma_ji p_i eta_ji) at eta_ref.
      double s = 0.0;
      for (int j = m + 1; j < n; ++j) s += inst.gamma(j, i) * p[i] * eta_ref(j, i);
      for (int j = m + 1; j < n; ++j) c.linear(L.eta(j, i)) += inst.gamma(j, i) * p[i] / (s + 1.0);
      c.offset += std::log1p(s) - s / (s + 1.0);
    }
    prog.constraints.push_back(std::move(c));
  }
  for (int m = 1; m < n; ++m) {
    for (int i = 0; i < m; ++i) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(L.dim());
      a(L.eta(m, i)) = 1.0;
      prog.add_linear(a, 1.0);
    }
  }
  return prog;
}

}  // namespace

FeasibilityResult sca_feasibility(const SystemInstance& inst, const std::vector<double>& p_diag,
                                  const ScaFeasibilityOptions& opts) {
  check_diag(inst, p_diag);
  const int n = inst.num_users();
  const EtaLayout L{n};
  FeasibilityResult out;
  out.eta = unit_diagonal(n);
  if (meets_all_rates(inst, p_diag, out.eta)) {
    out.feasible = true;
    return out;
  }
  if (n == 1) return out;

  LowerTriangular eta_ref = unit_diagonal(n);
  for (int m = 1; m < n; ++m) {
    for (int i = 0; i < m; ++i) eta_ref(m, i) = 1e-6;
  }
  Eigen::VectorXd x(L.dim());
  for (int m = 1; m < n; ++m) {
    for (int i = 0; i < m; ++i) x(L.eta(m, i)) = eta_ref(m, i);
  }
  {
    const ConcaveProgram prog = build_eta_program(inst, p_diag, eta_ref, opts.margin);
    for (int m = 0; m < n; ++m) x(L.slack(m)) = 0.0;
    for (int m = 0; m < n; ++m) {
      x(L.slack(m)) = std::max(0.0, -prog.constraints[m].value(x)) + 1.0;
    }
  }

  BarrierOptions bopts;
  bopts.tol = 1e-9;
  bopts.stop_when = [&](const Eigen::VectorXd& z) {
    return z.tail(n).sum() < opts.violation_tol;
  };

  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opts.max_iter; ++it) {
    const ConcaveProgram prog = build_eta_program(inst, p_diag, eta_ref, opts.margin);
    if (!prog.strictly_feasible(x)) {
      for (int m = 0; m < n; ++m) {
        x(L.slack(m)) = 0.0;
        x(L.slack(m)) = std::max(0.0, -prog.constraints[m].value(x)) + 1.0;
      }
    }
    const BarrierResult res = barrier_solve(prog, x, bopts);
    out.work += res.newton_steps;
    if (res.status == BarrierStatus::NumericalFailure && res.newton_steps == 0) return out;
    x = res.x;
    for (int m = 1; m < n; ++m) {
      for (int i = 0; i < m; ++i) eta_ref(m, i) = std::clamp(x(L.eta(m, i)), 0.0, 1.0);
    }
    if (meets_all_rates(inst, p_diag, eta_ref)) {
      out.eta = eta_ref;
      out.feasible = true;
      return out;
    }
    const double shortfall = x.tail(n).sum();
    if (prev - shortfall < 1e-9) return out;
    prev = shortfall;
  }
  return out;
}

const char* to_string(FeasMode m) { return m == FeasMode::SRA ? "sra" : "sca"; }

FeasibilityOracle make_oracle(FeasMode mode) {
  if (mode == FeasMode::SRA) return sra_feasibility;
  return [](const SystemInstance& inst, const std::vector<double>& p) {
    return sca_feasibility(inst, p);
  };
}

// ---------------------------------------------------------------------------
// Bounds and the branch-and-bound loop

RectBounds rect_bounds(const SystemInstance& inst, const Rectangle& rect,
                       const FeasibilityOracle& feas, double delta) {
  RectBounds b;
  const FeasibilityResult f = feas(inst, rect.hi);
  b.work = f.work;
  if (f.feasible) {
    PowerProfile witness = from_reflection(rect.hi, f.eta);
    if (is_feasible(inst, witness)) {
      b.feasible = true;
      b.lower = std::accumulate(rect.lo.begin(), rect.lo.end(), 0.0);
      b.upper = std::accumulate(rect.hi.begin(), rect.hi.end(), 0.0);
      b.witness = std::move(witness);
      return b;
    }
    b.verification_failed = true;
  }
  b.lower = b.upper = delta;
  return b;
}

namespace {

struct Node {
  Rectangle rect;
  double lower;
  double volume;
  long order;
};

bool better(const Node& a, const Node& b) {
  if (a.lower != b.lower) return a.lower < b.lower;
  if (a.volume != b.volume) return a.volume > b.volume;
  return a.order < b.order;
}

// Upper corner of the root box. Never below the OMA total per axis, since any
// allocation beating OMA has every own-slot power under that total.
std::vector<double> root_corner(const PowerProfile& oma, double scale) {
  const double total = total_power(oma);
  std::vector<double> hi(oma.num_users());
  for (int m = 0; m < oma.num_users(); ++m) hi[m] = std::max(scale * oma(m, m), total);
  return hi;
}

BBReport bb_run(const SystemInstance& inst, const BBConfig& cfg, double scale) {
  const int n = inst.num_users();
  const PowerProfile oma = oma_profile(inst);
  const double oma_total = total_power(oma);

  BBReport out;
  out.box_scale = scale;
  out.xi = cfg.xi > 0.0 ? cfg.xi : 1e-3 * oma_total;
  const double delta = cfg.delta > 0.0 ? cfg.delta : oma_total + 1.0;

  SolveReport& rep = out.report;
  rep.profile = oma;
  rep.objective = rep.upper_bound = oma_total;
  rep.lower_bound = 0.0;
  if (!(oma_total > 0.0)) {
    rep.status = SolveStatus::Converged;
    out.trace.push_back({0, 0.0, 0.0, 0});
    rep.trace = {0.0};
    return out;
  }

  const FeasibilityOracle oracle = make_oracle(cfg.feas_mode);
  auto bound = [&](const Rectangle& r) {
    RectBounds b = rect_bounds(inst, r, oracle, delta);
    ++rep.oracle.feasibility_calls;
    rep.oracle.work += b.work;
    if (b.verification_failed) ++out.verification_failures;
    return b;
  };

  const Rectangle root(std::vector<double>(n, 0.0), root_corner(oma, scale));

  double upper = oma_total;
  long order = 0;
  std::set<Node, decltype(&better)> live(&better);
  auto consider = [&](const Rectangle& r) {
    RectBounds b = bound(r);
    if (b.feasible && b.upper < upper) {
      upper = b.upper;
      rep.profile = *b.witness;
    }
    const double vol = r.volume();
    live.insert({r, b.lower, vol, order++});
  };
  auto lower_bound = [&]() { return live.empty() ? upper : std::min(upper, live.begin()->lower); };
  auto prune = [&]() {
    if (!cfg.prune) return;
    while (!live.empty() && std::prev(live.end())->lower > upper) live.erase(std::prev(live.end()));
  };

  consider(root);
  prune();
  double lower = lower_bound();
  out.trace.push_back({0, upper, lower, live.size()});
  rep.trace.push_back(upper);

  int iter = 0;
  while (upper - lower > out.xi && iter < cfg.n_max && !live.empty()) {
    const Rectangle rect = live.begin()->rect;
    live.erase(live.begin());
    const auto [a, b] = rect.bisect();
    consider(a);
    consider(b);
    prune();
    ++iter;
    lower = lower_bound();
    out.trace.push_back({iter, upper, lower, live.size()});
    rep.trace.push_back(upper);
  }

  rep.objective = rep.upper_bound = upper;
  rep.lower_bound = lower;
  rep.iterations = iter;
  rep.status = upper - lower <= out.xi ? SolveStatus::Converged : SolveStatus::IterLimit;
  return out;
}

bool touches_box(const PowerProfile& p, const std::vector<double>& corner) {
  for (std::size_t m = 0; m < corner.size(); ++m) {
    if (p(m, m) >= corner[m] * (1.0 - 1e-9)) return true;
  }
  return false;
}

}  // namespace

BBReport bb_solve(const SystemInstance& inst, const BBConfig& cfg) {
  if (cfg.n_max < 0) throw std::invalid_argument("bb_solve: n_max must be >= 0");
  if (!(cfg.initial_box_scale >= 1.0)) throw std::invalid_argument("bb_solve: box scale < 1");
  const PowerProfile oma = oma_profile(inst);

  double scale = cfg.initial_box_scale;
  BBReport out = bb_run(inst, cfg, scale);
  OracleStats total = out.report.oracle;
  long failures = out.verification_failures;
  for (int k = 0; k < cfg.max_box_doublings && touches_box(out.report.profile, root_corner(oma, scale));
       ++k) {
    scale *= 2.0;
    out = bb_run(inst, cfg, scale);
    total.feasibility_calls += out.report.oracle.feasibility_calls;
    total.work += out.report.oracle.work;
    failures += out.verification_failures;
  }
  out.report.oracle = total;
  out.verification_failures = failures;
  return out;
}

}  // namespace hnoma
