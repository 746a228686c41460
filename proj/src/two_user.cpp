#include "hnoma/two_user.hpp"

#include "hnoma/convex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace hnoma {

void TwoUserInstance::validate() const {
  for (double g : {gamma0, gamma1, gamma2}) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("TwoUserInstance: gains must be positive and finite");
    }
  }
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("TwoUserInstance: rate must be finite and >= 0");
  }
}

double TwoUserInstance::eps() const { return std::expm1(rate); }

TwoUserInstance TwoUserInstance::from_system(const SystemInstance& inst) {
  if (inst.num_users() != 2) throw std::invalid_argument("two-user solver needs M = 2");
  return {inst.gamma(1, 0), inst.gamma(0, 0), inst.gamma(1, 1), inst.target_rate()};
}

SystemInstance TwoUserInstance::to_system() const {
  LowerTriangular g(2);
  g(0, 0) = gamma1;
  g(1, 0) = gamma0;
  g(1, 1) = gamma2;
  return SystemInstance(g, rate);
}

const char* to_string(CandidateKind k) {
  switch (k) {
    case CandidateKind::OMA: return "OMA";
    case CandidateKind::PNomaI: return "PNomaI";
    case CandidateKind::PNomaII: return "PNomaII";
    case CandidateKind::HNomaI: return "HNomaI";
    case CandidateKind::HNomaII: return "HNomaII";
    case CandidateKind::HNomaIII: return "HNomaIII";
  }
  return "unknown";
}

namespace {

// sqrt(x) - 1 without cancellation near x = 1.
double sqrt_minus_one(double x) { return std::expm1(0.5 * std::log(x)); }

constexpr double kActiveTol = 1e-9;

struct ConstraintState {
  std::array<double, 6> normalized{};              // g_k scaled to O(1)
  std::array<Eigen::Vector3d, 6> gradient{};       // d g_k / d(p1, p2, p0)
};

ConstraintState constraint_state(const TwoUserInstance& inst, double p0, double p1, double p2) {
  const double e = inst.eps();
  const double r = inst.rate;
  ConstraintState s;
  const double g1 = r - std::log1p(inst.gamma0 * p0) - std::log1p(inst.gamma2 * p2);
  const double g2 = e * inst.gamma0 * p0 + e - inst.gamma1 * p1;
  const double g2_scale = e * (inst.gamma0 * p0 + 1.0) + inst.gamma1 * p1;
  const double pmax = std::max({p0, p1, p2, std::numeric_limits<double>::min()});

  s.normalized[0] = g1 / std::max(r, std::numeric_limits<double>::min());
  s.normalized[1] = g2_scale > 0.0 ? g2 / g2_scale : 0.0;
  s.normalized[2] = (p0 - p1) / std::max({p0, p1, std::numeric_limits<double>::min()});
  s.normalized[3] = -p1 / pmax;
  s.normalized[4] = -p2 / pmax;
  s.normalized[5] = -p0 / pmax;

  s.gradient[0] = {0.0, -inst.gamma2 / (1.0 + inst.gamma2 * p2),
                   -inst.gamma0 / (1.0 + inst.gamma0 * p0)};
  s.gradient[1] = {-inst.gamma1, 0.0, e * inst.gamma0};
  s.gradient[2] = {-1.0, 0.0, 1.0};
  s.gradient[3] = {-1.0, 0.0, 0.0};
  s.gradient[4] = {0.0, -1.0, 0.0};
  s.gradient[5] = {0.0, 0.0, -1.0};
  return s;
}

const Eigen::Vector3d kObjectiveGradient{1.0, 1.0, 0.0};

KktResiduals residuals_for(const ConstraintState& s, const Multipliers& lambda) {
  KktResiduals res;
  Eigen::Vector3d stat = kObjectiveGradient;
  res.min_multiplier = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k) {
    stat += lambda[k] * s.gradient[k];
    res.min_multiplier = std::min(res.min_multiplier, lambda[k]);
    res.slackness = std::max(res.slackness, std::abs(lambda[k] * s.normalized[k]));
    res.primal = std::max(res.primal, s.normalized[k]);
  }
  res.stationarity = stat.lpNorm<Eigen::Infinity>();
  return res;
}

// Non-negative least squares over the active constraints, solved exactly by
// enumerating passive sets (at most 2^6 tiny least-squares problems).
Multipliers fit_multipliers(const ConstraintState& s) {
  std::vector<int> active;
  for (int k = 0; k < 6; ++k) {
    if (s.normalized[k] >= -kActiveTol) active.push_back(k);
  }
  Multipliers best{};
  double best_res = kObjectiveGradient.lpNorm<Eigen::Infinity>();
  int best_size = 0;
  const int na = static_cast<int>(active.size());
  for (int mask = 1; mask < (1 << na); ++mask) {
    std::vector<int> cols;
    for (int b = 0; b < na; ++b) {
      if (mask & (1 << b)) cols.push_back(active[b]);
    }
    Eigen::MatrixXd g(3, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) g.col(c) = s.gradient[cols[c]];
    const Eigen::VectorXd lam = g.colPivHouseholderQr().solve(-kObjectiveGradient);
    if (!lam.allFinite() || lam.minCoeff() < -1e-14) continue;
    const double res = (g * lam + kObjectiveGradient).lpNorm<Eigen::Infinity>();
    const int size = static_cast<int>(cols.size());
    if (res < best_res * (1.0 - 1e-12) || (res <= best_res && size < best_size)) {
      best_res = res;
      best_size = size;
      best.fill(0.0);
      for (std::size_t c = 0; c < cols.size(); ++c) best[cols[c]] = std::max(0.0, lam(c));
    }
  }
  return best;
}

Multipliers analytic_multipliers(const TwoUserInstance& inst, CandidateKind kind) {
  const double e = inst.eps();
  const double er = std::exp(inst.rate);
  const double g0 = inst.gamma0, g1 = inst.gamma1, g2 = inst.gamma2;
  Multipliers l{};
  switch (kind) {
    case CandidateKind::OMA:
      l[0] = (1.0 + e) / g2;
      l[1] = 1.0 / g1;
      l[5] = e * g0 / g1 - g0 * (1.0 + e) / g2;
      break;
    case CandidateKind::PNomaI:
      l[0] = (1.0 + e) / g0;
      l[2] = 1.0;
      l[4] = 1.0 - (1.0 + e) * g2 / g0;
      break;
    case CandidateKind::PNomaII:
      l[0] = e * (1.0 + e) / g1;
      l[1] = 1.0 / g1;
      l[4] = 1.0 - e * (1.0 + e) * g2 / g1;
      break;
    case CandidateKind::HNomaI:
      l[0] = std::sqrt(e * er / (g2 * g1));
      l[1] = 1.0 / g1;
      break;
    case CandidateKind::HNomaII:
      l[0] = std::sqrt(er / (g0 * g2));
      l[2] = 1.0;
      break;
    case CandidateKind::HNomaIII: {
      const double den = e * g0 - g1;
      l[0] = er * (g1 - e * g0) / (g1 * g2);
      l[1] = g0 * er * den / (g1 * g1 * g2) - 1.0 / den;
      l[2] = 1.0 - g1 * l[1];
      break;
    }
  }
  return l;
}

TwoUserCandidate make_candidate(CandidateKind kind, double p0, double p1, double p2) {
  TwoUserCandidate c;
  c.kind = kind;
  c.p0 = p0;
  c.p1 = p1;
  c.p2 = p2;
  return c;
}

}  // namespace

std::vector<TwoUserCandidate> enumerate_candidates(const TwoUserInstance& inst) {
  inst.validate();
  const double e = inst.eps();
  const double er = std::exp(inst.rate);
  const double g0 = inst.gamma0, g1 = inst.gamma1, g2 = inst.gamma2;

  std::vector<TwoUserCandidate> out;
  out.push_back(make_candidate(CandidateKind::OMA, 0.0, e / g1, e / g2));
  out.push_back(make_candidate(CandidateKind::PNomaI, e / g0, e / g0, 0.0));
  out.push_back(make_candidate(CandidateKind::PNomaII, e / g0, e * (1.0 + e) / g1, 0.0));

  // Type I: p1 = eps_1 = sqrt(eps e^R / (gamma2 gamma1)).
  const double eps1 = std::sqrt(e * er / (g2 * g1));
  out.push_back(make_candidate(CandidateKind::HNomaI, sqrt_minus_one(g1 * er / (e * g2)) / g0,
                               eps1, sqrt_minus_one(e * er * g2 / g1) / g2));
  // Type II: p0 = p1 = sqrt(e^R / (gamma0 gamma2)) - 1/gamma0.
  const double p_ii = sqrt_minus_one(g0 * er / g2) / g0;
  out.push_back(make_candidate(CandidateKind::HNomaII, p_ii, p_ii,
                               sqrt_minus_one(g2 * er / g0) / g2));
  // Type III: p0 = p1 = eps / (gamma1 - eps gamma0).
  const double den = g1 - e * g0;
  if (den > 0.0) {
    const double p = e / den;
    out.push_back(make_candidate(CandidateKind::HNomaIII, p, p, e * (1.0 - er * g0 / g1) / g2));
  } else {
    const double inf = std::numeric_limits<double>::infinity();
    out.push_back(make_candidate(CandidateKind::HNomaIII, inf, inf, -inf));
  }

  for (auto& c : out) {
    const bool finite = std::isfinite(c.p0) && std::isfinite(c.p1) && std::isfinite(c.p2);
    const bool nonneg = c.p0 >= 0.0 && c.p1 >= 0.0 && c.p2 >= 0.0;
    c.primal_feasible = false;
    if (finite && nonneg) {
      const auto s = constraint_state(inst, c.p0, c.p1, c.p2);
      c.primal_feasible = *std::max_element(s.normalized.begin(), s.normalized.end()) <= kActiveTol;
    }
  }
  return out;
}

TwoUserCandidate certify_kkt(const TwoUserInstance& inst, TwoUserCandidate cand, double tol) {
  cand.analytic = analytic_multipliers(inst, cand.kind);
  cand.kkt_certified = false;
  cand.numeric.fill(0.0);
  if (!cand.primal_feasible) return cand;

  const auto s = constraint_state(inst, cand.p0, cand.p1, cand.p2);
  cand.numeric = fit_multipliers(s);
  cand.numeric_residuals = residuals_for(s, cand.numeric);
  cand.analytic_residuals = residuals_for(s, cand.analytic);

  cand.multiplier_disagreement = 0.0;
  for (int k = 0; k < 6; ++k) {
    const double scale = std::max(1.0, std::abs(cand.analytic[k]));
    cand.multiplier_disagreement =
        std::max(cand.multiplier_disagreement, std::abs(cand.analytic[k] - cand.numeric[k]) / scale);
  }

  const auto& r = cand.numeric_residuals;
  const double scaled_tol = tol * std::max(1.0, cand.numeric[0]);
  cand.kkt_certified = r.stationarity <= scaled_tol && r.slackness <= scaled_tol &&
                       r.min_multiplier >= -tol && r.primal <= kActiveTol;
  return cand;
}

TwoUserReport solve_two_user(const TwoUserInstance& inst, double tol) {
  TwoUserReport out;
  for (auto& c : enumerate_candidates(inst)) out.candidates.push_back(certify_kkt(inst, c, tol));

  const TwoUserCandidate* best = nullptr;
  for (const auto& c : out.candidates) {
    if (!c.kkt_certified) continue;
    ++out.num_certified;
    if (!best || c.objective() < best->objective() * (1.0 - 1e-12)) best = &c;
  }
  if (!best) {
    std::string msg = "no two-user candidate certifies:";
    for (const auto& c : out.candidates) msg += "\n" + diagnostic_record(c);
    throw CertificationConflict(msg, out.candidates);
  }
  const double agree = 1e-6 * std::max(best->objective(), std::numeric_limits<double>::min());
  for (const auto& c : out.candidates) {
    if (c.kkt_certified && c.objective() > best->objective() + agree) {
      throw CertificationConflict(std::string("certified candidates disagree: ") +
                                      to_string(best->kind) + " vs " + to_string(c.kind),
                                  out.candidates);
    }
    if (c.primal_feasible && c.objective() < best->objective() - agree) {
      throw CertificationConflict(std::string("feasible candidate ") + to_string(c.kind) +
                                      " beats certified " + to_string(best->kind),
                                  out.candidates);
    }
  }

  out.kind = best->kind;
  LowerTriangular p(2);
  p(0, 0) = best->p1;
  p(1, 0) = best->p0;
  p(1, 1) = best->p2;
  out.report.profile = PowerProfile(p);
  out.report.objective = best->objective();
  out.report.upper_bound = out.report.lower_bound = out.report.objective;
  out.report.status = SolveStatus::Optimal;
  out.report.trace = {out.report.objective};
  return out;
}

std::string classify_solution(const TwoUserReport& report) {
  switch (report.kind) {
    case CandidateKind::OMA: return "OMA";
    case CandidateKind::PNomaI: return "P-NOMA I";
    case CandidateKind::PNomaII: return "P-NOMA II";
    case CandidateKind::HNomaI: return "H-NOMA I";
    case CandidateKind::HNomaII: return "H-NOMA II";
    case CandidateKind::HNomaIII: return "H-NOMA III";
  }
  return "unknown";
}

std::string diagnostic_record(const TwoUserCandidate& c) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "kind = " << to_string(c.kind) << '\n'
     << "p0 = " << c.p0 << "\np1 = " << c.p1 << "\np2 = " << c.p2 << '\n'
     << "objective = " << c.objective() << '\n'
     << "primal_feasible = " << c.primal_feasible << '\n'
     << "kkt_certified = " << c.kkt_certified << '\n';
  os << "lambda_analytic =";
  for (double l : c.analytic) os << ' ' << l;
  os << "\nlambda_numeric =";
  for (double l : c.numeric) os << ' ' << l;
  os << "\nstationarity = " << c.numeric_residuals.stationarity
     << "\nslackness = " << c.numeric_residuals.slackness
     << "\nprimal_violation = " << c.numeric_residuals.primal
     << "\nanalytic_stationarity = " << c.analytic_residuals.stationarity
     << "\nmultiplier_disagreement = " << c.multiplier_disagreement << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

ConventionalSolution solve_conventional_two_user(double h1sq, double h2sq, double rate) {
  if (!(h1sq > 0.0) || !(h2sq > 0.0) || !std::isfinite(h1sq) || !std::isfinite(h2sq)) {
    throw std::invalid_argument("conventional two-user: gains must be positive");
  }
  if (!(rate >= 0.0)) throw std::invalid_argument("conventional two-user: rate must be >= 0");

  const double e = std::expm1(rate);
  ConventionalSolution sol;
  sol.oma_total = e / h1sq + e / h2sq;
  sol.pure_noma_p1 = (e + 1.0) * e / h1sq;
  sol.pure_noma_p0 = e / h2sq;
  sol.pure_noma_total = sol.pure_noma_p1 + sol.pure_noma_p0;

  if (e == 0.0) {
    sol.report.profile = PowerProfile::zeros(2);
    sol.report.status = SolveStatus::Optimal;
    return sol;
  }

  // Variables (p1, p0, p2) in units of the OMA total.
  const double scale = sol.oma_total;
  ConcaveProgram prog(3);
  prog.objective << 1.0, 1.0, 1.0;
  ConcaveConstraint rate_user2;
  rate_user2.log_weights = {Eigen::Vector3d(0.0, h2sq * scale, 0.0),
                            Eigen::Vector3d(0.0, 0.0, h2sq * scale)};
  rate_user2.linear = Eigen::Vector3d::Zero();
  rate_user2.rhs = rate;
  prog.constraints.push_back(rate_user2);
  // User 1 decoded first with user 2's slot-1 signal as interference:
  // h1 p1 >= eps (h2 p0 + 1), divided by eps.
  prog.add_linear(Eigen::Vector3d(-h1sq * scale / e, h2sq * scale, 0.0), -1.0);

  const Eigen::Vector3d start(2.0 * e / h1sq / scale, 1e-3, 2.0 * e / h2sq / scale);
  BarrierOptions opts;
  opts.tol = 1e-11;
  const BarrierResult init = phase_one(prog, start, opts);
  if (init.status != BarrierStatus::Optimal) {
    throw std::runtime_error("conventional two-user: no strictly feasible start");
  }
  const BarrierResult res = barrier_solve(prog, init.x, opts);
  sol.newton_steps = init.newton_steps + res.newton_steps;
  if (res.status == BarrierStatus::Infeasible) {
    throw std::runtime_error("conventional two-user: barrier reported infeasible");
  }
  sol.p1 = res.x(0) * scale;
  sol.p0 = res.x(1) * scale;
  sol.p2 = res.x(2) * scale;

  LowerTriangular p(2);
  p(0, 0) = sol.p1;
  p(1, 0) = sol.p0;
  p(1, 1) = sol.p2;
  sol.report.profile = PowerProfile(p);
  sol.report.objective = sol.p1 + sol.p0 + sol.p2;
  sol.report.upper_bound = sol.report.lower_bound = sol.report.objective;
  sol.report.iterations = res.outer_iterations;
  sol.report.status = res.status == BarrierStatus::Optimal ? SolveStatus::Optimal
                                                           : SolveStatus::NumericalFailure;
  sol.report.trace = {sol.report.objective};
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

// Smallest feasible (p1, p2) for a given p0: each constraint involving p1 or p2
// is monotone in that variable, so minimizing p1 + p2 fixes both exactly.
// Returns false if either exceeds the search box.
bool complete_point(const TwoUserInstance& inst, double p0, double box, double& p1,
                    double& p2) {
  const double e = inst.eps();
  p1 = std::max(p0, e * (inst.gamma0 * p0 + 1.0) / inst.gamma1);
  // log(1 + gamma0 p0) + log(1 + gamma2 p2) >= R  <=>  p2 >= (eps - gamma0 p0) / ((1 + gamma0 p0) gamma2)
  const double g0p0 = inst.gamma0 * p0;
  p2 = std::max(0.0, (e - g0p0) / ((1.0 + g0p0) * inst.gamma2));
  return p1 <= box && p2 <= box;
}

void scan_axis(const TwoUserInstance& inst, double lo, double step, long count, double box,
               GridOracleResult& best) {
  for (long k = 0; k < count; ++k) {
    const double p0 = lo + step * static_cast<double>(k);
    if (p0 > box) break;
    double p1 = 0.0, p2 = 0.0;
    if (!complete_point(inst, p0, box, p1, p2)) continue;
    if (!best.found || p1 + p2 < best.objective) {
      best.found = true;
      best.objective = p1 + p2;
      best.p0 = p0;
      best.p1 = p1;
      best.p2 = p2;
    }
  }
}

}  // namespace

GridOracleResult grid_oracle(const TwoUserInstance& inst, long max_points) {
  inst.validate();
  if (max_points < 2) throw std::invalid_argument("grid_oracle: need at least 2 points");
  const double e = inst.eps();
  const double oma = e / inst.gamma1 + e / inst.gamma2;
  GridOracleResult best;
  if (oma == 0.0) {
    best.found = true;
    return best;
  }

  const double box = 4.0 * oma;
  const double step = box / static_cast<double>(max_points - 1);
  best.coarse_step = step;
  scan_axis(inst, 0.0, step, max_points, box, best);
  if (!best.found) return best;

  const double fine = step / 10.0;
  best.fine_step = fine;
  scan_axis(inst, std::max(0.0, best.p0 - 2.0 * step), fine, 41, box, best);
  return best;
}

}  // namespace hnoma
