#pragma once

#include "hnoma/model.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hnoma {

/// Affine over-estimate u'p + b of the interference term
/// I_mi = log(1 + sum_{j>m} gamma_ji P_ji) around a reference profile.
/// u is indexed like LowerTriangular::packed() and is nonzero only on the
/// entries (j, i) with j > m.
struct InterferenceLinearization {
  std::vector<double> u;
  double b = 0.0;

  double operator()(const PowerProfile& p) const;
};

/// Throws std::out_of_range unless i <= m < M - 1 (the last user decodes
/// without interference).
InterferenceLinearization linearize_interference(const SystemInstance& inst,
                                                 const PowerProfile& p_ref, int m, int i);

/// Exact I_mi at p.
double interference_term(const SystemInstance& inst, const PowerProfile& p, int m, int i);

struct ScaOptions {
  double rel_tol = 1e-5;
  int max_iter = 100;
  /// Inner barrier gap, in units of the initial objective.
  double barrier_tol = 1e-9;
  /// Called after each accepted iterate: (iteration, profile, objective).
  std::function<void(int, const PowerProfile&, double)> on_iterate;
};

/// Successive convex approximation from init (OMA when absent). The trace
/// starts with the initial objective; an iterate is kept only if it lowers
/// the objective.
SolveReport sca_solve(const SystemInstance& inst, const std::optional<PowerProfile>& init = {},
                      const ScaOptions& opts = {});

}  // namespace hnoma
