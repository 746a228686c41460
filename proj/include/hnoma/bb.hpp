#pragma once

#include "hnoma/model.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hnoma {

/// Axis-aligned box over the own-slot powers P_mm.
struct Rectangle {
  std::vector<double> lo;
  std::vector<double> hi;

  Rectangle() = default;
  /// Throws std::invalid_argument unless sizes match and 0 <= lo <= hi, finite.
  Rectangle(std::vector<double> lo, std::vector<double> hi);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  /// Index of the longest edge (lowest index on ties).
  int longest_edge() const;
  /// Halves along the longest edge.
  std::pair<Rectangle, Rectangle> bisect() const;
};

/// Outcome of a vertex feasibility test: reflection coefficients that let
/// every user reach the target rate at the given own-slot powers.
struct FeasibilityResult {
  bool feasible = false;
  LowerTriangular eta;
  long work = 0;  ///< bisection iterations (SRA) or Newton steps (SCA)
};

/// Users processed from the last decoded to the first, each solving a
/// minimum-total-reflection water-filling problem.
FeasibilityResult sra_feasibility(const SystemInstance& inst, const std::vector<double>& p_diag);

struct ScaFeasibilityOptions {
  int max_iter = 30;
  double violation_tol = 1e-7;
  double margin = 1e-7;  ///< extra rate demanded of the linearized constraints
};

/// Successive convex approximation over the reflection coefficients only,
/// minimizing the total rate shortfall. May reject supportable vertices.
FeasibilityResult sca_feasibility(const SystemInstance& inst, const std::vector<double>& p_diag,
                                  const ScaFeasibilityOptions& opts = {});

enum class FeasMode { SRA, SCA };
const char* to_string(FeasMode m);

using FeasibilityOracle =
    std::function<FeasibilityResult(const SystemInstance&, const std::vector<double>&)>;

FeasibilityOracle make_oracle(FeasMode mode);

struct RectBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool feasible = false;
  std::optional<PowerProfile> witness;  ///< profile at the upper vertex
  bool verification_failed = false;
  long work = 0;
};

/// Feasible upper vertex: (sum lo, sum hi) with the vertex profile as witness.
/// Otherwise (delta, delta). Witnesses are re-checked with is_feasible; one
/// that fails counts as infeasible and sets verification_failed.
RectBounds rect_bounds(const SystemInstance& inst, const Rectangle& rect,
                       const FeasibilityOracle& feas, double delta);

struct BBConfig {
  double xi = 0.0;                 ///< absolute gap; <= 0 means 1e-3 * OMA total
  int n_max = 1000;
  double delta = 0.0;              ///< infeasibility sentinel; <= 0 means OMA total + 1
  FeasMode feas_mode = FeasMode::SRA;
  double initial_box_scale = 2.0;  ///< root corner = max(scale * OMA power, OMA total) per axis
  bool prune = true;
  int max_box_doublings = 4;
};

struct BBTraceRow {
  int iteration = 0;
  double upper = 0.0;
  double lower = 0.0;
  std::size_t live = 0;
};

struct BBReport {
  SolveReport report;
  std::vector<BBTraceRow> trace;
  long verification_failures = 0;
  double xi = 0.0;
  double box_scale = 0.0;  ///< scale actually used after any re-runs
};

/// Best-first branch and bound over own-slot powers. The OMA profile seeds the
/// incumbent, so U never exceeds the OMA total.
BBReport bb_solve(const SystemInstance& inst, const BBConfig& cfg = {});

}  // namespace hnoma
