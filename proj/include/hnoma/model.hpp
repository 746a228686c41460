#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace hnoma {

/// Dense storage for an n x n lower-triangular matrix (entries with col > row
/// do not exist). Row-major packed: row m holds m + 1 entries.
class LowerTriangular {
 public:
  LowerTriangular() = default;
  explicit LowerTriangular(int n, double fill = 0.0);

  int size() const { return n_; }

  double& operator()(int row, int col) { return data_[index(row, col)]; }
  double operator()(int row, int col) const { return data_[index(row, col)]; }

  /// Bounds-checked access; throws std::out_of_range.
  double at(int row, int col) const;

  /// Packed index used by the optimizers' flat variable vectors.
  static std::size_t packed_index(int row, int col) {
    return static_cast<std::size_t>(row) * (row + 1) / 2 + col;
  }
  static std::size_t packed_size(int n) {
    return static_cast<std::size_t>(n) * (n + 1) / 2;
  }

  const std::vector<double>& packed() const { return data_; }
  std::vector<double>& packed() { return data_; }

  bool operator==(const LowerTriangular&) const = default;

 private:
  std::size_t index(int row, int col) const { return packed_index(row, col); }

  int n_ = 0;
  std::vector<double> data_;
};

/// Noise-normalized channel description of an M-user uplink.
///
/// gamma(m, i), i <= m, is the effective gain of user m in slot i (0-based):
/// gamma(m, m) = |h_m|^2 / sigma^2 and gamma(m, i) = |h_m|^2 |g_mi|^2 / sigma^2
/// for i < m. Users are decoded in index order inside every slot.
class SystemInstance {
 public:
  SystemInstance(LowerTriangular gamma, double target_rate);

  int num_users() const { return gamma_.size(); }
  double gamma(int m, int i) const { return gamma_(m, i); }
  const LowerTriangular& gains() const { return gamma_; }

  /// Target rate R in nats per channel use.
  double target_rate() const { return rate_; }
  /// e^R - 1, the clean-channel SNR needed for rate R.
  double eps() const;

  bool operator==(const SystemInstance&) const = default;

 private:
  LowerTriangular gamma_;
  double rate_ = 0.0;
};

/// Effective powers P(m, i): own-slot transmit power on the diagonal and
/// reflected power eta_mi * P_ii below it.
class PowerProfile {
 public:
  PowerProfile() = default;
  /// Throws std::invalid_argument on negative or non-finite entries.
  explicit PowerProfile(LowerTriangular p);
  static PowerProfile zeros(int num_users);

  int num_users() const { return p_.size(); }
  double operator()(int m, int i) const { return p_(m, i); }
  const LowerTriangular& values() const { return p_; }

  bool operator==(const PowerProfile&) const = default;

 private:
  LowerTriangular p_;
};

enum class SolveStatus { Optimal, Converged, IterLimit, Infeasible, NumericalFailure };

const char* to_string(SolveStatus s);

struct OracleStats {
  long feasibility_calls = 0;
  /// Oracle-specific work units: waterfill bisection iterations (SRA) or
  /// Newton steps (SCA feasibility).
  long work = 0;
};

struct SolveReport {
  double objective = 0.0;
  PowerProfile profile;
  SolveStatus status = SolveStatus::Optimal;
  double upper_bound = 0.0;
  double lower_bound = 0.0;
  int iterations = 0;
  std::vector<double> trace;
  OracleStats oracle;
};

inline constexpr double kDefaultRateTol = 1e-8;

/// log(1 + gamma_mi P_mi / (sum_{j>m} gamma_ji P_ji + 1)).
double rate_in_slot(const SystemInstance& inst, const PowerProfile& p, int m, int i);

/// Sum of rate_in_slot over slots 0..m.
double total_rate(const SystemInstance& inst, const PowerProfile& p, int m);

/// Sum of own-slot powers; reflected power is free.
double total_power(const PowerProfile& p);

/// Every user meets R (within rate_tol) and 0 <= P_mi <= P_ii (within a
/// relative slack of rate_tol).
bool is_feasible(const SystemInstance& inst, const PowerProfile& p,
                 double rate_tol = kDefaultRateTol);

/// Reflection coefficients eta_mi = P_mi / P_ii (diagonal set to 1 where the
/// user transmits). Throws std::domain_error if P_ii = 0 while P_mi > 0.
LowerTriangular to_reflection(const PowerProfile& p);

/// Inverse of to_reflection for a given diagonal.
PowerProfile from_reflection(const std::vector<double>& diag, const LowerTriangular& eta);

/// OMA allocation P_mm = (e^R - 1) / gamma_mm, no reflection.
PowerProfile oma_profile(const SystemInstance& inst);
double oma_total_power(const SystemInstance& inst);

// Plain-text fixtures: "key = value" lines and lower-triangular matrices written
// row-major, one matrix row per line, only the entries with col <= row.
std::string to_text(const SystemInstance& inst);
std::string to_text(const PowerProfile& p);
SystemInstance parse_instance(const std::string& text);
PowerProfile parse_profile(const std::string& text);
SystemInstance read_instance_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hnoma
