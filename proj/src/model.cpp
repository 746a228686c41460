#include "hnoma/model.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace hnoma {

LowerTriangular::LowerTriangular(int n, double fill) : n_(n) {
  if (n < 0) throw std::invalid_argument("LowerTriangular: negative size");
  data_.assign(packed_size(n), fill);
}

double LowerTriangular::at(int row, int col) const {
  if (row < 0 || row >= n_ || col < 0 || col > row) {
    throw std::out_of_range("LowerTriangular: index (" + std::to_string(row) + ", " +
                            std::to_string(col) + ") outside n=" + std::to_string(n_));
  }
  return data_[index(row, col)];
}

SystemInstance::SystemInstance(LowerTriangular gamma, double target_rate)
    : gamma_(std::move(gamma)), rate_(target_rate) {
  if (gamma_.size() < 1) throw std::invalid_argument("SystemInstance: need at least one user");
  for (double g : gamma_.packed()) {
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("SystemInstance: gains must be positive and finite");
    }
  }
  if (!(target_rate >= 0.0) || !std::isfinite(target_rate)) {
    throw std::invalid_argument("SystemInstance: target rate must be finite and >= 0");
  }
}

double SystemInstance::eps() const { return std::expm1(rate_); }

PowerProfile::PowerProfile(LowerTriangular p) : p_(std::move(p)) {
  for (double v : p_.packed()) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("PowerProfile: powers must be finite and non-negative");
    }
  }
}

PowerProfile PowerProfile::zeros(int num_users) {
  return PowerProfile(LowerTriangular(num_users));
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Converged: return "converged";
    case SolveStatus::IterLimit: return "iter_limit";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

namespace {

void check_indices(const SystemInstance& inst, const PowerProfile& p, int m, int i) {
  const int n = inst.num_users();
  if (p.num_users() != n) throw std::invalid_argument("profile/instance size mismatch");
  if (m < 0 || m >= n || i < 0 || i > m) {
    throw std::out_of_range("rate index (m=" + std::to_string(m) + ", i=" + std::to_string(i) +
                            ") outside M=" + std::to_string(n));
  }
}

}  // namespace

double rate_in_slot(const SystemInstance& inst, const PowerProfile& p, int m, int i) {
  check_indices(inst, p, m, i);
  double interference = 0.0;
  for (int j = m + 1; j < inst.num_users(); ++j) interference += inst.gamma(j, i) * p(j, i);
  return std::log1p(inst.gamma(m, i) * p(m, i) / (interference + 1.0));
}

double total_rate(const SystemInstance& inst, const PowerProfile& p, int m) {
  check_indices(inst, p, m, m);
  double r = 0.0;
  for (int i = 0; i <= m; ++i) r += rate_in_slot(inst, p, m, i);
  return r;
}

double total_power(const PowerProfile& p) {
  double s = 0.0;
  for (int m = 0; m < p.num_users(); ++m) s += p(m, m);
  return s;
}

bool is_feasible(const SystemInstance& inst, const PowerProfile& p, double rate_tol) {
  const int n = inst.num_users();
  if (p.num_users() != n) return false;
  for (int m = 0; m < n; ++m) {
    for (int i = 0; i < m; ++i) {
      if (p(m, i) > p(i, i) * (1.0 + rate_tol)) return false;
    }
  }
  const double r = inst.target_rate();
  for (int m = 0; m < n; ++m) {
    if (total_rate(inst, p, m) < r - rate_tol) return false;
  }
  return true;
}

LowerTriangular to_reflection(const PowerProfile& p) {
  const int n = p.num_users();
  LowerTriangular eta(n);
  for (int m = 0; m < n; ++m) {
    eta(m, m) = 1.0;
    for (int i = 0; i < m; ++i) {
      const double own = p(i, i);
      if (own == 0.0) {
        if (p(m, i) > 0.0) {
          throw std::domain_error("to_reflection: P(" + std::to_string(m) + "," +
                                  std::to_string(i) + ") > 0 with zero carrier power");
        }
        eta(m, i) = 0.0;
      } else {
        eta(m, i) = p(m, i) / own;
      }
    }
  }
  return eta;
}

PowerProfile from_reflection(const std::vector<double>& diag, const LowerTriangular& eta) {
  const int n = eta.size();
  if (static_cast<int>(diag.size()) != n) throw std::invalid_argument("from_reflection: size");
  LowerTriangular p(n);
  for (int m = 0; m < n; ++m) {
    p(m, m) = diag[m];
    for (int i = 0; i < m; ++i) p(m, i) = eta(m, i) * diag[i];
  }
  return PowerProfile(std::move(p));
}

PowerProfile oma_profile(const SystemInstance& inst) {
  LowerTriangular p(inst.num_users());
  const double e = inst.eps();
  for (int m = 0; m < inst.num_users(); ++m) p(m, m) = e / inst.gamma(m, m);
  return PowerProfile(std::move(p));
}

double oma_total_power(const SystemInstance& inst) { return total_power(oma_profile(inst)); }

// ---------------------------------------------------------------------------
// Text fixtures

namespace {

void write_matrix(std::ostream& os, const LowerTriangular& a) {
  for (int m = 0; m < a.size(); ++m) {
    for (int i = 0; i <= m; ++i) os << (i ? " " : "") << a(m, i);
    os << '\n';
  }
}

struct KeyValueDoc {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::vector<double>>> matrices;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// A key with an empty value opens a matrix block; following numeric lines
// belong to it until the next key.
KeyValueDoc parse_doc(const std::string& text) {
  KeyValueDoc doc;
  std::istringstream in(text);
  std::string line;
  std::string open_matrix;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (auto eq = line.find('='); eq != std::string::npos) {
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ParseError("empty key in line: " + line);
      if (value.empty()) {
        open_matrix = key;
        doc.matrices[key];
      } else {
        open_matrix.clear();
        doc.scalars[key] = value;
      }
      continue;
    }
    if (open_matrix.empty()) throw ParseError("unexpected line: " + line);
    std::istringstream row(line);
    std::vector<double> values;
    std::string tok;
    while (row >> tok) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw ParseError("bad number: " + tok);
      } catch (const std::logic_error&) {
        throw ParseError("bad number: " + tok);
      }
    }
    doc.matrices[open_matrix].push_back(std::move(values));
  }
  return doc;
}

double scalar_of(const KeyValueDoc& doc, const std::string& key) {
  auto it = doc.scalars.find(key);
  if (it == doc.scalars.end()) throw ParseError("missing key: " + key);
  try {
    return std::stod(it->second);
  } catch (const std::logic_error&) {
    throw ParseError("bad value for " + key + ": " + it->second);
  }
}

LowerTriangular matrix_of(const KeyValueDoc& doc, const std::string& key, int n) {
  auto it = doc.matrices.find(key);
  if (it == doc.matrices.end()) throw ParseError("missing matrix: " + key);
  const auto& rows = it->second;
  if (static_cast<int>(rows.size()) != n) {
    throw ParseError(key + ": expected " + std::to_string(n) + " rows");
  }
  LowerTriangular a(n);
  for (int m = 0; m < n; ++m) {
    if (static_cast<int>(rows[m].size()) != m + 1) {
      throw ParseError(key + ": row " + std::to_string(m) + " must have " +
                       std::to_string(m + 1) + " entries");
    }
    for (int i = 0; i <= m; ++i) a(m, i) = rows[m][i];
  }
  return a;
}

int num_users_of(const KeyValueDoc& doc) {
  const double n = scalar_of(doc, "num_users");
  if (n < 1 || n != std::floor(n)) throw ParseError("num_users must be a positive integer");
  return static_cast<int>(n);
}

}  // namespace

std::string to_text(const SystemInstance& inst) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# hnoma system instance (noise-normalized gains, row-major lower triangle)\n";
  os << "num_users = " << inst.num_users() << '\n';
  os << "target_rate = " << inst.target_rate() << '\n';
  os << "gamma =\n";
  write_matrix(os, inst.gains());
  return os.str();
}

std::string to_text(const PowerProfile& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# hnoma power profile (row-major lower triangle)\n";
  os << "num_users = " << p.num_users() << '\n';
  os << "power =\n";
  write_matrix(os, p.values());
  return os.str();
}

SystemInstance parse_instance(const std::string& text) {
  const auto doc = parse_doc(text);
  const int n = num_users_of(doc);
  try {
    return SystemInstance(matrix_of(doc, "gamma", n), scalar_of(doc, "target_rate"));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

PowerProfile parse_profile(const std::string& text) {
  const auto doc = parse_doc(text);
  const int n = num_users_of(doc);
  try {
    return PowerProfile(matrix_of(doc, "power", n));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

SystemInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace hnoma
