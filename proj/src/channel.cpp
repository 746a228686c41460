#include "hnoma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hnoma {

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("scenario: " + what); };
  if (num_users < 1) fail("num_users must be >= 1");
  if (!(cluster_side > 0.0)) fail("cluster_side must be > 0");
  if (!(cluster_center > 0.0)) fail("cluster_center must be > 0");
  if (!(noise_power > 0.0)) fail("noise_power must be > 0");
  if (!(target_rate >= 0.0) || !std::isfinite(target_rate)) fail("target_rate must be >= 0");
  if (!(pathloss_exponent >= 2.0)) fail("pathloss_exponent must be >= 2");
  if (!(rician_k >= 0.0)) fail("rician_k must be >= 0");
  if (!(min_distance > 0.0)) fail("min_distance must be > 0");
}

double pathloss(double distance, double min_distance, double exponent) {
  return std::pow(std::max(distance, min_distance), -exponent);
}

namespace {

struct ComplexGaussian {
  double re;
  double im;
};

ComplexGaussian cn01(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

}  // namespace

double rayleigh_power(Rng& rng) {
  const auto z = cn01(rng);
  return z.re * z.re + z.im * z.im;
}

double rician_power(double k_factor, Rng& rng) {
  const auto z = cn01(rng);
  const double los = std::sqrt(k_factor / (k_factor + 1.0));
  const double scatter = std::sqrt(1.0 / (k_factor + 1.0));
  const double re = los + scatter * z.re;
  const double im = scatter * z.im;
  return re * re + im * im;
}

SystemInstance sample_instance(const ScenarioConfig& cfg, Rng& rng) {
  cfg.validate();
  const int n = cfg.num_users;
  std::uniform_real_distribution<double> offset(-0.5 * cfg.cluster_side, 0.5 * cfg.cluster_side);

  struct User {
    double x, y, h2;
  };
  std::vector<User> users(n);
  for (auto& u : users) {
    u.x = cfg.cluster_center + offset(rng);
    u.y = cfg.cluster_center + offset(rng);
    const double d = std::hypot(u.x, u.y);
    u.h2 = rayleigh_power(rng) * pathloss(d, cfg.min_distance, cfg.pathloss_exponent);
  }
  std::stable_sort(users.begin(), users.end(),
                   [](const User& a, const User& b) { return a.h2 > b.h2; });

  LowerTriangular gamma(n);
  for (int m = 0; m < n; ++m) {
    gamma(m, m) = users[m].h2 / cfg.noise_power;
    for (int i = 0; i < m; ++i) {
      const double d = std::hypot(users[m].x - users[i].x, users[m].y - users[i].y);
      const double g2 = rician_power(cfg.rician_k, rng) *
                        pathloss(d, cfg.min_distance, cfg.pathloss_exponent);
      gamma(m, i) = users[m].h2 * g2 / cfg.noise_power;
    }
  }
  return SystemInstance(std::move(gamma), cfg.target_rate);
}

SystemInstance sample_instance(const ScenarioConfig& cfg) {
  Rng rng(cfg.seed);
  return sample_instance(cfg, rng);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t sweep_index, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(master) ^ sweep_index) ^ trial);
}

namespace {

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::logic_error&) {
    throw ParseError("bad value for " + key + ": " + v);
  }
  if (used != v.size()) throw ParseError("bad value for " + key + ": " + v);
  return x;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace

bool set_scenario_field(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "num_users") {
    const double v = to_double(key, value);
    if (v != std::floor(v)) throw ParseError("num_users must be an integer");
    cfg.num_users = static_cast<int>(v);
  } else if (key == "cluster_side") {
    cfg.cluster_side = to_double(key, value);
  } else if (key == "cluster_center") {
    cfg.cluster_center = to_double(key, value);
  } else if (key == "noise_power") {
    cfg.noise_power = to_double(key, value);
  } else if (key == "target_rate") {
    cfg.target_rate = to_double(key, value);
  } else if (key == "pathloss_exponent") {
    cfg.pathloss_exponent = to_double(key, value);
  } else if (key == "rician_k") {
    cfg.rician_k = to_double(key, value);
  } else if (key == "min_distance") {
    cfg.min_distance = to_double(key, value);
  } else if (key == "seed") {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(value, &used);
      if (used != value.size()) throw ParseError("bad seed: " + value);
    } catch (const std::logic_error&) {
      throw ParseError("bad seed: " + value);
    }
  } else {
    return false;
  }
  return true;
}

ScenarioConfig parse_scenario(const std::string& text, ScenarioConfig base) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value: " + line);
    const std::string key = trim(line.substr(0, eq));
    if (!set_scenario_field(base, key, trim(line.substr(eq + 1)))) {
      throw ParseError("unknown scenario key: " + key);
    }
  }
  return base;
}

std::string to_text(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "num_users = " << cfg.num_users << '\n'
     << "cluster_side = " << cfg.cluster_side << '\n'
     << "cluster_center = " << cfg.cluster_center << '\n'
     << "noise_power = " << cfg.noise_power << '\n'
     << "target_rate = " << cfg.target_rate << '\n'
     << "pathloss_exponent = " << cfg.pathloss_exponent << '\n'
     << "rician_k = " << cfg.rician_k << '\n'
     << "min_distance = " << cfg.min_distance << '\n'
     << "seed = " << cfg.seed << '\n';
  return os.str();
}

}  // namespace hnoma
