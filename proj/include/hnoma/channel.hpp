#pragma once

#include "hnoma/model.hpp"

#include <cstdint>
#include <random>
#include <string>

namespace hnoma {

/// Clustered-user scenario: users uniform in a square of side cluster_side
/// centered at (cluster_center, cluster_center), base station at the origin.
struct ScenarioConfig {
  int num_users = 2;
  double cluster_side = 2.0;        ///< meters
  double cluster_center = 15.0;     ///< meters
  double noise_power = 1e-8;        ///< linear
  double target_rate = 1.0;         ///< nats per channel use
  double pathloss_exponent = 3.0;
  double rician_k = 10.0;           ///< linear LOS-to-scatter ratio
  double min_distance = 1.0;        ///< meters
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

using Rng = std::mt19937_64;

/// max(d, d0)^(-alpha).
double pathloss(double distance, double min_distance, double exponent);

/// |x|^2 with x ~ CN(0, 1).
double rayleigh_power(Rng& rng);

/// |x|^2 with x = sqrt(K/(K+1)) + sqrt(1/(K+1)) CN(0, 1); unit mean.
double rician_power(double k_factor, Rng& rng);

/// Draws positions and fading, orders users by descending |h|^2 and returns
/// the noise-normalized gains.
SystemInstance sample_instance(const ScenarioConfig& cfg, Rng& rng);

/// Same, seeded from cfg.seed.
SystemInstance sample_instance(const ScenarioConfig& cfg);

/// Per-trial stream seed derived from (master seed, sweep point, trial).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t sweep_index, std::uint64_t trial);

/// Applies "key = value" lines onto base. Keys match the field names above;
/// '#' starts a comment. Throws ParseError on unknown keys or bad values.
ScenarioConfig parse_scenario(const std::string& text, ScenarioConfig base = {});

/// Sets a single field by name; returns false for unknown keys.
bool set_scenario_field(ScenarioConfig& cfg, const std::string& key, const std::string& value);

std::string to_text(const ScenarioConfig& cfg);

}  // namespace hnoma
