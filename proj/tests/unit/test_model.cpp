#include "hnoma/model.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hnoma;

namespace {

SystemInstance uniform_instance(int n, double g, double rate) {
  return SystemInstance(LowerTriangular(n, g), rate);
}

PowerProfile profile(int n, std::initializer_list<double> packed) {
  LowerTriangular p(n);
  std::size_t k = 0;
  for (double v : packed) p.packed()[k++] = v;
  return PowerProfile(std::move(p));
}

}  // namespace

TEST_CASE("lower triangular packing") {
  LowerTriangular t(3);
  CHECK(t.packed().size() == 6);
  t(2, 1) = 5.0;
  CHECK(t.packed()[LowerTriangular::packed_index(2, 1)] == 5.0);
  CHECK(t.at(2, 1) == 5.0);
  CHECK_THROWS_AS(t.at(1, 2), std::out_of_range);
  CHECK_THROWS_AS(t.at(3, 0), std::out_of_range);
}

TEST_CASE("instance and profile validation") {
  LowerTriangular g(2, 1.0);
  g(1, 0) = 0.0;
  CHECK_THROWS_AS(SystemInstance(g, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(uniform_instance(2, 1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(profile(2, {1.0, -1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(profile(2, {1.0, NAN, 0.0}), std::invalid_argument);
}

TEST_CASE("rate_in_slot examples") {
  const auto one = uniform_instance(1, 1.0, 1.0);
  CHECK(rate_in_slot(one, profile(1, {std::exp(1.0) - 1.0}), 0, 0) == doctest::Approx(1.0));

  const auto two = uniform_instance(2, 1.0, std::log(2.0));
  const auto p = profile(2, {1.0, 1.0, 0.0});
  CHECK(rate_in_slot(two, p, 0, 0) == doctest::Approx(std::log(1.5)));
  CHECK(rate_in_slot(two, PowerProfile::zeros(2), 1, 0) == 0.0);
  CHECK_THROWS_AS(rate_in_slot(two, p, 0, 1), std::out_of_range);
  CHECK_THROWS_AS(rate_in_slot(two, p, 2, 0), std::out_of_range);
}

TEST_CASE("total_rate at the pure-NOMA point") {
  LowerTriangular g(2);
  g(0, 0) = 8.0;
  g(1, 0) = 4.0;
  g(1, 1) = 1.0;
  const SystemInstance inst(g, std::log(2.0));
  const auto p = profile(2, {0.25, 0.25, 0.0});
  CHECK(total_rate(inst, p, 1) == doctest::Approx(std::log(2.0)));
  CHECK(total_rate(inst, p, 0) == doctest::Approx(std::log(2.0)));
  CHECK(total_rate(inst, PowerProfile::zeros(2), 1) == 0.0);
  CHECK(is_feasible(inst, p));
}

TEST_CASE("total_power and OMA") {
  CHECK(total_power(PowerProfile::zeros(3)) == 0.0);
  CHECK(total_power(profile(3, {1.0, 0.7, 2.0, 0.3, 0.9, 3.0})) == doctest::Approx(6.0));
  CHECK(oma_total_power(uniform_instance(2, 1.0, std::log(2.0))) == doctest::Approx(2.0));
  CHECK(oma_total_power(uniform_instance(3, 1.0, std::log(2.0))) == doctest::Approx(3.0));

  LowerTriangular g(2, 1.0);
  g(0, 0) = 8.0;
  CHECK(oma_total_power(SystemInstance(g, std::log(2.0))) == doctest::Approx(1.125));
  CHECK(total_power(oma_profile(uniform_instance(3, 2.0, 0.0))) == 0.0);
}

TEST_CASE("feasibility checks") {
  const auto inst = uniform_instance(3, 2.0, 1.3);
  CHECK(is_feasible(inst, oma_profile(inst), 1e-9));
  CHECK_FALSE(is_feasible(inst, PowerProfile::zeros(3)));
  // Reflection above the own-slot power breaks the eta <= 1 invariant.
  const auto two = uniform_instance(2, 1.0, std::log(2.0));
  CHECK_FALSE(is_feasible(two, profile(2, {1.0, 2.0, 1.0})));
}

TEST_CASE("reflection coefficients") {
  auto eta = to_reflection(profile(2, {0.25, 0.25, 0.0}));
  CHECK(eta(1, 0) == doctest::Approx(1.0));
  eta = to_reflection(profile(2, {0.25, 0.0, 1.0}));
  CHECK(eta(1, 0) == 0.0);
  eta = to_reflection(profile(2, {2.0, 0.5, 1.0}));
  CHECK(eta(1, 0) == doctest::Approx(0.25));
  eta = to_reflection(profile(2, {0.0, 0.0, 1.0}));
  CHECK(eta(1, 0) == 0.0);
  CHECK_THROWS_AS(to_reflection(profile(2, {0.0, 0.5, 1.0})), std::domain_error);

  const auto back = from_reflection({2.0, 1.0}, to_reflection(profile(2, {2.0, 0.5, 1.0})));
  CHECK(back(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("rate monotonicity under perturbation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    LowerTriangular g(3);
    LowerTriangular p(3);
    for (auto& v : g.packed()) v = u(rng);
    for (auto& v : p.packed()) v = u(rng);
    const SystemInstance inst(g, 1.0);
    for (int m = 0; m < 3; ++m) {
      for (int i = 0; i <= m; ++i) {
        const double base = rate_in_slot(inst, PowerProfile(p), m, i);
        LowerTriangular up = p;
        up(m, i) += 0.01;
        CHECK(rate_in_slot(inst, PowerProfile(up), m, i) > base);
        for (int j = m + 1; j < 3; ++j) {
          LowerTriangular more = p;
          more(j, i) += 0.01;
          CHECK(rate_in_slot(inst, PowerProfile(more), m, i) < base);
        }
      }
    }
  }
}

TEST_CASE("text round trip") {
  LowerTriangular g(3);
  for (std::size_t k = 0; k < g.packed().size(); ++k) g.packed()[k] = 0.1 + 1.37 * k;
  const SystemInstance inst(g, 2.25);
  CHECK(parse_instance(to_text(inst)) == inst);
  const auto p = oma_profile(inst);
  CHECK(parse_profile(to_text(p)) == p);
  CHECK_THROWS_AS(parse_instance("num_users = 2\n"), ParseError);
  CHECK_THROWS_AS(parse_instance("bogus"), ParseError);
}
