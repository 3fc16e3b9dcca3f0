// SPDX-License-Identifier: MIT
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "isac/oracle/socp_oracle.hpp"
#include "isac/socp.hpp"

using namespace isac;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Vec unit_gaussians(StreamRng& rng, int n) {
  Vec v(n);
  for (int j = 0; j < n; ++j) v[j] = rng.gaussian();
  return v;
}
}  // namespace

TEST_CASE("linear special case maximizes to the active bound") {
  SocProgram p;
  p.objective = Vec::Ones(1);
  p.lower = Vec::Constant(1, -10.0);
  p.linear.push_back({Vec::Ones(1), 3.0});
  auto res = solve_socp(p, Vec::Zero(1));
  CHECK(res.status == SolveStatus::optimal);
  CHECK(res.obj == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(res.x_opt[0] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(res.gap <= 1e-7);
  CHECK(res.kkt_residual <= 1e-7);
}

TEST_CASE("two-variable disc program attains the diagonal optimum") {
  SocProgram p;
  p.objective = Vec::Ones(2);
  p.lower = Vec::Constant(2, -kInf);
  SecondOrderCone disc;
  disc.A = Mat::Identity(2, 2);
  disc.b = Vec::Zero(2);
  disc.c = Vec::Zero(2);
  disc.d = 1.0;
  p.cones.push_back(disc);
  auto res = solve_socp(p, Vec::Zero(2));
  CHECK(res.status == SolveStatus::optimal);
  CHECK(res.obj == doctest::Approx(std::numbers::sqrt2).epsilon(1e-7));
  CHECK(res.x_opt[0] == doctest::Approx(std::numbers::sqrt2 / 2).epsilon(1e-6));
  CHECK(res.x_opt[1] == doctest::Approx(std::numbers::sqrt2 / 2).epsilon(1e-6));
  CHECK(res.kkt_residual <= 1e-7);
}

TEST_CASE("reciprocal epigraph cone encodes the hyperbola boundary") {
  // Tight point of t >= 1/gamma at gamma = t = 1.
  auto cone = reciprocal_epigraph_cone(2, 0, 1, 1.0);
  Vec x(2);
  x << 1.0, 1.0;
  CHECK(cone.margin(x) == 0.0);

  // Zero numerator degenerates to the nonnegative quadrant.
  auto zero = reciprocal_epigraph_cone(2, 0, 1, 0.0);
  x << 0.0, 0.0;
  CHECK(zero.margin(x) == 0.0);
  x << 0.4, 0.0;
  CHECK(zero.margin(x) == 0.0);
  x << 0.4, -0.01;
  CHECK(zero.margin(x) < 0.0);
  x << 0.4, 0.3;
  CHECK(zero.margin(x) > 0.0);

  CHECK_THROWS_AS(reciprocal_epigraph_cone(2, 0, 1, -1e-12), ConfigError);
  CHECK_THROWS_AS(reciprocal_epigraph_cone(2, 0, 0, 1.0), ConfigError);
  CHECK_THROWS_AS(reciprocal_epigraph_cone(2, 2, 1, 1.0), ConfigError);
}

TEST_CASE("minimal epigraph value matches the reciprocal exactly") {
  StreamRng rng(0x1337);
  for (int trial = 0; trial < 50; ++trial) {
    const double bprime = 0.01 + 4.0 * rng.uniform();
    const double gamma = 0.05 + 3.0 * rng.uniform();
    auto cone = reciprocal_epigraph_cone(2, 0, 1, bprime);
    auto margin_at = [&](double t) {
      Vec x(2);
      x << gamma, t;
      return cone.margin(x);
    };
    double lo = 0.0, hi = 2.0 * bprime / gamma + 10.0;
    REQUIRE(margin_at(lo) < 0.0);
    REQUIRE(margin_at(hi) > 0.0);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (margin_at(mid) < 0.0 ? lo : hi) = mid;
    }
    CHECK(0.5 * (lo + hi) ==
          doctest::Approx(bprime / gamma).epsilon(1e-10));
  }
}

TEST_CASE("planted programs with certified optima solve to tolerance") {
  StreamRng rng(0x50C9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + trial % 7;
    auto planted = oracle::plant_socp(rng, n, 1 + trial % 2, 1, trial % 3, 1,
                                      trial % 4 == 0);
    auto res = solve_socp(planted.prog, planted.interior);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(std::abs(res.obj - planted.obj_star) <=
          1e-6 * std::max(1.0, std::abs(planted.obj_star)));
    CHECK(res.kkt_residual <= 1e-7);
    CHECK(res.gap <= 1e-7);
    CHECK(worst_violation(planted.prog, res.x_opt) <= 1e-8);
    // Maximization never falls below the supplied interior start.
    CHECK(res.obj >=
          planted.prog.objective.dot(planted.interior) - 1e-9);
  }
}

TEST_CASE("a cold start is recovered through the interior phase") {
  StreamRng rng(0xC01D);
  auto planted = oracle::plant_socp(rng, 6, 2, 1, 1, 1, false);
  const Vec far = Vec::Constant(6, 50.0);
  REQUIRE(!strictly_feasible(planted.prog, far));
  auto res = solve_socp(planted.prog, far);
  REQUIRE(res.status == SolveStatus::optimal);
  CHECK(std::abs(res.obj - planted.obj_star) <=
        1e-6 * std::max(1.0, std::abs(planted.obj_star)));
  CHECK(worst_violation(planted.prog, res.x_opt) <= 1e-8);
}

TEST_CASE("candidate enumeration reproduces the ball optimum in closed form") {
  // Maximizing a unit-norm objective over a ball has the optimum
  // center + radius * objective, value c.center + radius.
  StreamRng rng(0xBA11);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + trial % 3;
    SocProgram p;
    p.objective = unit_gaussians(rng, n);
    if (p.objective.norm() < 0.2) p.objective.setOnes();
    p.objective /= p.objective.norm();
    const Vec center = unit_gaussians(rng, n);
    const double radius = 0.5 + 1.5 * rng.uniform();
    SecondOrderCone ball;
    ball.A = Mat::Identity(n, n);
    ball.b = -center;
    ball.c = Vec::Zero(n);
    ball.d = radius;
    p.cones.push_back(ball);
    p.lower = Vec::Constant(n, -kInf);
    const double closed_form = p.objective.dot(center) + radius;
    const auto en = oracle::enumerate_maximum(p);
    CHECK(std::abs(en.value - closed_form) <= 1e-10 * std::max(1.0, std::abs(closed_form)));
    CHECK((en.x - (center + radius * p.objective)).norm() <= 1e-9);
    auto res = solve_socp(p, center);
    REQUIRE(res.status == SolveStatus::optimal);
    CHECK(std::abs(res.obj - closed_form) <= 1e-7 * std::max(1.0, std::abs(closed_form)));
  }
}

TEST_CASE("candidate enumeration agrees with planted single-cone certificates") {
  StreamRng rng(0xE7A2);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 3;
    auto planted = oracle::plant_socp(rng, n, /*active_cones=*/1,
                                      /*inactive_cones=*/0,
                                      /*active_linears=*/trial % 2,
                                      /*inactive_linears=*/2,
                                      /*active_bound=*/false);
    const auto en = oracle::enumerate_maximum(planted.prog);
    CHECK(std::abs(en.value - planted.obj_star) <=
          1e-8 * std::max(1.0, std::abs(planted.obj_star)));
  }
}

TEST_CASE("fat-interior programs match the candidate enumeration oracle") {
  StreamRng rng(0x6121D);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    SocProgram p;
    p.objective = unit_gaussians(rng, n);
    if (p.objective.norm() < 0.2) p.objective.setOnes();
    p.objective /= p.objective.norm();
    const Vec center = 0.5 * unit_gaussians(rng, n);
    const double radius = 1.5 + 0.5 * rng.uniform();
    SecondOrderCone ball;
    ball.A = Mat::Identity(n, n);
    ball.b = -center;
    ball.c = Vec::Zero(n);
    ball.d = radius;
    p.cones.push_back(ball);
    for (int cut = 0; cut < 2; ++cut) {
      LinearIneq li;
      li.g = unit_gaussians(rng, n);
      li.h = li.g.dot(center) + (0.6 + 0.6 * rng.uniform()) * li.g.norm();
      p.linear.push_back(li);
    }
    p.lower = Vec(n);
    for (int j = 0; j < n; ++j)
      p.lower[j] = center[j] - radius - 0.3 - 0.5 * rng.uniform();

    auto res = solve_socp(p, center);
    REQUIRE(res.status == SolveStatus::optimal);
    const double brute = oracle::enumerate_maximum(p).value;
    CHECK(std::abs(res.obj - brute) <= 1e-6 * std::max(1.0, std::abs(brute)));
    CHECK(res.kkt_residual <= 1e-7);
  }
}

TEST_CASE("candidate enumeration rejects multi-cone programs") {
  SocProgram p;
  p.objective = Vec::Ones(2);
  p.lower = Vec::Zero(2);
  SecondOrderCone ball;
  ball.A = Mat::Identity(2, 2);
  ball.b = Vec::Zero(2);
  ball.c = Vec::Zero(2);
  ball.d = 2.0;
  p.cones.push_back(ball);
  p.cones.push_back(ball);
  CHECK_THROWS_AS(static_cast<void>(oracle::enumerate_maximum(p)), ConfigError);
}

TEST_CASE("empty feasible sets are certified infeasible") {
  {
    // ||x|| <= -1 can never hold.
    SocProgram p;
    p.objective = Vec::Ones(1);
    p.lower = Vec::Constant(1, -kInf);
    SecondOrderCone cone;
    cone.A = Mat::Identity(1, 1);
    cone.b = Vec::Zero(1);
    cone.c = Vec::Zero(1);
    cone.d = -1.0;
    p.cones.push_back(cone);
    auto res = solve_socp(p, Vec::Zero(1));
    CHECK(res.status == SolveStatus::infeasible);
  }
  {
    // x <= -2 contradicts x >= 0.
    SocProgram p;
    p.objective = Vec::Ones(1);
    p.lower = Vec::Zero(1);
    p.linear.push_back({Vec::Ones(1), -2.0});
    auto res = solve_socp(p, Vec::Zero(1));
    CHECK(res.status == SolveStatus::infeasible);
  }
}

TEST_CASE("identical inputs give identical solutions") {
  StreamRng rng(0xD00D);
  auto planted = oracle::plant_socp(rng, 5, 1, 1, 1, 1, false);
  auto a = solve_socp(planted.prog, planted.interior);
  auto b = solve_socp(planted.prog, planted.interior);
  REQUIRE(a.x_opt.size() == b.x_opt.size());
  for (int j = 0; j < a.x_opt.size(); ++j) CHECK(a.x_opt[j] == b.x_opt[j]);
  CHECK(a.obj == b.obj);
}

TEST_CASE("malformed programs are rejected") {
  SocProgram p;
  p.objective = Vec::Ones(2);
  p.lower = Vec::Zero(1);  // wrong length
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.lower = Vec::Zero(2);
  SecondOrderCone cone;
  cone.A = Mat::Zero(1, 3);  // wrong column count
  cone.b = Vec::Zero(1);
  cone.c = Vec::Zero(2);
  p.cones.push_back(cone);
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
