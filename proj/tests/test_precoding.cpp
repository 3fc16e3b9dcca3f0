// SPDX-License-Identifier: MIT
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/kahan.hpp"
#include "isac/precoding.hpp"

using namespace isac;

namespace {
SystemConfig make_cfg(int nth, int ntv, int K) {
  SystemConfig cfg;
  cfg.tx = {nth, ntv};
  cfg.rx = {2, 2};
  cfg.K = K;
  return cfg;
}

LargeScaleSet make_ls(const SystemConfig& cfg, StreamRng& rng) {
  Vec beta(cfg.K);
  for (int k = 0; k < cfg.K; ++k) beta[k] = 0.2 + rng.uniform();
  return large_scale_from_betas(cfg, beta);
}
}  // namespace

TEST_CASE("effective power coefficients match the two scheme definitions") {
  LargeScaleSet ls;
  ls.xi = Vec::Constant(5, 0.5);
  ls.beta = Vec::Constant(5, 1.0);
  ls.eps = ls.beta - ls.xi;
  CHECK((xi_bf(ls, Scheme::mrt, 25) - ls.xi).norm() == 0.0);
  Vec zf = xi_bf(ls, Scheme::zf, 25);
  for (int k = 0; k < 5; ++k)
    CHECK(zf[k] == doctest::Approx(0.004).epsilon(1e-14));
  CHECK_THROWS_AS(xi_bf(ls, Scheme::zf, 5), ConfigError);
}

TEST_CASE("closed-form power matches the budget in trivial allocations") {
  SystemConfig cfg = make_cfg(4, 4, 3);
  StreamRng rng(11);
  auto ls = make_ls(cfg, rng);
  PowerAllocation zero{Vec::Zero(3), 0.0};
  CHECK(total_power(ls, Scheme::mrt, zero, 16) == 0.0);
  PowerAllocation sensing_only{Vec::Zero(3), cfg.P_t / 16.0};
  CHECK(total_power(ls, Scheme::mrt, sensing_only, 16) ==
        doctest::Approx(cfg.P_t).epsilon(1e-15));
}

TEST_CASE("single-user MRT with unit gamma returns the estimate itself") {
  SystemConfig cfg = make_cfg(3, 3, 1);
  StreamRng rng(5);
  auto ls = make_ls(cfg, rng);
  StreamRng draw(5, 1);
  auto real = draw_small_scale(cfg, ls, draw);
  PowerAllocation alloc{Vec::Ones(1), 0.0};
  auto pre = build_precoder(cfg, real, Scheme::mrt, alloc, cfg.target);
  CHECK((pre.F.col(0) - real.h_hat.col(0)).norm() <= 1e-14);
}

TEST_CASE("zero-forcing satisfies the algebraic identity against estimates") {
  SystemConfig cfg = make_cfg(4, 4, 6);
  StreamRng rng(7);
  auto ls = make_ls(cfg, rng);
  StreamRng draw(7, 1);
  auto real = draw_small_scale(cfg, ls, draw);
  PowerAllocation alloc{Vec::LinSpaced(6, 0.1, 0.6), 0.25};
  auto pre = build_precoder(cfg, real, Scheme::zf, alloc, cfg.target);
  // H_hat^H W = I
  CMat hw = real.h_hat.adjoint() * pre.W;
  CHECK((hw - CMat::Identity(6, 6)).cwiseAbs().maxCoeff() <= 1e-8);
  // H_hat^H F = diag(sqrt(gamma)) + (H_hat^H v) eta_bar'
  const double eta = std::sqrt(alloc.rho / 6.0);
  CMat lhs = real.h_hat.adjoint() * pre.F;
  CMat rhs = alloc.gamma.cwiseSqrt().cast<cplx>().asDiagonal();
  rhs += (real.h_hat.adjoint() * pre.v) * CVec::Constant(6, eta).transpose();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("zero sensing power makes the precoder independent of the look angle") {
  SystemConfig cfg = make_cfg(4, 4, 4);
  StreamRng rng(9);
  auto ls = make_ls(cfg, rng);
  StreamRng draw(9, 1);
  auto real = draw_small_scale(cfg, ls, draw);
  PowerAllocation alloc{Vec::Ones(4), 0.0};
  auto p1 = build_precoder(cfg, real, Scheme::mrt, alloc, Angles{0.1, 0.2});
  auto p2 = build_precoder(cfg, real, Scheme::mrt, alloc, Angles{-0.9, 0.7});
  CHECK((p1.F - p2.F).norm() == 0.0);
}

static void check_power_mc(Scheme scheme, int nth, int ntv, int K,
                           std::uint64_t seed) {
  SystemConfig cfg = make_cfg(nth, ntv, K);
  StreamRng rng(seed);
  auto ls = make_ls(cfg, rng);
  PowerAllocation alloc{Vec::Zero(K), 0.3};
  for (int k = 0; k < K; ++k) alloc.gamma[k] = 0.2 + 0.1 * k;
  const int draws = 10000;
  KahanSum trace_acc, cross_acc;
  StreamRng draw_rng(seed, 1);
  for (int d = 0; d < draws; ++d) {
    auto real = draw_small_scale(cfg, ls, draw_rng);
    auto pre = build_precoder(cfg, real, scheme, alloc, cfg.target);
    trace_acc.add(pre.F.squaredNorm());
    // Cross term between comm and sensing parts should average to zero.
    CMat comm = pre.W * alloc.gamma.cwiseSqrt().cast<cplx>().asDiagonal();
    cross_acc.add(
        (pre.v.adjoint() * comm).sum().real());
  }
  double mc = trace_acc.value() / draws;
  double closed = total_power(ls, scheme, alloc, cfg.n_t());
  CHECK(mc == doctest::Approx(closed).epsilon(0.01));
  // Cross-term magnitude shrinks with averaging; bound loosely at 3 sigma.
  double cross_mean = std::abs(cross_acc.value()) / draws;
  CHECK(cross_mean <= 0.05 * closed);
}

TEST_CASE("closed-form power matches Monte-Carlo traces for both schemes") {
  check_power_mc(Scheme::mrt, 4, 4, 4, 101);
  check_power_mc(Scheme::zf, 4, 4, 4, 102);
  check_power_mc(Scheme::mrt, 5, 5, 8, 103);
  check_power_mc(Scheme::zf, 5, 5, 8, 104);
}

TEST_CASE("zero-forcing requires more antennas than users") {
  SystemConfig cfg = make_cfg(2, 2, 4);
  StreamRng rng(13);
  auto ls = make_ls(cfg, rng);
  StreamRng draw(13, 1);
  auto real = draw_small_scale(cfg, ls, draw);
  PowerAllocation alloc{Vec::Ones(4), 0.0};
  CHECK_THROWS_AS(
      build_precoder(cfg, real, Scheme::zf, alloc, cfg.target), ConfigError);
}
