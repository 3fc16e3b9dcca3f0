// SPDX-License-Identifier: MIT
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/channel.hpp"
#include "isac/kahan.hpp"

using namespace isac;

namespace {
SystemConfig small_cfg() {
  SystemConfig cfg;
  cfg.tx = {4, 4};
  cfg.rx = {2, 2};
  cfg.K = 4;
  cfg.tau_p = 10;
  cfg.p_p = 100.0;
  return cfg;
}
}  // namespace

TEST_CASE("distinct pilots reduce the estimate variance to the single-user formula") {
  SystemConfig cfg = small_cfg();
  Vec beta(4);
  beta << 0.5, 1.0, 2.0, 0.25;
  auto ls = large_scale_from_betas(cfg, beta);
  for (int k = 0; k < 4; ++k) {
    double tp = cfg.tau_p * cfg.p_p;
    double expect = tp * beta[k] * beta[k] / (tp * beta[k] + cfg.sigma_c2);
    CHECK(ls.xi[k] == doctest::Approx(expect).epsilon(1e-14));
    CHECK(ls.xi[k] + ls.eps[k] == beta[k]);  // exact by construction
    CHECK(ls.xi[k] > 0.0);
    CHECK(ls.xi[k] <= beta[k]);
  }
}

TEST_CASE("pilot power growing without bound recovers perfect CSI") {
  SystemConfig cfg = small_cfg();
  Vec beta(4);
  beta << 0.5, 1.0, 2.0, 0.25;
  cfg.p_p = 1e12;
  auto ls = large_scale_from_betas(cfg, beta);
  for (int k = 0; k < 4; ++k) {
    CHECK(ls.xi[k] == doctest::Approx(beta[k]).epsilon(1e-9));
    CHECK(ls.eps[k] <= 1e-9 * beta[k]);
  }
}

TEST_CASE("pilot sharing adds the partner gain to the denominator") {
  SystemConfig cfg = small_cfg();
  cfg.K = 2;
  cfg.tau_p = 1;  // force both users onto one pilot
  cfg.p_p = 10.0;
  Vec beta(2);
  beta << 1.0, 1.0;
  auto ls = large_scale_from_betas(cfg, beta);
  // tau_p p_p = 10, denominator 10*(1+1)+1 = 21.
  CHECK(ls.xi[0] == doctest::Approx(10.0 / 21.0).epsilon(1e-14));
  CHECK(ls.xi[1] == doctest::Approx(10.0 / 21.0).epsilon(1e-14));
}

TEST_CASE("round-robin pilot assignment cycles through the pilot set") {
  auto g = assign_pilots(7, 3);
  std::vector<int> expect{1, 2, 3, 1, 2, 3, 1};
  CHECK(g == expect);
}

TEST_CASE("estimate variance is monotone in pilot power") {
  SystemConfig cfg = small_cfg();
  cfg.K = 12;  // forces reuse with tau_p = 10
  StreamRng rng(42);
  Vec beta(12);
  for (int k = 0; k < 12; ++k) beta[k] = 0.1 + rng.uniform();
  double prev_xi = -1.0, prev_eps = 1e300;
  for (double pp : {1.0, 10.0, 100.0, 1000.0}) {
    cfg.p_p = pp;
    auto ls = large_scale_from_betas(cfg, beta);
    CHECK(ls.xi[0] > prev_xi);
    CHECK(ls.eps[0] < prev_eps);
    prev_xi = ls.xi[0];
    prev_eps = ls.eps[0];
  }
}

TEST_CASE("large-scale draws are deterministic given the seed") {
  SystemConfig cfg = small_cfg();
  cfg.K = 12;
  StreamRng r1(cfg.seed, 7), r2(cfg.seed, 7);
  auto a = draw_large_scale(cfg, r1);
  auto b = draw_large_scale(cfg, r2);
  for (int k = 0; k < cfg.K; ++k) {
    CHECK(a.beta[k] == b.beta[k]);
    CHECK(a.xi[k] == b.xi[k]);
  }
  StreamRng r3(cfg.seed, 8);
  auto c = draw_large_scale(cfg, r3);
  CHECK(a.beta[0] != c.beta[0]);
}

TEST_CASE("small-scale draws are deterministic and respect zero error variance") {
  SystemConfig cfg = small_cfg();
  Vec beta(4);
  beta << 0.5, 1.0, 2.0, 0.25;
  auto ls = large_scale_from_betas(cfg, beta);
  StreamRng r1(3, 1), r2(3, 1);
  auto c1 = draw_small_scale(cfg, ls, r1);
  auto c2 = draw_small_scale(cfg, ls, r2);
  CHECK((c1.h_hat - c2.h_hat).norm() == 0.0);
  CHECK((c1.e - c2.e).norm() == 0.0);

  ls.eps.setZero();
  StreamRng r3(3, 2);
  auto c3 = draw_small_scale(cfg, ls, r3);
  CHECK(c3.e.norm() == 0.0);
}

TEST_CASE("small-scale per-entry variances match the large-scale set") {
  SystemConfig cfg = small_cfg();
  cfg.tx = {4, 2};
  Vec beta(4);
  beta << 0.5, 1.0, 2.0, 0.25;
  auto ls = large_scale_from_betas(cfg, beta);
  const int draws = 100000;
  const int n = cfg.n_t();
  Vec acc_hat = Vec::Zero(cfg.K), acc_err = Vec::Zero(cfg.K),
      acc_tot = Vec::Zero(cfg.K);
  KahanSum sums[12];
  StreamRng rng(cfg.seed, 99);
  for (int d = 0; d < draws; ++d) {
    auto c = draw_small_scale(cfg, ls, rng);
    for (int k = 0; k < cfg.K; ++k) {
      sums[3 * k + 0].add(c.h_hat.col(k).squaredNorm());
      sums[3 * k + 1].add(c.e.col(k).squaredNorm());
      sums[3 * k + 2].add((c.h_hat.col(k) + c.e.col(k)).squaredNorm());
    }
  }
  for (int k = 0; k < cfg.K; ++k) {
    double vh = sums[3 * k + 0].value() / (double(draws) * n);
    double ve = sums[3 * k + 1].value() / (double(draws) * n);
    double vt = sums[3 * k + 2].value() / (double(draws) * n);
    CHECK(vh == doctest::Approx(ls.xi[k]).epsilon(0.02));
    CHECK(ve == doctest::Approx(ls.eps[k]).epsilon(0.02));
    CHECK(vt == doctest::Approx(ls.beta[k]).epsilon(0.02));
  }
}

TEST_CASE("config validation rejects out-of-range parameters") {
  SystemConfig cfg = small_cfg();
  cfg.validate();
  SystemConfig bad = cfg;
  bad.tau_p = bad.tau_c;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.K = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.P_t = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.r_h_m = 2000.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}
