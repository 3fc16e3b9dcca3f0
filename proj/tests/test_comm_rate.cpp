// SPDX-License-Identifier: MIT
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/comm_rate.hpp"

using namespace isac;

namespace {
SystemConfig desk_cfg(int nth, int ntv, int K) {
  SystemConfig cfg;
  cfg.tx = {nth, ntv};
  cfg.rx = {2, 2};
  cfg.K = K;
  cfg.P_t = 10.0;
  return cfg;
}

LargeScaleSet random_ls(const SystemConfig& cfg, std::uint64_t seed) {
  StreamRng rng(seed);
  Vec beta(cfg.K);
  for (int k = 0; k < cfg.K; ++k) beta[k] = 0.2 + rng.uniform();
  return large_scale_from_betas(cfg, beta);
}

PowerAllocation mixed_alloc(const LargeScaleSet& ls, Scheme scheme,
                            const SystemConfig& cfg, double comm_frac) {
  Vec xib = xi_bf(ls, scheme, cfg.n_t());
  PowerAllocation alloc;
  alloc.gamma = Vec::Constant(cfg.K, comm_frac * cfg.P_t /
                                         (cfg.n_t() * xib.sum()));
  alloc.rho = (1.0 - comm_frac) * cfg.P_t / cfg.n_t();
  return alloc;
}
}  // namespace

TEST_CASE("zero comm power gives zero rates; rates fall as sensing power grows") {
  SystemConfig cfg = desk_cfg(4, 4, 4);
  auto ls = random_ls(cfg, 21);
  PowerAllocation zero{Vec::Zero(4), 0.5};
  auto r = closed_form_rate(ls, Scheme::mrt, zero, cfg);
  CHECK(r.sum_rate == 0.0);

  PowerAllocation alloc{Vec::Constant(4, 0.01), 0.0};
  double prev = 1e300;
  for (double rho : {0.0, 0.1, 1.0, 10.0, 1000.0}) {
    alloc.rho = rho;
    auto rep = closed_form_rate(ls, Scheme::mrt, alloc, cfg);
    CHECK(rep.sinr[0] < prev);
    prev = rep.sinr[0];
  }
}

TEST_CASE("rate responds monotonically to power shifts") {
  SystemConfig cfg = desk_cfg(5, 5, 4);
  auto ls = random_ls(cfg, 22);
  for (Scheme s : {Scheme::mrt, Scheme::zf}) {
    PowerAllocation alloc{Vec::Constant(4, 0.01), 0.005};
    auto base = closed_form_rate(ls, s, alloc, cfg);
    PowerAllocation up = alloc;
    up.gamma[1] *= 1.01;
    auto r_up = closed_form_rate(ls, s, up, cfg);
    CHECK(r_up.per_user_rate[1] > base.per_user_rate[1]);
    // Other users lose (their interference grew).
    CHECK(r_up.per_user_rate[0] < base.per_user_rate[0]);
    PowerAllocation more_rho = alloc;
    more_rho.rho *= 1.01;
    auto r_rho = closed_form_rate(ls, s, more_rho, cfg);
    for (int k = 0; k < 4; ++k)
      CHECK(r_rho.per_user_rate[k] < base.per_user_rate[k]);
  }
}

TEST_CASE("closed form matches Monte-Carlo SINR within 3% for both schemes") {
  SystemConfig cfg = desk_cfg(8, 8, 4);  // N_t = 64 desk configuration
  cfg.seed = 7;
  auto ls = random_ls(cfg, 23);
  const int draws = 10000;
  for (Scheme s : {Scheme::mrt, Scheme::zf}) {
    auto alloc = mixed_alloc(ls, s, cfg, 0.7);
    auto cf = closed_form_rate(ls, s, alloc, cfg);
    auto mc = monte_carlo_rate(ls, s, alloc, cfg, draws);
    for (int k = 0; k < cfg.K; ++k) {
      CHECK(mc.report.sinr[k] ==
            doctest::Approx(cf.sinr[k]).epsilon(0.03));
    }
  }
}

TEST_CASE("single-user MRT with perfect estimates matches the closed form") {
  SystemConfig cfg = desk_cfg(4, 4, 1);
  cfg.p_p = 1e9;  // essentially perfect CSI
  auto ls = random_ls(cfg, 24);
  PowerAllocation alloc{Vec::Constant(1, 0.05), 0.0};
  auto cf = closed_form_rate(ls, Scheme::mrt, alloc, cfg);
  auto mc = monte_carlo_rate(ls, Scheme::mrt, alloc, cfg, 20000);
  CHECK(mc.report.sinr[0] == doctest::Approx(cf.sinr[0]).epsilon(0.03));
}

TEST_CASE("zero-forcing with perfect CSI removes interference and uncertainty") {
  SystemConfig cfg = desk_cfg(4, 4, 3);
  cfg.p_p = 1e9;
  auto ls = random_ls(cfg, 25);
  PowerAllocation alloc{Vec::Constant(3, 0.2), 0.0};
  auto mc = monte_carlo_rate(ls, Scheme::zf, alloc, cfg, 2000);
  for (int k = 0; k < 3; ++k) {
    CHECK(mc.bu_power[k] <= 1e-6);
    CHECK(mc.ui_power[k] <= 1e-6);
    double expect = cfg.tau_bar() * std::log2(1.0 + alloc.gamma[k] /
                                                        cfg.sigma_c2);
    CHECK(mc.report.per_user_rate[k] ==
          doctest::Approx(expect).epsilon(0.02));
  }
}

TEST_CASE("equal-power closed forms equal the generic rate at the induced allocation") {
  SystemConfig cfg = desk_cfg(5, 5, 6);
  auto ls = random_ls(cfg, 26);
  for (Scheme s : {Scheme::mrt, Scheme::zf}) {
    auto alloc = equal_power_allocation(ls, s, cfg);
    // Allocation exactly exhausts the budget.
    CHECK(total_power(ls, s, alloc, cfg.n_t()) ==
          doctest::Approx(cfg.P_t).epsilon(1e-14));
    auto direct = equal_power_rates(ls, s, cfg);
    auto generic = closed_form_rate(ls, s, alloc, cfg);
    for (int k = 0; k < cfg.K; ++k) {
      CHECK(std::abs(direct.sinr[k] - generic.sinr[k]) <=
            1e-12 * std::max(1.0, generic.sinr[k]));
      CHECK(std::abs(direct.per_user_rate[k] - generic.per_user_rate[k]) <=
            1e-12 * std::max(1.0, generic.per_user_rate[k]));
    }
  }
}

TEST_CASE("larger square arrays strictly improve every equal-power SINR") {
  for (Scheme s : {Scheme::mrt, Scheme::zf}) {
    Vec prev;
    for (int side : {5, 10, 15, 20}) {
      SystemConfig cfg = desk_cfg(side, side, 6);
      auto ls = random_ls(cfg, 27);  // same betas for all sizes
      auto rep = equal_power_rates(ls, s, cfg);
      if (prev.size() > 0)
        for (int k = 0; k < 6; ++k) CHECK(rep.sinr[k] > prev[k]);
      prev = rep.sinr;
    }
  }
}

TEST_CASE("ZF equal-power SINR saturates at the interference-limited ceiling") {
  SystemConfig cfg = desk_cfg(6, 6, 4);
  auto ls = random_ls(cfg, 28);
  cfg.P_t = 1e12;
  auto rep = equal_power_rates(ls, Scheme::zf, cfg);
  double inv_xi_sum = 0.0;
  for (int k = 0; k < 4; ++k) inv_xi_sum += 1.0 / ls.xi[k];
  for (int k = 0; k < 4; ++k) {
    double ceiling =
        double(cfg.n_t() - 4) / ((ls.beta[k] + ls.eps[k]) * inv_xi_sum);
    CHECK(rep.sinr[k] == doctest::Approx(ceiling).epsilon(1e-6));
  }
}

TEST_CASE("Monte-Carlo estimator is deterministic for a fixed seed") {
  SystemConfig cfg = desk_cfg(4, 4, 3);
  auto ls = random_ls(cfg, 29);
  PowerAllocation alloc{Vec::Constant(3, 0.05), 0.01};
  auto a = monte_carlo_rate(ls, Scheme::mrt, alloc, cfg, 500);
  auto b = monte_carlo_rate(ls, Scheme::mrt, alloc, cfg, 500);
  CHECK((a.report.sinr - b.report.sinr).norm() == 0.0);
}
