// Named self-check suites runnable from the command line. Each suite pits a
// closed-form quantity against an independent reference: brute-force matrix
// algebra, finite differences, Monte-Carlo simulation, or exhaustively
// enumerated optimizer candidates. Suites print one line per check group and
// return the number of failures.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "isac/channel.hpp"
#include "isac/comm_rate.hpp"
#include "isac/kahan.hpp"
#include "isac/oracle/finite_difference.hpp"
#include "isac/oracle/fim_brute_force.hpp"
#include "isac/oracle/socp_oracle.hpp"
#include "isac/power_alloc.hpp"
#include "isac/precoding.hpp"
#include "isac/rng.hpp"
#include "isac/sensing.hpp"
#include "isac/types.hpp"

namespace isac::experiment {

namespace detail {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

// Random aligned-beam study case: small arrays, a handful of users.
inline SystemConfig random_small_system(StreamRng& rng, int max_side = 5) {
  SystemConfig cfg;
  cfg.tx.n_h = 2 + int(rng.next_u64() % std::uint64_t(max_side - 1));
  cfg.tx.n_v = 2 + int(rng.next_u64() % std::uint64_t(max_side - 1));
  cfg.rx.n_h = 2 + int(rng.next_u64() % 3);
  cfg.rx.n_v = 2 + int(rng.next_u64() % 3);
  cfg.K = 2 + int(rng.next_u64() % 3);
  cfg.target.theta = 0.15 + 1.2 * rng.uniform();
  cfg.target.phi = -1.2 + 2.4 * rng.uniform();
  cfg.alpha = cplx(0.5 + rng.uniform(), 0.5 * rng.uniform());
  cfg.P_t = 2.0 + 8.0 * rng.uniform();
  return cfg;
}

inline LargeScaleSet random_large_scale(const SystemConfig& cfg,
                                        StreamRng& rng) {
  Vec beta(cfg.K);
  for (int k = 0; k < cfg.K; ++k)
    beta[k] = std::pow(10.0, -1.0 + rng.uniform());
  return large_scale_from_betas(cfg, beta);
}

inline PowerAllocation random_allocation(const SystemConfig& cfg,
                                         const LargeScaleSet& ls,
                                         StreamRng& rng) {
  const Vec xi = xi_bf(ls, Scheme::mrt, cfg.n_t());
  PowerAllocation alloc;
  alloc.gamma = Vec(cfg.K);
  double p0 = 0.2 + 0.6 * rng.uniform();
  alloc.rho = p0 * cfg.P_t / cfg.n_t();
  Vec share(cfg.K);
  double sum = 0.0;
  for (int k = 0; k < cfg.K; ++k) {
    share[k] = 0.1 + rng.uniform();
    sum += share[k];
  }
  // Spend the rest of the budget on the user streams (MRT weighting keeps
  // the draw scheme-agnostic; only positivity and the budget matter here).
  const double comm = (1.0 - p0) * cfg.P_t;
  for (int k = 0; k < cfg.K; ++k)
    alloc.gamma[k] = comm * share[k] / (sum * cfg.n_t() * xi[k]);
  return alloc;
}

inline bool report(std::ostream& os, const std::string& what, bool ok,
                   const std::string& detail) {
  os << (ok ? "[ok]   " : "[FAIL] ") << what;
  if (!detail.empty()) os << " (" << detail << ")";
  os << "\n";
  return ok;
}

}  // namespace detail

// Steering-vector derivatives against central finite differences, and the
// closed-form curvature identities against explicit derivative inner
// products.
inline int suite_derivatives(std::ostream& os, std::uint64_t seed) {
  StreamRng rng = make_stream(seed, RngPurpose::oracle, 1);
  int fails = 0;
  double worst_fd = 0.0, worst_id = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    UpaSpec upa{2 + int(rng.next_u64() % 5), 2 + int(rng.next_u64() % 5)};
    Angles ang{0.15 + 1.2 * rng.uniform(), -1.2 + 2.4 * rng.uniform()};
    for (AngleAxis axis : {AngleAxis::theta, AngleAxis::phi}) {
      const CVec closed = steering_derivative(upa, ang, axis);
      const CVec fd = oracle::steering_derivative_fd(upa, ang, axis);
      worst_fd = std::max(
          worst_fd, (closed - fd).norm() / std::max(1.0, closed.norm()));
    }
    const auto closed_ids = steering_identities<double>(upa, ang);
    const auto explicit_ids = oracle::steering_identities_explicit(upa, ang);
    worst_id = std::max(
        {worst_id,
         detail::rel_err(closed_ids.norm2_theta, explicit_ids.norm2_theta),
         detail::rel_err(closed_ids.norm2_phi, explicit_ids.norm2_phi),
         detail::rel_err(closed_ids.cross, explicit_ids.cross)});
  }
  fails += !detail::report(os, "steering derivatives vs finite differences",
                           worst_fd <= 1e-5,
                           "worst rel err " + std::to_string(worst_fd));
  fails += !detail::report(os, "curvature identities vs explicit products",
                           worst_id <= 1e-10,
                           "worst rel err " + std::to_string(worst_id));
  return fails;
}

// Closed-form information-matrix blocks against brute-force trace algebra
// over explicit channel matrices.
inline int suite_fim(std::ostream& os, std::uint64_t seed) {
  StreamRng rng = make_stream(seed, RngPurpose::oracle, 2);
  double worst = 0.0;
  for (int trial = 0; trial < 25; ++trial) {
    SystemConfig cfg = detail::random_small_system(rng);
    LargeScaleSet ls = detail::random_large_scale(cfg, rng);
    PowerAllocation alloc = detail::random_allocation(cfg, ls, rng);
    Angles beam = cfg.target;
    if (trial % 2) {
      beam.theta += 0.05 * (rng.uniform() - 0.5);
      beam.phi += 0.05 * (rng.uniform() - 0.5);
    }
    const FisherBlocks closed =
        fisher_blocks_general(ls, Scheme::mrt, alloc, cfg, beam);
    const auto brute =
        oracle::fim_brute_force(ls, Scheme::mrt, alloc, cfg, beam);
    worst = std::max({worst, detail::rel_err(closed.j_tt, brute.j_tt),
                      detail::rel_err(closed.j_pp, brute.j_pp),
                      detail::rel_err(closed.j_tp, brute.j_tp),
                      detail::rel_err(closed.j_aa_scale, brute.j_aa_scale),
                      detail::rel_err(closed.j_pa[0], brute.j_pa[0]),
                      detail::rel_err(closed.j_pa[1], brute.j_pa[1]),
                      detail::rel_err(closed.j_pa_tilde, brute.j_pa_tilde)});
  }
  return !detail::report(os, "information-matrix blocks vs brute force",
                         worst <= 1e-8,
                         "worst rel err " + std::to_string(worst));
}

// Aligned-beam accuracy formulas against the general-beam path evaluated at
// the target.
inline int suite_crlb(std::ostream& os, std::uint64_t seed) {
  StreamRng rng = make_stream(seed, RngPurpose::oracle, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    SystemConfig cfg = detail::random_small_system(rng);
    LargeScaleSet ls = detail::random_large_scale(cfg, rng);
    PowerAllocation alloc = detail::random_allocation(cfg, ls, rng);
    for (Scheme scheme : {Scheme::mrt, Scheme::zf}) {
      if (scheme == Scheme::zf && cfg.n_t() <= cfg.K) continue;
      const CrlbPair fast = crlb_simplified(ls, scheme, alloc, cfg);
      const CrlbPair general = crlb_general(
          fisher_blocks_general(ls, scheme, alloc, cfg, cfg.target));
      worst = std::max({worst, detail::rel_err(fast.theta, general.theta),
                        detail::rel_err(fast.phi, general.phi)});
    }
  }
  return !detail::report(os, "aligned accuracy formulas vs general path",
                         worst <= 1e-10,
                         "worst rel err " + std::to_string(worst));
}

// Closed-form per-user SINR against Monte-Carlo channel simulation.
inline int suite_rate(std::ostream& os, std::uint64_t seed) {
  SystemConfig cfg;  // 8x8 / 5x5, four users
  cfg.seed = seed;
  int fails = 0;
  for (Scheme scheme : {Scheme::mrt, Scheme::zf}) {
    StreamRng rng = make_stream(seed, RngPurpose::oracle, 4);
    const LargeScaleSet ls = detail::random_large_scale(cfg, rng);
    const PowerAllocation alloc = equal_power_allocation(ls, scheme, cfg);
    const RateReport closed = closed_form_rate(ls, scheme, alloc, cfg);
    const auto mc = monte_carlo_rate(ls, scheme, alloc, cfg, 4000);
    double worst = 0.0;
    for (int k = 0; k < cfg.K; ++k)
      worst = std::max(worst, std::abs(mc.report.sinr[k] - closed.sinr[k]) /
                                  closed.sinr[k]);
    fails += !detail::report(
        os,
        std::string("per-user SINR vs simulation, ") + scheme_name(scheme),
        worst <= 0.03, "worst rel err " + std::to_string(worst));
  }
  return fails;
}

// Expected transmit power of the combined precoder against the closed-form
// budget expression.
inline int suite_power(std::ostream& os, std::uint64_t seed) {
  SystemConfig cfg;
  cfg.seed = seed;
  int fails = 0;
  for (Scheme scheme : {Scheme::mrt, Scheme::zf}) {
    StreamRng ls_rng = make_stream(seed, RngPurpose::oracle, 5);
    const LargeScaleSet ls = detail::random_large_scale(cfg, ls_rng);
    const PowerAllocation alloc = equal_power_allocation(ls, scheme, cfg);
    const double budget = total_power(ls, scheme, alloc, cfg.n_t());
    StreamRng rng = make_stream(seed, RngPurpose::oracle, 6);
    KahanSum acc;
    const int draws = 4000;
    for (int d = 0; d < draws; ++d) {
      const ChannelRealization real = draw_small_scale(cfg, ls, rng);
      const PrecoderSet pre =
          build_precoder(cfg, real, scheme, alloc, cfg.target);
      acc.add(pre.F.squaredNorm());
    }
    const double mc = acc.value() / draws;
    fails += !detail::report(
        os, std::string("transmit power vs simulation, ") + scheme_name(scheme),
        detail::rel_err(mc, budget) <= 0.01,
        "closed " + std::to_string(budget) + ", simulated " +
            std::to_string(mc));
  }
  return fails;
}

// Cone membership against direct accuracy evaluation at random allocations.
inline int suite_soc(std::ostream& os, std::uint64_t seed) {
  SystemConfig cfg;
  cfg.seed = seed;
  StreamRng rng = make_stream(seed, RngPurpose::oracle, 7);
  const LargeScaleSet ls = detail::random_large_scale(cfg, rng);
  CrlbLimits limits;
  {
    // Center the limits on an attainable operating point so both outcomes
    // appear among the random draws.
    const PowerAllocation mid = equal_power_allocation(ls, Scheme::mrt, cfg);
    const CrlbPair at = crlb_simplified(ls, Scheme::mrt, mid, cfg);
    limits.theta = at.theta;
    limits.phi = at.phi;
  }
  const auto cones = crlb_soc_constraints(ls, Scheme::mrt, cfg, limits);
  auto member = [](const SecondOrderCone& c, const Vec& x) {
    return (c.A * x + c.b).norm() <= c.c.dot(x) + c.d;
  };
  int disagreements = 0;
  int inside = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PowerAllocation alloc = detail::random_allocation(cfg, ls, rng);
    Vec x(cfg.K + 1);
    x.head(cfg.K) = alloc.gamma;
    x[cfg.K] = alloc.rho;
    const bool soc = member(cones.first, x) && member(cones.second, x);
    const CrlbPair got = crlb_simplified(ls, Scheme::mrt, alloc, cfg);
    const bool direct = got.theta <= limits.theta && got.phi <= limits.phi;
    disagreements += (soc != direct);
    inside += direct;
  }
  return !detail::report(
      os, "cone membership vs direct accuracy check", disagreements == 0,
      std::to_string(disagreements) + " disagreements, " +
          std::to_string(inside) + "/1000 inside");
}

// Concave rate surrogate: exact at its expansion point, below the true rate
// everywhere else.
inline int suite_surrogate(std::ostream& os, std::uint64_t seed) {
  StreamRng rng = make_stream(seed, RngPurpose::oracle, 8);
  double worst_gap = 0.0, worst_dom = 0.0;
  for (int trial = 0; trial < 40; ++trial) {
    SystemConfig cfg = detail::random_small_system(rng);
    LargeScaleSet ls = detail::random_large_scale(cfg, rng);
    const PowerAllocation at = detail::random_allocation(cfg, ls, rng);
    const auto sc = surrogate_coefficients(ls, Scheme::mrt, cfg, at);
    const Vec tangent = surrogate_rate(ls, Scheme::mrt, cfg, sc, at);
    const Vec truth = closed_form_rate(ls, Scheme::mrt, at, cfg).per_user_rate;
    for (int k = 0; k < cfg.K; ++k)
      worst_gap = std::max(worst_gap,
                           std::abs(tangent[k] - truth[k]) /
                               std::max(1.0, std::abs(truth[k])));
    for (int probe = 0; probe < 5; ++probe) {
      const PowerAllocation other = detail::random_allocation(cfg, ls, rng);
      const Vec lower = surrogate_rate(ls, Scheme::mrt, cfg, sc, other);
      const Vec exact =
          closed_form_rate(ls, Scheme::mrt, other, cfg).per_user_rate;
      for (int k = 0; k < cfg.K; ++k)
        worst_dom = std::max(worst_dom, lower[k] - exact[k]);
    }
  }
  int fails = 0;
  fails += !detail::report(os, "surrogate tangency at expansion point",
                           worst_gap <= 1e-9,
                           "worst rel gap " + std::to_string(worst_gap));
  fails += !detail::report(os, "surrogate stays below the true rate",
                           worst_dom <= 1e-9,
                           "worst excess " + std::to_string(worst_dom));
  return fails;
}

// Cone-program solver against enumerated candidates and planted optima.
inline int suite_socp(std::ostream& os, std::uint64_t seed) {
  StreamRng rng = make_stream(seed, RngPurpose::oracle, 9);
  double worst_obj = 0.0, worst_kkt = 0.0;
  int fails = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 4;
    auto planted = oracle::plant_socp(rng, n, /*active_cones=*/1,
                                      /*inactive_cones=*/0,
                                      /*active_linears=*/trial % 3,
                                      /*inactive_linears=*/1,
                                      /*active_bound=*/false);
    const auto en = oracle::enumerate_maximum(planted.prog);
    const auto res = solve_socp(planted.prog, planted.interior);
    if (res.status != SolveStatus::optimal) {
      ++fails;
      detail::report(os, "enumerated program " + std::to_string(trial),
                     false, "solver did not certify");
      continue;
    }
    worst_obj = std::max(worst_obj, detail::rel_err(res.obj, en.value));
    worst_kkt = std::max(worst_kkt, res.kkt_residual);
  }
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + trial % 7;
    auto planted = oracle::plant_socp(rng, n, 1 + trial % 2, 1, trial % 3, 1,
                                      trial % 2 == 0);
    const auto res = solve_socp(planted.prog, planted.interior);
    if (res.status != SolveStatus::optimal) {
      ++fails;
      detail::report(os, "planted program " + std::to_string(trial), false,
                     "solver did not certify");
      continue;
    }
    worst_obj = std::max(worst_obj, detail::rel_err(res.obj, planted.obj_star));
    worst_kkt = std::max(worst_kkt, res.kkt_residual);
  }
  fails += !detail::report(os, "cone solver objective vs known optimum",
                           worst_obj <= 1e-5,
                           "worst rel err " + std::to_string(worst_obj));
  fails += !detail::report(os, "cone solver stationarity residual",
                           worst_kkt <= 1e-7,
                           "worst residual " + std::to_string(worst_kkt));
  return fails;
}

struct OracleSuite {
  const char* name;
  const char* blurb;
  int (*run)(std::ostream&, std::uint64_t);
};

inline const std::vector<OracleSuite>& oracle_suites() {
  static const std::vector<OracleSuite> suites = {
      {"derivatives", "steering derivatives and curvature identities",
       &suite_derivatives},
      {"fim", "information-matrix blocks vs brute force", &suite_fim},
      {"crlb", "aligned accuracy formulas vs general path", &suite_crlb},
      {"rate", "closed-form SINR vs Monte-Carlo simulation", &suite_rate},
      {"power", "precoder power budget vs simulation", &suite_power},
      {"soc", "cone membership vs direct accuracy check", &suite_soc},
      {"surrogate", "rate surrogate tangency and domination",
       &suite_surrogate},
      {"socp", "cone solver vs enumerated and planted optima", &suite_socp},
  };
  return suites;
}

// Runs one suite ("all" for every suite). Returns the failure count.
// Unknown names raise ConfigError.
inline int run_oracle_suite(const std::string& name, std::ostream& os,
                            std::uint64_t seed) {
  int fails = 0;
  bool found = false;
  for (const auto& s : oracle_suites()) {
    if (name == "all" || name == s.name) {
      found = true;
      os << "== " << s.name << ": " << s.blurb << "\n";
      fails += s.run(os, seed);
    }
  }
  if (!found) {
    std::string names = "all";
    for (const auto& s : oracle_suites()) names += std::string(", ") + s.name;
    throw ConfigError("unknown oracle suite '" + name + "' (available: " +
                      names + ")");
  }
  return fails;
}

}  // namespace isac::experiment
