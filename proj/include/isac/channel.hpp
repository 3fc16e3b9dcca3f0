// SPDX-License-Identifier: MIT
// Large-scale fading, pilot-contaminated MMSE estimation statistics, and
// small-scale Rayleigh realizations for Monte-Carlo validation.
//
// Channel model: user k sees h_k = sqrt(beta_k) h_bar_k with Rayleigh
// h_bar_k ~ CN(0, I).  MMSE estimation from orthogonal pilots (reused
// round-robin when K exceeds the pilot length) splits h_k into an estimate
// with per-entry variance xi_k and an independent error with variance
// eps_k = beta_k - xi_k, where
//   xi_k = tau_p p_p beta_k^2 / (tau_p p_p sum_{j in group(k)} beta_j + sigma_c^2).
#pragma once

#include <cstdint>
#include <vector>

#include "isac/array_geometry.hpp"
#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

enum class InitPolicy { half_power, smallest_p0 };

// Full system parameterisation shared by all modules.
struct SystemConfig {
  UpaSpec tx{8, 8};
  UpaSpec rx{5, 5};
  int K = 4;         // number of single-antenna users
  int L = 30;        // sensing frame length [symbols]
  int tau_c = 100;   // coherence interval [symbols]
  int tau_p = 10;    // pilot length [symbols]
  double p_p = 1000.0;    // pilot symbol power (linear)
  double sigma_c2 = 1.0;  // downlink (user) noise variance (linear)
  double sigma_s2 = 1.0;  // sensing receiver noise variance (linear)
  double P_t = 10.0;      // transmit power budget (linear)
  cplx alpha{1.0, 0.0};   // target reflection coefficient (two-way gain)
  Angles target{pi / 8.0, pi / 4.0};
  double cell_radius_m = 1000.0;
  double r_h_m = 100.0;        // minimum user distance (reference distance)
  double nu = 3.2;             // path-loss exponent
  double sigma_shadow_db = 7.0;
  std::uint64_t seed = 1;

  int n_t() const { return tx.count(); }
  int n_r() const { return rx.count(); }
  // Fraction of the coherence interval left for downlink payload.
  double tau_bar() const { return double(tau_c - tau_p) / double(tau_c); }

  void validate() const {
    tx.validate();
    rx.validate();
    if (K < 1) throw ConfigError("SystemConfig: K must be >= 1");
    if (L < 1) throw ConfigError("SystemConfig: L must be >= 1");
    if (!(tau_p >= 1 && tau_p < tau_c))
      throw ConfigError("SystemConfig: need 1 <= tau_p < tau_c");
    if (!(p_p > 0 && sigma_c2 > 0 && sigma_s2 > 0 && P_t > 0))
      throw ConfigError("SystemConfig: powers and variances must be > 0");
    if (!(cell_radius_m > r_h_m && r_h_m > 0))
      throw ConfigError("SystemConfig: need 0 < r_h_m < cell_radius_m");
    if (!(nu > 0)) throw ConfigError("SystemConfig: nu must be > 0");
    if (!(std::abs(target.phi) <= pi / 2.0) ||
        !(std::abs(target.theta) <= pi))
      throw ConfigError("SystemConfig: target angles out of range");
  }
};

// Per-user large-scale state: path gains and MMSE estimation variances.
struct LargeScaleSet {
  Vec beta;                      // linear path gains
  Vec xi;                        // estimate per-entry variances
  Vec eps;                       // error per-entry variances (beta - xi)
  std::vector<int> pilot_group;  // pilot index per user, in {1..tau_p}
};

// One small-scale draw: estimates and estimation errors, column per user.
struct ChannelRealization {
  CMat h_hat;  // N_t x K
  CMat e;      // N_t x K
  CMat h() const { return h_hat + e; }
};

// Round-robin pilot assignment: user k (1-based) gets pilot ((k-1) mod tau_p)+1.
inline std::vector<int> assign_pilots(int K, int tau_p) {
  std::vector<int> g(K);
  for (int k = 0; k < K; ++k) g[k] = (k % tau_p) + 1;
  return g;
}

// MMSE estimate variances with pilot reuse: the denominator sums the path
// gains of every user sharing the pilot (including user k itself).
inline Vec mmse_estimate_variance(const Vec& beta,
                                  const std::vector<int>& pilot_group,
                                  double tau_p_p_p, double sigma_c2) {
  const int K = int(beta.size());
  Vec xi(K);
  for (int k = 0; k < K; ++k) {
    double denom = sigma_c2;
    for (int j = 0; j < K; ++j)
      if (pilot_group[j] == pilot_group[k]) denom += tau_p_p_p * beta[j];
    xi[k] = tau_p_p_p * beta[k] * beta[k] / denom;
  }
  return xi;
}

// Assemble a LargeScaleSet from given path gains (deterministic path used
// by tests and by the random generator below).
inline LargeScaleSet large_scale_from_betas(const SystemConfig& cfg,
                                            const Vec& beta) {
  LargeScaleSet ls;
  ls.beta = beta;
  ls.pilot_group = assign_pilots(cfg.K, cfg.tau_p);
  ls.xi = mmse_estimate_variance(beta, ls.pilot_group, cfg.tau_p * cfg.p_p,
                                 cfg.sigma_c2);
  ls.eps = ls.beta - ls.xi;
  return ls;
}

// Draw user positions uniformly in area over the annulus [r_h, cell radius],
// apply log-normal shadowing, and form beta_k = z_k / (r_k/r_h)^nu.
inline LargeScaleSet draw_large_scale(const SystemConfig& cfg,
                                      StreamRng& rng) {
  Vec beta(cfg.K);
  const double r0sq = cfg.r_h_m * cfg.r_h_m;
  const double r1sq = cfg.cell_radius_m * cfg.cell_radius_m;
  for (int k = 0; k < cfg.K; ++k) {
    double r = std::sqrt(r0sq + rng.uniform() * (r1sq - r0sq));
    double shadow_db = rng.gaussian() * cfg.sigma_shadow_db;
    beta[k] = db_to_linear(shadow_db) / std::pow(r / cfg.r_h_m, cfg.nu);
  }
  return large_scale_from_betas(cfg, beta);
}

// Draw estimates and errors as independent circular Gaussians with the
// per-user variances from the large-scale set.
inline ChannelRealization draw_small_scale(const SystemConfig& cfg,
                                           const LargeScaleSet& ls,
                                           StreamRng& rng) {
  ChannelRealization out;
  const int n = cfg.n_t();
  out.h_hat.resize(n, cfg.K);
  out.e.resize(n, cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    const double s_hat = std::sqrt(ls.xi[k]);
    const double s_err = std::sqrt(ls.eps[k]);
    for (int i = 0; i < n; ++i) out.h_hat(i, k) = s_hat * rng.cgaussian();
    if (s_err == 0.0) {
      out.e.col(k).setZero();
    } else {
      for (int i = 0; i < n; ++i) out.e(i, k) = s_err * rng.cgaussian();
    }
  }
  return out;
}

}  // namespace isac
