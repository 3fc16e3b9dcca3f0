// SPDX-License-Identifier: MIT
// Downlink achievable rates: closed-form SINR coefficients, the generic
// rate map, the Monte-Carlo estimator from the desired-signal /
// beamforming-uncertainty / inter-user-interference decomposition, and the
// equal-power-split corollaries.
//
// The closed-form per-user SINR is
//   sinr_k = lambda_k gamma_k / (N_t beta_k rho + N_t zeta_k' gamma + sigma_c^2)
// with scheme-dependent coefficients:
//   MRT: lambda_k = (N_t xi_k)^2,  zeta_k = beta_k [xi_1..xi_K]
//   ZF : lambda_k = 1,             zeta_k = eps_k/(N_t(N_t-K)) [1/xi_1..1/xi_K]
// and rate_k = tau_bar log2(1 + sinr_k).
#pragma once

#include "isac/kahan.hpp"
#include "isac/precoding.hpp"

namespace isac {

// Scheme-dependent closed-form SINR coefficients.
struct RateCoefficients {
  Vec lambda;  // length K: desired-signal power factors
  Mat zeta;    // K x K: row k holds zeta_k
};

inline RateCoefficients sinr_coefficients(const LargeScaleSet& ls,
                                          Scheme scheme, int n_t) {
  const int K = int(ls.xi.size());
  RateCoefficients out;
  out.lambda.resize(K);
  out.zeta.resize(K, K);
  if (scheme == Scheme::mrt) {
    for (int k = 0; k < K; ++k) {
      out.lambda[k] = double(n_t) * double(n_t) * ls.xi[k] * ls.xi[k];
      for (int j = 0; j < K; ++j) out.zeta(k, j) = ls.beta[k] * ls.xi[j];
    }
  } else {
    if (n_t <= K)
      throw ConfigError("sinr_coefficients: zero-forcing requires N_t > K");
    const double c = 1.0 / (double(n_t) * double(n_t - K));
    for (int k = 0; k < K; ++k) {
      out.lambda[k] = 1.0;
      for (int j = 0; j < K; ++j) out.zeta(k, j) = ls.eps[k] * c / ls.xi[j];
    }
  }
  return out;
}

struct RateReport {
  Vec per_user_rate;  // bits/s/Hz
  Vec sinr;           // linear
  double sum_rate = 0.0;
};

namespace detail {
inline RateReport report_from_sinr(const Vec& sinr, double tau_bar) {
  RateReport r;
  r.sinr = sinr;
  r.per_user_rate.resize(sinr.size());
  for (Eigen::Index k = 0; k < sinr.size(); ++k)
    r.per_user_rate[k] = tau_bar * std::log2(1.0 + sinr[k]);
  r.sum_rate = r.per_user_rate.sum();
  return r;
}
}  // namespace detail

inline RateReport closed_form_rate(const LargeScaleSet& ls, Scheme scheme,
                                   const PowerAllocation& alloc,
                                   const SystemConfig& cfg) {
  auto co = sinr_coefficients(ls, scheme, cfg.n_t());
  const int K = int(ls.xi.size());
  Vec sinr(K);
  for (int k = 0; k < K; ++k) {
    double denom = cfg.n_t() * ls.beta[k] * alloc.rho +
                   cfg.n_t() * co.zeta.row(k).dot(alloc.gamma) + cfg.sigma_c2;
    sinr[k] = co.lambda[k] * alloc.gamma[k] / denom;
  }
  return detail::report_from_sinr(sinr, cfg.tau_bar());
}

// Equal split: half the budget to sensing, the other half shared equally
// across users after weighting by the effective power coefficients.
inline PowerAllocation equal_power_allocation(const LargeScaleSet& ls,
                                              Scheme scheme,
                                              const SystemConfig& cfg) {
  const int K = int(ls.xi.size());
  double xi_sum = xi_bf(ls, scheme, cfg.n_t()).sum();
  PowerAllocation alloc;
  alloc.rho = cfg.P_t / (2.0 * cfg.n_t());
  alloc.gamma = Vec::Constant(K, cfg.P_t / (2.0 * cfg.n_t() * xi_sum));
  return alloc;
}

// Closed-form rates at the equal split, written from the specialized
// expressions (they must agree exactly with closed_form_rate at the
// induced allocation).
inline RateReport equal_power_rates(const LargeScaleSet& ls, Scheme scheme,
                                    const SystemConfig& cfg) {
  const int K = int(ls.xi.size());
  const double P = cfg.P_t;
  Vec sinr(K);
  if (scheme == Scheme::mrt) {
    const double xi_sum = ls.xi.sum();
    for (int k = 0; k < K; ++k) {
      sinr[k] = cfg.n_t() * ls.xi[k] * ls.xi[k] * P /
                (2.0 * (ls.beta[k] * P + cfg.sigma_c2) * xi_sum);
    }
  } else {
    if (cfg.n_t() <= K)
      throw ConfigError("equal_power_rates: zero-forcing requires N_t > K");
    double inv_xi_sum = 0.0;
    for (int k = 0; k < K; ++k) inv_xi_sum += 1.0 / ls.xi[k];
    for (int k = 0; k < K; ++k) {
      sinr[k] = double(cfg.n_t() - K) * P /
                (((ls.beta[k] + ls.eps[k]) * P + 2.0 * cfg.sigma_c2) *
                 inv_xi_sum);
    }
  }
  return detail::report_from_sinr(sinr, cfg.tau_bar());
}

// Monte-Carlo rate estimate with the DS/BU/UI decomposition exposed.
struct McRateDetail {
  RateReport report;
  CVec ds_mean;   // E[h_k^H f_k]
  Vec bu_power;   // E|h_k^H f_k - DS_k|^2
  Vec ui_power;   // sum_{j != k} E|h_k^H f_j|^2
};

inline McRateDetail monte_carlo_rate(const LargeScaleSet& ls, Scheme scheme,
                                     const PowerAllocation& alloc,
                                     const SystemConfig& cfg, int draws,
                                     std::uint64_t stream_id = 0) {
  const int K = int(ls.xi.size());
  std::vector<KahanSumComplex> ds(K);
  std::vector<KahanSum> p2(K * K);
  StreamRng rng(cfg.seed, static_cast<std::uint64_t>(RngPurpose::small_scale),
                stream_id);
  for (int d = 0; d < draws; ++d) {
    auto real = draw_small_scale(cfg, ls, rng);
    auto pre = build_precoder(cfg, real, scheme, alloc, cfg.target);
    CMat z = real.h().adjoint() * pre.F;  // z(k,j) = h_k^H f_j
    for (int k = 0; k < K; ++k) {
      ds[k].add(z(k, k));
      for (int j = 0; j < K; ++j) p2[k * K + j].add(std::norm(z(k, j)));
    }
  }
  McRateDetail out;
  out.ds_mean.resize(K);
  out.bu_power.resize(K);
  out.ui_power.resize(K);
  Vec sinr(K);
  for (int k = 0; k < K; ++k) {
    cplx m = ds[k].value() / double(draws);
    out.ds_mean[k] = m;
    double self2 = p2[k * K + k].value() / double(draws);
    out.bu_power[k] = std::max(0.0, self2 - std::norm(m));
    double ui = 0.0;
    for (int j = 0; j < K; ++j)
      if (j != k) ui += p2[k * K + j].value() / double(draws);
    out.ui_power[k] = ui;
    sinr[k] =
        std::norm(m) / (out.bu_power[k] + out.ui_power[k] + cfg.sigma_c2);
  }
  out.report = detail::report_from_sinr(sinr, cfg.tau_bar());
  return out;
}

}  // namespace isac
