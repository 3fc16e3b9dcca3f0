// SPDX-License-Identifier: MIT
// Dual-function precoding: MRT/ZF communications beamformers, the sensing
// beam along a chosen look direction, and the closed-form transmit-power
// accounting  P = N_t (xi_bf' gamma + rho).
#pragma once

#include "isac/channel.hpp"
#include "isac/types.hpp"

namespace isac {

enum class Scheme { mrt, zf };

inline const char* scheme_name(Scheme s) {
  return s == Scheme::mrt ? "mrt" : "zf";
}

// Per-user comm power factors gamma and total sensing power fraction rho.
// rho aggregates the per-user sensing shares (rho = sum_k eta_k); only the
// total matters to rates, power, and error bounds.
struct PowerAllocation {
  Vec gamma;
  double rho = 0.0;
};

// Assembled precoders for one channel realization.
struct PrecoderSet {
  CMat W;      // N_t x K communications beamformer (MRT or ZF)
  CVec v;      // N_t sensing beam (steering vector at the look angles)
  CMat F;      // N_t x K combined precoder, F = W diag(sqrt(gamma)) + v eta_bar'
  Scheme scheme = Scheme::mrt;
};

// Effective per-user power coefficients of the two schemes:
// MRT uses the estimate variances directly; ZF uses the expected inverse
// Gram diagonal, 1/(N_t (N_t - K) xi_k).
inline Vec xi_bf(const LargeScaleSet& ls, Scheme scheme, int n_t) {
  const int K = int(ls.xi.size());
  if (scheme == Scheme::mrt) return ls.xi;
  if (n_t <= K)
    throw ConfigError("xi_bf: zero-forcing requires N_t > K");
  Vec out(K);
  for (int k = 0; k < K; ++k)
    out[k] = 1.0 / (double(n_t) * double(n_t - K) * ls.xi[k]);
  return out;
}

// Closed-form expected transmit power of the combined precoder.
inline double total_power(const LargeScaleSet& ls, Scheme scheme,
                          const PowerAllocation& alloc, int n_t) {
  return double(n_t) * (xi_bf(ls, scheme, n_t).dot(alloc.gamma) + alloc.rho);
}

// Build W, v, and F for one channel realization.  The sensing power is
// split uniformly across the K columns (eta_k = rho/K), which leaves all
// analysed quantities unchanged since they depend on eta only through rho.
inline PrecoderSet build_precoder(const SystemConfig& cfg,
                                  const ChannelRealization& real,
                                  Scheme scheme, const PowerAllocation& alloc,
                                  const Angles& v_angles) {
  const int K = int(real.h_hat.cols());
  const int n_t = int(real.h_hat.rows());
  PrecoderSet out;
  out.scheme = scheme;
  if (scheme == Scheme::mrt) {
    out.W = real.h_hat;
  } else {
    if (n_t <= K)
      throw ConfigError("build_precoder: zero-forcing requires N_t > K");
    CMat gram = real.h_hat.adjoint() * real.h_hat;
    Eigen::LLT<CMat> llt(gram);
    if (llt.info() != Eigen::Success)
      throw NumericalError("build_precoder: singular estimate Gram matrix");
    out.W = real.h_hat * llt.solve(CMat::Identity(K, K));
    auto residual = [&]() {
      return (real.h_hat.adjoint() * out.W - CMat::Identity(K, K))
          .cwiseAbs()
          .maxCoeff();
    };
    if (residual() > 1e-10) {
      // One step of iterative refinement clears residual rounding.
      CMat r = CMat::Identity(K, K) - real.h_hat.adjoint() * out.W;
      out.W.noalias() += real.h_hat * llt.solve(r);
      if (residual() > 1e-8)
        throw NumericalError("build_precoder: zero-forcing residual too large");
    }
  }
  out.v = steering(cfg.tx, v_angles);
  const double eta_entry = std::sqrt(alloc.rho / double(K));
  CVec sqrt_gamma = alloc.gamma.cwiseSqrt().cast<cplx>();
  out.F = out.W * sqrt_gamma.asDiagonal();
  out.F.noalias() += out.v * (CVec::Constant(K, eta_entry)).transpose();
  return out;
}

}  // namespace isac
