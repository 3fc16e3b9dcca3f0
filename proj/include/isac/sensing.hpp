// SPDX-License-Identifier: MIT
// Sensing performance: Fisher-information blocks for the monostatic echo
// model, general and aligned-beam closed-form error bounds (CRLBs) on the
// target angles, echo synthesis, and the windowed grid-search MLE used to
// validate the bounds.
//
// Echo model: Y = alpha * b(theta,phi) a(theta,phi)^H X + N with X = F S,
// i.i.d. unit-power symbols S, and noise variance sigma_s^2.  Averaging the
// waveform covariance over channel realizations gives
//   R = (xi_bf' gamma) I + rho v v^H,
// and the information scale is kappa = 2L/sigma_s^2.
#pragma once

#include "isac/array_geometry.hpp"
#include "isac/comm_rate.hpp"
#include "isac/precoding.hpp"

namespace isac {

inline double sensing_information_scale(const SystemConfig& cfg) {
  return 2.0 * double(cfg.L) / cfg.sigma_s2;
}

// Sensing SNR as reported alongside MLE experiments: P_t L |alpha|^2 / sigma_s^2.
inline double sensing_snr(const SystemConfig& cfg) {
  return cfg.P_t * double(cfg.L) * std::norm(cfg.alpha) / cfg.sigma_s2;
}

// Reduced Fisher information for (theta, phi) after folding out the complex
// reflection coefficient.  J_aa is kappa(q N_t N_r + rho N_r |v^H a|^2) I_2,
// stored by its scale; j_pa couples phi with the two real components of
// alpha and vanishes when the sensing beam is aligned with the target.
struct FisherBlocks {
  double j_tt = 0.0;
  double j_pp = 0.0;
  double j_tp = 0.0;
  double j_aa_scale = 0.0;
  Eigen::RowVector2d j_pa = Eigen::RowVector2d::Zero();
  double j_pa_tilde = 0.0;

  Eigen::Matrix2d j_aa() const {
    return j_aa_scale * Eigen::Matrix2d::Identity();
  }
  Eigen::Matrix2d reduced() const {
    Eigen::Matrix2d m;
    m << j_tt, j_tp, j_tp, j_pa_tilde;
    return m;
  }
};

struct CrlbPair {
  double theta = 0.0;  // rad^2
  double phi = 0.0;    // rad^2
};

// Evaluate all blocks for an arbitrary sensing-beam direction.  Norm-type
// inner products come from the closed-form identities; the beam-dependent
// products v^H a, v^H da are evaluated from explicit vectors.
inline FisherBlocks fisher_blocks_general(const LargeScaleSet& ls,
                                          Scheme scheme,
                                          const PowerAllocation& alloc,
                                          const SystemConfig& cfg,
                                          const Angles& v_angles) {
  const double q = xi_bf(ls, scheme, cfg.n_t()).dot(alloc.gamma);
  const double rho = alloc.rho;
  const double kappa = sensing_information_scale(cfg);
  const double a2 = std::norm(cfg.alpha);
  const double n_t = cfg.n_t(), n_r = cfg.n_r();

  const auto ids = derivative_identities(cfg.tx, cfg.rx, cfg.target);
  const double At = ids.tx.norm2_theta, Ap = ids.tx.norm2_phi,
               Ax = ids.tx.cross;
  const double Bt = ids.rx.norm2_theta, Bp = ids.rx.norm2_phi,
               Bx = ids.rx.cross;

  const CVec a = steering(cfg.tx, cfg.target);
  const CVec dat = steering_derivative(cfg.tx, cfg.target, AngleAxis::theta);
  const CVec dap = steering_derivative(cfg.tx, cfg.target, AngleAxis::phi);
  const CVec v = steering(cfg.tx, v_angles);
  const cplx va = v.dot(a);    // v^H a
  const cplx vt = v.dot(dat);  // v^H da/dtheta
  const cplx vp = v.dot(dap);  // v^H da/dphi

  FisherBlocks fb;
  const double c2 = kappa * a2;
  fb.j_tt = c2 * (q * (n_r * At + n_t * Bt) +
                  rho * (std::norm(va) * Bt + n_r * std::norm(vt)));
  fb.j_pp = c2 * (q * (n_r * Ap + n_t * Bp) +
                  rho * (std::norm(va) * Bp + n_r * std::norm(vp)));
  fb.j_tp = c2 * (q * (n_r * Ax + n_t * Bx) +
                  rho * (std::norm(va) * Bx +
                         n_r * (std::conj(vt) * vp).real()));
  fb.j_aa_scale = kappa * (q * n_t * n_r + rho * n_r * std::norm(va));
  const cplx z = std::conj(cfg.alpha) * std::conj(va) * vp;
  fb.j_pa << kappa * rho * n_r * z.real(), -kappa * rho * n_r * z.imag();
  fb.j_pa_tilde =
      fb.j_aa_scale > 0.0
          ? fb.j_pp - fb.j_pa.squaredNorm() / fb.j_aa_scale
          : fb.j_pp;
  return fb;
}

// Schur-complement inverses of the reduced 2x2 information matrix.
inline CrlbPair crlb_general(const FisherBlocks& fb) {
  if (!(fb.j_tt > 0.0) || !(fb.j_pa_tilde > 0.0))
    throw SingularFimError("crlb_general: information matrix not positive");
  const double schur_t = fb.j_tt - fb.j_tp * fb.j_tp / fb.j_pa_tilde;
  const double schur_p = fb.j_pa_tilde - fb.j_tp * fb.j_tp / fb.j_tt;
  if (!(schur_t > 0.0) || !(schur_p > 0.0))
    throw SingularFimError("crlb_general: reduced information is singular");
  return {1.0 / schur_t, 1.0 / schur_p};
}

// Aligned-beam (v = a) closed form, computed purely from the derivative
// identities.  Depends on the allocation only through (xi_bf' gamma, rho),
// so allocations with identical products give bit-identical results.
inline CrlbPair crlb_simplified(const LargeScaleSet& ls, Scheme scheme,
                                const PowerAllocation& alloc,
                                const SystemConfig& cfg) {
  const double q = xi_bf(ls, scheme, cfg.n_t()).dot(alloc.gamma);
  const double rho = alloc.rho;
  const double c2 = sensing_information_scale(cfg) * std::norm(cfg.alpha);
  const double n_t = cfg.n_t(), n_r = cfg.n_r();
  const auto ids = derivative_identities(cfg.tx, cfg.rx, cfg.target);
  const double phi_t = q * (n_r * ids.tx.norm2_theta + n_t * ids.rx.norm2_theta) +
                       rho * n_t * n_t * ids.rx.norm2_theta;
  const double varpi_p = q * (n_r * ids.tx.norm2_phi + n_t * ids.rx.norm2_phi) +
                         rho * n_t * n_t * ids.rx.norm2_phi;
  const double cross = q * (n_r * ids.tx.cross + n_t * ids.rx.cross) +
                       rho * n_t * n_t * ids.rx.cross;
  if (!(phi_t > 0.0) || !(varpi_p > 0.0))
    throw SingularFimError("crlb_simplified: information matrix not positive");
  const double schur_t = phi_t - cross * cross / varpi_p;
  const double schur_p = varpi_p - cross * cross / phi_t;
  if (!(schur_t > 0.0) || !(schur_p > 0.0))
    throw SingularFimError("crlb_simplified: reduced information is singular");
  return {1.0 / (c2 * schur_t), 1.0 / (c2 * schur_p)};
}

// One synthesized sensing frame: received echo and the transmitted block.
struct EchoRealization {
  CMat y;  // N_r x L received samples
  CMat x;  // N_t x L transmitted samples (known at the monostatic receiver)
};

inline EchoRealization synthesize_echo(const SystemConfig& cfg,
                                       const PrecoderSet& pre,
                                       StreamRng& rng) {
  const int K = int(pre.F.cols());
  CMat s(K, cfg.L);
  for (int l = 0; l < cfg.L; ++l)
    for (int k = 0; k < K; ++k) s(k, l) = rng.cgaussian();
  EchoRealization echo;
  echo.x = pre.F * s;
  const CVec a = steering(cfg.tx, cfg.target);
  const CVec b = steering(cfg.rx, cfg.target);
  // alpha * b (a^H X): rank-one target response.
  Eigen::RowVectorXcd ax = a.adjoint() * echo.x;
  echo.y = cfg.alpha * b * ax;
  const double noise_sd = std::sqrt(cfg.sigma_s2);
  for (int l = 0; l < cfg.L; ++l)
    for (int i = 0; i < cfg.n_r(); ++i)
      echo.y(i, l) += noise_sd * rng.cgaussian();
  return echo;
}

struct MleResult {
  Angles angles;
  cplx alpha_hat{0.0, 0.0};
  double residual = 0.0;  // ||Y - alpha_hat * model||^2 at the optimum
};

// Exhaustive grid search for the target angles with the reflection
// coefficient profiled out in closed form per candidate.  The grid is
// centred on the search window's midpoint with spacing grid_step; passing
// window_rad <= 0 searches the full angle ranges.
inline MleResult mle_grid_search(const SystemConfig& cfg,
                                 const EchoRealization& echo,
                                 double grid_step,
                                 double window_rad = deg_to_rad(10.0)) {
  if (!(grid_step > 0.0))
    throw ConfigError("mle_grid_search: grid_step must be > 0");
  const double n_r = cfg.n_r();
  struct Axis {
    double center;
    int m_lo, m_hi;
  };
  auto make_axis = [&](double center, double half_range) {
    int m = int(std::floor(half_range / grid_step));
    return Axis{center, -m, m};
  };
  Axis ax_t = window_rad > 0.0 ? make_axis(cfg.target.theta, window_rad)
                               : make_axis(0.0, pi);
  Axis ax_p = window_rad > 0.0 ? make_axis(cfg.target.phi, window_rad)
                               : make_axis(0.0, pi / 2.0);

  MleResult best;
  double best_score = -1.0;
  const double y2 = echo.y.squaredNorm();
  for (int mt = ax_t.m_lo; mt <= ax_t.m_hi; ++mt) {
    const double th = ax_t.center + mt * grid_step;
    for (int mp = ax_p.m_lo; mp <= ax_p.m_hi; ++mp) {
      const double ph = ax_p.center + mp * grid_step;
      if (std::abs(ph) > pi / 2.0 || std::abs(th) > pi) continue;
      const Angles cand{th, ph};
      const CVec a = steering(cfg.tx, cand);
      const CVec b = steering(cfg.rx, cand);
      Eigen::RowVectorXcd r = a.adjoint() * echo.x;  // a^H X
      const double r2 = r.squaredNorm();
      if (r2 <= 0.0) continue;
      // <model, Y> with model = b r; energy ||model||^2 = N_r ||r||^2.
      const cplx num = (b.adjoint() * (echo.y * r.adjoint())).value();
      const double score = std::norm(num) / (n_r * r2);
      if (score > best_score) {
        best_score = score;
        best.angles = cand;
        best.alpha_hat = num / (n_r * r2);
        best.residual = y2 - score;
      }
    }
  }
  if (best_score < 0.0)
    throw NumericalError("mle_grid_search: empty candidate grid");
  return best;
}

}  // namespace isac
