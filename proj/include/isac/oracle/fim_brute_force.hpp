// SPDX-License-Identifier: MIT
// Brute-force Fisher-information oracle: evaluates every block from the
// defining trace expressions with explicit response matrices, never the
// closed-form identities.  Used to validate fisher_blocks_general.
#pragma once

#include "isac/sensing.hpp"

namespace isac::oracle {

struct FimBruteForce {
  double j_tt, j_pp, j_tp;
  double j_aa_scale;
  Eigen::RowVector2d j_pa;
  Eigen::RowVector2d j_ta;  // computed for completeness; the reduced-FIM
                            // contract folds only the phi coupling
  double j_pa_tilde;
};

inline FimBruteForce fim_brute_force(const LargeScaleSet& ls, Scheme scheme,
                                     const PowerAllocation& alloc,
                                     const SystemConfig& cfg,
                                     const Angles& v_angles) {
  const double q = xi_bf(ls, scheme, cfg.n_t()).dot(alloc.gamma);
  const double kappa = sensing_information_scale(cfg);
  const double a2 = std::norm(cfg.alpha);

  const CVec a = steering(cfg.tx, cfg.target);
  const CVec dat = steering_derivative(cfg.tx, cfg.target, AngleAxis::theta);
  const CVec dap = steering_derivative(cfg.tx, cfg.target, AngleAxis::phi);
  const CVec b = steering(cfg.rx, cfg.target);
  const CVec dbt = steering_derivative(cfg.rx, cfg.target, AngleAxis::theta);
  const CVec dbp = steering_derivative(cfg.rx, cfg.target, AngleAxis::phi);
  const CVec v = steering(cfg.tx, v_angles);

  const CMat G = b * a.adjoint();
  const CMat Gt = dbt * a.adjoint() + b * dat.adjoint();
  const CMat Gp = dbp * a.adjoint() + b * dap.adjoint();
  const CMat R = q * CMat::Identity(cfg.n_t(), cfg.n_t()) +
                 alloc.rho * (v * v.adjoint());

  auto tr = [](const CMat& m) { return m.trace(); };

  FimBruteForce out;
  out.j_tt = kappa * a2 * tr(Gt * R * Gt.adjoint()).real();
  out.j_pp = kappa * a2 * tr(Gp * R * Gp.adjoint()).real();
  out.j_tp = kappa * a2 * tr(Gp * R * Gt.adjoint()).real();
  out.j_aa_scale = kappa * tr(G * R * G.adjoint()).real();
  const cplx tp = std::conj(cfg.alpha) * tr(G * R * Gp.adjoint());
  out.j_pa << kappa * tp.real(), -kappa * tp.imag();
  const cplx tt = std::conj(cfg.alpha) * tr(G * R * Gt.adjoint());
  out.j_ta << kappa * tt.real(), -kappa * tt.imag();
  out.j_pa_tilde = out.j_aa_scale > 0.0
                       ? out.j_pp - out.j_pa.squaredNorm() / out.j_aa_scale
                       : out.j_pp;
  return out;
}

// Error bounds from the explicit inverse of the reduced 2x2 matrix.
inline CrlbPair crlb_from_reduced_inverse(const FisherBlocks& fb) {
  Eigen::Matrix2d m = fb.reduced();
  Eigen::Matrix2d inv = m.inverse();
  return {inv(0, 0), inv(1, 1)};
}

}  // namespace isac::oracle
