// SPDX-License-Identifier: MIT
//
// Independent reference answers for small cone programs, used to check the
// interior-point solver:
//   * an exhaustive enumeration of every Karush-Kuhn-Tucker candidate point
//     of a single-cone program, each available in closed form (practical for
//     small dimension), and
//   * a generator that plants a problem whose optimum is certified exactly
//     by convex duality: the objective is built as a positive combination
//     of active-constraint gradients at a chosen boundary point, so that
//     point provably maximizes the objective over the feasible set.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "isac/rng.hpp"
#include "isac/socp.hpp"
#include "isac/types.hpp"

namespace isac::oracle {

struct EnumeratedOptimum {
  double value = 0.0;
  Vec x;
};

// Exact maximum of a program with at most one cone, found by exhaustively
// enumerating every Karush-Kuhn-Tucker candidate point. Finite lower bounds
// are folded into the linear rows first. For every subset S of linear rows
// treated as equalities (the affine slice x = x0 + V t, V an orthonormal
// kernel basis):
//   * if the slice is a single point, that vertex is a candidate;
//   * otherwise a maximizer must sit on the cone boundary, which on the
//     slice is the quadric t'Qt + 2r't + s = 0 with Q = Ab'Ab - cb cb';
//     stationarity of the objective there gives t = Q^{-1}(mu*ch - r) with
//     mu^2 = (r'Q^{-1}r - s) / (ch'Q^{-1}ch), i.e. at most two closed-form
//     points per subset.
// The true maximizer has *some* active set and therefore appears among the
// candidates, so the best feasible candidate is the exact optimum up to
// roundoff. Degenerate subsets (rank-deficient, singular Q, cone apex) are
// skipped; they matter only on measure-zero families, not for generic random
// data. Cost is combinatorial, so dimension and row count are capped.
inline EnumeratedOptimum enumerate_maximum(const SocProgram& p) {
  p.validate();
  if (p.cones.size() > 1)
    throw ConfigError("enumerate_maximum: at most one cone is supported");
  const int n = p.n();
  if (n > 8) throw ConfigError("enumerate_maximum: dimension too high");

  // Fold finite lower bounds in as -x_j <= -l_j so subsets cover them too.
  std::vector<LinearIneq> rows = p.linear;
  for (int j = 0; j < n; ++j) {
    if (std::isfinite(p.lower[j])) {
      LinearIneq li;
      li.g = Vec::Zero(n);
      li.g[j] = -1.0;
      li.h = -p.lower[j];
      rows.push_back(li);
    }
  }
  const int m = static_cast<int>(rows.size());
  double subset_count = 0.0, binom = 1.0;
  for (int k = 0; k <= std::min(n, m); ++k) {
    subset_count += binom;
    binom *= double(m - k) / double(k + 1);
  }
  if (subset_count > 5e6)
    throw ConfigError("enumerate_maximum: too many constraint subsets");

  const double feas_tol = 1e-7;
  double best = -std::numeric_limits<double>::infinity();
  Vec best_x = Vec::Zero(n);
  auto consider = [&](const Vec& x) {
    if (!x.allFinite() || worst_violation(p, x) > feas_tol) return;
    const double val = p.objective.dot(x);
    if (val > best) {
      best = val;
      best_x = x;
    }
  };

  auto visit_subset = [&](const std::vector<int>& sel) {
    const int k = static_cast<int>(sel.size());
    Vec x0;
    Mat V;  // orthonormal basis of the slice directions
    if (k == 0) {
      x0 = Vec::Zero(n);
      V = Mat::Identity(n, n);
    } else {
      Mat G(k, n);
      Vec h(k);
      for (int i = 0; i < k; ++i) {
        G.row(i) = rows[sel[i]].g.transpose();
        h[i] = rows[sel[i]].h;
      }
      Eigen::JacobiSVD<Mat> svd(G, Eigen::ComputeFullV | Eigen::ComputeThinU);
      svd.setThreshold(1e-10);
      const int rank = static_cast<int>(svd.rank());
      if (rank < k) return;  // a smaller subset yields the same slice
      // Minimum-norm solution of G x = h from the singular triplets.
      const Vec coeff = (svd.matrixU().transpose() * h)
                            .head(rank)
                            .cwiseQuotient(svd.singularValues().head(rank));
      x0 = svd.matrixV().leftCols(rank) * coeff;
      if ((G * x0 - h).norm() > 1e-8 * (1.0 + h.norm())) return;
      V = svd.matrixV().rightCols(n - rank);
    }
    if (V.cols() == 0) {
      consider(x0);  // vertex
      return;
    }
    if (p.cones.empty()) return;  // linear objective: no interior stationary point
    const SecondOrderCone& cone = p.cones.front();
    const Mat Ab = cone.A * V;
    const Vec bb = cone.A * x0 + cone.b;
    const Vec cb = V.transpose() * cone.c;
    const double ub = cone.c.dot(x0) + cone.d;
    const Mat Q = Ab.transpose() * Ab - cb * cb.transpose();
    const Vec r = Ab.transpose() * bb - ub * cb;
    const double s = bb.squaredNorm() - ub * ub;
    const Vec ch = V.transpose() * p.objective;
    if (ch.norm() <= 1e-12 * (1.0 + p.objective.norm())) return;
    Eigen::FullPivLU<Mat> lu(Q);
    if (!lu.isInvertible()) return;
    const Vec q_inv_ch = lu.solve(ch);
    const Vec q_inv_r = lu.solve(r);
    const double den = ch.dot(q_inv_ch);
    const double mu2 = (r.dot(q_inv_r) - s) / den;
    if (!std::isfinite(mu2) || mu2 < 0.0) return;
    const double mu = std::sqrt(mu2);
    for (const double sign : {1.0, -1.0}) {
      const Vec x = x0 + V * (sign * mu * q_inv_ch - q_inv_r);
      // Keep only the genuine branch of the squared boundary equation.
      if (cone.c.dot(x) + cone.d < -1e-9) continue;
      consider(x);
    }
  };

  std::vector<int> sel;
  visit_subset(sel);
  for (int k = 1; k <= std::min(n, m); ++k) {
    sel.resize(k);
    for (int i = 0; i < k; ++i) sel[i] = i;
    while (true) {
      visit_subset(sel);
      int i = k - 1;
      while (i >= 0 && sel[i] == m - k + i) --i;
      if (i < 0) break;
      ++sel[i];
      for (int j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
    }
  }

  if (!std::isfinite(best))
    throw NumericalError("enumerate_maximum: no feasible candidate point");
  return {best, best_x};
}

struct PlantedSocp {
  SocProgram prog;
  Vec x_star;       // certified maximizer
  double obj_star;  // certified optimal value
  Vec interior;     // strictly feasible witness, usable as a warm start
};

// Build a random bounded SOCP whose optimum is known exactly. x_star sits on
// the boundary of every "active" constraint; the objective is the positive
// combination of their gradients there, which certifies optimality without
// solving anything. The interior witness keeps every constraint slack by a
// fixed margin, so the problem always has a nonempty interior.
inline PlantedSocp plant_socp(StreamRng& rng, int n, int active_cones,
                              int inactive_cones, int active_linears,
                              int inactive_linears, bool active_bound) {
  auto unit = [&rng](int m) {
    Vec v(m);
    for (int j = 0; j < m; ++j) v[j] = rng.gaussian();
    return v;
  };
  while (true) {
    PlantedSocp out;
    out.x_star = unit(n);
    out.interior = unit(n);
    const Vec w = out.interior - out.x_star;
    if (w.norm() < 0.3) continue;  // need a usable inward direction

    SocProgram& p = out.prog;
    p.objective = Vec::Zero(n);
    p.lower = Vec::Constant(n, -std::numeric_limits<double>::infinity());
    Vec grad_sum = Vec::Zero(n);

    for (int i = 0; i < active_cones; ++i) {
      const int m = 2 + int(rng.next_u64() % 2);
      SecondOrderCone cone;
      cone.A = Mat(m, n);
      for (int r = 0; r < m; ++r) cone.A.row(r) = unit(n).transpose();
      Vec z_target = unit(m);
      if (z_target.norm() < 0.5) z_target *= (0.5 / z_target.norm() + 1.0);
      cone.b = z_target - cone.A * out.x_star;
      cone.c = 0.5 * unit(n);
      const Vec z_star = cone.A * out.x_star + cone.b;
      cone.d = z_star.norm() - cone.c.dot(out.x_star);
      // Enforce slack at the interior witness by tilting c along w.
      const double slack_int = cone.margin(out.interior);
      if (slack_int < 0.1) {
        const double kappa = (0.1 - slack_int) / w.squaredNorm();
        cone.c += kappa * w;
        cone.d = z_star.norm() - cone.c.dot(out.x_star);
      }
      const double lambda = 0.2 + rng.uniform();
      grad_sum += lambda * (cone.A.transpose() * z_star / z_star.norm() -
                            cone.c);
      p.cones.push_back(std::move(cone));
    }
    for (int i = 0; i < active_linears; ++i) {
      LinearIneq li;
      li.g = unit(n);
      if (li.g.dot(w) > -0.1) {
        const double kappa = (li.g.dot(w) + 0.1) / w.squaredNorm();
        li.g -= kappa * w;
      }
      li.h = li.g.dot(out.x_star);
      const double lambda = 0.2 + rng.uniform();
      grad_sum += lambda * li.g;
      p.linear.push_back(std::move(li));
    }
    if (active_bound) {
      int j_best = -1;
      for (int j = 0; j < n; ++j)
        if (w[j] > 0.05 && (j_best < 0 || w[j] > w[j_best])) j_best = j;
      if (j_best >= 0) {
        p.lower[j_best] = out.x_star[j_best];
        const double lambda = 0.2 + rng.uniform();
        grad_sum[j_best] -= lambda;
      }
    }
    for (int i = 0; i < inactive_cones; ++i) {
      SecondOrderCone cone;
      const int m = 2;
      cone.A = Mat(m, n);
      for (int r = 0; r < m; ++r) cone.A.row(r) = unit(n).transpose();
      cone.b = unit(m);
      cone.c = 0.5 * unit(n);
      cone.d = 0.0;
      const double need = std::max(-cone.margin(out.x_star),
                                   -cone.margin(out.interior));
      cone.d = need + 0.5 + rng.uniform();
      p.cones.push_back(std::move(cone));
    }
    for (int i = 0; i < inactive_linears; ++i) {
      LinearIneq li;
      li.g = unit(n);
      li.h = std::max(li.g.dot(out.x_star), li.g.dot(out.interior)) + 0.5 +
             rng.uniform();
      p.linear.push_back(std::move(li));
    }
    // Bound every variable loosely so the problem is comfortably bounded.
    for (int j = 0; j < n; ++j) {
      const double lb =
          std::min(out.x_star[j], out.interior[j]) - 2.0 - rng.uniform();
      if (!std::isfinite(p.lower[j])) p.lower[j] = lb;
      LinearIneq ub;
      ub.g = Vec::Zero(n);
      ub.g[j] = 1.0;
      ub.h = std::max(out.x_star[j], out.interior[j]) + 2.0 + rng.uniform();
      p.linear.push_back(std::move(ub));
    }

    p.objective = grad_sum;
    if (p.objective.lpNorm<Eigen::Infinity>() < 0.05) continue;
    if (!strictly_feasible(p, out.interior, 1e-6)) continue;
    if (worst_violation(p, out.x_star) > 1e-12) continue;
    out.obj_star = p.objective.dot(out.x_star);
    return out;
  }
}

}  // namespace isac::oracle
