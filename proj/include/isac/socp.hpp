// SPDX-License-Identifier: MIT
//
// Dense second-order-cone programming for small problems: maximize a linear
// objective over an intersection of second-order cones, linear inequalities,
// and per-variable lower bounds.
//
// The instances solved here are tiny (tens of variables, a handful of
// constraints), so the method favors robustness and determinism over
// scalability: a log-barrier interior-point scheme with damped Newton
// centering, a fixed x10 barrier schedule, and an explicit phase-I margin
// program that both recovers a strictly interior start from an infeasible
// seed and certifies infeasibility. The barrier engine runs in extended
// precision: near convergence the cone slacks shrink like 1/t, and the
// certifiable stationarity residual floors at machine-epsilon times t, so
// the extra mantissa bits are what make the reported tolerances honest.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "isac/types.hpp"

namespace isac {

// One constraint of the form ||A x + b|| <= c'x + d.
struct SecondOrderCone {
  Mat A;
  Vec b;
  Vec c;
  double d = 0.0;

  // Positive strictly inside the cone, zero on its boundary.
  double margin(const Vec& x) const {
    return c.dot(x) + d - (A * x + b).norm();
  }
};

// g'x <= h.
struct LinearIneq {
  Vec g;
  double h = 0.0;
};

struct SocProgram {
  Vec objective;  // maximize objective . x
  std::vector<SecondOrderCone> cones;
  std::vector<LinearIneq> linear;
  Vec lower;  // per-variable lower bounds; -infinity disables an entry

  int n() const { return static_cast<int>(objective.size()); }

  void validate() const {
    const int nv = n();
    if (nv <= 0) throw ConfigError("socp: empty decision vector");
    if (lower.size() != nv)
      throw ConfigError("socp: bound vector length mismatch");
    for (const auto& cone : cones) {
      if (cone.A.cols() != nv || cone.c.size() != nv ||
          cone.b.size() != cone.A.rows())
        throw ConfigError("socp: cone dimension mismatch");
      if (cone.A.rows() < 1)
        throw ConfigError("socp: cone must have dimension >= 2");
    }
    for (const auto& li : linear)
      if (li.g.size() != nv)
        throw ConfigError("socp: linear constraint dimension mismatch");
  }
};

enum class SolveStatus { optimal, infeasible, max_iters };

inline const char* solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    default: return "max_iters";
  }
}

struct SolveResult {
  Vec x_opt;
  double obj = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  double gap = std::numeric_limits<double>::infinity();
  double kkt_residual = std::numeric_limits<double>::infinity();
  int newton_iters = 0;
};

struct SolveOptions {
  double gap_tol = 1e-8;  // duality-gap target, objective units
  double kkt_tol = 1e-8;  // stationarity target, normalized objective units
  int max_outer = 200;    // barrier-schedule cap
  int max_inner = 60;     // Newton steps per centering
  double t0 = 1.0;        // initial barrier weight (inverse of mu_0 = 1)
  double mu = 10.0;       // barrier-weight growth per outer step
};

// Epigraph encoding of t >= bprime / gamma for gamma > 0 as the cone
// ||[2 sqrt(bprime); gamma - t]|| <= gamma + t over an n-dimensional
// decision vector holding gamma and t at the given indices.
inline SecondOrderCone reciprocal_epigraph_cone(int n, int gamma_index,
                                                int t_index, double bprime) {
  if (bprime < 0.0)
    throw ConfigError("reciprocal_epigraph_cone: negative numerator");
  if (gamma_index < 0 || gamma_index >= n || t_index < 0 || t_index >= n ||
      gamma_index == t_index)
    throw ConfigError("reciprocal_epigraph_cone: bad variable indices");
  SecondOrderCone cone;
  cone.A = Mat::Zero(2, n);
  cone.A(1, gamma_index) = 1.0;
  cone.A(1, t_index) = -1.0;
  cone.b = Vec::Zero(2);
  cone.b[0] = 2.0 * std::sqrt(bprime);
  cone.c = Vec::Zero(n);
  cone.c[gamma_index] = 1.0;
  cone.c[t_index] = 1.0;
  cone.d = 0.0;
  return cone;
}

// Largest constraint violation at x; negative values mean strictly interior.
inline double worst_violation(const SocProgram& p, const Vec& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& cone : p.cones) worst = std::max(worst, -cone.margin(x));
  for (const auto& li : p.linear) worst = std::max(worst, li.g.dot(x) - li.h);
  for (int j = 0; j < p.n(); ++j)
    if (std::isfinite(p.lower[j])) worst = std::max(worst, p.lower[j] - x[j]);
  return worst;
}

inline bool strictly_feasible(const SocProgram& p, const Vec& x,
                              double margin = 0.0) {
  return worst_violation(p, x) < -margin;
}

namespace detail {

using LD = long double;
using VecL = VecT<LD>;
using MatL = MatT<LD>;

struct ConeL {
  MatL A;
  VecL b;
  VecL c;
  LD d;
};

struct ProgL {
  VecL objective;
  std::vector<ConeL> cones;
  std::vector<std::pair<VecL, LD>> linear;  // g'x <= h
  VecL lower;

  int n() const { return static_cast<int>(objective.size()); }
};

inline ProgL widen(const SocProgram& p) {
  ProgL out;
  out.objective = p.objective.cast<LD>();
  out.lower = p.lower.cast<LD>();
  out.cones.reserve(p.cones.size());
  for (const auto& c : p.cones)
    out.cones.push_back(
        {c.A.cast<LD>(), c.b.cast<LD>(), c.c.cast<LD>(), LD(c.d)});
  out.linear.reserve(p.linear.size());
  for (const auto& li : p.linear)
    out.linear.emplace_back(li.g.cast<LD>(), LD(li.h));
  return out;
}

inline LD barrier_nu(const ProgL& p) {
  LD nu = 2.0L * LD(p.cones.size()) + LD(p.linear.size());
  for (int j = 0; j < p.n(); ++j)
    if (std::isfinite(p.lower[j])) nu += 1.0L;
  return nu;
}

// Error-free transforms. A cone slack u^2 - ||z||^2 evaluated in working
// precision carries absolute noise of order eps * u^2, which near the
// boundary (slack orders of magnitude below u^2) dominates the slack itself
// and puts an irreducible floor under the stationarity residual. Carrying
// the evaluation as an unevaluated sum of two working-precision numbers
// removes the cancellation entirely.
inline void two_sum(LD a, LD b, LD& s, LD& e) {
  s = a + b;
  const LD bv = s - a;
  e = (a - (s - bv)) + (b - bv);
}

// Dekker/Veltkamp split-product: p + e == a * b exactly (radix-2,
// round-to-nearest; the split constant matches the 64-bit significand).
inline void two_prod(LD a, LD b, LD& p, LD& e) {
  constexpr LD split = 4294967297.0L;  // 2^32 + 1
  p = a * b;
  const LD ca = split * a;
  const LD a_hi = ca - (ca - a);
  const LD a_lo = a - a_hi;
  const LD cb = split * b;
  const LD b_hi = cb - (cb - b);
  const LD b_lo = b - b_hi;
  e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo;
}

// Compensated accumulator: value() returns hi + lo with the rounding error
// of every addition and product folded into lo.
struct Acc2 {
  LD hi = 0.0L;
  LD lo = 0.0L;
  void add(LD v) {
    LD s, e;
    two_sum(hi, v, s, e);
    hi = s;
    lo += e;
  }
  void add_prod(LD a, LD b) {
    LD p, e;
    two_prod(a, b, p, e);
    add(p);
    lo += e;
  }
  // Accumulate the exact square of a compensated quantity q = qh + ql.
  void add_square_signed(LD qh, LD ql, LD sign) {
    LD p, e;
    two_prod(qh, qh, p, e);
    add(sign * p);
    lo += sign * (e + (2.0L * qh + ql) * ql);
  }
  LD value() const { return hi + lo; }
};

struct BarrierParts {
  LD phi = 0.0L;
  VecL grad;
  MatL hess;
  VecL slacks;  // one entry per constraint, in program order
};

// Log-barrier value/derivatives at x; false when x leaves the open domain.
// Slack values are evaluated with compensated arithmetic (the derivatives
// only need working precision: their relative error stays near eps, while a
// naively evaluated slack loses all of its digits near the boundary).
// A line-search probe only needs the value and the slack vector, so the
// derivative assembly -- by far the dominant cost -- is skipped when
// derivatives == false (grad and hess are then left empty).
inline bool barrier_eval(const ProgL& p, const VecL& x, BarrierParts& out,
                         bool derivatives) {
  const int nv = p.n();
  out.phi = 0.0L;
  if (derivatives) {
    out.grad = VecL::Zero(nv);
    out.hess = MatL::Zero(nv, nv);
  } else {
    out.grad.resize(0);
    out.hess.resize(0, 0);
  }
  int n_bounds = 0;
  for (int j = 0; j < nv; ++j)
    if (std::isfinite(p.lower[j])) ++n_bounds;
  out.slacks.resize(static_cast<Eigen::Index>(p.cones.size()) +
                    static_cast<Eigen::Index>(p.linear.size()) + n_bounds);
  Eigen::Index si = 0;
  for (const auto& cone : p.cones) {
    const Eigen::Index rows = cone.A.rows();
    Acc2 ua;
    ua.add(cone.d);
    for (int j = 0; j < nv; ++j) ua.add_prod(cone.c[j], x[j]);
    const LD u = ua.value();
    Acc2 wa;
    wa.add_square_signed(ua.hi, ua.lo, 1.0L);
    VecL z(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      Acc2 qa;
      qa.add(cone.b[i]);
      for (int j = 0; j < nv; ++j) qa.add_prod(cone.A(i, j), x[j]);
      z[i] = qa.value();
      wa.add_square_signed(qa.hi, qa.lo, -1.0L);
    }
    const LD w = wa.value();
    if (!(u > 0.0L) || !(w > 0.0L)) return false;
    out.slacks[si++] = w;
    out.phi -= std::log(w);
    if (derivatives) {
      const VecL s = cone.A.transpose() * z - u * cone.c;
      out.grad.noalias() += (2.0L / w) * s;
      out.hess.noalias() += (2.0L / w) * (cone.A.transpose() * cone.A -
                                          cone.c * cone.c.transpose());
      out.hess.noalias() += (4.0L / (w * w)) * (s * s.transpose());
    }
  }
  for (const auto& [g, h] : p.linear) {
    Acc2 sa;
    sa.add(h);
    for (int j = 0; j < nv; ++j) sa.add_prod(-g[j], x[j]);
    const LD slack = sa.value();
    if (!(slack > 0.0L)) return false;
    out.slacks[si++] = slack;
    out.phi -= std::log(slack);
    if (derivatives) {
      out.grad.noalias() += g / slack;
      out.hess.noalias() += (g * g.transpose()) / (slack * slack);
    }
  }
  for (int j = 0; j < nv; ++j) {
    if (!std::isfinite(p.lower[j])) continue;
    const LD slack = x[j] - p.lower[j];
    if (!(slack > 0.0L)) return false;
    out.slacks[si++] = slack;
    out.phi -= std::log(slack);
    if (derivatives) {
      out.grad[j] -= 1.0L / slack;
      out.hess(j, j) += 1.0L / (slack * slack);
    }
  }
  return true;
}

inline bool barrier_parts(const ProgL& p, const VecL& x, BarrierParts& out) {
  return barrier_eval(p, x, out, /*derivatives=*/true);
}

// Strict interiority as the barrier engine itself will judge it. The naive
// double-precision margin test can disagree with the compensated slack
// evaluation for points within rounding distance of a cone boundary, so
// every point handed to the engine must pass this check, not that one.
inline bool interior_for_barrier(const ProgL& p, const VecL& x) {
  BarrierParts parts;
  return barrier_parts(p, x, parts);
}

struct CenterOut {
  LD kkt = std::numeric_limits<LD>::infinity();
  int iters = 0;
  bool stalled = false;
};

// Minimize f(x) = -t chat'x + phi(x) from a strictly interior x (in place).
inline CenterOut center(const ProgL& prog, const VecL& chat, LD t, VecL& x,
                        int max_inner, LD kkt_target) {
  CenterOut out;
  BarrierParts parts;
  if (!barrier_parts(prog, x, parts))
    throw NumericalError("socp: centering started outside the domain");
  // Measuring the linear term relative to the entry point keeps the Armijo
  // comparison free of large-magnitude cancellation.
  const VecL x_ref = x;
  LD f = parts.phi;
  // Close to the central path the residual stops decreasing monotonically:
  // a cone slack is a difference of nearly equal quantities, so near the
  // boundary its evaluation -- and with it the measured gradient -- carries
  // cancellation noise, and successive iterates bounce around a noise floor.
  // Remember the iterate with the smallest residual and return that one
  // rather than whichever iterate the budget happened to run out on.
  VecL best_x = x;
  LD best_kkt = std::numeric_limits<LD>::infinity();
  const auto note = [&](const VecL& xc, LD kkt) {
    if (kkt < best_kkt) {
      best_kkt = kkt;
      best_x = xc;
    }
  };
  // Stagnation detector: once the residual is already small, a stretch of
  // iterations without further halving means the iterate is bouncing on the
  // noise floor, so hand the budget back. Large residuals are exempt -- the
  // damped phase of Newton legitimately shrinks them only a little per step.
  LD ref_kkt = std::numeric_limits<LD>::infinity();
  int ref_it = 0;
  for (int it = 0; it < max_inner; ++it) {
    const VecL g = -t * chat + parts.grad;
    const LD kkt = g.template lpNorm<Eigen::Infinity>() / t;
    note(x, kkt);
    if (kkt <= kkt_target) break;
    if (best_kkt <= 0.5L * ref_kkt) {
      ref_kkt = best_kkt;
      ref_it = it;
    } else if (best_kkt <= 1e-4L && it - ref_it >= 10) {
      break;
    }

    // The decision variables live on very different scales (a power share
    // versus an epigraph bound on its reciprocal), so the raw Newton system
    // is ill-conditioned far beyond what the factorization tolerates at
    // large t. Jacobi equilibration -- factoring D H D with D chosen to give
    // a unit diagonal -- restores the attainable step accuracy.
    VecL d = parts.hess.diagonal();
    for (int j = 0; j < d.size(); ++j)
      d[j] = (d[j] > 0.0L) ? 1.0L / std::sqrt(d[j]) : 1.0L;
    VecL step;
    LD gdotp = 0.0L;
    LD ridge = 0.0L;
    for (int attempt = 0; attempt < 24; ++attempt) {
      MatL h = d.asDiagonal() * parts.hess * d.asDiagonal();
      if (ridge > 0.0L) h.diagonal().array() += ridge;
      Eigen::LDLT<MatL> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        step = d.asDiagonal() * ldlt.solve(-d.cwiseProduct(g));
        gdotp = g.dot(step);
        if (std::isfinite(gdotp) && gdotp < 0.0L) break;
      }
      ridge = (ridge == 0.0L) ? LD(2e-18) : ridge * 100.0L;
    }
    if (!(gdotp < 0.0L)) {
      out.stalled = true;
      break;
    }

    // Inside the quadratic-convergence region a damped-step sufficient-
    // decrease test only measures rounding noise, so take plain Newton
    // steps there and backtrack solely to stay in the domain.
    const bool quadratic_phase = (-gdotp / 2.0L <= 1e-12L);
    LD alpha = 1.0L;
    BarrierParts trial;
    bool moved = false;
    while (alpha >= 1e-16L) {
      const VecL xt = x + alpha * step;
      if (barrier_eval(prog, xt, trial, /*derivatives=*/false)) {
        // Fraction-to-boundary rule: a step may approach a constraint but
        // never collapse its slack outright. Without this, a long step can
        // land with a slack many orders of magnitude below the current one
        // -- inside the domain, with a lower objective -- and the blown-up
        // gradient there creeps all following iterations.
        const bool clear_of_boundary =
            (trial.slacks.array() >= LD(0.004L) * parts.slacks.array()).all();
        const LD ft = -t * chat.dot(xt - x_ref) + trial.phi;
        if (clear_of_boundary &&
            (quadratic_phase || ft <= f + 0.25L * alpha * gdotp)) {
          x = xt;
          f = ft;
          moved = true;
          break;
        }
      }
      alpha *= 0.5L;
    }
    ++out.iters;
    if (!moved) {
      out.stalled = true;
      break;
    }
    if (!barrier_parts(prog, x, parts)) {
      out.stalled = true;
      break;
    }
  }
  // The final iterate has not been scored yet when the loop ran out of
  // budget; fold it in, then hand back the best iterate seen.
  const VecL g = -t * chat + parts.grad;
  note(x, g.template lpNorm<Eigen::Infinity>() / t);
  x = best_x;
  out.kkt = best_kkt;
  return out;
}

struct BarrierDrive {
  VecL x;
  double obj = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  double kkt = std::numeric_limits<double>::infinity();
  int newton_iters = 0;
  bool hit_cap = false;
};

// Shared barrier loop: maximizes prog.objective from the strictly feasible
// point x. Stops early once the objective reaches early_exit_obj (used by
// the phase-I margin search).
inline BarrierDrive barrier_maximize(const ProgL& prog, VecL x,
                                     const SolveOptions& opt,
                                     double early_exit_obj) {
  BarrierDrive out;
  const LD c_scale =
      std::max(LD(1), prog.objective.template lpNorm<Eigen::Infinity>());
  const VecL chat = prog.objective / c_scale;
  const LD nu = barrier_nu(prog);
  if (nu == 0.0L) {
    // No constraints: only a zero objective is bounded.
    out.x = std::move(x);
    out.obj = double(prog.objective.dot(out.x));
    const bool bounded = prog.objective.isZero(0.0L);
    out.gap = bounded ? 0.0 : std::numeric_limits<double>::infinity();
    out.kkt = bounded ? 0.0 : std::numeric_limits<double>::infinity();
    out.hit_cap = !bounded;
    return out;
  }

  const LD kkt_target = LD(0.1) * LD(opt.kkt_tol);
  // The certified gap is nu * c_scale / t, so the weight that reaches the
  // gap target exactly is known in advance. A pure geometric schedule can
  // straddle it: one rung leaves the gap slightly above target while the
  // next overshoots tenfold, raising the floor of the achievable
  // stationarity residual (machine epsilon times the weight) past its own
  // tolerance. Inserting that weight as an explicit rung lets both criteria
  // be tested where they are jointly easiest; past it the schedule escalates
  // as usual for instances whose centering only settles at larger weights.
  const LD t_gap = (opt.gap_tol > 0.0)
                       ? LD(1.02) * c_scale * nu / LD(opt.gap_tol)
                       : std::numeric_limits<LD>::infinity();
  LD t = LD(opt.t0);
  bool done = false;
  // The stationarity residual achievable at any one weight is noise-limited
  // near the boundary, so a larger weight is not automatically better. Bank
  // the best residual seen at any weight that already meets the gap target,
  // and stop as soon as the banked certificate satisfies both tolerances.
  bool banked = false;
  VecL bank_x;
  double bank_kkt = std::numeric_limits<double>::infinity();
  double bank_gap = std::numeric_limits<double>::infinity();
  double bank_obj = 0.0;
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    auto c = center(prog, chat, t, x, opt.max_inner, kkt_target);
    out.newton_iters += c.iters;
    out.kkt = double(c.kkt);
    out.gap = double(c_scale * nu / t);
    out.obj = double(prog.objective.dot(x));
    if (out.obj >= early_exit_obj) {
      done = true;
      break;
    }
    if (out.gap <= opt.gap_tol && out.kkt < bank_kkt) {
      banked = true;
      bank_x = x;
      bank_kkt = out.kkt;
      bank_gap = out.gap;
      bank_obj = out.obj;
    }
    if (banked && bank_kkt <= opt.kkt_tol) {
      x = bank_x;
      out.kkt = bank_kkt;
      out.gap = bank_gap;
      out.obj = bank_obj;
      done = true;
      break;
    }
    if (c.stalled && out.kkt > opt.kkt_tol) {
      // Numerically stuck before reaching the targets.
      break;
    }
    if (banked && t >= t_gap && out.kkt > 10.0 * bank_kkt) {
      // Past the gap-certifying weight the only reason to escalate is a
      // better stationarity residual, and its noise floor grows with the
      // weight. A rung markedly worse than the banked certificate means
      // the floor has taken over; further escalation cannot recover.
      break;
    }
    const LD t_next = t * LD(opt.mu);
    t = (t < t_gap && t_next > t_gap) ? t_gap : t_next;
  }
  if (!done && banked && bank_kkt < out.kkt) {
    // Report the best certificate reached rather than the final state.
    x = bank_x;
    out.kkt = bank_kkt;
    out.gap = bank_gap;
    out.obj = bank_obj;
  }
  out.hit_cap = !done;
  out.x = std::move(x);
  return out;
}

}  // namespace detail

// Phase-I margin program: maximize m subject to every constraint of prog
// tightened by m. A positive optimal margin yields a strictly interior
// point; a non-positive one certifies that prog has no interior. Returns
// the interior point, or nothing when infeasible.
inline std::optional<Vec> find_interior_point(const SocProgram& prog,
                                              const Vec& seed,
                                              double target_margin = 1e-3) {
  prog.validate();
  const int nv = prog.n();
  Vec x0 = (seed.size() == nv) ? seed : Vec::Zero(nv);
  const detail::ProgL wide = detail::widen(prog);
  const double v0 = worst_violation(prog, x0);
  // Comfortably interior by the naive margin -- confirmed against the
  // engine's own (compensated) domain test before being trusted.
  if (v0 < -target_margin &&
      detail::interior_for_barrier(wide, x0.cast<detail::LD>()))
    return x0;

  SocProgram aug;
  aug.objective = Vec::Zero(nv + 1);
  aug.objective[nv] = 1.0;
  aug.lower = Vec::Constant(nv + 1, -std::numeric_limits<double>::infinity());
  for (const auto& cone : prog.cones) {
    SecondOrderCone c2;
    c2.A = Mat::Zero(cone.A.rows(), nv + 1);
    c2.A.leftCols(nv) = cone.A;
    c2.b = cone.b;
    c2.c = Vec::Zero(nv + 1);
    c2.c.head(nv) = cone.c;
    c2.c[nv] = -1.0;
    c2.d = cone.d;
    aug.cones.push_back(std::move(c2));
  }
  auto add_linear = [&](const Vec& g, double h) {
    LinearIneq li;
    li.g = Vec::Zero(nv + 1);
    li.g.head(nv) = g;
    li.g[nv] = 1.0;
    li.h = h;
    aug.linear.push_back(std::move(li));
  };
  for (const auto& li : prog.linear) add_linear(li.g, li.h);
  for (int j = 0; j < nv; ++j) {
    if (!std::isfinite(prog.lower[j])) continue;
    Vec g = Vec::Zero(nv);
    g[j] = -1.0;
    add_linear(g, -prog.lower[j]);
  }
  // Cap the margin so the phase-I program stays bounded.
  const double m_cap = std::max(1.0, 4.0 * target_margin);
  LinearIneq cap;
  cap.g = Vec::Zero(nv + 1);
  cap.g[nv] = 1.0;
  cap.h = m_cap;
  aug.linear.push_back(std::move(cap));

  // The margin program inherits every recession direction of the feasible
  // set (epigraph variables, coordinates without bounds), and an unbounded
  // relaxation has no analytic center for the barrier to track: the iterate
  // drifts along the flat direction until the Hessian degenerates. A trust
  // ball around the seed -- deliberately not relaxed by the margin variable
  // -- restores coercivity without excluding nearby interior points, and the
  // radius escalates before infeasibility is declared so a remote interior
  // is not missed.
  double radius = 64.0 * (1.0 + x0.norm());
  for (int attempt = 0; attempt < 3; ++attempt, radius *= 1e3) {
    SocProgram trust = aug;
    SecondOrderCone ball;
    ball.A = Mat::Zero(nv, nv + 1);
    ball.A.topLeftCorner(nv, nv) = Mat::Identity(nv, nv);
    ball.b = -x0;
    ball.c = Vec::Zero(nv + 1);
    ball.d = radius;
    trust.cones.push_back(std::move(ball));

    detail::VecL y0(nv + 1);
    y0.head(nv) = x0.cast<detail::LD>();
    y0[nv] = detail::LD(-v0 - 1.0);  // strictly inside every relaxed constraint

    SolveOptions opt;
    auto drive = detail::barrier_maximize(detail::widen(trust), std::move(y0),
                                          opt,
                                          std::min(target_margin, m_cap / 2.0));
    const double margin = double(drive.x[nv]);
    const Vec interior = drive.x.head(nv).cast<double>();
    // The acceptance check must agree with the barrier engine's own domain
    // test (compensated slacks), not with the naive double-precision margin:
    // a rounded point with a margin near rounding noise can pass the naive
    // test yet sit outside the domain the engine sees.
    if (margin > 0.0 &&
        detail::interior_for_barrier(wide, interior.cast<detail::LD>()))
      return interior;
  }
  return std::nullopt;
}

// Maximize prog.objective over the feasible set. The start is used directly
// when strictly feasible; otherwise a phase-I search recovers an interior
// point or certifies infeasibility. Deterministic given identical inputs.
inline SolveResult solve_socp(const SocProgram& prog, const Vec& start,
                              const SolveOptions& opt = {}) {
  prog.validate();
  Vec x0 = (start.size() == prog.n()) ? start : Vec::Zero(prog.n());
  const detail::ProgL wide = detail::widen(prog);
  if (!detail::interior_for_barrier(wide, x0.cast<detail::LD>())) {
    auto interior = find_interior_point(prog, x0, 1e-6);
    if (!interior) {
      SolveResult res;
      res.status = SolveStatus::infeasible;
      res.x_opt = std::move(x0);
      res.obj = prog.objective.dot(res.x_opt);
      return res;
    }
    x0 = std::move(*interior);
  }
  auto drive = detail::barrier_maximize(wide, x0.cast<detail::LD>(), opt,
                                        std::numeric_limits<double>::infinity());
  SolveResult res;
  res.x_opt = drive.x.cast<double>();
  res.obj = drive.obj;
  res.gap = drive.gap;
  res.kkt_residual = drive.kkt;
  res.newton_iters = drive.newton_iters;
  res.status = (!drive.hit_cap && drive.gap <= opt.gap_tol &&
                drive.kkt <= opt.kkt_tol)
                   ? SolveStatus::optimal
                   : SolveStatus::max_iters;
  return res;
}

}  // namespace isac
