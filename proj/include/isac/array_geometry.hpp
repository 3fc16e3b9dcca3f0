// SPDX-License-Identifier: MIT
// Uniform planar array (UPA) geometry: steering vectors on a half-wavelength
// grid, their angular derivatives, and the closed-form inner-product
// identities those derivatives satisfy.
//
// Conventions used throughout:
//  * theta is azimuth in [-pi, pi], phi is elevation in [-pi/2, pi/2];
//  * element index along each axis is centred, m in {-(n-1)/2, ..., (n-1)/2}
//    (half-integers when n is even), so sum_m m = 0 by construction;
//  * the full UPA response is the Kronecker product a_h kron a_v with the
//    horizontal factor on the left (horizontal-major element ordering).
#pragma once

#include <cmath>
#include <complex>

#include "isac/types.hpp"

namespace isac {

// Rectangular array layout: n_h columns (horizontal) by n_v rows (vertical).
struct UpaSpec {
  int n_h = 1;
  int n_v = 1;
  int count() const { return n_h * n_v; }
  void validate() const {
    if (n_h < 1 || n_v < 1) throw ConfigError("UpaSpec: sizes must be >= 1");
  }
};

template <class S>
struct AnglesT {
  S theta{};  // azimuth [rad]
  S phi{};    // elevation [rad]
};
using Angles = AnglesT<double>;

// Centred element offsets for an n-element axis: m - (n-1)/2.
// The squared norm is n(n^2-1)/12.
template <class S = double>
VecT<S> element_offsets(int n) {
  VecT<S> u(n);
  const S shift = S(n - 1) / S(2);
  for (int i = 0; i < n; ++i) u[i] = S(i) - shift;
  return u;
}

// One-axis steering factor exp(j*pi*m*slope) over centred offsets m.
template <class S>
CVecT<S> steering_axis(int n, S slope) {
  const VecT<S> u = element_offsets<S>(n);
  CVecT<S> a(n);
  const S w = S(pi) * slope;
  for (int i = 0; i < n; ++i) {
    const S ph = w * u[i];
    a[i] = std::complex<S>(std::cos(ph), std::sin(ph));
  }
  return a;
}

namespace detail {
// kron(x, y) with x-major ordering: result[i*len(y)+j] = x[i]*y[j].
template <class S>
CVecT<S> kron(const CVecT<S>& x, const CVecT<S>& y) {
  CVecT<S> out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out.segment(i * y.size(), y.size()) = x[i] * y;
  return out;
}
}  // namespace detail

// Full UPA steering vector a(theta, phi) = a_h kron a_v, where the
// horizontal phase slope is sin(theta)sin(phi) and the vertical slope is
// cos(phi).  Every entry has unit modulus, so ||a||^2 = n_h*n_v.
template <class S>
CVecT<S> steering(const UpaSpec& upa, const AnglesT<S>& ang) {
  const CVecT<S> ah =
      steering_axis<S>(upa.n_h, std::sin(ang.theta) * std::sin(ang.phi));
  const CVecT<S> av = steering_axis<S>(upa.n_v, std::cos(ang.phi));
  return detail::kron(ah, av);
}

enum class AngleAxis { theta, phi };

// Analytic derivative of the steering vector with respect to azimuth or
// elevation.  Both derivatives are orthogonal to a(theta, phi) because the
// centred offsets sum to zero.
template <class S>
CVecT<S> steering_derivative(const UpaSpec& upa, const AnglesT<S>& ang,
                             AngleAxis axis) {
  using C = std::complex<S>;
  const S st = std::sin(ang.theta), ct = std::cos(ang.theta);
  const S sp = std::sin(ang.phi), cp = std::cos(ang.phi);
  const CVecT<S> ah = steering_axis<S>(upa.n_h, st * sp);
  const CVecT<S> av = steering_axis<S>(upa.n_v, cp);
  const VecT<S> uh = element_offsets<S>(upa.n_h);
  const VecT<S> uv = element_offsets<S>(upa.n_v);

  const C j(S(0), S(1));
  if (axis == AngleAxis::theta) {
    // d/dtheta: only the horizontal slope sin(theta)sin(phi) depends on it.
    CVecT<S> dh = (j * S(pi) * ct * sp) * uh.template cast<C>().cwiseProduct(ah);
    return detail::kron(dh, av);
  }
  // d/dphi: both slopes depend on elevation.
  CVecT<S> dh = (j * S(pi) * st * cp) * uh.template cast<C>().cwiseProduct(ah);
  CVecT<S> dv = (-j * S(pi) * sp) * uv.template cast<C>().cwiseProduct(av);
  return detail::kron(dh, av) + detail::kron(ah, dv);
}

// Closed-form values of the derivative inner products for one array:
//   norm2_theta = ||da/dtheta||^2, norm2_phi = ||da/dphi||^2,
//   cross = Re{(da/dtheta)^H (da/dphi)}  (the product is real-valued).
template <class S>
struct SteeringIdentities {
  S norm2_theta{};
  S norm2_phi{};
  S cross{};
};

template <class S>
SteeringIdentities<S> steering_identities(const UpaSpec& upa,
                                          const AnglesT<S>& ang) {
  const S st = std::sin(ang.theta), ct = std::cos(ang.theta);
  const S sp = std::sin(ang.phi), cp = std::cos(ang.phi);
  const S n = S(upa.count());
  const S nh2 = S(upa.n_h) * S(upa.n_h);
  const S nv2 = S(upa.n_v) * S(upa.n_v);
  const S pi2 = S(pi) * S(pi);
  SteeringIdentities<S> out;
  out.norm2_theta = n * (nh2 - 1) / S(12) * pi2 * ct * ct * sp * sp;
  // The horizontal factor contributes (n_h^2-1) sin^2(theta) cos^2(phi) and
  // the vertical factor contributes (n_v^2-1) sin^2(phi); they add because
  // the mixed Kronecker term vanishes (centred offsets sum to zero).
  out.norm2_phi =
      n / S(12) * pi2 * ((nh2 - 1) * st * st * cp * cp + (nv2 - 1) * sp * sp);
  out.cross = n * (nh2 - 1) / S(12) * pi2 * sp * st * cp * ct;
  return out;
}

// The six derivative inner products needed by the sensing error bounds:
// the three identities for the transmit array and the three for the
// receive array, all at the same look angle.
template <class S>
struct DerivativeIdentitySet {
  SteeringIdentities<S> tx;
  SteeringIdentities<S> rx;
};

template <class S>
DerivativeIdentitySet<S> derivative_identities(const UpaSpec& tx,
                                               const UpaSpec& rx,
                                               const AnglesT<S>& ang) {
  return {steering_identities<S>(tx, ang), steering_identities<S>(rx, ang)};
}

}  // namespace isac
