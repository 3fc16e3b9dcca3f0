// SPDX-License-Identifier: MIT
// Independent numerical cross-checks for the array-geometry module:
// central finite differences for steering derivatives and brute-force
// inner products for the closed-form identity values.
#pragma once

#include "isac/array_geometry.hpp"
#include "isac/types.hpp"

namespace isac::oracle {

// Central finite difference of the steering vector along one angle axis.
inline CVec steering_derivative_fd(const UpaSpec& upa, const Angles& ang,
                                   AngleAxis axis, double step = 1e-6) {
  Angles lo = ang, hi = ang;
  if (axis == AngleAxis::theta) {
    lo.theta -= step;
    hi.theta += step;
  } else {
    lo.phi -= step;
    hi.phi += step;
  }
  return (steering(upa, hi) - steering(upa, lo)) / (2.0 * step);
}

// Identity values recomputed from explicit derivative vectors rather than
// from the closed forms.
inline SteeringIdentities<double> steering_identities_explicit(
    const UpaSpec& upa, const Angles& ang) {
  const CVec dt = steering_derivative(upa, ang, AngleAxis::theta);
  const CVec dp = steering_derivative(upa, ang, AngleAxis::phi);
  SteeringIdentities<double> out;
  out.norm2_theta = dt.squaredNorm();
  out.norm2_phi = dp.squaredNorm();
  out.cross = dt.dot(dp).real();  // Eigen's dot conjugates the first factor
  return out;
}

}  // namespace isac::oracle
