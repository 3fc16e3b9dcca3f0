// SPDX-License-Identifier: MIT
// Common scalar/vector aliases, exception types, and small unit helpers
// shared across the library.
#pragma once

// GCC's flow analysis reports spurious maybe-uninitialized warnings from
// Eigen 3.4 internals (e.g. triangular products inside the SVD); silence
// them for the vendored headers only.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
#include <Eigen/Dense>
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace isac {

template <class S>
using VecT = Eigen::Vector<S, Eigen::Dynamic>;
template <class S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using CVecT = Eigen::Vector<std::complex<S>, Eigen::Dynamic>;
template <class S>
using CMatT = Eigen::Matrix<std::complex<S>, Eigen::Dynamic, Eigen::Dynamic>;

using Vec = VecT<double>;
using Mat = MatT<double>;
using CVec = CVecT<double>;
using CMat = CMatT<double>;
using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Invalid user input: malformed files, out-of-range dimensions, bad angles.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested optimisation problem (or scenario) admits no feasible point.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An internal numerical routine failed to meet its own tolerances.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The Fisher information for the requested geometry is singular, so no
// finite error bound exists (e.g. zero power, or a degenerate look angle).
struct SingularFimError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

}  // namespace isac
