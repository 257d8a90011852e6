#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace wulffcap {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Complex = std::complex<double>;
using VecC = Eigen::VectorXcd;
using MatC = Eigen::MatrixXcd;

template <typename S>
using VecT = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <typename S>
using MatT = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

// Bad arguments: out-of-range indices, non-unit vectors, inadmissible omega0.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation produced NaN / failed to converge to a usable value.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The norm is not admissible (A_F fails to be positive definite).
struct AdmissibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Discretization quality violated (frame/symmetry residuals too large).
struct MeshQualityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A surface could not be built from the given data.
struct ConstructionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal consistency check failed (tangency, operator symmetry).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative solver did not converge; carries the final residual.
struct ConvergenceError : std::runtime_error {
  double final_residual;
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), final_residual(residual) {}
};

// Unconjugated squared sum, safe for complex-step arguments.
template <typename S>
S dotu(const VecT<S>& a, const VecT<S>& b) {
  return (a.array() * b.array()).sum();
}

template <typename S>
S pnorm(const VecT<S>& v) {
  using std::sqrt;
  return sqrt(dotu(v, v));
}

// Cross product for dynamic 3-vectors of any scalar.
template <typename S>
VecT<S> cross3(const VecT<S>& a, const VecT<S>& b) {
  VecT<S> c(3);
  c[0] = a[1] * b[2] - a[2] * b[1];
  c[1] = a[2] * b[0] - a[0] * b[2];
  c[2] = a[0] * b[1] - a[1] * b[0];
  return c;
}

// Deterministic orthonormal basis of the tangent space z^perp at a unit
// vector z. Columns span z^perp; ambient dim 2 or 3.
Mat tangentBasis(const Vec& z);

Vec unitAxis(int dim, int axis);

inline double relativeResidual(double lhs, double rhs, double scale_floor = 1e-30) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), scale_floor});
  return std::abs(lhs - rhs) / scale;
}

}  // namespace wulffcap
