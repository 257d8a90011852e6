#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wulffcap/types.hpp"

namespace wulffcap {

// A Minkowski norm given by its support function F on the unit sphere,
// extended 1-homogeneously to the ambient space. The Wulff shape
// W = {F0(x) = 1} is the convex body whose support function is F; the map
// Phi(z) = F(z) z + grad_S F(z) parametrizes W by its outward normal and
// equals the ambient gradient of the homogeneous extension.
//
// Norms are immutable after construction and safe to share across threads.
class MinkowskiNorm {
 public:
  enum class Family { Isotropic, Ellipsoid, Harmonic, Custom };

  // F(x) = c |x|.
  static MinkowskiNorm isotropic(int ambient_dim, double c = 1.0);

  // F(x) = sqrt(x^T M x), M symmetric positive definite.
  static MinkowskiNorm ellipsoid(const Mat& M);

  // F = c0 + eps * Y on the sphere, Y a low-order harmonic (degree 2 or 3).
  static MinkowskiNorm harmonic(int ambient_dim, double eps, int degree = 2,
                                double c0 = 1.0);

  // F given as a callable on the unit sphere; derivatives by chart-based
  // central differences with step fd_step.
  static MinkowskiNorm custom(int ambient_dim,
                              std::function<double(const Vec&)> sphere_value,
                              double fd_step = 1e-4);

  int ambientDim() const { return dim_; }
  Family family() const { return family_; }
  bool analytic() const { return family_ != Family::Custom; }
  double fdStep() const { return fd_step_; }

  // 1-homogeneous extension and its ambient derivatives. Analytic families
  // accept complex arguments (used for complex-step differentiation of
  // surface quantities); the custom family is real-only.
  template <typename S>
  S value(const VecT<S>& x) const;
  template <typename S>
  VecT<S> gradient(const VecT<S>& x) const;
  template <typename S>
  MatT<S> hessian(const VecT<S>& x) const;

  // Phi(z): requires |z| = 1 to 1e-12.
  Vec cahnHoffman(const Vec& z) const;

  // grad_S F(z) = Phi(z) - F(z) z.
  Vec sphereGradient(const Vec& z) const;

  // A_F(z) = Hess_S F + F g in the orthonormal tangent frame T (columns).
  // Equals the tangential block of the ambient Hessian of the extension.
  Mat aMatrix(const Vec& z, const Mat& T) const;
  Mat aMatrix(const Vec& z) const;  // canonical frame

  double minAEigenvalue(const Vec& z) const;

  // Dual norm F0(xi) = sup_{x != 0} <x, xi>/F(x). Closed form for the
  // isotropic and ellipsoid families, projected Newton maximization on the
  // sphere otherwise (multi-start, dense-grid fallback).
  double dual(const Vec& xi) const;

  // Hard-fails with AdmissibilityError when F <= 0 or A_F fails positive
  // definiteness anywhere on a fixed quasi-uniform node set.
  void validateAdmissible() const;

  const Mat& ellipsoidMatrix() const;
  const Mat& ellipsoidInverse() const;
  double isotropicConstant() const { return c_; }
  double harmonicEps() const { return eps_; }
  int harmonicDegree() const { return degree_; }

  nlohmann::ordered_json toJson() const;
  static MinkowskiNorm fromJson(const nlohmann::ordered_json& j);
  // "isotropic", "isotropic:2.0", "ellipsoid:1,1,4", "harmonic:0.1",
  // "harmonic:0.1:3", or "@path/to/norm.json".
  static MinkowskiNorm fromSpec(const std::string& spec, int ambient_dim);

  std::string describe() const;

 private:
  MinkowskiNorm(Family f, int dim) : family_(f), dim_(dim) {}

  template <typename S>
  S harmonicPoly(const VecT<S>& x) const;
  template <typename S>
  VecT<S> harmonicPolyGrad(const VecT<S>& x) const;
  template <typename S>
  MatT<S> harmonicPolyHess(const VecT<S>& x) const;

  Vec sphereGradientNumeric(const Vec& z) const;
  Mat sphereHessianNumeric(const Vec& z) const;
  double dualByOptimization(const Vec& xi) const;

  Family family_;
  int dim_;
  double c_ = 1.0;                      // isotropic constant / harmonic c0
  Mat M_, Minv_;                        // ellipsoid
  double eps_ = 0.0;                    // harmonic amplitude
  int degree_ = 2;                      // harmonic degree
  std::function<double(const Vec&)> sphere_value_;  // custom
  double fd_step_ = 1e-4;
};

// Wulff shape of radius r0 centered at x0: {x : F0(x - x0) = r0}.
struct WulffShapeSpec {
  MinkowskiNorm norm;
  double r0 = 1.0;
  Vec center;

  WulffShapeSpec(MinkowskiNorm n, double radius, Vec x0);
  // Point of the shape with outward normal z.
  Vec samplePoint(const Vec& z) const;
  // |F0(x - x0) - r0| / r0 for a point supposedly on the shape.
  double membershipResidual(const Vec& x) const;
};

// Quasi-uniform unit vectors: Fibonacci sphere for ambient dim 3, uniform
// angles for dim 2. Deterministic.
std::vector<Vec> quasiUniformSphereNodes(int ambient_dim, int count);

// ---- templated implementations ----

template <typename S>
S MinkowskiNorm::harmonicPoly(const VecT<S>& x) const {
  if (dim_ == 3) {
    if (degree_ == 2) return x[0] * x[0] - x[1] * x[1];
    return x[0] * x[1] * x[2];
  }
  if (degree_ == 2) return x[0] * x[0] - x[1] * x[1];
  return x[0] * x[0] * x[0] - S(3) * x[0] * x[1] * x[1];
}

template <typename S>
VecT<S> MinkowskiNorm::harmonicPolyGrad(const VecT<S>& x) const {
  VecT<S> g = VecT<S>::Zero(dim_);
  if (dim_ == 3) {
    if (degree_ == 2) {
      g[0] = S(2) * x[0];
      g[1] = S(-2) * x[1];
    } else {
      g[0] = x[1] * x[2];
      g[1] = x[0] * x[2];
      g[2] = x[0] * x[1];
    }
    return g;
  }
  if (degree_ == 2) {
    g[0] = S(2) * x[0];
    g[1] = S(-2) * x[1];
  } else {
    g[0] = S(3) * (x[0] * x[0] - x[1] * x[1]);
    g[1] = S(-6) * x[0] * x[1];
  }
  return g;
}

template <typename S>
MatT<S> MinkowskiNorm::harmonicPolyHess(const VecT<S>& x) const {
  MatT<S> h = MatT<S>::Zero(dim_, dim_);
  if (dim_ == 3) {
    if (degree_ == 2) {
      h(0, 0) = S(2);
      h(1, 1) = S(-2);
    } else {
      h(0, 1) = h(1, 0) = x[2];
      h(0, 2) = h(2, 0) = x[1];
      h(1, 2) = h(2, 1) = x[0];
    }
    return h;
  }
  if (degree_ == 2) {
    h(0, 0) = S(2);
    h(1, 1) = S(-2);
  } else {
    h(0, 0) = S(6) * x[0];
    h(0, 1) = h(1, 0) = S(-6) * x[1];
    h(1, 1) = S(-6) * x[0];
  }
  return h;
}

template <typename S>
S MinkowskiNorm::value(const VecT<S>& x) const {
  using std::sqrt;
  switch (family_) {
    case Family::Isotropic:
      return S(c_) * pnorm<S>(x);
    case Family::Ellipsoid: {
      const VecT<S> Mx = M_.cast<S>() * x;
      return sqrt(dotu<S>(x, Mx));
    }
    case Family::Harmonic: {
      const S r = pnorm<S>(x);
      S r1md = r;  // r^(1-d)
      for (int i = 0; i < degree_; ++i) r1md /= r;
      return S(c_) * r + S(eps_) * harmonicPoly<S>(x) * r1md;
    }
    case Family::Custom: {
      if constexpr (std::is_same_v<S, double>) {
        const double r = x.norm();
        if (r == 0.0) return 0.0;
        return r * sphere_value_(x / r);
      } else {
        throw EvaluationError("custom norms do not support complex-step evaluation");
      }
    }
  }
  throw EvaluationError("unreachable norm family");
}

template <typename S>
VecT<S> MinkowskiNorm::gradient(const VecT<S>& x) const {
  switch (family_) {
    case Family::Isotropic:
      return (S(c_) / pnorm<S>(x)) * x;
    case Family::Ellipsoid: {
      const VecT<S> Mx = M_.cast<S>() * x;
      using std::sqrt;
      return Mx / sqrt(dotu<S>(x, Mx));
    }
    case Family::Harmonic: {
      const S r = pnorm<S>(x);
      const int d = degree_;
      S rpow_m1md = S(1);  // r^(-1-d)
      for (int i = 0; i < d + 1; ++i) rpow_m1md /= r;
      const S rpow_1md = rpow_m1md * r * r;  // r^(1-d)
      const S P = harmonicPoly<S>(x);
      const VecT<S> dP = harmonicPolyGrad<S>(x);
      return (S(c_) / r) * x +
             S(eps_) * (S(1 - d) * rpow_m1md * P * x + rpow_1md * dP);
    }
    case Family::Custom: {
      if constexpr (std::is_same_v<S, double>) {
        const Vec z = x / x.norm();
        return value<double>(z) * z + sphereGradientNumeric(z);
      } else {
        throw EvaluationError("custom norms do not support complex-step evaluation");
      }
    }
  }
  throw EvaluationError("unreachable norm family");
}

template <typename S>
MatT<S> MinkowskiNorm::hessian(const VecT<S>& x) const {
  const int N = dim_;
  switch (family_) {
    case Family::Isotropic: {
      const S r = pnorm<S>(x);
      return (S(c_) / r) *
             (MatT<S>::Identity(N, N) - (x * x.transpose()) / (r * r));
    }
    case Family::Ellipsoid: {
      const VecT<S> Mx = M_.cast<S>() * x;
      using std::sqrt;
      const S F = sqrt(dotu<S>(x, Mx));
      return M_.cast<S>() / F - (Mx * Mx.transpose()) / (F * F * F);
    }
    case Family::Harmonic: {
      const S r = pnorm<S>(x);
      const int d = degree_;
      S rpow_m3md = S(1);  // r^(-3-d)
      for (int i = 0; i < d + 3; ++i) rpow_m3md /= r;
      const S rpow_m1md = rpow_m3md * r * r;
      const S rpow_1md = rpow_m1md * r * r;
      const S P = harmonicPoly<S>(x);
      const VecT<S> dP = harmonicPolyGrad<S>(x);
      const MatT<S> d2P = harmonicPolyHess<S>(x);
      MatT<S> H = (S(c_) / r) *
                  (MatT<S>::Identity(N, N) - (x * x.transpose()) / (r * r));
      H += S(eps_) *
           (S((1 - d) * (-1 - d)) * rpow_m3md * P * (x * x.transpose()) +
            S(1 - d) * rpow_m1md *
                (P * MatT<S>::Identity(N, N) + x * dP.transpose() +
                 dP * x.transpose()) +
            rpow_1md * d2P);
      return H;
    }
    case Family::Custom: {
      if constexpr (std::is_same_v<S, double>) {
        const Vec z = x / x.norm();
        // Assemble the ambient Hessian at a unit point from chart data:
        // tangential block = Hess_S F + F g, mixed/radial blocks vanish by
        // homogeneity (D^2F~ z = 0).
        const Mat T = tangentBasis(z);
        const Mat A = sphereHessianNumeric(z) +
                      value<double>(z) * Mat::Identity(N - 1, N - 1);
        return T * A * T.transpose() / x.norm();
      } else {
        throw EvaluationError("custom norms do not support complex-step evaluation");
      }
    }
  }
  throw EvaluationError("unreachable norm family");
}

}  // namespace wulffcap
