#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wulffcap/norm.hpp"
#include "wulffcap/quadrature.hpp"
#include "wulffcap/types.hpp"

namespace wulffcap {

// Geometry of one surface point.
struct NodeGeom {
  Vec X;      // position
  Mat Xu;     // (n+1) x n parametrization partials
  Mat frame;  // (n+1) x n orthonormal tangent frame (Gram-Schmidt of Xu)
  Vec nu;     // outward unit normal
  double jac = 0.0;  // area element |X_s x X_phi| resp. |X'|
};

template <typename S>
struct BasicGeom {
  VecT<S> X;
  MatT<S> Xu;
  VecT<S> nu;
};

// A smooth parametrized hypersurface patch. Evaluable at arbitrary
// parameters; immutable and thread-safe after construction.
class Parametrization {
 public:
  virtual ~Parametrization() = default;

  virtual int surfaceDim() const = 0;  // n (1 or 2)
  int ambientDim() const { return surfaceDim() + 1; }
  virtual bool closedSurface() const = 0;
  virtual Eigen::Vector2d axisRange(int axis) const = 0;
  virtual bool axisPeriodic(int axis) const = 0;

  virtual BasicGeom<double> basic(const Vec& u) const = 0;
  // Complex-step capable parametrizations evaluate along complexified
  // parameters; used to differentiate the normal to machine precision.
  virtual bool complexStepSafe() const = 0;
  virtual BasicGeom<Complex> basicComplex(const VecC& u) const = 0;

  // Weingarten matrix in the node frame when a closed form exists.
  virtual std::optional<Mat> analyticWeingarten(const Vec& u,
                                                const NodeGeom& g) const {
    (void)u;
    (void)g;
    return std::nullopt;
  }

  virtual std::string describe() const = 0;
};

NodeGeom makeNodeGeom(const BasicGeom<double>& b, int n);

// Capillary Wulff patch X(z) = (r0 + eps psi(z)) Phi(z) + r0 omega0 EF over
// the cap domain {<X0(z), E_{n+1}> >= 0}, Gauss-map parametrized (the base
// surface has normal z). The bump psi and its first derivatives vanish on
// the boundary, so the boundary curve, its tangent planes, and the capillary
// condition are preserved exactly for every eps.
std::shared_ptr<const Parametrization> makeCapillaryWulffPatch(
    const MinkowskiNorm& norm, double r0, double omega0, double eps = 0.0,
    const std::string& psi_mode = "height2-cos");

// Closed Wulff shape of a shape norm G: X(z) = r0 Phi_G(z) (+ center).
std::shared_ptr<const Parametrization> makeClosedGaussSurface(
    const MinkowskiNorm& shape_norm, double r0, Vec center = Vec());

// Radial graph X = rho(z) z over the full sphere. Profiles: constant radius
// or ellipsoid-radial rho(z) = (z^T B z)^{-1/2}.
std::shared_ptr<const Parametrization> makeRadialSphere(int ambient_dim,
                                                        double radius);
std::shared_ptr<const Parametrization> makeRadialEllipsoid(const Mat& B);

// Quadrature-meshed surface: interior nodes with weights, boundary nodes
// with 1-D weights and outward co-normals.
struct Hypersurface {
  std::shared_ptr<const Parametrization> par;
  int level = 0;
  int n = 2;
  bool closed = false;

  std::vector<Vec> u;
  std::vector<NodeGeom> node;
  std::vector<double> w;

  std::vector<Vec> bu;
  std::vector<NodeGeom> bnode;
  std::vector<double> bw;
  std::vector<Vec> mu;    // outward unit co-normal
  std::vector<Vec> btau;  // boundary tangent (n=2), empty for n=1

  int nodeCount() const { return static_cast<int>(node.size()); }
  int boundaryCount() const { return static_cast<int>(bnode.size()); }
  double area() const;
  double boundaryLength() const;
};

Hypersurface buildHypersurface(std::shared_ptr<const Parametrization> par,
                               int level);

// Sum of w_i f(i) in fixed node order with compensated accumulation.
double integrate(const Hypersurface& S, const std::function<double(int)>& f);
double integrate(const Hypersurface& S, const std::vector<double>& f);
double boundaryIntegrate(const Hypersurface& S,
                         const std::function<double(int)>& f);

// Anisotropic curvature data at one point.
struct CurvatureData {
  Mat dnu;     // Weingarten matrix, symmetrized, node frame
  Mat SF;      // A_F dnu
  Vec kappaF;  // anisotropic principal curvatures, ascending
  Vec sigma;   // sigma_0..sigma_n of kappaF
  Vec H;       // H_k = sigma_k / binom(n,k)
  std::vector<Mat> P;  // Newton operators P_0..P_n
  double dnu_asym = 0.0;
  double trace_dnu = 0.0;  // tr of the (isotropic) Weingarten matrix
};

double binomial(int n, int k);
Vec elementarySymmetric(const Vec& kappa);           // sigma_0..sigma_n
Vec normalizedSymmetric(const Vec& sigma, int n);    // H_0..H_n
std::vector<Mat> newtonOperators(const Mat& SF, const Vec& sigma);

// dnu at a point: analytic when the parametrization provides it, otherwise
// complex-step differentiation of the normal (machine precision), falling
// back to real central differences for non-analytic data.
Mat weingartenAt(const Parametrization& par, const Vec& u, const NodeGeom& g,
                 double* asym_out = nullptr);

CurvatureData curvatureAt(const Parametrization& par, const MinkowskiNorm& norm,
                          const Vec& u, const NodeGeom* pre = nullptr);

}  // namespace wulffcap
