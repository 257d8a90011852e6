#pragma once

#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "wulffcap/surface.hpp"

namespace wulffcap {

// The rescaled Cahn-Hoffman image of +-E_{n+1} with <EF, E_{n+1}> = 1:
//   Phi(E_{n+1})/F(E_{n+1})   for omega0 < 0,
//  -Phi(-E_{n+1})/F(-E_{n+1}) for omega0 > 0,
//   E_{n+1}                   for omega0 = 0 (fixed for determinism).
// Requires omega0 strictly inside (-F(E_{n+1}), F(-E_{n+1})).
Vec eFVector(const MinkowskiNorm& norm, double omega0);

struct CapillaryContext {
  double omega0 = 0.0;
  Vec EF;

  // F(nu) + omega0 <nu, EF>, positive for admissible data (unit nu).
  double weight(const MinkowskiNorm& norm, const Vec& nu) const {
    return norm.value<double>(nu) + omega0 * nu.dot(EF);
  }
};

CapillaryContext makeCapillaryContext(const MinkowskiNorm& norm, double omega0);

// Per-point capillary quantities.
struct CapillaryNodeFields {
  double ubar = 0.0;   // <X,nu> / (F(nu) + omega0 <nu,EF>)
  double denom = 0.0;  // F(nu) + omega0 <nu,EF>
  Vec nuF;             // Phi(nu)
  Vec xi;              // F(nu) X - <X,nu> nuF + omega0(<EF,nu> X^T - <X,nu> EF^T)
};

CapillaryNodeFields capillaryFieldsAt(const MinkowskiNorm& norm,
                                      const CapillaryContext& ctx,
                                      const NodeGeom& g);

// Serializable surface descriptor; realize() turns it into a meshed surface
// with curvature and capillary data at a given refinement level.
struct SurfaceSpec {
  std::string kind = "capillary-wulff";
  // capillary-wulff | perturbed-capillary | sphere-cap | closed-wulff |
  // closed-sphere | closed-ellipsoid | radial-sphere
  int n = 2;
  double r0 = 1.0;
  double omega0 = 0.0;
  double theta = 0.0;  // sphere-cap contact angle; omega0 = -cos(theta)
  double eps = 0.0;
  std::string psi_mode = "height2-cos";
  std::vector<double> shape_diag;  // closed-ellipsoid axes matrix diagonal

  nlohmann::ordered_json toJson() const;
  static SurfaceSpec fromJson(const nlohmann::ordered_json& j);
  std::string describe() const;
};

struct SurfaceData {
  explicit SurfaceData(MinkowskiNorm n) : norm(std::move(n)) {}

  SurfaceSpec spec;
  MinkowskiNorm norm;  // evaluation norm
  CapillaryContext ctx;
  Hypersurface S;
  std::vector<CurvatureData> curv;
  std::vector<CapillaryNodeFields> cap;
  std::vector<CurvatureData> bcurv;
  std::vector<CapillaryNodeFields> bcap;
  bool exact_wulff = false;  // exactly a (capillary) Wulff shape
  double boundary_residual = 0.0;  // max |<Phi(nu),-E_{n+1}> - omega0|

  const Parametrization& par() const { return *S.par; }

  CurvatureData curvatureAtParam(const Vec& u) const;
  CapillaryNodeFields capAtParam(const Vec& u) const;
  double ubarAtParam(const Vec& u) const;
  // Ambient vector P_k(xi) at an arbitrary parameter.
  Vec pkXiAtParam(const Vec& u, int k) const;

  // Quadrature-weighted mean / standard deviation of ubar.
  void ubarStats(double& mean, double& stdev, double& minv, double& maxv) const;
};

// Builds the surface, checks construction invariants (boundary condition
// residual, convexity of perturbed surfaces), and precomputes per-node
// curvature and capillary fields.
SurfaceData realizeSurface(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                           int level);

// Convenience: the norm a spec prefers when none is given explicitly
// (sphere-cap forces an isotropic norm).
MinkowskiNorm defaultNormFor(const SurfaceSpec& spec);

// Finite-difference surface operators along the parametrization, second
// order, one-sided at patch edges. `h` holds one step per parameter axis.
double surfaceDivergenceFD(const Parametrization& par, const Vec& u,
                           const std::function<Vec(const Vec&)>& field,
                           const Vec& h);
Vec surfaceGradientFD(const Parametrization& par, const Vec& u,
                      const std::function<double(const Vec&)>& f, const Vec& h);

// Per-axis node spacing at a refinement level (outer FD step for ladders).
Vec fdStepsForLevel(const Parametrization& par, int level);

}  // namespace wulffcap
