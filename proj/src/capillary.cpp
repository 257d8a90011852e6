#include "wulffcap/capillary.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace wulffcap {

using json = nlohmann::ordered_json;

Vec eFVector(const MinkowskiNorm& norm, double omega0) {
  const int N = norm.ambientDim();
  const Vec e = unitAxis(N, N - 1);
  const double lo = -norm.value<double>(e);
  const double hi = norm.value<double>((-e).eval());
  if (!(omega0 > lo && omega0 < hi))
    throw DomainError("omega0 = " + std::to_string(omega0) +
                      " outside the admissible open interval (" +
                      std::to_string(lo) + ", " + std::to_string(hi) + ")");
  if (omega0 == 0.0) return e;
  if (omega0 < 0.0) return norm.cahnHoffman(e) / norm.value<double>(e);
  return -norm.cahnHoffman((-e).eval()) / norm.value<double>((-e).eval());
}

CapillaryContext makeCapillaryContext(const MinkowskiNorm& norm, double omega0) {
  CapillaryContext ctx;
  ctx.omega0 = omega0;
  ctx.EF = eFVector(norm, omega0);
  const int N = norm.ambientDim();
  if (std::abs(ctx.EF[N - 1] - 1.0) > 1e-12)
    throw ConsistencyError("<EF, E_{n+1}> != 1");
  return ctx;
}

CapillaryNodeFields capillaryFieldsAt(const MinkowskiNorm& norm,
                                      const CapillaryContext& ctx,
                                      const NodeGeom& g) {
  CapillaryNodeFields f;
  const Vec nu = g.nu / g.nu.norm();
  const double F = norm.value<double>(nu);
  const double Xnu = g.X.dot(nu);
  f.denom = F + ctx.omega0 * nu.dot(ctx.EF);
  if (f.denom <= 0.0)
    throw ConsistencyError(
        "capillary weight F(nu) + omega0 <nu,EF> is not positive");
  f.ubar = Xnu / f.denom;
  f.nuF = norm.cahnHoffman(nu);
  const Vec Xt = g.X - Xnu * nu;
  const Vec EFt = ctx.EF - ctx.EF.dot(nu) * nu;
  f.xi = F * g.X - Xnu * f.nuF +
         ctx.omega0 * (ctx.EF.dot(nu) * Xt - Xnu * EFt);
  const double scale = std::max(1.0, f.xi.norm() + g.X.norm());
  if (std::abs(f.xi.dot(nu)) > 1e-10 * scale)
    throw ConsistencyError("xi is not tangent to the surface");
  return f;
}

nlohmann::ordered_json SurfaceSpec::toJson() const {
  json j;
  j["kind"] = kind;
  j["n"] = n;
  j["r0"] = r0;
  if (kind == "sphere-cap")
    j["theta"] = theta;
  else if (kind == "capillary-wulff" || kind == "perturbed-capillary")
    j["omega0"] = omega0;
  if (kind == "perturbed-capillary") {
    j["eps"] = eps;
    j["psi_mode"] = psi_mode;
  }
  if (kind == "closed-ellipsoid") j["shape_diag"] = shape_diag;
  return j;
}

SurfaceSpec SurfaceSpec::fromJson(const nlohmann::ordered_json& j) {
  SurfaceSpec s;
  s.kind = j.value("kind", "capillary-wulff");
  s.n = j.value("n", 2);
  s.r0 = j.value("r0", 1.0);
  s.omega0 = j.value("omega0", 0.0);
  s.theta = j.value("theta", 0.0);
  s.eps = j.value("eps", 0.0);
  s.psi_mode = j.value("psi_mode", "height2-cos");
  if (j.contains("shape_diag"))
    s.shape_diag = j.at("shape_diag").get<std::vector<double>>();
  return s;
}

std::string SurfaceSpec::describe() const {
  std::string s = kind + "(n=" + std::to_string(n) + ",r0=" + std::to_string(r0);
  if (kind == "sphere-cap") s += ",theta=" + std::to_string(theta);
  if (kind == "capillary-wulff" || kind == "perturbed-capillary")
    s += ",omega0=" + std::to_string(omega0);
  if (kind == "perturbed-capillary")
    s += ",eps=" + std::to_string(eps) + ",psi=" + psi_mode;
  return s + ")";
}

MinkowskiNorm defaultNormFor(const SurfaceSpec& spec) {
  return MinkowskiNorm::isotropic(spec.n + 1, 1.0);
}

SurfaceData realizeSurface(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                           int level) {
  if (norm.ambientDim() != spec.n + 1)
    throw DomainError("norm dimension does not match the surface spec");
  SurfaceData D(norm);
  D.spec = spec;
  const int N = spec.n + 1;

  std::shared_ptr<const Parametrization> par;
  bool capillary = false;
  if (spec.kind == "capillary-wulff" || spec.kind == "perturbed-capillary") {
    const double eps = (spec.kind == "capillary-wulff") ? 0.0 : spec.eps;
    par = makeCapillaryWulffPatch(norm, spec.r0, spec.omega0, eps, spec.psi_mode);
    D.ctx = makeCapillaryContext(norm, spec.omega0);
    capillary = true;
    D.exact_wulff = (eps == 0.0);
  } else if (spec.kind == "sphere-cap") {
    if (norm.family() != MinkowskiNorm::Family::Isotropic)
      throw DomainError("sphere-cap requires an isotropic norm");
    if (!(spec.theta > 0.0 && spec.theta < std::numbers::pi))
      throw DomainError("sphere-cap angle must lie in (0, pi)");
    const double omega0 = -std::cos(spec.theta);
    par = makeCapillaryWulffPatch(norm, spec.r0, omega0, spec.eps, spec.psi_mode);
    D.ctx = makeCapillaryContext(norm, omega0);
    capillary = true;
    D.exact_wulff = (spec.eps == 0.0);
  } else if (spec.kind == "closed-wulff") {
    par = makeClosedGaussSurface(norm, spec.r0);
    D.ctx.omega0 = 0.0;
    D.ctx.EF = unitAxis(N, N - 1);
    D.exact_wulff = true;
  } else if (spec.kind == "closed-sphere") {
    par = makeClosedGaussSurface(MinkowskiNorm::isotropic(N, 1.0), spec.r0);
    D.ctx.omega0 = 0.0;
    D.ctx.EF = unitAxis(N, N - 1);
    D.exact_wulff = (norm.family() == MinkowskiNorm::Family::Isotropic);
  } else if (spec.kind == "closed-ellipsoid") {
    if (static_cast<int>(spec.shape_diag.size()) != N)
      throw DomainError("closed-ellipsoid needs " + std::to_string(N) +
                        " diagonal entries");
    Mat M = Mat::Zero(N, N);
    for (int i = 0; i < N; ++i) M(i, i) = spec.shape_diag[i];
    par = makeClosedGaussSurface(MinkowskiNorm::ellipsoid(M), spec.r0);
    D.ctx.omega0 = 0.0;
    D.ctx.EF = unitAxis(N, N - 1);
  } else if (spec.kind == "radial-sphere") {
    par = makeRadialSphere(N, spec.r0);
    D.ctx.omega0 = 0.0;
    D.ctx.EF = unitAxis(N, N - 1);
    D.exact_wulff = (norm.family() == MinkowskiNorm::Family::Isotropic);
  } else {
    throw DomainError("unknown surface kind: " + spec.kind);
  }

  D.S = buildHypersurface(par, level);

  D.curv.reserve(D.S.node.size());
  D.cap.reserve(D.S.node.size());
  for (size_t i = 0; i < D.S.node.size(); ++i) {
    D.curv.push_back(curvatureAt(*par, norm, D.S.u[i], &D.S.node[i]));
    D.cap.push_back(capillaryFieldsAt(norm, D.ctx, D.S.node[i]));
    if (spec.kind == "perturbed-capillary" && D.curv.back().kappaF.minCoeff() <= 0.0)
      throw ConstructionError(
          "perturbation too large: anisotropic convexity lost (eps=" +
          std::to_string(spec.eps) + ")");
  }
  for (size_t i = 0; i < D.S.bnode.size(); ++i) {
    D.bcurv.push_back(curvatureAt(*par, norm, D.S.bu[i], &D.S.bnode[i]));
    D.bcap.push_back(capillaryFieldsAt(norm, D.ctx, D.S.bnode[i]));
  }

  if (capillary) {
    double res = 0.0;
    for (size_t i = 0; i < D.S.bnode.size(); ++i) {
      const double w = -D.bcap[i].nuF[N - 1];  // <Phi(nu), -E_{n+1}>
      res = std::max(res, std::abs(w - D.ctx.omega0));
    }
    D.boundary_residual = res;
    if (res > 1e-9)
      throw MeshQualityError("capillary boundary condition residual " +
                             std::to_string(res));
  }
  return D;
}

CurvatureData SurfaceData::curvatureAtParam(const Vec& u) const {
  return curvatureAt(par(), norm, u);
}

CapillaryNodeFields SurfaceData::capAtParam(const Vec& u) const {
  const NodeGeom g = makeNodeGeom(par().basic(u), S.n);
  return capillaryFieldsAt(norm, ctx, g);
}

double SurfaceData::ubarAtParam(const Vec& u) const {
  return capAtParam(u).ubar;
}

Vec SurfaceData::pkXiAtParam(const Vec& u, int k) const {
  const NodeGeom g = makeNodeGeom(par().basic(u), S.n);
  const CurvatureData c = curvatureAt(par(), norm, u, &g);
  const CapillaryNodeFields f = capillaryFieldsAt(norm, ctx, g);
  const Vec xi_coords = g.frame.transpose() * f.xi;
  return g.frame * (c.P[k] * xi_coords);
}

void SurfaceData::ubarStats(double& mean, double& stdev, double& minv,
                            double& maxv) const {
  double wsum = 0.0, s1 = 0.0;
  minv = std::numeric_limits<double>::infinity();
  maxv = -minv;
  for (size_t i = 0; i < cap.size(); ++i) {
    wsum += S.w[i];
    s1 += S.w[i] * cap[i].ubar;
    minv = std::min(minv, cap[i].ubar);
    maxv = std::max(maxv, cap[i].ubar);
  }
  mean = s1 / wsum;
  double s2 = 0.0;
  for (size_t i = 0; i < cap.size(); ++i) {
    const double d = cap[i].ubar - mean;
    s2 += S.w[i] * d * d;
  }
  stdev = std::sqrt(s2 / wsum);
}

namespace {

double fdDeriv1(const std::function<double(double)>& f, double x, double h,
                double lo, double hi, bool periodic) {
  if (periodic || (x + h <= hi && x - h >= lo))
    return (f(x + h) - f(x - h)) / (2.0 * h);
  if (x + h > hi)
    return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h);
  return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
}

Vec fdDerivVec(const std::function<Vec(double)>& f, double x, double h,
               double lo, double hi, bool periodic) {
  if (periodic || (x + h <= hi && x - h >= lo))
    return (f(x + h) - f(x - h)) / (2.0 * h);
  if (x + h > hi)
    return (3.0 * f(x) - 4.0 * f(x - h) + f(x - 2.0 * h)) / (2.0 * h);
  return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h);
}

}  // namespace

double surfaceDivergenceFD(const Parametrization& par, const Vec& u,
                           const std::function<Vec(const Vec&)>& field,
                           const Vec& h) {
  const int n = par.surfaceDim();
  const NodeGeom g = makeNodeGeom(par.basic(u), n);
  Mat dVdu(n + 1, n);
  for (int axis = 0; axis < n; ++axis) {
    const auto range = par.axisRange(axis);
    auto fa = [&](double x) {
      Vec us = u;
      us[axis] = x;
      return field(us);
    };
    dVdu.col(axis) = fdDerivVec(fa, u[axis], h[axis], range[0], range[1],
                                par.axisPeriodic(axis));
  }
  const Mat G = g.Xu.transpose() * g.Xu;
  const Mat coef = G.ldlt().solve(g.Xu.transpose() * g.frame);
  double div = 0.0;
  for (int j = 0; j < n; ++j) div += g.frame.col(j).dot(dVdu * coef.col(j));
  return div;
}

Vec surfaceGradientFD(const Parametrization& par, const Vec& u,
                      const std::function<double(const Vec&)>& f, const Vec& h) {
  const int n = par.surfaceDim();
  const NodeGeom g = makeNodeGeom(par.basic(u), n);
  Vec dfdu(n);
  for (int axis = 0; axis < n; ++axis) {
    const auto range = par.axisRange(axis);
    auto fa = [&](double x) {
      Vec us = u;
      us[axis] = x;
      return f(us);
    };
    dfdu[axis] = fdDeriv1(fa, u[axis], h[axis], range[0], range[1],
                          par.axisPeriodic(axis));
  }
  const Mat G = g.Xu.transpose() * g.Xu;
  const Mat coef = G.ldlt().solve(g.Xu.transpose() * g.frame);
  Vec grad = Vec::Zero(n + 1);
  for (int j = 0; j < n; ++j) grad += (dfdu.dot(coef.col(j))) * g.frame.col(j);
  return grad;
}

Vec fdStepsForLevel(const Parametrization& par, int level) {
  const int n = par.surfaceDim();
  Vec h(n);
  if (n == 2) {
    const auto r0 = par.axisRange(0);
    const auto r1 = par.axisRange(1);
    h[0] = (r0[1] - r0[0]) / LevelScheme::meridianPoints(level);
    h[1] = (r1[1] - r1[0]) / LevelScheme::azimuthPoints(level);
  } else {
    const auto r = par.axisRange(0);
    h[0] = (r[1] - r[0]) /
           (LevelScheme::curvePanels(level) * LevelScheme::curvePointsPerPanel);
  }
  return h;
}

}  // namespace wulffcap
