#include "wulffcap/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace wulffcap {

using json = nlohmann::ordered_json;

namespace {

json runConfig(const CheckRun& run) {
  json j;
  j["level"] = run.level;
  if (!run.ladder_levels.empty()) j["ladder_levels"] = run.ladder_levels;
  j["rel_tol"] = run.rel_tol;
  j["seed"] = run.seed;
  return j;
}

json surfaceConfig(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                   const CheckRun& run) {
  json j;
  j["surface"] = spec.toJson();
  j["norm"] = norm.toJson();
  j["run"] = runConfig(run);
  return j;
}

std::vector<int> levelsFor(const CheckRun& run) {
  if (run.hasLadder()) return run.ladder_levels;
  return {run.level};
}

double levelH(int level) { return std::pow(2.0, -level); }

void finishLadder(CheckReport& rep, const CheckRun& run, double order_min) {
  if (rep.ladder.size() < 2) return;
  rep.has_ladder = true;
  std::vector<double> hs, errs;
  for (const auto& p : rep.ladder) {
    hs.push_back(levelH(p.level));
    errs.push_back(p.error);
  }
  const ConvergenceFit fit =
      fitConvergenceOrder(hs, errs, run.policy.exact_floor);
  rep.fitted_order = fit.exact ? std::numeric_limits<double>::infinity()
                               : fit.order;
  rep.ladder_exact = fit.exact;
  rep.details["order_required"] = order_min;
}

// Ambient gradient of ubar from the analytic identity
// grad ubar = (F+omega0<EF,nu>)^{-2} dnu(xi).
Vec gradUbarAnalytic(const NodeGeom& g, const CurvatureData& c,
                     const CapillaryNodeFields& f) {
  const Vec xi_f = g.frame.transpose() * f.xi;
  return (g.frame * (c.dnu * xi_f)) / (f.denom * f.denom);
}

void verifyMonotonicityTag(const WeightFunction& f, double lo, double hi) {
  if (f.monotonicity == 0) return;
  const int samples = 101;
  for (int i = 0; i < samples; ++i) {
    const double u = lo + (hi - lo) * i / (samples - 1);
    const double d = f.fprime(u);
    if (f.monotonicity > 0 && d < -1e-12)
      throw DomainError("weight function " + f.name +
                        " is tagged nondecreasing but f' < 0 on the ubar range");
    if (f.monotonicity < 0 && d > 1e-12)
      throw DomainError("weight function " + f.name +
                        " is tagged nonincreasing but f' > 0 on the ubar range");
  }
}

struct IdentitySides {
  double I1 = 0.0;  // int f H_k (F + omega0 <nu,EF>)
  double I2 = 0.0;  // int f H_{k+1} <X,nu>
  double rhs = 0.0; // -1/((n-k) binom) int <grad f, P_k(xi)>
  double scale = 0.0;
};

IdentitySides identitySides(const SurfaceData& D, const WeightFunction& f,
                            int k) {
  const int n = D.S.n;
  IdentitySides out;
  out.I1 = integrate(D.S, [&](int i) {
    return f.f(D.cap[i].ubar) * D.curv[i].H[k] * D.cap[i].denom;
  });
  out.I2 = integrate(D.S, [&](int i) {
    return f.f(D.cap[i].ubar) * D.curv[i].H[k + 1] * D.S.node[i].X.dot(D.S.node[i].nu);
  });
  const double coef = 1.0 / ((n - k) * binomial(n, k));
  out.rhs = -coef * integrate(D.S, [&](int i) {
    const NodeGeom& g = D.S.node[i];
    const CurvatureData& c = D.curv[i];
    const CapillaryNodeFields& cf = D.cap[i];
    const Vec xi_f = g.frame.transpose() * cf.xi;
    const Vec gradf_f =
        (f.fprime(cf.ubar) / (cf.denom * cf.denom)) * (c.dnu * xi_f);
    return gradf_f.dot(c.P[k] * xi_f);
  });
  out.scale = std::max({std::abs(out.I1), std::abs(out.I2), std::abs(out.rhs), 1e-30});
  return out;
}

}  // namespace

WeightFunction WeightFunction::byName(const std::string& name) {
  WeightFunction w;
  w.name = name;
  if (name == "const") {
    w.f = [](double) { return 1.0; };
    w.fprime = [](double) { return 0.0; };
    w.monotonicity = 0;
    return w;
  }
  if (name == "ubar") {
    w.f = [](double u) { return u; };
    w.fprime = [](double) { return 1.0; };
    w.monotonicity = 1;
    return w;
  }
  if (name == "ubar2") {
    w.f = [](double u) { return u * u; };
    w.fprime = [](double u) { return 2.0 * u; };
    w.monotonicity = 1;
    return w;
  }
  if (name == "exp-neg-ubar") {
    w.f = [](double u) { return std::exp(-u); };
    w.fprime = [](double u) { return -std::exp(-u); };
    w.monotonicity = -1;
    return w;
  }
  if (name == "hinge") {
    const double c = 1.0, s = 0.05;
    w.f = [c, s](double u) {
      const double x = (u - c) / s;
      if (x > 30.0) return u - c;
      return s * std::log1p(std::exp(x));
    };
    w.fprime = [c, s](double u) {
      const double x = (u - c) / s;
      if (x > 30.0) return 1.0;
      if (x < -30.0) return std::exp(x);
      return 1.0 / (1.0 + std::exp(-x));
    };
    w.monotonicity = 1;
    return w;
  }
  throw DomainError("unknown weight function: " + name);
}

std::vector<std::string> WeightFunction::catalogNames() {
  return {"const", "ubar", "ubar2", "exp-neg-ubar", "hinge"};
}

json CheckReport::toJson() const {
  json j;
  j["schema"] = "wulffcap-report/1";
  j["id"] = id;
  j["instance"] = instance;
  j["config"] = config;
  j["lhs"] = lhs;
  j["rhs"] = rhs;
  j["residual_abs"] = residual_abs;
  j["residual_rel"] = residual_rel;
  if (has_ladder) {
    json lad = json::array();
    for (const auto& p : ladder) {
      json e;
      e["level"] = p.level;
      e["value"] = p.value;
      e["error"] = p.error;
      lad.push_back(e);
    }
    j["ladder"] = lad;
    if (ladder_exact)
      j["fitted_order"] = "exact";
    else
      j["fitted_order"] = fitted_order;
  }
  j["tolerance"] = tolerance;
  j["verdict"] = pass ? "pass" : "fail";
  j["details"] = details;
  return j;
}

CheckReport checkHsiungMinkowski(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                 const WeightFunction& f, int k,
                                 const CheckRun& run) {
  const int n = spec.n;
  if (k < 0 || k > n - 1)
    throw DomainError("hsiung-minkowski requires 0 <= k <= n-1");
  CheckReport rep;
  rep.id = "hsiung-minkowski";
  rep.config = surfaceConfig(spec, norm, run);
  rep.config["k"] = k;
  rep.config["f"] = f.name;

  const auto levels = levelsFor(run);
  double quad_est = 0.0, prev_diff = 0.0;
  for (size_t li = 0; li < levels.size(); ++li) {
    const int L = levels[li];
    const SurfaceData D = realizeSurface(spec, norm, L);
    const IdentitySides s = identitySides(D, f, k);
    const double diff = (s.I1 - s.I2) - s.rhs;
    const double rel = std::abs(diff) / s.scale;
    rep.ladder.push_back({L, s.I1 - s.I2, rel});
    rep.lhs = s.I1 - s.I2;
    rep.rhs = s.rhs;
    rep.residual_abs = std::abs(diff);
    rep.residual_rel = rel;
    if (li > 0) quad_est = std::abs(diff - prev_diff) / s.scale;
    prev_diff = diff;

    if (li + 1 == levels.size()) {
      // FD cross-check of grad ubar on ~1% of nodes.
      const Vec h = fdStepsForLevel(D.par(), L);
      const int stride = std::max<int>(1, D.S.nodeCount() / 100 * 100 > 0
                                              ? D.S.nodeCount() / 100
                                              : 1);
      double maxdev = 0.0;
      for (int i = 0; i < D.S.nodeCount(); i += std::max(1, stride)) {
        const Vec g_an = gradUbarAnalytic(D.S.node[i], D.curv[i], D.cap[i]);
        const Vec g_fd = surfaceGradientFD(
            D.par(), D.S.u[i],
            [&](const Vec& u) { return D.ubarAtParam(u); }, h);
        maxdev = std::max(maxdev,
                          (g_fd - g_an).norm() / std::max(1.0, g_an.norm()));
      }
      if (maxdev > 0.05)
        throw ConsistencyError(
            "analytic and FD gradients of ubar disagree beyond FD accuracy");
      rep.details["grad_fd_crosscheck"] = maxdev;
      rep.details["I1"] = s.I1;
      rep.details["I2"] = s.I2;
    }
  }

  finishLadder(rep, run, run.policy.order_min_quad);
  rep.tolerance = std::max(run.rel_tol, run.policy.quad_error_factor * quad_est);
  bool ok = rep.residual_rel <= rep.tolerance;
  if (rep.has_ladder) {
    const bool order_ok =
        rep.ladder_exact || rep.fitted_order >= run.policy.order_min_quad;
    rep.details["order_ok"] = order_ok;
    ok = ok && order_ok;
  }
  rep.pass = ok;
  return rep;
}

CheckReport checkCorollarySigns(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                const WeightFunction& f, int k,
                                const CheckRun& run) {
  const int n = spec.n;
  if (k < 0 || k > n - 1)
    throw DomainError("corollary-signs requires 0 <= k <= n-1");
  CheckReport rep;
  rep.id = "corollary-signs";
  rep.config = surfaceConfig(spec, norm, run);
  rep.config["k"] = k;
  rep.config["f"] = f.name;

  const SurfaceData D = realizeSurface(spec, norm, run.level);
  double umin, umax, umean, ustd;
  D.ubarStats(umean, ustd, umin, umax);
  verifyMonotonicityTag(f, umin, umax);
  if (D.curv.front().kappaF.minCoeff() <= 0.0)
    throw DomainError("corollary-signs requires a strictly convex surface");

  const IdentitySides s = identitySides(D, f, k);
  const double diff = s.I1 - s.I2;
  const double scale = std::max({std::abs(s.I1), std::abs(s.I2), 1e-30});
  rep.lhs = s.I1;
  rep.rhs = s.I2;
  rep.residual_abs = std::abs(diff);
  rep.residual_rel = std::abs(diff) / scale;
  rep.tolerance = run.policy.equality_rel;
  rep.details["difference"] = diff;
  rep.details["monotonicity"] = f.monotonicity;

  const double tol = run.policy.equality_rel * scale;
  if (D.exact_wulff || f.monotonicity == 0) {
    rep.pass = std::abs(diff) <= tol;
    rep.details["mode"] = "equality";
  } else if (f.monotonicity > 0) {
    rep.pass = diff <= -10.0 * tol;
    rep.details["mode"] = "strict-nonpositive";
  } else {
    rep.pass = diff >= 10.0 * tol;
    rep.details["mode"] = "strict-nonnegative";
  }
  return rep;
}

CheckReport checkBoundaryLemmas(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                const CheckRun& run) {
  CheckReport rep;
  rep.id = "boundary-lemmas";
  rep.config = surfaceConfig(spec, norm, run);
  const SurfaceData D = realizeSurface(spec, norm, run.level);
  if (D.S.closed)
    throw DomainError("boundary-lemmas requires a surface with boundary");

  const int n = D.S.n;
  double r_sf = 0.0, r_xi = 0.0, r_pk = 0.0;
  double min_muE = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (int i = 0; i < D.S.boundaryCount(); ++i) {
    const NodeGeom& g = D.S.bnode[i];
    const Vec& mu = D.S.mu[i];
    const CurvatureData& c = D.bcurv[i];
    const CapillaryNodeFields& cf = D.bcap[i];
    if (n == 2) {
      const Vec tau_f = g.frame.transpose() * D.S.btau[i];
      const Vec sf_tau = g.frame * (c.SF * tau_f);
      r_sf = std::max(r_sf, std::abs(sf_tau.dot(mu)));
      scale = std::max(scale, sf_tau.norm());
    }
    r_xi = std::max(r_xi, std::abs(cf.xi.dot(mu)));
    const Vec xi_f = g.frame.transpose() * cf.xi;
    for (int k = 0; k <= n; ++k) {
      const Vec pk_xi = g.frame * (c.P[k] * xi_f);
      r_pk = std::max(r_pk, std::abs(pk_xi.dot(mu)));
      scale = std::max(scale, pk_xi.norm());
    }
    min_muE = std::min(min_muE, std::abs(mu[n]));
    scale = std::max(scale, cf.xi.norm());
  }
  const double worst = std::max({r_sf, r_xi, r_pk});
  rep.lhs = worst;
  rep.rhs = 0.0;
  rep.residual_abs = worst;
  rep.residual_rel = worst / scale;
  rep.tolerance = run.rel_tol;
  rep.details["max_sf_tangent_conormal"] = r_sf;
  rep.details["max_xi_conormal"] = r_xi;
  rep.details["max_pk_xi_conormal"] = r_pk;
  rep.details["min_abs_mu_E"] = min_muE;
  rep.details["boundary_condition_residual"] = D.boundary_residual;
  rep.pass = (worst <= run.rel_tol * scale) && (min_muE > 1e-6);
  return rep;
}

CheckReport checkDivergenceIdentity(const SurfaceSpec& spec,
                                    const MinkowskiNorm& norm, int k,
                                    const CheckRun& run) {
  const int n = spec.n;
  if (k < 0 || k > n) throw DomainError("divergence-identity requires 0 <= k <= n");
  CheckReport rep;
  rep.id = "divergence-identity";
  rep.config = surfaceConfig(spec, norm, run);
  rep.config["k"] = k;

  const auto levels = levelsFor(run);
  for (size_t li = 0; li < levels.size(); ++li) {
    const int L = levels[li];
    const SurfaceData D = realizeSurface(spec, norm, L);
    const Vec h = fdStepsForLevel(D.par(), L);
    const double pref = (n - k) * binomial(n, k);

    auto field = [&](const Vec& u) { return D.pkXiAtParam(u, k); };
    double max_res = 0.0, scale = 1.0;
    std::vector<double> rhs_node(D.S.nodeCount());
    for (int i = 0; i < D.S.nodeCount(); ++i) {
      const double rhs_i =
          pref * (D.cap[i].denom * D.curv[i].H[k] -
                  D.S.node[i].X.dot(D.S.node[i].nu) * D.curv[i].H[k + 1]);
      rhs_node[i] = rhs_i;
      const double div_fd = surfaceDivergenceFD(D.par(), D.S.u[i], field, h);
      max_res = std::max(max_res, std::abs(div_fd - rhs_i));
      scale = std::max(scale, std::abs(rhs_i));
    }
    const double rel = max_res / scale;
    rep.ladder.push_back({L, max_res, rel});
    rep.residual_abs = max_res;
    rep.residual_rel = rel;

    if (li + 1 == levels.size()) {
      // Divergence-theorem route: int div(P_k xi) over the surface equals
      // the boundary flux of P_k(xi); with the divergence identity this is
      // the integrated Minkowski-type identity, quadrature-limited.
      const double I_rhs = integrate(D.S, rhs_node);
      double I_b = 0.0;
      if (!D.S.closed) {
        I_b = boundaryIntegrate(D.S, [&](int i) {
          const NodeGeom& g = D.S.bnode[i];
          const Vec xi_f = g.frame.transpose() * D.bcap[i].xi;
          return (g.frame * (D.bcurv[i].P[k] * xi_f)).dot(D.S.mu[i]);
        });
      }
      const double int_scale = std::max(
          {1e-30, pref * std::abs(integrate(D.S, [&](int i) {
             return D.cap[i].denom * D.curv[i].H[k];
           }))});
      rep.lhs = I_rhs;
      rep.rhs = I_b;
      rep.details["integrated_residual_rel"] = std::abs(I_rhs - I_b) / int_scale;
      rep.details["boundary_flux"] = I_b;
      rep.details["pointwise_scale"] = scale;
    }
  }

  finishLadder(rep, run, run.policy.order_min_fd);
  rep.tolerance = run.rel_tol;
  const double int_res = rep.details.value("integrated_residual_rel", 1.0);
  bool ok = int_res <= run.rel_tol;
  if (rep.has_ladder) {
    const bool order_ok =
        rep.ladder_exact || rep.fitted_order >= run.policy.order_min_fd;
    rep.details["order_ok"] = order_ok;
    ok = ok && order_ok;
  } else {
    // Single-level mode is used on exact Wulff shapes where both sides
    // vanish pointwise.
    ok = ok && rep.residual_rel <= std::max(run.rel_tol, 1e-8);
  }
  rep.pass = ok;
  return rep;
}

CheckReport checkGradientIdentity(const SurfaceSpec& spec,
                                  const MinkowskiNorm& norm,
                                  const CheckRun& run) {
  CheckReport rep;
  rep.id = "gradient-identity";
  rep.config = surfaceConfig(spec, norm, run);

  const auto levels = levelsFor(run);
  for (const int L : levels) {
    const SurfaceData D = realizeSurface(spec, norm, L);
    const Vec h = fdStepsForLevel(D.par(), L);
    double max_rel = 0.0;
    double gscale = 0.0;
    for (int i = 0; i < D.S.nodeCount(); ++i)
      gscale = std::max(gscale, gradUbarAnalytic(D.S.node[i], D.curv[i], D.cap[i]).norm());
    gscale = std::max(gscale, 1e-12);
    for (int i = 0; i < D.S.nodeCount(); ++i) {
      const Vec g_an = gradUbarAnalytic(D.S.node[i], D.curv[i], D.cap[i]);
      const Vec g_fd = surfaceGradientFD(
          D.par(), D.S.u[i], [&](const Vec& u) { return D.ubarAtParam(u); }, h);
      max_rel = std::max(max_rel, (g_fd - g_an).norm() / gscale);
    }
    rep.ladder.push_back({L, max_rel, max_rel});
    rep.residual_abs = max_rel * gscale;
    rep.residual_rel = max_rel;
  }

  finishLadder(rep, run, run.policy.order_min_fd);
  rep.tolerance = run.rel_tol;
  bool ok = rep.residual_rel <= run.rel_tol;
  if (rep.has_ladder) {
    const bool order_ok =
        rep.ladder_exact || rep.fitted_order >= run.policy.order_min_fd;
    rep.details["order_ok"] = order_ok;
    ok = ok && order_ok;
  }
  rep.pass = ok;
  return rep;
}

std::optional<double> capWulffEnclosedVolumeScaled(const MinkowskiNorm& norm,
                                                   double r0, double omega0) {
  const int N = norm.ambientDim();
  double sqrt_det = 0.0, F_e = 0.0;
  if (norm.family() == MinkowskiNorm::Family::Isotropic) {
    const double c = norm.isotropicConstant();
    sqrt_det = std::pow(c, N);
    F_e = c;
  } else if (norm.family() == MinkowskiNorm::Family::Ellipsoid) {
    const Mat& M = norm.ellipsoidMatrix();
    sqrt_det = std::sqrt(M.determinant());
    F_e = std::sqrt(M(N - 1, N - 1));
  } else {
    return std::nullopt;
  }
  const double dhat = -omega0 / F_e;
  if (N == 3) {
    // (n+1)|Omega| = r0^3 sqrt(det M) pi (1-d)^2 (2+d)
    return std::pow(r0, 3) * sqrt_det * std::numbers::pi * (1.0 - dhat) *
           (1.0 - dhat) * (2.0 + dhat);
  }
  const double seg = std::acos(dhat) - dhat * std::sqrt(1.0 - dhat * dhat);
  return 2.0 * r0 * r0 * sqrt_det * seg;
}

CheckReport checkHeintzeKarcher(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                const CheckRun& run) {
  CheckReport rep;
  rep.id = "heintze-karcher";
  rep.config = surfaceConfig(spec, norm, run);

  const SurfaceData D = realizeSurface(spec, norm, run.level);
  double minH1 = std::numeric_limits<double>::infinity();
  for (const auto& c : D.curv) minH1 = std::min(minH1, c.H[1]);
  if (minH1 <= 0.0)
    throw DomainError("Heintze-Karcher requires strict F-mean convexity (H_1^F > 0)");

  const double lhs = integrate(D.S, [&](int i) {
    return D.cap[i].denom / D.curv[i].H[1];
  });
  const double rhs = integrate(D.S, [&](int i) {
    return D.S.node[i].X.dot(D.S.node[i].nu);
  });
  const double scale = std::max(std::abs(rhs), 1e-30);
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.residual_abs = std::abs(lhs - rhs);
  rep.residual_rel = rep.residual_abs / scale;
  rep.tolerance = run.rel_tol;
  const double gap = (lhs - rhs) / scale;
  rep.details["gap_rel"] = gap;
  rep.details["min_H1"] = minH1;

  bool ok = gap >= -run.rel_tol;
  if (D.exact_wulff) {
    ok = ok && rep.residual_rel <= run.policy.equality_rel;
    rep.details["mode"] = "equality";
  } else if (run.hk_min_gap > 0.0) {
    ok = ok && gap >= run.hk_min_gap;
    rep.details["mode"] = "strict-gap";
    rep.details["min_gap_required"] = run.hk_min_gap;
  } else {
    rep.details["mode"] = "inequality";
  }

  // Independent volume oracle when a closed form exists (the cone-volume
  // sum over nodes equals rhs by construction; the closed form pins it).
  double omega0 = D.ctx.omega0;
  if (spec.kind == "capillary-wulff" || spec.kind == "sphere-cap") {
    if (const auto vol = capWulffEnclosedVolumeScaled(norm, spec.r0, omega0)) {
      rep.details["closed_form_volume_scaled"] = *vol;
      const double volres = std::abs(rhs - *vol) / std::abs(*vol);
      rep.details["volume_residual_rel"] = volres;
      ok = ok && volres <= run.rel_tol;
      if (D.exact_wulff) {
        const double lres = std::abs(lhs - *vol) / std::abs(*vol);
        rep.details["lhs_volume_residual_rel"] = lres;
        ok = ok && lres <= run.rel_tol;
      }
    }
  }
  rep.pass = ok;
  return rep;
}

CheckReport checkSupportConstancy(const SurfaceSpec& spec,
                                  const MinkowskiNorm& norm,
                                  const CheckRun& run) {
  CheckReport rep;
  rep.id = "support-constancy";
  rep.config = surfaceConfig(spec, norm, run);
  const SurfaceData D = realizeSurface(spec, norm, run.level);
  double mean, stdev, umin, umax;
  D.ubarStats(mean, stdev, umin, umax);
  const double ratio = stdev / std::abs(mean);
  rep.lhs = ratio;
  rep.residual_rel = ratio;
  rep.residual_abs = stdev;
  rep.details["ubar_mean"] = mean;
  rep.details["ubar_stdev"] = stdev;
  rep.details["ubar_min"] = umin;
  rep.details["ubar_max"] = umax;
  rep.details["spread"] = umax - umin;

  if (D.exact_wulff) {
    rep.tolerance = run.rel_tol;
    bool ok = ratio <= run.rel_tol;
    // Dual-norm membership of the emitted nodes.
    const int N = spec.n + 1;
    Vec center = Vec::Zero(N);
    if (spec.kind == "capillary-wulff" || spec.kind == "sphere-cap")
      center = spec.r0 * D.ctx.omega0 * D.ctx.EF;
    double max_member = 0.0;
    const int stride = std::max(1, D.S.nodeCount() / 64);
    for (int i = 0; i < D.S.nodeCount(); i += stride) {
      const double F0 = norm.dual(D.S.node[i].X - center);
      max_member = std::max(max_member, std::abs(F0 - spec.r0) / spec.r0);
    }
    rep.details["membership_residual"] = max_member;
    ok = ok && max_member <= 1e-10;
    rep.details["mode"] = "wulff-constancy";
    rep.pass = ok;
  } else {
    rep.tolerance = run.witness_floor;
    rep.details["mode"] = "witness-nonconstancy";
    rep.pass = ratio >= run.witness_floor;
  }
  return rep;
}

// --- algebraic kernels ----------------------------------------------------

NewtonMaclaurinResult newtonMaclaurinInstance(const Vec& kappa, int k, int l,
                                              int r, int s) {
  const int n = static_cast<int>(kappa.size());
  if (!(k > l && l >= 0 && r > s && s >= 0 && k >= r && l >= s && k <= n))
    throw DomainError("newton-maclaurin: inadmissible index tuple");
  const Vec sigma = elementarySymmetric(kappa);
  for (int i = 1; i <= k; ++i)
    if (sigma[i] <= 0.0)
      throw DomainError("newton-maclaurin: kappa not in Gamma_k");
  const Vec H = normalizedSymmetric(sigma, n);
  NewtonMaclaurinResult out;
  out.lhs = std::pow(H[k] / H[l], 1.0 / (k - l));
  out.rhs = std::pow(H[r] / H[s], 1.0 / (r - s));
  const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-30});
  out.holds = out.lhs <= out.rhs + 1e-11 * scale;
  out.equality = std::abs(out.lhs - out.rhs) <= 1e-11 * scale;
  return out;
}

AlgebraicLemmaResult algebraicLemmaInstance(const Vec& kappa, const Vec& a,
                                            const Vec& b, int l, int r) {
  const int n = static_cast<int>(kappa.size());
  if (!(1 <= l && l <= r && r <= n))
    throw DomainError("algebraic-lemma: need 1 <= l <= r <= n");
  if (a.size() != r - l + 1 || b.size() != l)
    throw DomainError("algebraic-lemma: coefficient vectors have wrong length");
  if (a.minCoeff() < 0.0 || b.minCoeff() < 0.0)
    throw DomainError("algebraic-lemma: coefficients must be nonnegative");
  if (a.maxCoeff() <= 0.0 || b.maxCoeff() <= 0.0)
    throw DomainError("algebraic-lemma: coefficients must not all vanish");
  const Vec sigma = elementarySymmetric(kappa);
  for (int i = 1; i <= r; ++i)
    if (sigma[i] <= 0.0) throw DomainError("algebraic-lemma: kappa not in Gamma_r");
  const Vec H = normalizedSymmetric(sigma, n);

  double lhs_rel = 0.0, rhs_rel = 0.0;
  for (int j = l; j <= r; ++j) lhs_rel += a[j - l] * H[j];
  for (int i = 0; i < l; ++i) rhs_rel += b[i] * H[i];
  const double relscale = std::max({std::abs(lhs_rel), std::abs(rhs_rel), 1e-30});
  if (std::abs(lhs_rel - rhs_rel) > 1e-9 * relscale)
    throw DomainError("algebraic-lemma: input relation sum a_j H_j = sum b_i H_i "
                      "does not hold");

  AlgebraicLemmaResult out;
  out.lhs = 0.0;
  for (int j = l; j <= r; ++j) out.lhs += a[j - l] * H[j - 1];
  out.rhs = b[0] / H[1];
  for (int i = 1; i < l; ++i) out.rhs += b[i] * H[i - 1];
  const double scale = std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-30});
  out.holds = out.lhs >= out.rhs - 1e-10 * scale;
  out.equality = std::abs(out.lhs - out.rhs) <= 1e-10 * scale;
  return out;
}

CheckReport checkNewtonMaclaurinSweep(const CheckRun& run) {
  CheckReport rep;
  rep.id = "newton-maclaurin";
  rep.instance = "sweep";
  rep.config["run"] = runConfig(run);
  rep.config["instances"] = run.sweep_size;

  std::mt19937_64 rng(run.seed ^ 0x6e6d6163ull);
  std::uniform_real_distribution<double> logu(std::log(0.1), std::log(10.0));
  int violations = 0, tuple_checks = 0, equality_failures = 0;
  for (int t = 0; t < run.sweep_size; ++t) {
    const int n = 2 + static_cast<int>(t % 3);
    Vec kappa(n);
    const bool equal_case = (t % 97 == 0);
    const double c = std::exp(logu(rng));
    for (int i = 0; i < n; ++i) kappa[i] = equal_case ? c : std::exp(logu(rng));
    for (int k = 1; k <= n; ++k)
      for (int l = 0; l < k; ++l)
        for (int r = 1; r <= k; ++r)
          for (int s = 0; s < r && s <= l; ++s) {
            const auto res = newtonMaclaurinInstance(kappa, k, l, r, s);
            ++tuple_checks;
            if (!res.holds) ++violations;
            if (equal_case && !res.equality) ++equality_failures;
          }
  }
  rep.details["tuple_checks"] = tuple_checks;
  rep.details["violations"] = violations;
  rep.details["equality_failures"] = equality_failures;
  rep.residual_rel = violations + equality_failures;
  rep.tolerance = 0.0;
  rep.pass = (violations == 0 && equality_failures == 0);
  return rep;
}

CheckReport checkAlgebraicLemmaSweep(const CheckRun& run) {
  CheckReport rep;
  rep.id = "algebraic-lemma";
  rep.instance = "sweep";
  rep.config["run"] = runConfig(run);
  rep.config["instances"] = run.sweep_size;

  std::mt19937_64 rng(run.seed ^ 0x616c6c65ull);
  std::uniform_real_distribution<double> logu(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int violations = 0, equality_failures = 0, instances = 0;
  for (int t = 0; t < run.sweep_size; ++t) {
    const int n = 2 + static_cast<int>(t % 3);
    const int l = 1 + static_cast<int>(rng() % n);
    const int r = l + static_cast<int>(rng() % (n - l + 1));
    Vec kappa(n);
    const bool equal_case = (t % 89 == 0);
    const double c = std::exp(logu(rng));
    for (int i = 0; i < n; ++i) kappa[i] = equal_case ? c : std::exp(logu(rng));
    const Vec sigma = elementarySymmetric(kappa);
    const Vec H = normalizedSymmetric(sigma, n);

    Vec a(r - l + 1);
    for (int j = 0; j < a.size(); ++j) a[j] = unif(rng);
    a[0] += 0.1;  // not all vanishing
    double A = 0.0;
    for (int j = l; j <= r; ++j) A += a[j - l] * H[j];

    Vec b = Vec::Zero(l);
    double B1 = 0.0;
    for (int i = 1; i < l; ++i) {
      b[i] = unif(rng);
      B1 += b[i] * H[i];
    }
    double shrink = 1.0;
    if (B1 > 0.0) shrink = std::min(1.0, 0.8 * A / B1);
    for (int i = 1; i < l; ++i) b[i] *= shrink;
    b[0] = A;
    for (int i = 1; i < l; ++i) b[0] -= b[i] * H[i];

    const auto res = algebraicLemmaInstance(kappa, a, b, l, r);
    ++instances;
    if (!res.holds) ++violations;
    if (equal_case && !res.equality) ++equality_failures;
  }
  rep.details["instances"] = instances;
  rep.details["violations"] = violations;
  rep.details["equality_failures"] = equality_failures;
  rep.residual_rel = violations + equality_failures;
  rep.tolerance = 0.0;
  rep.pass = (violations == 0 && equality_failures == 0);
  return rep;
}

void validateRelationTags(const std::string& relation,
                          const nlohmann::ordered_json& coefficients) {
  const auto require = [&](const std::string& key,
                           std::initializer_list<const char*> allowed) {
    if (!coefficients.contains(key))
      throw DomainError("relation " + relation + " misses tag for " + key);
    const std::string tag = coefficients.at(key).get<std::string>();
    for (const char* a : allowed)
      if (tag == a) return;
    throw DomainError("relation " + relation + ": coefficient " + key +
                      " has invalid monotonicity tag '" + tag + "'");
  };
  if (relation == "linear-combination") {
    require("a", {"nondecreasing", "constant"});
    require("b", {"nonincreasing", "constant"});
  } else if (relation == "pinching-decreasing") {
    require("c", {"nonincreasing", "constant"});
  } else if (relation == "pinching-increasing") {
    require("c", {"nondecreasing", "constant"});
  } else if (relation == "curvature-product") {
    require("b", {"nondecreasing", "constant"});
    require("c", {"nondecreasing", "constant"});
    require("eta", {"nonincreasing", "constant"});
  } else if (relation == "soliton") {
    require("a", {"nonnegative-sum-one", "constant"});
  } else {
    throw DomainError("unknown rigidity relation: " + relation);
  }
}

CheckReport checkRigidityRelations(const SurfaceSpec& spec,
                                   const MinkowskiNorm& norm,
                                   const CheckRun& run) {
  CheckReport rep;
  rep.id = "rigidity-relations";
  rep.config = surfaceConfig(spec, norm, run);
  const SurfaceData D = realizeSurface(spec, norm, run.level);
  const int n = D.S.n;
  const double r0 = spec.r0;

  {
    json tags;
    tags["a"] = "constant";
    tags["b"] = "constant";
    validateRelationTags("linear-combination", tags);
    tags.clear();
    tags["c"] = "constant";
    validateRelationTags("pinching-decreasing", tags);
    tags.clear();
    tags["b"] = "constant";
    tags["c"] = "constant";
    tags["eta"] = "constant";
    validateRelationTags("curvature-product", tags);
    tags.clear();
    tags["a"] = "constant";
    validateRelationTags("soliton", tags);
  }

  double lin_res = 0.0, pinch_res = 0.0, prod_res = 0.0, soliton_res = 0.0;
  for (int i = 0; i < D.S.nodeCount(); ++i) {
    const Vec& H = D.curv[i].H;
    const double ub = D.cap[i].ubar;
    if (n >= 2) {
      lin_res = std::max(lin_res, std::abs(H[2] - (1.0 / r0) * H[1]));
      pinch_res = std::max(
          {pinch_res, std::max(0.0, 1.0 / r0 - H[1]),
           std::max(0.0, std::sqrt(H[2]) - 1.0 / r0)});
    } else {
      lin_res = std::max(lin_res, std::abs(H[1] - 1.0 / r0));
      pinch_res = std::max(pinch_res, std::abs(H[1] - 1.0 / r0));
    }
    prod_res = std::max(prod_res, std::abs(H[1] - 1.0 / r0));
    double soliton_lhs = 0.0;
    if (n >= 2) {
      soliton_lhs = (std::pow(H[0] / H[1], 1.0) + std::pow(H[0] / H[2], 0.5) +
                     std::pow(H[1] / H[2], 1.0)) /
                    3.0;
    } else {
      soliton_lhs = H[0] / H[1];
    }
    soliton_res = std::max(soliton_res, std::abs(soliton_lhs - ub));
  }
  const double scale = std::max(1.0 / r0, 1.0);
  rep.details["linear_combination_residual"] = lin_res;
  rep.details["pinching_violation"] = pinch_res;
  rep.details["curvature_product_residual"] = prod_res;
  rep.details["soliton_residual"] = soliton_res;
  rep.details["soliton_beta"] = 1.0;

  const double worst =
      std::max({lin_res, pinch_res, prod_res, soliton_res}) / scale;
  rep.residual_rel = worst;
  rep.residual_abs = worst * scale;
  if (D.exact_wulff) {
    rep.tolerance = run.rel_tol;
    rep.details["mode"] = "forward";
    rep.pass = worst <= run.rel_tol;
  } else {
    rep.tolerance = run.witness_floor;
    rep.details["mode"] = "witness";
    // On a non-Wulff surface every relation with the Wulff constants must
    // visibly fail (pinching is one-sided, so only require the equalities
    // to break).
    const double min_violation =
        std::min({lin_res, prod_res, soliton_res}) / scale;
    rep.details["min_violation"] = min_violation;
    rep.pass = min_violation >= run.witness_floor;
  }
  return rep;
}

}  // namespace wulffcap
