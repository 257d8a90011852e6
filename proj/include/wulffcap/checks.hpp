#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wulffcap/capillary.hpp"

namespace wulffcap {

constexpr std::uint64_t kDefaultSeed = 20240817ull;

struct TolerancePolicy {
  double base_rel = 1e-6;       // identity pass bound (relative)
  double equality_rel = 1e-6;   // equality-case bound on Wulff shapes
  double quad_error_factor = 10.0;
  double order_min_quad = 1.8;  // quadrature-limited ladders
  double order_min_fd = 0.9;    // FD-derivative-limited ladders
  double exact_floor = 1e-13;
};

struct CheckRun {
  int level = 4;
  std::vector<int> ladder_levels;  // empty -> single-level check
  double rel_tol = 1e-6;           // bound on the final relative residual
  double witness_floor = 1e-3;     // required violation size on non-Wulff witnesses
  double hk_min_gap = 0.0;         // required strict Heintze-Karcher gap (0 = off)
  std::uint64_t seed = kDefaultSeed;
  int sweep_size = 10000;
  TolerancePolicy policy;

  bool hasLadder() const { return ladder_levels.size() >= 2; }
};

// Weight function f(ubar) entering the weighted integral identities.
struct WeightFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  int monotonicity = 0;  // +1 f' >= 0, -1 f' <= 0, 0 constant

  static WeightFunction byName(const std::string& name);
  static std::vector<std::string> catalogNames();
};

struct CheckReport {
  std::string id;
  std::string instance;
  nlohmann::ordered_json config;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual_abs = 0.0;
  double residual_rel = 0.0;
  std::vector<LadderPoint> ladder;
  bool has_ladder = false;
  double fitted_order = 0.0;
  bool ladder_exact = false;
  double tolerance = 0.0;
  bool pass = false;
  nlohmann::ordered_json details;

  nlohmann::ordered_json toJson() const;
};

// --- integral identity checks -------------------------------------------

// Weighted Minkowski-type identity: for capillary surfaces
//   int f H_k (F(nu)+omega0<nu,EF>) - f H_{k+1} <X,nu> dmu
//     = -1/((n-k) binom(n,k)) int <grad f, P_k(xi)> dmu,
// with the omega0 terms absent in closed-surface mode. f is composed with
// ubar; grad f uses the analytic gradient identity, cross-checked by finite
// differences on a node subsample.
CheckReport checkHsiungMinkowski(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                 const WeightFunction& f, int k,
                                 const CheckRun& run);

// Sign of int f(ubar) (H_k (F+omega0<nu,EF>) - H_{k+1}<X,nu>) according to
// the monotonicity of f; equality on Wulff shapes.
CheckReport checkCorollarySigns(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                const WeightFunction& f, int k,
                                const CheckRun& run);

// Boundary behaviour: S_F maps boundary tangents into the boundary tangent
// space, <xi,mu> = 0, <P_k(xi),mu> = 0 for all k, and <mu,E_{n+1}> != 0.
CheckReport checkBoundaryLemmas(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                const CheckRun& run);

// div(P_k(xi)) = (n-k) binom(n,k) ((F+omega0<EF,nu>) H_k - <X,nu> H_{k+1})
// pointwise (FD divergence ladder) plus the integrated divergence-theorem
// route against the boundary integral.
CheckReport checkDivergenceIdentity(const SurfaceSpec& spec,
                                    const MinkowskiNorm& norm, int k,
                                    const CheckRun& run);

// grad ubar = (F+omega0<EF,nu>)^{-2} dnu(xi), FD gradient vs analytic.
CheckReport checkGradientIdentity(const SurfaceSpec& spec,
                                  const MinkowskiNorm& norm,
                                  const CheckRun& run);

// int (F+omega0<nu,EF>)/H_1 dmu >= int <X,nu> dmu = (n+1)|Omega|, equality
// exactly on capillary Wulff shapes; closed-form volumes checked when known.
CheckReport checkHeintzeKarcher(const SurfaceSpec& spec, const MinkowskiNorm& norm,
                                const CheckRun& run);

// Constancy of ubar characterizes capillary Wulff shapes: stdev/mean small
// on Wulff shapes, bounded away from zero on perturbed witnesses. Wulff
// instances also verify the dual-norm membership F0(X - r0 omega0 EF) = r0.
CheckReport checkSupportConstancy(const SurfaceSpec& spec,
                                  const MinkowskiNorm& norm,
                                  const CheckRun& run);

// Forward verification of the rigidity relations on Wulff shapes (explicit
// constants) and violation witnesses on perturbed surfaces:
//  linear-combination  sum a_j H_j = sum b_i H_i
//  pinching            H_{s-1}^{1/(s-1)} >= c(ubar) >= H_s^{1/s}
//  curvature-product   sum b_j H_j + c_j H_1 H_{j-1} = eta(ubar)
//  soliton             sum a_ij (H_i/H_j)^{1/(j-i)} = beta ubar, beta = 1
CheckReport checkRigidityRelations(const SurfaceSpec& spec,
                                   const MinkowskiNorm& norm,
                                   const CheckRun& run);

// --- algebraic checks (curvature-vector space) ---------------------------

struct NewtonMaclaurinResult {
  bool holds = false;
  bool equality = false;
  double lhs = 0.0, rhs = 0.0;
};
// (H_k/H_l)^{1/(k-l)} <= (H_r/H_s)^{1/(r-s)} for kappa in Gamma_k,
// k > l >= 0, r > s >= 0, k >= r, l >= s.
NewtonMaclaurinResult newtonMaclaurinInstance(const Vec& kappa, int k, int l,
                                              int r, int s);

struct AlgebraicLemmaResult {
  bool holds = false;
  bool equality = false;
  double lhs = 0.0, rhs = 0.0;
};
// Given sum_{j=l}^r a_j H_j = sum_{i=0}^{l-1} b_i H_i with nonnegative, not
// all vanishing coefficients: sum a_j H_{j-1} >= b_0/H_1 + sum b_i H_{i-1},
// equality iff all kappa equal. a has entries a_l..a_r, b has b_0..b_{l-1}.
AlgebraicLemmaResult algebraicLemmaInstance(const Vec& kappa, const Vec& a,
                                            const Vec& b, int l, int r);

CheckReport checkNewtonMaclaurinSweep(const CheckRun& run);
CheckReport checkAlgebraicLemmaSweep(const CheckRun& run);

// Validates monotonicity tags of a rigidity relation description; wrong tags
// raise DomainError. Tags: "nondecreasing", "nonincreasing", "constant".
void validateRelationTags(const std::string& relation,
                          const nlohmann::ordered_json& coefficients);

// Closed-form (n+1)|Omega| for capillary Wulff caps of isotropic/ellipsoid
// norms (nullopt otherwise).
std::optional<double> capWulffEnclosedVolumeScaled(const MinkowskiNorm& norm,
                                                   double r0, double omega0);

}  // namespace wulffcap
