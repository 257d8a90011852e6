#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "wulffcap/types.hpp"

namespace wulffcap {

// Capillary Minkowski problem on the arc [-theta, theta] (n = 1):
//   u'' + u = phi u^{p-1},  u'(theta) = cot(theta) u(theta),
//                          -u'(-theta) = cot(theta) u(-theta),
// with u > 0 and u'' + u > 0 (strict convexity). For p = n+1 = 2 the
// solution set is a ray; the solver then augments the system with a scale
// unknown C (u'' + u = C phi u) and the normalization u(0) = 1, since the
// plain discrete system admits only the zero solution.
struct CapillaryBVP {
  double theta = 1.0;  // in (0, pi)
  double p = 1.0;      // >= 1
  int N = 256;         // grid intervals; N+1 points, N even
  Vec phi;             // positive data at the grid points

  int max_iterations = 60;
  double newton_tol = 1e-12;      // Newton target (max-norm residual)
  double converged_tol = 1e-10;   // acceptance bound for "converged"
  double damping_floor = 0.0009765625;  // 2^-10

  static Vec gridPoints(double theta, int N);
  bool scaledMode() const { return p == 2.0; }
  void validate() const;
};

struct SolveResult {
  Vec u;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  double min_convexity = 0.0;  // min over the grid of u'' + u
  bool converged = false;
  bool scaled_mode = false;
  double scale_factor = 1.0;  // C (scaled mode only)
};

SolveResult solveMinkowski1D(const CapillaryBVP& bvp,
                             const Vec* initial_guess = nullptr);

// amp * (1 - cos(theta) cos t): Robin-compatible shape at a data-derived
// amplitude; the multi-start experiment rescales it.
Vec defaultInitialGuess(const CapillaryBVP& bvp);

struct ManufacturedSolution {
  std::string name;
  std::function<double(double)> u, du, ddu;
};

// circle: u = r0 (1 - cos(theta) cos t), the support function of the
//   capillary circular arc; smooth: adds gamma (cos 2t - 1 - 2 sin^2 theta)
//   (Robin-compatible, nonconstant curvature); translated: adds
//   delta sin t (horizontal translation, in the Robin kernel).
ManufacturedSolution manufactured(const std::string& name, double theta,
                                  double r0, double param = 0.0);

// phi = (u'' + u) u^{1-p} at the grid points. Rejects data whose Robin
// closures, positivity, or convexity fail.
Vec manufacturedRhs(const ManufacturedSolution& ms, double theta, int N,
                    double p);

struct UniquenessReport {
  int starts = 0;
  int converged = 0;
  bool inconclusive = false;
  double cluster_diameter = std::numeric_limits<double>::infinity();
  bool scaled_mode = false;
  bool scaling_family_verified = false;
  double max_scale_factor_error = 0.0;  // max |C - 1| over converged solves
  nlohmann::ordered_json toJson() const;
};

// Runs n_starts damped-Newton solves from log-uniform random amplitudes in
// [0.1, 10] times the default initial guess; reports the cluster diameter of
// converged solutions (after u(0)-normalization in scaled mode) and, for
// p = n+1, verifies the scaling family by re-solving from c * u.
UniquenessReport uniquenessExperiment(const CapillaryBVP& bvp, int n_starts,
                                      std::uint64_t seed);

}  // namespace wulffcap
