#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wulffcap/types.hpp"

namespace wulffcap {

// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration
// on the Legendre polynomial. Cached per point count.
void gaussLegendre(int npoints, std::vector<double>& x, std::vector<double>& w);

// Same rule mapped to [a,b].
void gaussLegendre(int npoints, double a, double b, std::vector<double>& x,
                   std::vector<double>& w);

// Composite rule: `panels` equal panels on [a,b], `per_panel` points each.
void compositeGaussLegendre(int panels, int per_panel, double a, double b,
                            std::vector<double>& x, std::vector<double>& w);

// Neumaier-compensated sum in the given (fixed) order.
double compensatedSum(std::span<const double> values);

struct LadderPoint {
  int level = 0;
  double value = 0.0;
  double error = 0.0;  // |value - reference|, or self-difference
};

struct ConvergenceFit {
  double order = 0.0;  // least-squares slope of log|err| vs log h
  bool exact = false;  // all errors under the floating-point floor
  double floor = 1e-13;

  bool meetsOrder(double min_order) const { return exact || order >= min_order; }
};

// Fits log|error| = order*log h + c by least squares over (h_i, err_i).
// Requires >= 2 usable points; errors at or below `floor` are treated as
// exact. If every level is at the floor the fit reports exact instead of a
// slope.
ConvergenceFit fitConvergenceOrder(const std::vector<double>& h,
                                   const std::vector<double>& err,
                                   double floor = 1e-13);

// Node counts per refinement level.
struct LevelScheme {
  // n = 2 patches/closed surfaces: tensor rule n_s x n_phi.
  static int meridianPoints(int level) { return 1 << level; }
  static int azimuthPoints(int level) { return 1 << (level + 1); }
  // n = 1: composite Gauss-Legendre, 2^level panels of 4 points.
  static int curvePanels(int level) { return 1 << level; }
  static constexpr int curvePointsPerPanel = 4;
};

}  // namespace wulffcap
