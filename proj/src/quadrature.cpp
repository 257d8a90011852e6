#include "wulffcap/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace wulffcap {

namespace {

void computeGaussLegendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

std::map<int, std::pair<std::vector<double>, std::vector<double>>> g_gl_cache;
std::mutex g_gl_mutex;

}  // namespace

void gaussLegendre(int npoints, std::vector<double>& x, std::vector<double>& w) {
  if (npoints < 1) throw DomainError("gaussLegendre: need at least one point");
  std::lock_guard<std::mutex> lock(g_gl_mutex);
  auto it = g_gl_cache.find(npoints);
  if (it == g_gl_cache.end()) {
    std::vector<double> xs, ws;
    computeGaussLegendre(npoints, xs, ws);
    it = g_gl_cache.emplace(npoints, std::make_pair(xs, ws)).first;
  }
  x = it->second.first;
  w = it->second.second;
}

void gaussLegendre(int npoints, double a, double b, std::vector<double>& x,
                   std::vector<double>& w) {
  gaussLegendre(npoints, x, w);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < npoints; ++i) {
    x[i] = mid + half * x[i];
    w[i] *= half;
  }
}

void compositeGaussLegendre(int panels, int per_panel, double a, double b,
                            std::vector<double>& x, std::vector<double>& w) {
  std::vector<double> xr, wr;
  gaussLegendre(per_panel, xr, wr);
  x.clear();
  w.clear();
  x.reserve(panels * per_panel);
  w.reserve(panels * per_panel);
  const double hp = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double pa = a + p * hp;
    const double mid = pa + 0.5 * hp, half = 0.5 * hp;
    for (int i = 0; i < per_panel; ++i) {
      x.push_back(mid + half * xr[i]);
      w.push_back(half * wr[i]);
    }
  }
}

double compensatedSum(std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (const double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

ConvergenceFit fitConvergenceOrder(const std::vector<double>& h,
                                   const std::vector<double>& err,
                                   double floor) {
  if (h.size() != err.size() || h.size() < 2)
    throw DomainError("fitConvergenceOrder: need >= 2 matching (h, error) pairs");
  ConvergenceFit fit;
  fit.floor = floor;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < h.size(); ++i) {
    if (std::abs(err[i]) > floor) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(std::abs(err[i])));
    }
  }
  if (lx.size() < 2) {
    fit.exact = true;
    fit.order = std::numeric_limits<double>::infinity();
    return fit;
  }
  const size_t m = lx.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < m; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  fit.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return fit;
}

}  // namespace wulffcap
