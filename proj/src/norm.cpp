#include "wulffcap/norm.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace wulffcap {

using json = nlohmann::ordered_json;

Mat tangentBasis(const Vec& z) {
  const int N = static_cast<int>(z.size());
  if (N == 2) {
    Mat T(2, 1);
    T(0, 0) = -z[1];
    T(1, 0) = z[0];
    return T;
  }
  int imin = 0;
  for (int i = 1; i < N; ++i)
    if (std::abs(z[i]) < std::abs(z[imin])) imin = i;
  Vec t1 = Vec::Zero(N);
  t1[imin] = 1.0;
  t1 -= z[imin] * z;
  t1.normalize();
  Mat T(3, 2);
  T.col(0) = t1;
  T.col(1) = cross3<double>(z, t1);
  return T;
}

Vec unitAxis(int dim, int axis) {
  Vec e = Vec::Zero(dim);
  e[axis] = 1.0;
  return e;
}

MinkowskiNorm MinkowskiNorm::isotropic(int ambient_dim, double c) {
  if (c <= 0.0) throw DomainError("isotropic norm constant must be positive");
  MinkowskiNorm n(Family::Isotropic, ambient_dim);
  n.c_ = c;
  n.validateAdmissible();
  return n;
}

MinkowskiNorm MinkowskiNorm::ellipsoid(const Mat& M) {
  if (M.rows() != M.cols()) throw DomainError("ellipsoid matrix must be square");
  if ((M - M.transpose()).norm() > 1e-12 * (1.0 + M.norm()))
    throw DomainError("ellipsoid matrix must be symmetric");
  MinkowskiNorm n(Family::Ellipsoid, static_cast<int>(M.rows()));
  n.M_ = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(n.M_);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw AdmissibilityError("ellipsoid matrix must be positive definite");
  n.Minv_ = n.M_.inverse();
  n.validateAdmissible();
  return n;
}

MinkowskiNorm MinkowskiNorm::harmonic(int ambient_dim, double eps, int degree,
                                      double c0) {
  if (degree != 2 && degree != 3)
    throw DomainError("harmonic perturbation degree must be 2 or 3");
  if (c0 <= 0.0) throw DomainError("harmonic base constant must be positive");
  MinkowskiNorm n(Family::Harmonic, ambient_dim);
  n.c_ = c0;
  n.eps_ = eps;
  n.degree_ = degree;
  n.validateAdmissible();
  return n;
}

MinkowskiNorm MinkowskiNorm::custom(int ambient_dim,
                                    std::function<double(const Vec&)> sphere_value,
                                    double fd_step) {
  MinkowskiNorm n(Family::Custom, ambient_dim);
  n.sphere_value_ = std::move(sphere_value);
  n.fd_step_ = fd_step;
  n.validateAdmissible();
  return n;
}

std::vector<Vec> quasiUniformSphereNodes(int ambient_dim, int count) {
  std::vector<Vec> nodes;
  nodes.reserve(count);
  if (ambient_dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * (i + 0.5) / count;
      Vec z(2);
      z << std::cos(t), std::sin(t);
      nodes.push_back(z);
    }
    return nodes;
  }
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double y = 1.0 - 2.0 * (i + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    const double t = golden * i;
    Vec z(3);
    z << r * std::cos(t), r * std::sin(t), y;
    nodes.push_back(z);
  }
  return nodes;
}

void MinkowskiNorm::validateAdmissible() const {
  const int count = (dim_ == 2) ? 256 : 512;
  const auto nodes = quasiUniformSphereNodes(dim_, count);
  for (const auto& z : nodes) {
    const double F = value<double>(z);
    if (!std::isfinite(F))
      throw EvaluationError("norm evaluation produced a non-finite value");
    if (F <= 0.0)
      throw AdmissibilityError("support function must be positive on the sphere");
    if (minAEigenvalue(z) <= 0.0)
      throw AdmissibilityError(
          "A_F is not positive definite; the Wulff shape is not strictly convex");
  }
}

Vec MinkowskiNorm::cahnHoffman(const Vec& z) const {
  if (std::abs(z.norm() - 1.0) > 1e-12)
    throw DomainError("cahnHoffman requires a unit vector");
  Vec phi = gradient<double>(z);
  if (!phi.allFinite())
    throw EvaluationError("Cahn-Hoffman map evaluation produced NaN");
  return phi;
}

Vec MinkowskiNorm::sphereGradient(const Vec& z) const {
  if (std::abs(z.norm() - 1.0) > 1e-12)
    throw DomainError("sphereGradient requires a unit vector");
  return gradient<double>(z) - value<double>(z) * z;
}

Mat MinkowskiNorm::aMatrix(const Vec& z, const Mat& T) const {
  if (std::abs(z.norm() - 1.0) > 1e-12)
    throw DomainError("aMatrix requires a unit vector");
  Mat A;
  if (family_ == Family::Custom) {
    // Express the chart Hessian (computed in the canonical frame) in T.
    const Mat T0 = tangentBasis(z);
    const Mat A0 = sphereHessianNumeric(z) +
                   value<double>(z) * Mat::Identity(dim_ - 1, dim_ - 1);
    const Mat R = T0.transpose() * T;  // change of tangent basis
    A = R.transpose() * A0 * R;
  } else {
    A = T.transpose() * hessian<double>(z) * T;
  }
  return 0.5 * (A + A.transpose());
}

Mat MinkowskiNorm::aMatrix(const Vec& z) const { return aMatrix(z, tangentBasis(z)); }

double MinkowskiNorm::minAEigenvalue(const Vec& z) const {
  Eigen::SelfAdjointEigenSolver<Mat> es(aMatrix(z));
  return es.eigenvalues().minCoeff();
}

Vec MinkowskiNorm::sphereGradientNumeric(const Vec& z) const {
  const Mat T = tangentBasis(z);
  const int n = dim_ - 1;
  const double h = fd_step_;
  Vec g(n);
  for (int i = 0; i < n; ++i) {
    const Vec zp = (z + h * T.col(i)).normalized();
    const Vec zm = (z - h * T.col(i)).normalized();
    g[i] = (sphere_value_(zp) - sphere_value_(zm)) / (2.0 * h);
  }
  return T * g;
}

Mat MinkowskiNorm::sphereHessianNumeric(const Vec& z) const {
  // Central differences in the gnomonic chart y -> (z + T y)/|z + T y|,
  // whose coordinate lines are geodesics through z with vanishing tangential
  // acceleration, so the chart Hessian at 0 is the covariant Hessian.
  const Mat T = tangentBasis(z);
  const int n = dim_ - 1;
  const double h = fd_step_;
  const auto chart = [&](const Vec& y) {
    const Vec p = z + T * y;
    return sphere_value_(p / p.norm());
  };
  const double f0 = chart(Vec::Zero(n));
  Mat H(n, n);
  for (int i = 0; i < n; ++i) {
    Vec y = Vec::Zero(n);
    y[i] = h;
    const double fp = chart(y);
    y[i] = -h;
    const double fm = chart(y);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      Vec ypp = Vec::Zero(n), ypm = Vec::Zero(n), ymp = Vec::Zero(n),
          ymm = Vec::Zero(n);
      ypp[i] = h; ypp[j] = h;
      ypm[i] = h; ypm[j] = -h;
      ymp[i] = -h; ymp[j] = h;
      ymm[i] = -h; ymm[j] = -h;
      H(i, j) = H(j, i) =
          (chart(ypp) - chart(ypm) - chart(ymp) + chart(ymm)) / (4.0 * h * h);
    }
  }
  return H;
}

double MinkowskiNorm::dual(const Vec& xi) const {
  if (xi.size() != dim_) throw DomainError("dual: dimension mismatch");
  const double norm_xi = xi.norm();
  if (norm_xi == 0.0) return 0.0;
  switch (family_) {
    case Family::Isotropic:
      return norm_xi / c_;
    case Family::Ellipsoid:
      return std::sqrt(xi.dot(Minv_ * xi));
    default:
      return dualByOptimization(xi);
  }
}

double MinkowskiNorm::dualByOptimization(const Vec& xi) const {
  const int N = dim_;
  const auto objective = [&](const Vec& z) { return z.dot(xi) / value<double>(z); };

  // Riemannian gradient of <z,xi>/F on the sphere.
  const auto sgrad = [&](const Vec& z) -> Vec {
    const double F = value<double>(z);
    const Vec xi_t = xi - z.dot(xi) * z;
    const Vec gF = sphereGradient(z);
    return xi_t / F - z.dot(xi) * gF / (F * F);
  };

  std::vector<Vec> starts;
  starts.push_back(xi.normalized());
  for (int i = 0; i < N; ++i) {
    starts.push_back(unitAxis(N, i));
    starts.push_back(-unitAxis(N, i));
  }
  {
    Vec d = Vec::Ones(N).normalized();
    starts.push_back(d);
  }
  std::sort(starts.begin(), starts.end(), [&](const Vec& a, const Vec& b) {
    return objective(a) > objective(b);
  });
  if (starts.size() > 8) starts.resize(8);

  const double grad_tol = 1e-12 * xi.norm();
  double best = -std::numeric_limits<double>::infinity();
  bool converged = false;

  for (const auto& start : starts) {
    Vec z = start;
    double prev_gnorm = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 50; ++iter) {
      const Mat T = tangentBasis(z);
      const Vec g_amb = sgrad(z);
      const Vec g = T.transpose() * g_amb;
      const double gnorm = g.norm();
      if (gnorm <= grad_tol) {
        best = std::max(best, objective(z));
        converged = true;
        break;
      }
      // Chart Hessian of the objective by central differences of the
      // analytic gradient; accuracy only affects the convergence rate.
      const int n = N - 1;
      const double h = 1e-6;
      Mat H(n, n);
      for (int j = 0; j < n; ++j) {
        const Vec zp = (z + h * T.col(j)).normalized();
        const Vec zm = (z - h * T.col(j)).normalized();
        H.col(j) = T.transpose() * (sgrad(zp) - sgrad(zm)) / (2.0 * h);
      }
      H = 0.5 * (H + H.transpose());
      // Maximization: H should be negative definite near the optimum; fall
      // back to a gradient step otherwise.
      Vec step;
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      if (es.eigenvalues().maxCoeff() < 0.0) {
        step = -H.ldlt().solve(g);
      } else {
        step = g;
      }
      double step_norm = step.norm();
      if (step_norm > 0.5) step *= 0.5 / step_norm;
      const Vec z_new = (z + T * step).normalized();
      if (objective(z_new) < objective(z) - 1e-15) {
        // Backtrack once; a further failure ends this start.
        const Vec z_half = (z + 0.5 * T * step).normalized();
        if (objective(z_half) < objective(z)) {
          best = std::max(best, objective(z));
          if (gnorm < 1e-9 * std::max(1.0, xi.norm()) ||
              std::abs(gnorm - prev_gnorm) < 1e-15) {
            converged = true;
          }
          break;
        }
        z = z_half;
      } else {
        z = z_new;
      }
      prev_gnorm = gnorm;
      best = std::max(best, objective(z));
      if (iter == 49 && gnorm < 1e-9 * std::max(1.0, xi.norm())) converged = true;
    }
  }
  if (converged) return best;

  // Dense-grid fallback with one polish pass.
  const int grid = (N == 2) ? 8192 : 100000;
  const auto nodes = quasiUniformSphereNodes(N, grid);
  Vec zbest = nodes.front();
  double fbest = objective(zbest);
  for (const auto& z : nodes) {
    const double f = objective(z);
    if (f > fbest) {
      fbest = f;
      zbest = z;
    }
  }
  for (int iter = 0; iter < 30; ++iter) {
    const Mat T = tangentBasis(zbest);
    const Vec g = T.transpose() * sgrad(zbest);
    if (g.norm() <= grad_tol) return objective(zbest);
    const Vec z_new = (zbest + T * (0.1 * g)).normalized();
    if (objective(z_new) <= objective(zbest)) break;
    zbest = z_new;
  }
  const double fallback = std::max(best, objective(zbest));
  if (fallback > 0.0 && std::isfinite(fallback)) return fallback;
  throw EvaluationError("dual norm optimizer failed; best lower bound " +
                        std::to_string(fallback));
}

const Mat& MinkowskiNorm::ellipsoidMatrix() const {
  if (family_ != Family::Ellipsoid)
    throw DomainError("not an ellipsoid norm");
  return M_;
}

const Mat& MinkowskiNorm::ellipsoidInverse() const {
  if (family_ != Family::Ellipsoid)
    throw DomainError("not an ellipsoid norm");
  return Minv_;
}

nlohmann::ordered_json MinkowskiNorm::toJson() const {
  json j;
  j["dim"] = dim_;
  switch (family_) {
    case Family::Isotropic:
      j["family"] = "isotropic";
      j["c"] = c_;
      break;
    case Family::Ellipsoid: {
      j["family"] = "ellipsoid";
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < dim_; ++i) {
        std::vector<double> row(dim_);
        for (int k = 0; k < dim_; ++k) row[k] = M_(i, k);
        rows.push_back(row);
      }
      j["M"] = rows;
      break;
    }
    case Family::Harmonic:
      j["family"] = "harmonic";
      j["eps"] = eps_;
      j["degree"] = degree_;
      j["c0"] = c_;
      break;
    case Family::Custom:
      j["family"] = "custom";
      break;
  }
  return j;
}

MinkowskiNorm MinkowskiNorm::fromJson(const nlohmann::ordered_json& j) {
  const std::string family = j.at("family").get<std::string>();
  const int dim = j.value("dim", 3);
  if (family == "isotropic") return isotropic(dim, j.value("c", 1.0));
  if (family == "ellipsoid") {
    const auto rows = j.at("M").get<std::vector<std::vector<double>>>();
    const int n = static_cast<int>(rows.size());
    Mat M(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) M(i, k) = rows[i][k];
    return ellipsoid(M);
  }
  if (family == "harmonic")
    return harmonic(dim, j.at("eps").get<double>(), j.value("degree", 2),
                    j.value("c0", 1.0));
  throw DomainError("unknown norm family: " + family);
}

MinkowskiNorm MinkowskiNorm::fromSpec(const std::string& spec, int ambient_dim) {
  if (!spec.empty() && spec.front() == '@') {
    std::ifstream in(spec.substr(1));
    if (!in) throw DomainError("cannot open norm file: " + spec.substr(1));
    json j;
    in >> j;
    return fromJson(j);
  }
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw DomainError("empty norm spec");
  const std::string& name = parts[0];
  if (name == "isotropic") {
    const double c = parts.size() > 1 ? std::stod(parts[1]) : 1.0;
    return isotropic(ambient_dim, c);
  }
  if (name == "ellipsoid") {
    if (parts.size() < 2) throw DomainError("ellipsoid spec needs diagonal entries");
    std::vector<double> diag;
    std::stringstream ds(parts[1]);
    while (std::getline(ds, item, ',')) diag.push_back(std::stod(item));
    if (static_cast<int>(diag.size()) != ambient_dim)
      throw DomainError("ellipsoid diagonal has wrong length");
    Mat M = Mat::Zero(ambient_dim, ambient_dim);
    for (int i = 0; i < ambient_dim; ++i) M(i, i) = diag[i];
    return ellipsoid(M);
  }
  if (name == "harmonic") {
    const double eps = parts.size() > 1 ? std::stod(parts[1]) : 0.1;
    const int degree = parts.size() > 2 ? std::stoi(parts[2]) : 2;
    return harmonic(ambient_dim, eps, degree);
  }
  throw DomainError("unknown norm spec: " + spec +
                    " (expected isotropic[:c], ellipsoid:d1,..,dN, harmonic:eps[:deg], or @file)");
}

std::string MinkowskiNorm::describe() const {
  switch (family_) {
    case Family::Isotropic:
      return "isotropic(c=" + std::to_string(c_) + ")";
    case Family::Ellipsoid: {
      std::string s = "ellipsoid(diag=";
      for (int i = 0; i < dim_; ++i)
        s += std::to_string(M_(i, i)) + (i + 1 < dim_ ? "," : ")");
      return s;
    }
    case Family::Harmonic:
      return "harmonic(eps=" + std::to_string(eps_) +
             ",degree=" + std::to_string(degree_) + ")";
    case Family::Custom:
      return "custom";
  }
  return "?";
}

WulffShapeSpec::WulffShapeSpec(MinkowskiNorm n, double radius, Vec x0)
    : norm(std::move(n)), r0(radius), center(std::move(x0)) {
  if (r0 <= 0.0) throw DomainError("Wulff shape radius must be positive");
  if (center.size() != norm.ambientDim())
    throw DomainError("Wulff shape center has wrong dimension");
}

Vec WulffShapeSpec::samplePoint(const Vec& z) const {
  return r0 * norm.cahnHoffman(z) + center;
}

double WulffShapeSpec::membershipResidual(const Vec& x) const {
  return std::abs(norm.dual(x - center) - r0) / r0;
}

}  // namespace wulffcap
