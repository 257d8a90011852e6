#include "wulffcap/surface.hpp"

#include <cmath>
#include <numbers>

#include "wulffcap/capillary.hpp"

namespace wulffcap {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;

template <typename S>
VecT<S> polarPoint(const S& alpha, const S& phi) {
  using std::cos;
  using std::sin;
  VecT<S> z(3);
  z << sin(alpha) * cos(phi), sin(alpha) * sin(phi), cos(alpha);
  return z;
}

template <typename S>
VecT<S> polarDAlpha(const S& alpha, const S& phi) {
  using std::cos;
  using std::sin;
  VecT<S> z(3);
  z << cos(alpha) * cos(phi), cos(alpha) * sin(phi), -sin(alpha);
  return z;
}

template <typename S>
VecT<S> polarDPhi(const S& alpha, const S& phi) {
  using std::cos;
  using std::sin;
  VecT<S> z(3);
  z << -sin(alpha) * sin(phi), sin(alpha) * cos(phi), S(0);
  return z;
}

template <typename S>
VecT<S> circlePoint(const S& t) {
  using std::cos;
  using std::sin;
  VecT<S> z(2);
  z << sin(t), cos(t);
  return z;
}

template <typename S>
VecT<S> circleDt(const S& t) {
  using std::cos;
  using std::sin;
  VecT<S> z(2);
  z << cos(t), -sin(t);
  return z;
}

template <typename S>
VecT<S> surfaceNormal(const MatT<S>& Xu, const VecT<S>& orient_hint) {
  VecT<S> nu;
  if (Xu.cols() == 2) {
    nu = cross3<S>(Xu.col(0), Xu.col(1));
  } else {
    nu = VecT<S>(2);
    nu[0] = Xu(1, 0);
    nu[1] = -Xu(0, 0);
  }
  nu /= pnorm<S>(nu);
  S align = dotu<S>(nu, orient_hint);
  double re;
  if constexpr (std::is_same_v<S, double>) {
    re = align;
  } else {
    re = align.real();
  }
  if (re < 0.0) nu = -nu;
  return nu;
}

// Capillary Wulff patch, optionally bump-perturbed along the anisotropic
// normal. The domain is {z : h0(z) >= 0} with h0 the base-surface height.
class CapillaryWulffPatch final : public Parametrization {
 public:
  CapillaryWulffPatch(MinkowskiNorm norm, double r0, double omega0, Vec EF,
                      double eps, std::string psi_mode)
      : norm_(std::move(norm)),
        r0_(r0),
        omega0_(omega0),
        EF_(std::move(EF)),
        eps_(eps),
        psi_mode_(std::move(psi_mode)) {
    if (r0_ <= 0.0) throw DomainError("capillary Wulff radius must be positive");
    N_ = norm_.ambientDim();
    center_ = r0_ * omega0_ * EF_;
    if (psi_mode_ != "height2-cos" && psi_mode_ != "height2" &&
        psi_mode_ != "height3-cos")
      throw DomainError("unknown psi mode: " + psi_mode_);

    const Vec pole = unitAxis(N_, N_ - 1);
    h0max_ = heightBase<double>(pole);
    if (h0max_ <= 0.0)
      throw ConstructionError("empty capillary domain: pole height <= 0");
    if (heightBase<double>(-pole) >= 0.0)
      throw ConstructionError("capillary domain is the whole sphere");
    if (N_ == 2) {
      t_plus_ = rootOnBracket(1e-9, kPi);
      t_minus_ = rootOnBracket(-1e-9, -kPi);
    }
  }

  int surfaceDim() const override { return N_ - 1; }
  bool closedSurface() const override { return false; }

  Eigen::Vector2d axisRange(int axis) const override {
    if (N_ == 2) return {t_minus_, t_plus_};
    if (axis == 0) return {0.0, 1.0};
    return {0.0, kTwoPi};
  }
  bool axisPeriodic(int axis) const override { return N_ == 3 && axis == 1; }

  bool complexStepSafe() const override { return norm_.analytic(); }

  BasicGeom<double> basic(const Vec& u) const override {
    return basicT<double>(u);
  }
  BasicGeom<Complex> basicComplex(const VecC& u) const override {
    return basicT<Complex>(u);
  }

  std::optional<Mat> analyticWeingarten(const Vec& u,
                                        const NodeGeom& g) const override {
    (void)u;
    if (eps_ != 0.0) return std::nullopt;
    const Mat A = norm_.aMatrix(g.nu, g.frame);
    return (r0_ * A).inverse().eval();
  }

  std::string describe() const override {
    return "capillary-wulff(r0=" + std::to_string(r0_) +
           ",omega0=" + std::to_string(omega0_) +
           (eps_ != 0.0 ? ",eps=" + std::to_string(eps_) + ",psi=" + psi_mode_
                        : std::string()) +
           "," + norm_.describe() + ")";
  }

  double rootAlphaReal(double phi) const { return rootAlphaT<double>(phi); }
  double tMinus() const { return t_minus_; }
  double tPlus() const { return t_plus_; }
  double r0() const { return r0_; }
  double omega0() const { return omega0_; }
  const Vec& eF() const { return EF_; }
  const MinkowskiNorm& shapeNorm() const { return norm_; }
  double eps() const { return eps_; }

 private:
  // <r0 Phi(z) + center, E_N> = r0 (<Phi(z), E_N> + omega0).
  template <typename S>
  S heightBase(const VecT<S>& z) const {
    return S(r0_) * (norm_.gradient<S>(z)[N_ - 1] + S(omega0_));
  }

  template <typename S>
  S heightBaseD(const VecT<S>& z, const VecT<S>& v) const {
    return S(r0_) * (norm_.hessian<S>(z) * v)[N_ - 1];
  }

  template <typename S>
  VecT<S> domainPoint(const S& a, const S& phi) const {
    if (N_ == 3) return polarPoint<S>(a, phi);
    return circlePoint<S>(a);
  }
  template <typename S>
  VecT<S> domainPointDA(const S& a, const S& phi) const {
    if (N_ == 3) return polarDAlpha<S>(a, phi);
    return circleDt<S>(a);
  }

  // Locates the boundary angle along one meridian (n=2) or one side of the
  // arc (n=1): bisection bracketing, then Newton polish.
  double rootOnBracket(double lo, double hi) const {
    const double phi = 0.0;
    auto h = [&](double a) {
      return heightBase<double>(domainPoint<double>(a, phi));
    };
    double flo = h(lo);
    if (flo <= 0.0) throw ConstructionError("capillary domain degenerate near pole");
    double a = 0.5 * (lo + hi);
    double l = lo, r = hi;
    for (int it = 0; it < 200 && std::abs(r - l) > 1e-12; ++it) {
      a = 0.5 * (l + r);
      if (h(a) > 0.0)
        l = a;
      else
        r = a;
    }
    a = 0.5 * (l + r);
    for (int it = 0; it < 4; ++it) {
      const double da =
          heightBaseD<double>(domainPoint<double>(a, phi),
                              domainPointDA<double>(a, phi));
      a -= h(a) / da;
    }
    return a;
  }

  template <typename S>
  S rootAlphaT(const S& phi) const {
    double phi_re;
    if constexpr (std::is_same_v<S, double>) {
      phi_re = phi;
    } else {
      phi_re = phi.real();
    }
    // Real root by bisection on [0, pi] plus Newton polish.
    auto hreal = [&](double a) {
      return heightBase<double>(polarPoint<double>(a, phi_re));
    };
    double l = 0.0, r = kPi;
    for (int it = 0; it < 200 && (r - l) > 1e-12; ++it) {
      const double m = 0.5 * (l + r);
      if (hreal(m) > 0.0)
        l = m;
      else
        r = m;
    }
    double a_re = 0.5 * (l + r);
    for (int it = 0; it < 4; ++it) {
      const Vec z = polarPoint<double>(a_re, phi_re);
      const Vec za = polarDAlpha<double>(a_re, phi_re);
      a_re -= heightBase<double>(z) / heightBaseD<double>(z, za);
    }
    if constexpr (std::is_same_v<S, double>) {
      return a_re;
    } else {
      S a(a_re, 0.0);
      for (int it = 0; it < 4; ++it) {
        const VecT<S> z = polarPoint<S>(a, phi);
        const VecT<S> za = polarDAlpha<S>(a, phi);
        a -= heightBase<S>(z) / heightBaseD<S>(z, za);
      }
      return a;
    }
  }

  // psi value and directional derivatives along two tangent vectors.
  template <typename S>
  void psiEval(const VecT<S>& z, const MatT<S>& hess, const VecT<S>& v1,
               const VecT<S>& v2, S& psi, S& dpsi1, S& dpsi2) const {
    const S h0 = heightBase<S>(z);
    const S hhat = h0 / S(h0max_);
    const S dh1 = S(r0_ / h0max_) * (hess * v1)[N_ - 1];
    const S dh2 = S(r0_ / h0max_) * (hess * v2)[N_ - 1];
    if (psi_mode_ == "height2") {
      psi = hhat * hhat;
      dpsi1 = S(2) * hhat * dh1;
      dpsi2 = S(2) * hhat * dh2;
      return;
    }
    if (psi_mode_ == "height3-cos") {
      psi = hhat * hhat * hhat * z[0];
      dpsi1 = S(3) * hhat * hhat * dh1 * z[0] + hhat * hhat * hhat * v1[0];
      dpsi2 = S(3) * hhat * hhat * dh2 * z[0] + hhat * hhat * hhat * v2[0];
      return;
    }
    psi = hhat * hhat * z[0];
    dpsi1 = S(2) * hhat * dh1 * z[0] + hhat * hhat * v1[0];
    dpsi2 = S(2) * hhat * dh2 * z[0] + hhat * hhat * v2[0];
  }

  template <typename S>
  BasicGeom<S> basicT(const VecT<S>& u) const {
    BasicGeom<S> out;
    if (N_ == 3) {
      const S s = u[0], phi = u[1];
      const S abar = rootAlphaT<S>(phi);
      // Implicit derivative of the root: dabar = -h_phi / h_alpha at abar.
      const VecT<S> zb = polarPoint<S>(abar, phi);
      const S ha = heightBaseD<S>(zb, polarDAlpha<S>(abar, phi));
      const S hp = heightBaseD<S>(zb, polarDPhi<S>(abar, phi));
      const S dabar = -hp / ha;

      const S alpha = s * abar;
      const VecT<S> z = polarPoint<S>(alpha, phi);
      const VecT<S> za = polarDAlpha<S>(alpha, phi);
      const VecT<S> zp = polarDPhi<S>(alpha, phi);
      const VecT<S> z_s = za * abar;
      const VecT<S> z_phi = za * (s * dabar) + zp;

      const VecT<S> grad = norm_.gradient<S>(z);
      const MatT<S> hess = norm_.hessian<S>(z);

      S rho = S(r0_), drho_s = S(0), drho_p = S(0);
      if (eps_ != 0.0) {
        S psi, d1, d2;
        psiEval<S>(z, hess, z_s, z_phi, psi, d1, d2);
        rho += S(eps_) * psi;
        drho_s = S(eps_) * d1;
        drho_p = S(eps_) * d2;
      }
      out.X = rho * grad + center_.cast<S>();
      out.Xu = MatT<S>(3, 2);
      out.Xu.col(0) = drho_s * grad + rho * (hess * z_s);
      out.Xu.col(1) = drho_p * grad + rho * (hess * z_phi);
      out.nu = (eps_ == 0.0) ? z : surfaceNormal<S>(out.Xu, z);
      return out;
    }
    const S t = u[0];
    const VecT<S> z = circlePoint<S>(t);
    const VecT<S> zt = circleDt<S>(t);
    const VecT<S> grad = norm_.gradient<S>(z);
    const MatT<S> hess = norm_.hessian<S>(z);
    S rho = S(r0_), drho = S(0);
    if (eps_ != 0.0) {
      S psi, d1, d2;
      psiEval<S>(z, hess, zt, zt, psi, d1, d2);
      rho += S(eps_) * psi;
      drho = S(eps_) * d1;
    }
    out.X = rho * grad + center_.cast<S>();
    out.Xu = MatT<S>(2, 1);
    out.Xu.col(0) = drho * grad + rho * (hess * zt);
    out.nu = (eps_ == 0.0) ? z : surfaceNormal<S>(out.Xu, z);
    return out;
  }

  MinkowskiNorm norm_;
  double r0_;
  double omega0_;
  Vec EF_;
  double eps_;
  std::string psi_mode_;
  int N_ = 3;
  Vec center_;
  double h0max_ = 1.0;
  double t_minus_ = 0.0, t_plus_ = 0.0;  // n = 1 arc endpoints
};

class ClosedGaussSurface final : public Parametrization {
 public:
  ClosedGaussSurface(MinkowskiNorm shape, double r0, Vec center)
      : shape_(std::move(shape)), r0_(r0) {
    N_ = shape_.ambientDim();
    center_ = center.size() == N_ ? center : Vec::Zero(N_);
    if (r0_ <= 0.0) throw DomainError("closed Wulff radius must be positive");
  }

  int surfaceDim() const override { return N_ - 1; }
  bool closedSurface() const override { return true; }
  Eigen::Vector2d axisRange(int axis) const override {
    if (N_ == 2) return {0.0, kTwoPi};
    if (axis == 0) return {0.0, 1.0};
    return {0.0, kTwoPi};
  }
  bool axisPeriodic(int axis) const override {
    if (N_ == 2) return true;
    return axis == 1;
  }
  bool complexStepSafe() const override { return shape_.analytic(); }

  BasicGeom<double> basic(const Vec& u) const override {
    return basicT<double>(u);
  }
  BasicGeom<Complex> basicComplex(const VecC& u) const override {
    return basicT<Complex>(u);
  }

  std::optional<Mat> analyticWeingarten(const Vec& u,
                                        const NodeGeom& g) const override {
    (void)u;
    const Mat A = shape_.aMatrix(g.nu, g.frame);
    return (r0_ * A).inverse().eval();
  }

  std::string describe() const override {
    return "closed-wulff(r0=" + std::to_string(r0_) + "," + shape_.describe() +
           ")";
  }

 private:
  template <typename S>
  BasicGeom<S> basicT(const VecT<S>& u) const {
    BasicGeom<S> out;
    if (N_ == 3) {
      const S alpha = u[0] * S(kPi);
      const S phi = u[1];
      const VecT<S> z = polarPoint<S>(alpha, phi);
      const MatT<S> hess = shape_.hessian<S>(z);
      out.X = S(r0_) * shape_.gradient<S>(z) + center_.cast<S>();
      out.Xu = MatT<S>(3, 2);
      out.Xu.col(0) = S(r0_ * kPi) * (hess * polarDAlpha<S>(alpha, phi));
      out.Xu.col(1) = S(r0_) * (hess * polarDPhi<S>(alpha, phi));
      out.nu = z;
      return out;
    }
    const S t = u[0];
    const VecT<S> z = circlePoint<S>(t);
    out.X = S(r0_) * shape_.gradient<S>(z) + center_.cast<S>();
    out.Xu = MatT<S>(2, 1);
    out.Xu.col(0) = S(r0_) * (shape_.hessian<S>(z) * circleDt<S>(t));
    out.nu = z;
    return out;
  }

  MinkowskiNorm shape_;
  double r0_;
  int N_;
  Vec center_;
};

class RadialGraphSurface final : public Parametrization {
 public:
  enum class Profile { Constant, Ellipsoid };

  RadialGraphSurface(int ambient_dim, double radius)
      : profile_(Profile::Constant), N_(ambient_dim), radius_(radius) {}
  explicit RadialGraphSurface(const Mat& B)
      : profile_(Profile::Ellipsoid), N_(static_cast<int>(B.rows())), B_(B) {}

  int surfaceDim() const override { return N_ - 1; }
  bool closedSurface() const override { return true; }
  Eigen::Vector2d axisRange(int axis) const override {
    if (N_ == 2) return {0.0, kTwoPi};
    if (axis == 0) return {0.0, 1.0};
    return {0.0, kTwoPi};
  }
  bool axisPeriodic(int axis) const override {
    if (N_ == 2) return true;
    return axis == 1;
  }
  bool complexStepSafe() const override { return true; }

  BasicGeom<double> basic(const Vec& u) const override {
    return basicT<double>(u);
  }
  BasicGeom<Complex> basicComplex(const VecC& u) const override {
    return basicT<Complex>(u);
  }

  std::optional<Mat> analyticWeingarten(const Vec& u,
                                        const NodeGeom& g) const override {
    (void)u;
    (void)g;
    if (profile_ == Profile::Constant)
      return Mat::Identity(N_ - 1, N_ - 1) / radius_;
    return std::nullopt;
  }

  std::string describe() const override {
    if (profile_ == Profile::Constant)
      return "radial-sphere(r=" + std::to_string(radius_) + ")";
    return "radial-ellipsoid";
  }

 private:
  template <typename S>
  BasicGeom<S> basicT(const VecT<S>& u) const {
    BasicGeom<S> out;
    if (N_ == 3) {
      const S alpha = u[0] * S(kPi);
      const S phi = u[1];
      const VecT<S> z = polarPoint<S>(alpha, phi);
      const VecT<S> za = S(kPi) * polarDAlpha<S>(alpha, phi);
      const VecT<S> zp = polarDPhi<S>(alpha, phi);
      S rho, drho_a, drho_p;
      profileEval<S>(z, za, zp, rho, drho_a, drho_p);
      out.X = rho * z;
      out.Xu = MatT<S>(3, 2);
      out.Xu.col(0) = drho_a * z + rho * za;
      out.Xu.col(1) = drho_p * z + rho * zp;
      out.nu = (profile_ == Profile::Constant) ? z : surfaceNormal<S>(out.Xu, z);
      return out;
    }
    const S t = u[0];
    const VecT<S> z = circlePoint<S>(t);
    const VecT<S> zt = circleDt<S>(t);
    S rho, drho, unused;
    profileEval<S>(z, zt, zt, rho, drho, unused);
    out.X = rho * z;
    out.Xu = MatT<S>(2, 1);
    out.Xu.col(0) = drho * z + rho * zt;
    out.nu = (profile_ == Profile::Constant) ? z : surfaceNormal<S>(out.Xu, z);
    return out;
  }

  template <typename S>
  void profileEval(const VecT<S>& z, const VecT<S>& v1, const VecT<S>& v2,
                   S& rho, S& d1, S& d2) const {
    if (profile_ == Profile::Constant) {
      rho = S(radius_);
      d1 = d2 = S(0);
      return;
    }
    using std::sqrt;
    const VecT<S> Bz = B_.cast<S>() * z;
    const S q = dotu<S>(z, Bz);
    rho = S(1) / sqrt(q);
    const S c = -rho * rho * rho;
    d1 = c * dotu<S>(Bz, v1);
    d2 = c * dotu<S>(Bz, v2);
  }

  Profile profile_;
  int N_;
  double radius_ = 1.0;
  Mat B_;
};

}  // namespace

NodeGeom makeNodeGeom(const BasicGeom<double>& b, int n) {
  NodeGeom g;
  g.X = b.X;
  g.Xu = b.Xu;
  g.nu = b.nu / b.nu.norm();
  const int N = n + 1;
  g.frame = Mat(N, n);
  Vec e1 = b.Xu.col(0);
  e1.normalize();
  g.frame.col(0) = e1;
  if (n == 2) {
    Vec v = b.Xu.col(1) - e1.dot(b.Xu.col(1)) * e1;
    const double vn = v.norm();
    if (vn <= 0.0) throw MeshQualityError("degenerate tangent frame");
    g.frame.col(1) = v / vn;
    g.jac = cross3<double>(b.Xu.col(0), b.Xu.col(1)).norm();
  } else {
    g.jac = b.Xu.col(0).norm();
  }
  if (g.jac <= 0.0) throw MeshQualityError("vanishing area element");
  return g;
}

std::shared_ptr<const Parametrization> makeCapillaryWulffPatch(
    const MinkowskiNorm& norm, double r0, double omega0, double eps,
    const std::string& psi_mode) {
  const Vec EF = eFVector(norm, omega0);
  return std::make_shared<CapillaryWulffPatch>(norm, r0, omega0, EF, eps,
                                               psi_mode);
}

std::shared_ptr<const Parametrization> makeClosedGaussSurface(
    const MinkowskiNorm& shape_norm, double r0, Vec center) {
  return std::make_shared<ClosedGaussSurface>(shape_norm, r0, std::move(center));
}

std::shared_ptr<const Parametrization> makeRadialSphere(int ambient_dim,
                                                        double radius) {
  return std::make_shared<RadialGraphSurface>(ambient_dim, radius);
}

std::shared_ptr<const Parametrization> makeRadialEllipsoid(const Mat& B) {
  return std::make_shared<RadialGraphSurface>(B);
}

namespace {

void verifyNodeInvariants(const NodeGeom& g, int n) {
  const double tol = 1e-10;
  if (std::abs(g.nu.norm() - 1.0) > tol)
    throw MeshQualityError("normal is not unit length");
  for (int i = 0; i < n; ++i) {
    if (std::abs(g.nu.dot(g.frame.col(i))) > tol)
      throw MeshQualityError("frame not orthogonal to normal");
    for (int j = 0; j < n; ++j) {
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g.frame.col(i).dot(g.frame.col(j)) - want) > tol)
        throw MeshQualityError("tangent frame not orthonormal");
    }
  }
}

}  // namespace

Hypersurface buildHypersurface(std::shared_ptr<const Parametrization> par,
                               int level) {
  Hypersurface S;
  S.par = par;
  S.level = level;
  S.n = par->surfaceDim();
  S.closed = par->closedSurface();
  const int N = S.n + 1;

  if (S.n == 2) {
    const int ns = LevelScheme::meridianPoints(level);
    const int nphi = LevelScheme::azimuthPoints(level);
    std::vector<double> xs, ws, xp, wp;
    const auto r0ax = par->axisRange(0);
    gaussLegendre(ns, r0ax[0], r0ax[1], xs, ws);
    const auto r1ax = par->axisRange(1);
    gaussLegendre(nphi, r1ax[0], r1ax[1], xp, wp);
    for (int j = 0; j < nphi; ++j) {
      for (int i = 0; i < ns; ++i) {
        Vec u(2);
        u << xs[i], xp[j];
        NodeGeom g = makeNodeGeom(par->basic(u), 2);
        verifyNodeInvariants(g, 2);
        S.u.push_back(u);
        S.w.push_back(g.jac * ws[i] * wp[j]);
        S.node.push_back(std::move(g));
      }
    }
    if (!S.closed) {
      for (int j = 0; j < nphi; ++j) {
        Vec u(2);
        u << 1.0, xp[j];
        NodeGeom g = makeNodeGeom(par->basic(u), 2);
        verifyNodeInvariants(g, 2);
        const Vec bprime = g.Xu.col(1);
        const double speed = bprime.norm();
        Vec tau = bprime / speed;
        Vec mu = cross3<double>(g.nu, tau);
        if (mu[N - 1] > 0.0) mu = -mu;
        mu.normalize();
        if (std::abs(mu.dot(g.nu)) > 1e-10)
          throw MeshQualityError("co-normal not tangent to the surface");
        if (std::abs(g.X[N - 1]) > 1e-9 * (1.0 + g.X.norm()))
          throw MeshQualityError("boundary node off the supporting plane");
        S.bu.push_back(u);
        S.bw.push_back(speed * wp[j]);
        S.mu.push_back(mu);
        S.btau.push_back(tau);
        S.bnode.push_back(std::move(g));
      }
    }
  } else {
    const auto range = par->axisRange(0);
    std::vector<double> xt, wt;
    compositeGaussLegendre(LevelScheme::curvePanels(level),
                           LevelScheme::curvePointsPerPanel, range[0], range[1],
                           xt, wt);
    for (size_t i = 0; i < xt.size(); ++i) {
      Vec u(1);
      u << xt[i];
      NodeGeom g = makeNodeGeom(par->basic(u), 1);
      verifyNodeInvariants(g, 1);
      S.u.push_back(u);
      S.w.push_back(g.jac * wt[i]);
      S.node.push_back(std::move(g));
    }
    if (!S.closed) {
      for (const double t : {range[0], range[1]}) {
        Vec u(1);
        u << t;
        NodeGeom g = makeNodeGeom(par->basic(u), 1);
        verifyNodeInvariants(g, 1);
        Vec mu = g.Xu.col(0) / g.Xu.col(0).norm();
        if (t == range[0]) mu = -mu;
        if (std::abs(g.X[N - 1]) > 1e-9 * (1.0 + g.X.norm()))
          throw MeshQualityError("boundary node off the supporting plane");
        S.bu.push_back(u);
        S.bw.push_back(1.0);
        S.mu.push_back(mu);
        S.bnode.push_back(std::move(g));
      }
    }
  }
  return S;
}

double Hypersurface::area() const {
  return integrate(*this, [](int) { return 1.0; });
}

double Hypersurface::boundaryLength() const {
  return boundaryIntegrate(*this, [](int) { return 1.0; });
}

double integrate(const Hypersurface& S, const std::function<double(int)>& f) {
  std::vector<double> terms(S.node.size());
  for (size_t i = 0; i < S.node.size(); ++i) {
    const double v = f(static_cast<int>(i));
    if (!std::isfinite(v))
      throw EvaluationError("integrand not finite at node " + std::to_string(i));
    terms[i] = S.w[i] * v;
  }
  return compensatedSum(terms);
}

double integrate(const Hypersurface& S, const std::vector<double>& f) {
  return integrate(S, [&](int i) { return f[i]; });
}

double boundaryIntegrate(const Hypersurface& S,
                         const std::function<double(int)>& f) {
  std::vector<double> terms(S.bnode.size());
  for (size_t i = 0; i < S.bnode.size(); ++i) {
    const double v = f(static_cast<int>(i));
    if (!std::isfinite(v))
      throw EvaluationError("boundary integrand not finite at node " +
                            std::to_string(i));
    terms[i] = S.bw[i] * v;
  }
  return compensatedSum(terms);
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

Vec elementarySymmetric(const Vec& kappa) {
  const int n = static_cast<int>(kappa.size());
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(kappa[i]))
      throw DomainError("elementarySymmetric: non-finite entry");
  Vec sigma = Vec::Zero(n + 1);
  sigma[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::min(i + 1, n); j >= 1; --j)
      sigma[j] += kappa[i] * sigma[j - 1];
  return sigma;
}

Vec normalizedSymmetric(const Vec& sigma, int n) {
  Vec H(n + 1);
  for (int k = 0; k <= n; ++k) H[k] = sigma[k] / binomial(n, k);
  return H;
}

std::vector<Mat> newtonOperators(const Mat& SF, const Vec& sigma) {
  const int n = static_cast<int>(SF.rows());
  std::vector<Mat> P(n + 1);
  P[0] = Mat::Identity(n, n);
  for (int k = 1; k <= n; ++k) P[k] = sigma[k] * Mat::Identity(n, n) - P[k - 1] * SF;
  return P;
}

Mat weingartenAt(const Parametrization& par, const Vec& u, const NodeGeom& g,
                 double* asym_out) {
  const int n = par.surfaceDim();
  if (auto W = par.analyticWeingarten(u, g)) {
    Mat Wm = *W;
    const double asym = 0.5 * (Wm - Wm.transpose()).norm();
    if (asym_out) *asym_out = asym;
    return 0.5 * (Wm + Wm.transpose());
  }
  const int N = n + 1;
  Mat dnudu(N, n);
  if (par.complexStepSafe()) {
    const double h = 1e-20;
    for (int axis = 0; axis < n; ++axis) {
      VecC uc = u.cast<Complex>();
      uc[axis] += Complex(0.0, h);
      dnudu.col(axis) = par.basicComplex(uc).nu.imag() / h;
    }
  } else {
    for (int axis = 0; axis < n; ++axis) {
      const auto range = par.axisRange(axis);
      const double width = range[1] - range[0];
      const double h = 1e-5 * width;
      const bool periodic = par.axisPeriodic(axis);
      auto nuAt = [&](double x) {
        Vec us = u;
        us[axis] = x;
        BasicGeom<double> b = par.basic(us);
        return (b.nu / b.nu.norm()).eval();
      };
      const double x = u[axis];
      if (periodic || (x + h <= range[1] && x - h >= range[0])) {
        dnudu.col(axis) = (nuAt(x + h) - nuAt(x - h)) / (2.0 * h);
      } else if (x + h > range[1]) {
        dnudu.col(axis) =
            (3.0 * nuAt(x) - 4.0 * nuAt(x - h) + nuAt(x - 2.0 * h)) / (2.0 * h);
      } else {
        dnudu.col(axis) =
            (-3.0 * nuAt(x) + 4.0 * nuAt(x + h) - nuAt(x + 2.0 * h)) / (2.0 * h);
      }
    }
  }
  const Mat G = g.Xu.transpose() * g.Xu;
  const Mat coef = G.ldlt().solve(g.Xu.transpose() * g.frame);  // n x n
  const Mat W_amb = dnudu * coef;
  Mat W = g.frame.transpose() * W_amb;
  const double asym = 0.5 * (W - W.transpose()).norm();
  if (asym_out) *asym_out = asym;
  if (asym > 1e-4 * (1.0 + W.norm()))
    throw MeshQualityError("Weingarten asymmetry " + std::to_string(asym) +
                           " signals an under-resolved surface");
  return 0.5 * (W + W.transpose());
}

CurvatureData curvatureAt(const Parametrization& par, const MinkowskiNorm& norm,
                          const Vec& u, const NodeGeom* pre) {
  const int n = par.surfaceDim();
  NodeGeom local;
  if (!pre) {
    local = makeNodeGeom(par.basic(u), n);
    pre = &local;
  }
  CurvatureData c;
  c.dnu = weingartenAt(par, u, *pre, &c.dnu_asym);
  c.trace_dnu = c.dnu.trace();

  const Vec nu = pre->nu / pre->nu.norm();
  const Mat A = norm.aMatrix(nu, pre->frame);
  Eigen::LLT<Mat> llt(A);
  if (llt.info() != Eigen::Success)
    throw AdmissibilityError("A_F not positive definite along the surface");
  c.SF = A * c.dnu;

  // Real spectrum through the symmetric reduction L^T dnu L, similar to
  // A_F dnu.
  const Mat L = llt.matrixL();
  const Mat C = L.transpose() * c.dnu * L;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (C + C.transpose()));
  c.kappaF = es.eigenvalues();

  c.sigma = elementarySymmetric(c.kappaF);
  c.H = normalizedSymmetric(c.sigma, n);
  c.P = newtonOperators(c.SF, c.sigma);
  for (int k = 0; k <= n; ++k) {
    const Mat M = c.dnu * c.P[k];
    const double asym = 0.5 * (M - M.transpose()).norm();
    if (asym > 1e-8 * (1.0 + M.norm()))
      throw ConsistencyError("dnu o P_k lost symmetry (k=" + std::to_string(k) +
                             ")");
  }
  return c;
}

}  // namespace wulffcap
