#include "wulffcap/minkowski1d.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace wulffcap {

namespace {

double safePow(double base, double e) {
  if (base <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(base, e);
}

// Residual of the discrete system. Size N+1, plus the normalization row in
// scaled mode. C multiplies the phi term.
Vec residual(const CapillaryBVP& b, const Vec& u, double C) {
  const int N = b.N;
  const double h = 2.0 * b.theta / N;
  const double ct = 1.0 / std::tan(b.theta);
  const int rows = b.scaledMode() ? N + 2 : N + 1;
  Vec r(rows);
  r[0] = (3.0 * u[0] - 4.0 * u[1] + u[2]) / (2.0 * h) - ct * u[0];
  for (int i = 1; i < N; ++i) {
    r[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h) + u[i] -
           C * b.phi[i] * safePow(u[i], b.p - 1.0);
  }
  r[N] = (3.0 * u[N] - 4.0 * u[N - 1] + u[N - 2]) / (2.0 * h) - ct * u[N];
  if (b.scaledMode()) r[N + 1] = u[N / 2] - 1.0;
  return r;
}

Mat jacobian(const CapillaryBVP& b, const Vec& u, double C) {
  const int N = b.N;
  const double h = 2.0 * b.theta / N;
  const double ct = 1.0 / std::tan(b.theta);
  const bool scaled = b.scaledMode();
  const int rows = scaled ? N + 2 : N + 1;
  const int cols = rows;
  Mat J = Mat::Zero(rows, cols);
  J(0, 0) = 1.5 / h - ct;
  J(0, 1) = -2.0 / h;
  J(0, 2) = 0.5 / h;
  for (int i = 1; i < N; ++i) {
    J(i, i - 1) = 1.0 / (h * h);
    J(i, i + 1) = 1.0 / (h * h);
    J(i, i) = -2.0 / (h * h) + 1.0 -
              C * b.phi[i] * (b.p - 1.0) * safePow(u[i], b.p - 2.0);
    if (scaled) J(i, N + 1) = -b.phi[i] * safePow(u[i], b.p - 1.0);
  }
  J(N, N) = 1.5 / h - ct;
  J(N, N - 1) = -2.0 / h;
  J(N, N - 2) = 0.5 / h;
  if (scaled) J(N + 1, N / 2) = 1.0;
  return J;
}

double minConvexity(const CapillaryBVP& b, const Vec& u) {
  const int N = b.N;
  const double h = 2.0 * b.theta / N;
  double m = std::numeric_limits<double>::infinity();
  for (int i = 1; i < N; ++i)
    m = std::min(m, (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h) + u[i]);
  const double d2lo = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / (h * h);
  const double d2hi =
      (2.0 * u[N] - 5.0 * u[N - 1] + 4.0 * u[N - 2] - u[N - 3]) / (h * h);
  m = std::min({m, d2lo + u[0], d2hi + u[N]});
  return m;
}

}  // namespace

Vec defaultInitialGuess(const CapillaryBVP& b) {
  const Vec t = CapillaryBVP::gridPoints(b.theta, b.N);
  const double mean_phi =
      std::max(b.phi.mean(), 1e-3);
  const double amp = std::pow(mean_phi, 1.0 / std::max(b.p, 1.0));
  Vec u(b.N + 1);
  for (int i = 0; i <= b.N; ++i)
    u[i] = amp * (1.0 - std::cos(b.theta) * std::cos(t[i]));
  return u;
}

Vec CapillaryBVP::gridPoints(double theta, int N) {
  Vec t(N + 1);
  const double h = 2.0 * theta / N;
  for (int i = 0; i <= N; ++i) t[i] = -theta + i * h;
  return t;
}

void CapillaryBVP::validate() const {
  if (!(theta > 0.0 && theta < std::numbers::pi))
    throw DomainError("theta must lie strictly inside (0, pi)");
  if (p < 1.0) throw DomainError("exponent p must satisfy p >= 1");
  if (N < 8 || N % 2 != 0) throw DomainError("grid size N must be even and >= 8");
  if (phi.size() != N + 1) throw DomainError("phi has wrong length");
  if (phi.minCoeff() <= 0.0) throw DomainError("phi must be positive");
}

SolveResult solveMinkowski1D(const CapillaryBVP& bvp, const Vec* initial_guess) {
  bvp.validate();
  const int N = bvp.N;
  const bool scaled = bvp.scaledMode();

  SolveResult out;
  out.scaled_mode = scaled;
  Vec u = initial_guess ? *initial_guess : defaultInitialGuess(bvp);
  if (u.size() != N + 1) throw DomainError("initial guess has wrong length");
  if (u.minCoeff() <= 0.0) throw DomainError("initial guess must be positive");
  double C = 1.0;
  if (scaled) u /= u[N / 2];  // start on the normalization slice

  Vec r = residual(bvp, u, C);
  double rn = r.cwiseAbs().maxCoeff();
  int iter = 0;
  for (; iter < bvp.max_iterations && rn > bvp.newton_tol; ++iter) {
    const Mat J = jacobian(bvp, u, C);
    const Vec d = J.partialPivLu().solve(-r);
    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= bvp.damping_floor) {
      Vec u_try = u + lambda * d.head(N + 1);
      double C_try = scaled ? C + lambda * d[N + 1] : C;
      if (u_try.minCoeff() > 0.0) {
        const Vec r_try = residual(bvp, u_try, C_try);
        const double rn_try = r_try.cwiseAbs().maxCoeff();
        if (std::isfinite(rn_try) && rn_try <= (1.0 - 1e-4 * lambda) * rn) {
          u = std::move(u_try);
          C = C_try;
          r = r_try;
          rn = rn_try;
          accepted = true;
          break;
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // stalled; report whatever residual we reached
  }

  out.u = u;
  out.residual = rn;
  out.iterations = iter;
  out.scale_factor = C;
  out.min_convexity = minConvexity(bvp, u);
  out.converged = (rn <= bvp.converged_tol) && (u.minCoeff() > 0.0) &&
                  (out.min_convexity > 0.0);
  return out;
}

ManufacturedSolution manufactured(const std::string& name, double theta,
                                  double r0, double param) {
  const double c = std::cos(theta);
  if (name == "circle") {
    return {"circle", [=](double t) { return r0 * (1.0 - c * std::cos(t)); },
            [=](double t) { return r0 * c * std::sin(t); },
            [=](double t) { return r0 * c * std::cos(t); }};
  }
  if (name == "smooth") {
    const double g = param;
    const double off = -1.0 - 2.0 * std::sin(theta) * std::sin(theta);
    return {"smooth",
            [=](double t) {
              return r0 * (1.0 - c * std::cos(t)) + g * (std::cos(2 * t) + off);
            },
            [=](double t) { return r0 * c * std::sin(t) - 2 * g * std::sin(2 * t); },
            [=](double t) { return r0 * c * std::cos(t) - 4 * g * std::cos(2 * t); }};
  }
  if (name == "translated") {
    const double d = param;
    return {"translated",
            [=](double t) { return r0 * (1.0 - c * std::cos(t)) + d * std::sin(t); },
            [=](double t) { return r0 * c * std::sin(t) + d * std::cos(t); },
            [=](double t) { return r0 * c * std::cos(t) - d * std::sin(t); }};
  }
  throw DomainError("unknown manufactured solution: " + name);
}

Vec manufacturedRhs(const ManufacturedSolution& ms, double theta, int N,
                    double p) {
  const double ct = 1.0 / std::tan(theta);
  const double robin_hi = ms.du(theta) - ct * ms.u(theta);
  const double robin_lo = -ms.du(-theta) - ct * ms.u(-theta);
  const double scale = std::max(1.0, std::abs(ms.u(theta)));
  if (std::abs(robin_hi) > 1e-10 * scale || std::abs(robin_lo) > 1e-10 * scale)
    throw DomainError("manufactured solution violates the Robin closures");
  const Vec t = CapillaryBVP::gridPoints(theta, N);
  Vec phi(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double u = ms.u(t[i]);
    const double lam = ms.ddu(t[i]) + u;
    if (u <= 0.0)
      throw DomainError("manufactured solution is not positive");
    if (lam <= 0.0)
      throw DomainError("manufactured solution is not strictly convex");
    phi[i] = lam * std::pow(u, 1.0 - p);
  }
  return phi;
}

nlohmann::ordered_json UniquenessReport::toJson() const {
  nlohmann::ordered_json j;
  j["starts"] = starts;
  j["converged"] = converged;
  j["inconclusive"] = inconclusive;
  j["cluster_diameter"] = cluster_diameter;
  j["scaled_mode"] = scaled_mode;
  if (scaled_mode) {
    j["scaling_family_verified"] = scaling_family_verified;
    j["max_scale_factor_error"] = max_scale_factor_error;
  }
  return j;
}

UniquenessReport uniquenessExperiment(const CapillaryBVP& bvp, int n_starts,
                                      std::uint64_t seed) {
  bvp.validate();
  UniquenessReport rep;
  rep.starts = n_starts;
  rep.scaled_mode = bvp.scaledMode();

  std::mt19937_64 rng(seed ^ 0x756e6971ull);
  std::uniform_real_distribution<double> unif(std::log(0.1), std::log(10.0));
  const Vec guess0 = defaultInitialGuess(bvp);

  std::vector<Vec> solutions;
  double max_C_err = 0.0;
  for (int s = 0; s < n_starts; ++s) {
    const double amp = std::exp(unif(rng));
    Vec start = amp * guess0;
    try {
      const SolveResult res = solveMinkowski1D(bvp, &start);
      if (res.converged) {
        Vec v = res.u;
        if (rep.scaled_mode) {
          v /= v[bvp.N / 2];
          max_C_err = std::max(max_C_err, std::abs(res.scale_factor - 1.0));
        }
        solutions.push_back(std::move(v));
      }
    } catch (const std::exception&) {
      // non-convergent start; counted below
    }
  }
  rep.converged = static_cast<int>(solutions.size());
  if (rep.converged < 2) {
    rep.inconclusive = true;
    return rep;
  }
  double diam = 0.0;
  for (size_t a = 0; a < solutions.size(); ++a)
    for (size_t b2 = a + 1; b2 < solutions.size(); ++b2)
      diam = std::max(diam,
                      (solutions[a] - solutions[b2]).cwiseAbs().maxCoeff());
  rep.cluster_diameter = diam;
  rep.max_scale_factor_error = max_C_err;

  if (rep.scaled_mode) {
    // Scaling family: re-solve from c * u for c in {0.5, 2}; all runs must
    // land on the same normalized solution.
    bool ok = true;
    const Vec& uhat = solutions.front();
    for (const double c : {0.5, 2.0}) {
      Vec start = c * uhat;
      const SolveResult res = solveMinkowski1D(bvp, &start);
      if (!res.converged) {
        ok = false;
        continue;
      }
      Vec v = res.u / res.u[bvp.N / 2];
      ok = ok && ((v - uhat).cwiseAbs().maxCoeff() <= 1e-8);
    }
    rep.scaling_family_verified = ok;
  }
  return rep;
}

}  // namespace wulffcap
