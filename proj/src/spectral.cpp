#include "nlkg/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "nlkg/bifurcation.hpp"
#include "nlkg/numerics.hpp"

namespace nlkg {

HessianSystem assemble(const Profile& prof) {
  const int n = prof.grid.n();
  const double h = prof.grid.spacing();
  const double c = prof.params.m() * prof.params.m() - prof.omega * prof.omega;

  HessianSystem sys{prof, Eigen::VectorXd(n), Eigen::VectorXd(n + 1), Eigen::VectorXd(n),
                    Eigen::VectorXd(n - 1), Eigen::VectorXd(n), 0.0};
  sys.weights.setConstant(2 * h);
  sys.weights(0) = h;
  for (int j = 0; j <= n; ++j) sys.potential(j) = g_eval(prof.params, prof.values(j), 2) + c;

  // Stiffness 2 sum_{j=0}^{n-1} (v_{j+1} - v_j)^2 / h with v_n = 0.
  Eigen::VectorXd stiff_diag = Eigen::VectorXd::Constant(n, 4 / h);
  stiff_diag(0) = 2 / h;
  const Eigen::ArrayXd inv_sqrt_w = sys.weights.array().rsqrt();
  sys.diagonal = stiff_diag.array() * inv_sqrt_w.square() + sys.potential.head(n).array();
  for (int j = 0; j + 1 < n; ++j) sys.off_diagonal(j) = -2 / h * inv_sqrt_w(j) * inv_sqrt_w(j + 1);

  sys.constraint_vector = 2 * prof.omega * prof.values.head(n);
  sys.mass_scalar = sys.weights.dot(prof.values.head(n).cwiseAbs2());
  return sys;
}

Eigen::VectorXd apply_lplus(const HessianSystem& sys, const Eigen::VectorXd& v, Parity parity) {
  const int n = sys.size();
  const double h = sys.profile.grid.spacing();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n + 1);
  for (int j = 0; j < n; ++j) {
    const double left = j == 0 ? (parity == Parity::Even ? v(1) : -v(1)) : v(j - 1);
    const double right = j + 1 == n ? 0.0 : v(j + 1);
    out(j) = -(right - 2 * v(j) + left) / (h * h) + sys.potential(j) * v(j);
  }
  return out;
}

double hessian_form(const HessianSystem& sys, const Eigen::VectorXd& v, double eta,
                    const Eigen::VectorXd& w, double kappa) {
  const int n = sys.size();
  const double h = sys.profile.grid.spacing();
  double grad = 0.0;
  for (int j = 0; j < n; ++j) {
    const double dv = (j + 1 == n ? 0.0 : v(j + 1)) - v(j);
    const double dw = (j + 1 == n ? 0.0 : w(j + 1)) - w(j);
    grad += dv * dw;
  }
  grad *= 2 / h;
  const double pot = (sys.weights.array() * sys.potential.head(n).array() * v.head(n).array() *
                      w.head(n).array())
                         .sum();
  return grad + pot + eta * kappa * sys.mass_scalar;
}

double constraint_residual(const HessianSystem& sys, const Eigen::VectorXd& v, double eta) {
  const int n = sys.size();
  return eta * sys.mass_scalar +
         (sys.weights.array() * sys.constraint_vector.array() * v.head(n).array()).sum();
}

double tangent_norm2(const HessianSystem& sys, const Eigen::VectorXd& v, double eta) {
  const int n = sys.size();
  return eta * eta + sys.weights.dot(v.head(n).cwiseAbs2());
}

namespace {

/// Number of eigenvalues strictly below x.
int sturm_count(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double x) {
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  int count = 0;
  double q = d(0) - x;
  if (q < 0) ++count;
  for (Eigen::Index i = 1; i < d.size(); ++i) {
    if (q == 0) q = tiny;
    q = d(i) - x - e(i - 1) * e(i - 1) / q;
    if (q < 0) ++count;
  }
  return count;
}

/// Solves (T - shift) x = rhs for symmetric tridiagonal T (Thomas / LDL^T).
Eigen::VectorXd tridiagonal_solve(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double shift,
                                  const Eigen::VectorXd& rhs) {
  const Eigen::Index n = d.size();
  Eigen::VectorXd piv(n), y(n);
  piv(0) = d(0) - shift;
  y(0) = rhs(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    const double l = e(i - 1) / piv(i - 1);
    piv(i) = d(i) - shift - l * e(i - 1);
    y(i) = rhs(i) - l * y(i - 1);
  }
  Eigen::VectorXd x(n);
  x(n - 1) = y(n - 1) / piv(n - 1);
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = (y(i) - e(i) * x(i + 1)) / piv(i);
  return x;
}

}  // namespace

double tridiagonal_eigenvalue(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal,
                              int k) {
  const Eigen::Index n = diagonal.size();
  if (k < 0 || k >= n) throw Error(ErrorKind::DomainViolation, "eigenvalue index out of range");
  // Gershgorin bounds.
  double lo = INFINITY, hi = -INFINITY;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(off_diagonal(i - 1)) : 0.0) +
                     (i + 1 < n ? std::abs(off_diagonal(i)) : 0.0);
    lo = std::min(lo, diagonal(i) - r);
    hi = std::max(hi, diagonal(i) + r);
  }
  // Invariant: count(lo) <= k < count(hi).
  for (int it = 0; it < 400; ++it) {
    const double mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) return mid;
    if (sturm_count(diagonal, off_diagonal, mid) > k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  throw Error(ErrorKind::ConvergenceFailure, "Sturm bisection did not converge");
}

ConstrainedEigen constrained_min_eig(const HessianSystem& sys) {
  const int n = sys.size();
  const Eigen::VectorXd sqrt_w = sys.weights.cwiseSqrt();
  const Eigen::VectorXd cv = sqrt_w.cwiseProduct(sys.constraint_vector);
  const double ceta = sys.mass_scalar;
  const double mass = sys.mass_scalar;

  std::array<double, 3> poles{tridiagonal_eigenvalue(sys.diagonal, sys.off_diagonal, 0),
                              tridiagonal_eigenvalue(sys.diagonal, sys.off_diagonal, 1), mass};
  std::sort(poles.begin(), poles.end());

  // Increasing on (poles[0], poles[1]) from -inf to +inf.
  const auto secular = [&](double lambda) {
    return cv.dot(tridiagonal_solve(sys.diagonal, sys.off_diagonal, lambda, cv)) +
           ceta * ceta / (mass - lambda);
  };
  int iterations = 0;
  double lo = poles[0], hi = poles[1];
  double lambda = lo;
  for (; iterations < 400; ++iterations) {
    lambda = lo + (hi - lo) / 2;
    if (lambda <= lo || lambda >= hi) break;
    const double f = secular(lambda);
    if (!std::isfinite(f)) break;
    if (f < 0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
  }
  if (iterations >= 400) {
    throw Error(ErrorKind::ConvergenceFailure, "secular equation iteration cap reached");
  }

  Eigen::VectorXd yv = tridiagonal_solve(sys.diagonal, sys.off_diagonal, lambda, cv);
  double yeta = ceta / (mass - lambda);
  const double norm = std::sqrt(yv.squaredNorm() + yeta * yeta);
  yv /= norm;
  yeta /= norm;

  ConstrainedEigen out{lambda, Eigen::VectorXd::Zero(n + 1), yeta, iterations};
  out.v.head(n) = yv.cwiseQuotient(sqrt_w);
  return out;
}

HessianReport analyze_hessian(const ModelParams& p, double omega, int n) {
  return analyze_hessian(p, omega, default_grid(p, omega, n));
}

HessianReport analyze_hessian(const ModelParams& p, double omega, const SpatialGrid& grid) {
  const int n = grid.n();
  const HessianSystem sys = assemble(profile_closed_form(p, omega, grid));
  const ConstrainedEigen eig = constrained_min_eig(sys);

  const double step = 1e-5 * (p.m() - p.omega_star());
  Eigen::VectorXd dr = omega_derivative(p, omega, grid, step);
  dr(n) = 0.0;
  const double tnorm = std::sqrt(tangent_norm2(sys, dr, 1.0));
  const double overlap =
      std::abs(sys.weights.dot(eig.v.head(n).cwiseProduct(dr.head(n))) + eig.eta) / tnorm;

  return {omega,   n, eig.value, overlap, sigma_prime(p, omega),
          hessian_form(sys, dr, 1.0, dr, 1.0)};
}

}  // namespace nlkg
