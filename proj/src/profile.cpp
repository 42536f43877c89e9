#include "nlkg/profile.hpp"

#include <cmath>
#include <string>

#include "nlkg/numerics.hpp"

namespace nlkg {

SpatialGrid::SpatialGrid(double half_width, int n) : half_width_(half_width), n_(n) {
  if (!(half_width > 0) || !std::isfinite(half_width)) {
    throw Error(ErrorKind::DomainViolation, "grid half-width must be positive");
  }
  if (n < 16 || n % 2 != 0) {
    throw Error(ErrorKind::DomainViolation, "grid needs an even number of intervals n >= 16");
  }
}

Eigen::VectorXd SpatialGrid::nodes() const {
  return Eigen::VectorXd::LinSpaced(n_ + 1, 0.0, half_width_);
}

double Profile::decay_rate() const { return std::sqrt(params.m() * params.m() - omega * omega); }

double default_half_width(const ModelParams& p, double omega) {
  return kDefaultDecayLengths / std::sqrt(p.m() * p.m() - omega * omega);
}

SpatialGrid default_grid(const ModelParams& p, double omega, int n) {
  return SpatialGrid(default_half_width(p, omega), n);
}

namespace {

struct ClosedFormShape {
  double c;     // m^2 - omega^2
  double beta;  // sqrt(1 - alpha^2)
  double k;     // 2 sqrt(c)
};

ClosedFormShape closed_form_shape(const ModelParams& p, double omega) {
  const double al = alpha(p, omega);
  const double c = p.m() * p.m() - omega * omega;
  return {c, std::sqrt((1 - al) * (1 + al)), 2 * std::sqrt(c)};
}

double shape_value(const ModelParams& p, const ClosedFormShape& s, double x) {
  return std::sqrt(s.c / (p.a() * (1 + s.beta * std::cosh(s.k * x))));
}

// R'/R = -(k/2) beta sinh(kx) / (1 + beta cosh(kx)), written to survive cosh overflow.
double shape_log_slope(const ClosedFormShape& s, double x) {
  const double ch = std::cosh(s.k * x);
  return -(s.k / 2) * std::tanh(s.k * x) / (1 + 1 / (s.beta * ch));
}

void require_window(const ModelParams& p, double omega) {
  if (!default_window(p).contains(omega)) {
    throw Error(ErrorKind::DomainViolation,
                "frequency " + std::to_string(omega) + " outside the admissible window");
  }
}

}  // namespace

double closed_form_value(const ModelParams& p, double omega, double x) {
  return shape_value(p, closed_form_shape(p, omega), std::abs(x));
}

double closed_form_derivative(const ModelParams& p, double omega, double x) {
  const ClosedFormShape s = closed_form_shape(p, omega);
  const double ax = std::abs(x);
  const double d = shape_value(p, s, ax) * shape_log_slope(s, ax);
  return x < 0 ? -d : d;
}

Profile profile_closed_form(const ModelParams& p, double omega, const SpatialGrid& grid) {
  require_window(p, omega);
  const ClosedFormShape s = closed_form_shape(p, omega);
  Profile prof{p, omega, grid, Eigen::VectorXd(grid.n() + 1), Eigen::VectorXd(grid.n() + 1)};
  for (int j = 0; j <= grid.n(); ++j) {
    const double x = grid.x(j);
    prof.values(j) = shape_value(p, s, x);
    prof.derivative(j) = prof.values(j) * shape_log_slope(s, x);
  }
  // Pin the initial condition exactly; the closed form reproduces it only up to rounding.
  prof.values(0) = r_star(p, omega);
  prof.derivative(0) = 0.0;
  check_profile_invariants(prof);
  return prof;
}

Profile profile_closed_form(const ModelParams& p, double omega) {
  require_window(p, omega);
  return profile_closed_form(p, omega, default_grid(p, omega));
}

Profile profile_shoot(const ModelParams& p, double omega, const SpatialGrid& grid,
                      const ShootingOptions& options) {
  require_window(p, omega);
  if (!(options.step > 0)) throw Error(ErrorKind::DomainViolation, "shooting step must be positive");

  const double c = p.m() * p.m() - omega * omega;
  const double kappa = std::sqrt(c);
  const double r0 = r_star(p, omega);
  const double blowup = 2 * p.s_star();
  const double cutoff = options.tail_cutoff * r0;

  const auto accel = [&](double r) { return g_eval(p, r, 1) + c * r; };

  const int substeps = static_cast<int>(std::ceil(grid.spacing() / options.step - 1e-12));
  const double dx = grid.spacing() / substeps;

  Profile prof{p, omega, grid, Eigen::VectorXd(grid.n() + 1), Eigen::VectorXd(grid.n() + 1)};
  prof.values(0) = r0;
  prof.derivative(0) = 0.0;

  double r = r0;
  double v = 0.0;
  int j = 1;
  for (; j <= grid.n(); ++j) {
    for (int s = 0; s < substeps; ++s) {
      const double k1r = v, k1v = accel(r);
      const double k2r = v + 0.5 * dx * k1v, k2v = accel(r + 0.5 * dx * k1r);
      const double k3r = v + 0.5 * dx * k2v, k3v = accel(r + 0.5 * dx * k2r);
      const double k4r = v + dx * k3v, k4v = accel(r + dx * k3r);
      r += dx / 6 * (k1r + 2 * k2r + 2 * k3r + k4r);
      v += dx / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    if (!std::isfinite(r) || std::abs(r) > blowup) {
      throw Error(ErrorKind::IntegrationBlowup,
                  "shooting left the homoclinic orbit at x = " + std::to_string(grid.x(j)) +
                      "; reduce the step");
    }
    if (r <= 0 || v >= 0 || r >= prof.values(j - 1)) {
      throw Error(ErrorKind::IntegrationBlowup,
                  "shooting lost monotone decay at x = " + std::to_string(grid.x(j)) +
                      "; reduce the step");
    }
    prof.values(j) = r;
    prof.derivative(j) = v;
    if (r < cutoff) break;
  }
  // Linearised tail: R'' = c R to leading order once R is tiny.
  for (int i = j + 1; i <= grid.n(); ++i) {
    prof.values(i) = prof.values(j) * std::exp(-kappa * (grid.x(i) - grid.x(j)));
    prof.derivative(i) = -kappa * prof.values(i);
  }
  return prof;
}

void check_profile_invariants(const Profile& prof) {
  const int n = prof.grid.n();
  if (prof.values.size() != n + 1 || prof.derivative.size() != n + 1) {
    throw Error(ErrorKind::ToleranceFailure, "profile arrays do not match the grid");
  }
  if (prof.derivative(0) != 0.0) {
    throw Error(ErrorKind::ToleranceFailure, "profile must satisfy R'(0) = 0");
  }
  for (int j = 0; j <= n; ++j) {
    if (!(prof.values(j) > 0)) {
      throw Error(ErrorKind::ToleranceFailure, "profile must be strictly positive");
    }
    if (j > 0 && !(prof.values(j) < prof.values(j - 1))) {
      throw Error(ErrorKind::ToleranceFailure, "profile must be strictly decreasing");
    }
  }
  if (!(prof.values(n) < 1e-10 * prof.values(0))) {
    throw Error(ErrorKind::ToleranceFailure, "profile has not decayed at x = L; enlarge the grid");
  }
  const double c = prof.params.m() * prof.params.m() - prof.omega * prof.omega;
  const double scale = c * prof.values(0) * prof.values(0);
  if (!(first_integral_residual(prof) < 1e-10 * scale)) {
    throw Error(ErrorKind::ToleranceFailure, "first-integral residual above tolerance");
  }
}

double first_integral_residual(const Profile& prof) {
  const double c = prof.params.m() * prof.params.m() - prof.omega * prof.omega;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < prof.values.size(); ++j) {
    const double r = prof.values(j);
    const double rp = prof.derivative(j);
    worst = std::max(worst, std::abs(rp * rp - c * r * r - 2 * g_eval(prof.params, r, 0)));
  }
  return worst;
}

double mass_of_profile(const Profile& prof) {
  return 2 * simpson(prof.values.array().square(), prof.grid.spacing());
}

double charge_of_profile(const Profile& prof) { return prof.omega * mass_of_profile(prof); }

ProfileEnergy energy_of_profile(const Profile& prof) {
  const double h = prof.grid.spacing();
  const double w2 = prof.omega * prof.omega;
  const Eigen::ArrayXd r = prof.values.array();
  const Eigen::ArrayXd rp = prof.derivative.array();
  const Eigen::ArrayXd w = r.unaryExpr([&](double s) { return w_eval(prof.params, s); });

  // Full line = twice the half line.
  const double direct = simpson((rp.square() + w2 * r.square() + 2 * w).eval(), h);
  const double kinetic = 2 * simpson(rp.square().eval(), h);
  const double mass = 2 * simpson(r.square().eval(), h);
  const double identity = kinetic + w2 * mass;
  return {direct, identity, direct - identity};
}

Eigen::VectorXd omega_derivative(const ModelParams& p, double omega, const SpatialGrid& grid,
                                 double step) {
  const Profile up = profile_closed_form(p, omega + step, grid);
  const Profile down = profile_closed_form(p, omega - step, grid);
  return (up.values - down.values) / (2 * step);
}

double sample(const Profile& prof, double x) {
  const double ax = std::abs(x);
  const int n = prof.grid.n();
  const double h = prof.grid.spacing();
  if (ax >= prof.grid.half_width()) {
    return prof.values(n) * std::exp(-prof.decay_rate() * (ax - prof.grid.half_width()));
  }
  const int j = std::min(static_cast<int>(ax / h), n - 1);
  const double t = (ax - prof.grid.x(j)) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * prof.values(j) + h10 * h * prof.derivative(j) + h01 * prof.values(j + 1) +
         h11 * h * prof.derivative(j + 1);
}

FullLine reflect(const Profile& prof) {
  const int n = prof.grid.n();
  FullLine out{Eigen::VectorXd(2 * n + 1), Eigen::VectorXd(2 * n + 1), Eigen::VectorXd(2 * n + 1)};
  for (int i = 0; i <= 2 * n; ++i) {
    const int j = i - n;
    const int aj = std::abs(j);
    out.x(i) = j * prof.grid.spacing();
    out.values(i) = prof.values(aj);
    out.derivative(i) = j < 0 ? -prof.derivative(aj) : prof.derivative(aj);
  }
  return out;
}

}  // namespace nlkg
