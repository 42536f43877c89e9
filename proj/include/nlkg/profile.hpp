#pragma once

// Standing-wave profiles R_omega on the half line [0, L]; the full line is
// recovered by even reflection.

#include <Eigen/Core>

#include "nlkg/model.hpp"

namespace nlkg {

/// Uniform grid x_j = j h, j = 0..n on [0, L]. n must be even (Simpson) and >= 16.
class SpatialGrid {
 public:
  SpatialGrid(double half_width, int n);

  double half_width() const { return half_width_; }
  int n() const { return n_; }
  double spacing() const { return half_width_ / n_; }
  double x(int j) const { return j * spacing(); }
  Eigen::VectorXd nodes() const;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  double half_width_;
  int n_;
};

inline constexpr int kDefaultProfileIntervals = 4096;
inline constexpr double kDefaultDecayLengths = 40.0;

/// L = 40 / sqrt(m^2 - omega^2), so the tail factor at x = L is e^{-40}.
double default_half_width(const ModelParams& p, double omega);
SpatialGrid default_grid(const ModelParams& p, double omega, int n = kDefaultProfileIntervals);

struct Profile {
  ModelParams params;
  double omega;
  SpatialGrid grid;
  Eigen::VectorXd values;      // R(x_j)
  Eigen::VectorXd derivative;  // R'(x_j)

  double decay_rate() const;   // sqrt(m^2 - omega^2)
};

/// Pointwise closed form
///   R(x)^2 = c / (a (1 + sqrt(1 - alpha^2) cosh(2 sqrt(c) x))),  c = m^2 - omega^2,
/// obtained by integrating the zero-level first integral with s = R^2.
double closed_form_value(const ModelParams& p, double omega, double x);
double closed_form_derivative(const ModelParams& p, double omega, double x);

/// Closed-form profile sampled on grid. omega must lie in default_window(p).
Profile profile_closed_form(const ModelParams& p, double omega, const SpatialGrid& grid);
Profile profile_closed_form(const ModelParams& p, double omega);

struct ShootingOptions {
  double step = 1e-4;
  /// Below tail_cutoff * R_*(omega) the orbit is continued by the linear
  /// decay e^{-sqrt(c) x}; integrating the saddle further only amplifies
  /// rounding error by e^{sqrt(c) x}.
  double tail_cutoff = 1e-6;
};

/// Fixed-step RK4 integration of R'' = G'(R) + (m^2 - omega^2) R from
/// R(0) = R_*(omega), R'(0) = 0. Independent oracle for the closed form.
/// Throws IntegrationBlowup when the trajectory leaves the homoclinic orbit.
Profile profile_shoot(const ModelParams& p, double omega, const SpatialGrid& grid,
                      const ShootingOptions& options = {});

/// Throws ToleranceFailure unless the profile is positive, strictly
/// decreasing, starts at (R_*, 0) and has decayed below 1e-10 R(0) at x = L.
void check_profile_invariants(const Profile& prof);

/// max_j |R'^2 - (m^2 - omega^2) R^2 - 2 G(R)|.
double first_integral_residual(const Profile& prof);

/// omega * ||R||^2 over the full line (Simpson on the half line, doubled).
double charge_of_profile(const Profile& prof);

/// E*(R, omega) two ways. direct = 1/2 int (R'^2 + omega^2 R^2 + 2 W(R));
/// identity = int R'^2 + omega^2 int R^2. They coincide on true profiles.
struct ProfileEnergy {
  double direct;
  double identity;
  double difference;
};
ProfileEnergy energy_of_profile(const Profile& prof);

/// ||R||^2_{L^2(R)}.
double mass_of_profile(const Profile& prof);

/// d R_omega / d omega on prof.grid by centered differences of closed-form
/// profiles at omega +/- step.
Eigen::VectorXd omega_derivative(const ModelParams& p, double omega, const SpatialGrid& grid,
                                 double step);

/// R at arbitrary x (even extension). Cubic Hermite between nodes, linear
/// exponential decay beyond L.
double sample(const Profile& prof, double x);

/// Full-line arrays obtained by reflection: x in [-L, L], R even, R' odd.
struct FullLine {
  Eigen::VectorXd x;
  Eigen::VectorXd values;
  Eigen::VectorXd derivative;
};
FullLine reflect(const Profile& prof);

}  // namespace nlkg
