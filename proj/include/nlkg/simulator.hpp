#pragma once

// Direct integration of
//   phi_tt - phi_xx + m^2 phi + (-4a|phi|^2 + 6b|phi|^4) phi = 0
// on a periodic box, with conservation and orbital-distance diagnostics.

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "nlkg/profile.hpp"

namespace nlkg {

/// Periodic grid on [-L_d, L_d) with N points, x_j = -L_d + j dx.
class PeriodicGrid {
 public:
  PeriodicGrid(double half_width, int n_points);

  double half_width() const { return half_width_; }
  int n_points() const { return n_points_; }
  double dx() const { return 2 * half_width_ / n_points_; }
  double x(int j) const { return -half_width_ + j * dx(); }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  double half_width_;
  int n_points_;
};

struct FieldState {
  PeriodicGrid grid;
  Eigen::VectorXcd phi;
  Eigen::VectorXcd phi_t;
  double time = 0.0;
};

FieldState zero_state(const PeriodicGrid& grid);

enum class PerturbationKind { None, Bump, Random };

/// Bump: eps exp(-x^2) added to phi. Random: eps exp(-x^2/8) times a
/// seeded random combination of six low cosine modes with complex
/// coefficients, scaled so its sup norm is at most eps.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::None;
  double amplitude = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultSimPoints = 4096;

struct SimConfig {
  ModelParams params;
  double omega;
  Perturbation perturbation;
  double dt;
  double t_end;
  PeriodicGrid grid;
  int sample_every = 10;

  /// Throws DomainViolation unless dt <= 0.9 dx, t_end > 0, sample_every >= 1.
  void validate() const;
};

/// L_d = 40 / sqrt(m^2 - omega^2), N = 4096, dt = dx / 2, t_end = 50.
SimConfig default_sim_config(const ModelParams& p, double omega);

/// Standing wave at t = 0: phi = R + perturbation, phi_t = -i omega R.
FieldState init_state(const SimConfig& cfg);

/// phi_t -> phi_tt for the semi-discrete system.
Eigen::VectorXcd acceleration(const FieldState& state, const ModelParams& p);

/// One kick-drift-kick leapfrog step. Throws NumericBlowup when
/// sup|phi| exceeds 10 s_*.
FieldState step(const FieldState& state, const ModelParams& p, double dt);

/// 1/2 int |phi_t|^2 + 1/2 int |D+ phi|^2 + int W(|phi|), rectangle rule
/// (the periodic trapezoid rule).
double energy(const FieldState& state, const ModelParams& p);
double charge(const FieldState& state);

/// ||(phi, phi_t)||_X^2 with the H^1 part from forward differences.
double x_norm2(const FieldState& state);

/// min over shifts y and phases z of ||state - z ref(. + y)||_X, with
/// ref = (R, -i omega R) resampled from prof. Coarse search over all N
/// cyclic shifts via FFT cross-correlation, then parabolic refinement.
double orbital_distance(const FieldState& state, const Profile& prof, double omega);

struct TimeSeriesRow {
  double t;
  double energy;
  double charge;
  double orbital_distance;
  double sup_norm;
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;
  double dt = 0.0;  // effective step (t_end is hit exactly)
  double max_energy_drift = 0.0;  // relative to |E(0)|, absolute when E(0) = 0
  double max_charge_drift = 0.0;
  std::optional<double> blowup_time;
};

/// Raised by run() when the field blows up; carries the partial series.
/// Never a verdict on the dynamics by itself: rerun at finer dt/dx first.
class SimulationBlowup : public Error {
 public:
  SimulationBlowup(double time, TimeSeries partial);
  double time() const { return time_; }
  const TimeSeries& partial() const { return partial_; }

 private:
  double time_;
  TimeSeries partial_;
};

TimeSeries run(const SimConfig& cfg);

/// Run from explicit initial data. Orbital distances are measured against
/// the standing wave of reference (or against the zero state when absent).
TimeSeries run(const SimConfig& cfg, FieldState initial, const std::optional<Profile>& reference);

}  // namespace nlkg
