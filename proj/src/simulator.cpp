#include "nlkg/simulator.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <unsupported/Eigen/FFT>

namespace nlkg {

using cdouble = std::complex<double>;

PeriodicGrid::PeriodicGrid(double half_width, int n_points)
    : half_width_(half_width), n_points_(n_points) {
  if (!(half_width > 0) || !std::isfinite(half_width)) {
    throw Error(ErrorKind::DomainViolation, "periodic box half-width must be positive");
  }
  if (n_points < 128 || n_points % 2 != 0) {
    throw Error(ErrorKind::DomainViolation, "periodic grid needs an even N >= 128");
  }
}

FieldState zero_state(const PeriodicGrid& grid) {
  return {grid, Eigen::VectorXcd::Zero(grid.n_points()), Eigen::VectorXcd::Zero(grid.n_points()),
          0.0};
}

void SimConfig::validate() const {
  if (!(dt > 0) || dt > 0.9 * grid.dx()) {
    throw Error(ErrorKind::DomainViolation, "time step must satisfy 0 < dt <= 0.9 dx");
  }
  if (!(t_end > 0)) throw Error(ErrorKind::DomainViolation, "t_end must be positive");
  if (sample_every < 1) throw Error(ErrorKind::DomainViolation, "sample_every must be >= 1");
  if (!(perturbation.amplitude >= 0)) {
    throw Error(ErrorKind::DomainViolation, "perturbation amplitude must be non-negative");
  }
}

SimConfig default_sim_config(const ModelParams& p, double omega) {
  const PeriodicGrid grid(default_half_width(p, omega), kDefaultSimPoints);
  return {p, omega, {}, grid.dx() / 2, 50.0, grid, 10};
}

namespace {

/// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::VectorXcd perturbation_field(const Perturbation& pert, const PeriodicGrid& grid) {
  const int n = grid.n_points();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  switch (pert.kind) {
    case PerturbationKind::None:
      break;
    case PerturbationKind::Bump:
      for (int j = 0; j < n; ++j) out(j) = pert.amplitude * std::exp(-grid.x(j) * grid.x(j));
      break;
    case PerturbationKind::Random: {
      constexpr int kModes = 6;
      std::mt19937_64 rng(pert.seed);
      std::array<cdouble, kModes> coef;
      std::array<double, kModes> phase;
      for (int k = 0; k < kModes; ++k) {
        coef[k] = cdouble(2 * unit_draw(rng) - 1, 2 * unit_draw(rng) - 1) / std::sqrt(2.0);
        phase[k] = 2 * std::numbers::pi * unit_draw(rng);
      }
      for (int j = 0; j < n; ++j) {
        const double x = grid.x(j);
        cdouble sum = 0.0;
        for (int k = 0; k < kModes; ++k) sum += coef[k] * std::cos(0.5 * k * x + phase[k]);
        out(j) = pert.amplitude * std::exp(-x * x / 8) * sum / double(kModes);
      }
      break;
    }
  }
  return out;
}

Eigen::VectorXcd forward_difference(const Eigen::VectorXcd& f, double dx) {
  const Eigen::Index n = f.size();
  Eigen::VectorXcd out(n);
  for (Eigen::Index j = 0; j < n; ++j) out(j) = (f((j + 1) % n) - f(j)) / dx;
  return out;
}

double sup_norm(const Eigen::VectorXcd& f) { return f.size() ? f.cwiseAbs().maxCoeff() : 0.0; }

/// The three X-components (phi, D+ phi, phi_t) of a state, with their spectra.
struct Components {
  std::array<Eigen::VectorXcd, 3> values;
  std::array<Eigen::VectorXcd, 3> spectra;
};

Components components(const Eigen::VectorXcd& phi, const Eigen::VectorXcd& phi_t, double dx,
                      Eigen::FFT<double>& fft) {
  Components c{{phi, forward_difference(phi, dx), phi_t}, {}};
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXcd spec;
    fft.fwd(spec, c.values[i]);
    c.spectra[i] = std::move(spec);
  }
  return c;
}

/// Orbit of a standing wave on a periodic grid.
class OrbitReference {
 public:
  OrbitReference(const Profile& prof, double omega, const PeriodicGrid& grid) : dx_(grid.dx()) {
    const int n = grid.n_points();
    Eigen::VectorXcd phi(n);
    for (int j = 0; j < n; ++j) phi(j) = sample(prof, grid.x(j));
    const Eigen::VectorXcd phi_t = cdouble(0.0, -omega) * phi;
    ref_ = components(phi, phi_t, dx_, fft_);
  }

  double distance(const FieldState& state) {
    const Components s = components(state.phi, state.phi_t, dx_, fft_);
    const Eigen::Index n = state.phi.size();

    // corr_k = sum_j r_{j+k} conj(s_j), so the X-pairing with ref(. + k dx) is conj(corr_k).
    Eigen::VectorXcd corr = Eigen::VectorXcd::Zero(n);
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXcd tmp;
      const Eigen::VectorXcd prod = ref_.spectra[i].cwiseProduct(s.spectra[i].conjugate());
      fft_.inv(tmp, prod);
      corr += tmp;
    }
    Eigen::Index best = 0;
    corr.cwiseAbs().maxCoeff(&best);

    const auto d2 = [&](Eigen::Index k) {
      k = ((k % n) + n) % n;
      cdouble pairing = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          pairing += s.values[i](j) * std::conj(ref_.values[i]((j + k) % n));
        }
      }
      const cdouble z = std::abs(pairing) > 0 ? pairing / std::abs(pairing) : cdouble(1.0);
      double acc = 0.0;
      for (int i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          acc += std::norm(s.values[i](j) - z * ref_.values[i]((j + k) % n));
        }
      }
      return acc * dx_;
    };

    const double dm = d2(best - 1), d0 = d2(best), dp = d2(best + 1);
    double refined = d0;
    const double curvature = dp - 2 * d0 + dm;
    if (curvature > 0) {
      refined = d0 - (dp - dm) * (dp - dm) / (8 * curvature);
      refined = std::clamp(refined, 0.0, d0);
    }
    return std::sqrt(refined);
  }

 private:
  double dx_;
  Eigen::FFT<double> fft_;
  Components ref_;
};

/// Caches the acceleration at the current positions between steps.
class Leapfrog {
 public:
  Leapfrog(FieldState state, const ModelParams& p)
      : state_(std::move(state)), p_(p), accel_(acceleration(state_, p_)),
        limit_(10 * p.s_star()) {}

  void advance(double dt, double new_time) {
    state_.phi_t += (dt / 2) * accel_;
    state_.phi += dt * state_.phi_t;
    accel_ = acceleration(state_, p_);
    state_.phi_t += (dt / 2) * accel_;
    state_.time = new_time;
    const double sup = sup_norm(state_.phi);
    if (!(sup <= limit_)) {
      throw Error(ErrorKind::NumericBlowup,
                  "sup|phi| exceeded 10 s_* at t = " + std::to_string(state_.time) +
                      " (scheme or dynamics; refine dt and dx before drawing conclusions)");
    }
  }

  const FieldState& state() const { return state_; }

 private:
  FieldState state_;
  ModelParams p_;
  Eigen::VectorXcd accel_;
  double limit_;
};

}  // namespace

FieldState init_state(const SimConfig& cfg) {
  cfg.validate();
  const ModelParams& p = cfg.params;
  if (cfg.grid.half_width() < default_half_width(p, cfg.omega) * (1 - 1e-12)) {
    throw Error(ErrorKind::GridMismatch, "periodic box is shorter than the profile tail length");
  }
  const Profile prof = profile_closed_form(p, cfg.omega);
  const int n = cfg.grid.n_points();
  FieldState st = zero_state(cfg.grid);
  for (int j = 0; j < n; ++j) st.phi(j) = sample(prof, cfg.grid.x(j));
  st.phi_t = cdouble(0.0, -cfg.omega) * st.phi;
  st.phi += perturbation_field(cfg.perturbation, cfg.grid);
  return st;
}

Eigen::VectorXcd acceleration(const FieldState& state, const ModelParams& p) {
  const Eigen::Index n = state.phi.size();
  const double inv_dx2 = 1.0 / (state.grid.dx() * state.grid.dx());
  const double m2 = p.m() * p.m();
  Eigen::VectorXcd out(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const cdouble f = state.phi(j);
    const cdouble lap = (state.phi((j + 1) % n) - 2.0 * f + state.phi((j + n - 1) % n)) * inv_dx2;
    const double r2 = std::norm(f);
    out(j) = lap - m2 * f - (-4 * p.a() * r2 + 6 * p.b() * r2 * r2) * f;
  }
  return out;
}

FieldState step(const FieldState& state, const ModelParams& p, double dt) {
  Leapfrog lf(state, p);
  lf.advance(dt, state.time + dt);
  return lf.state();
}

double energy(const FieldState& state, const ModelParams& p) {
  const double dx = state.grid.dx();
  const Eigen::VectorXcd grad = forward_difference(state.phi, dx);
  double w = 0.0;
  for (Eigen::Index j = 0; j < state.phi.size(); ++j) w += w_eval(p, std::abs(state.phi(j)));
  return dx * (0.5 * state.phi_t.squaredNorm() + 0.5 * grad.squaredNorm() + w);
}

double charge(const FieldState& state) {
  // Eigen's dot conjugates its left operand: phi.dot(phi_t) = sum conj(phi) phi_t.
  return -state.grid.dx() * state.phi.dot(state.phi_t).imag();
}

double x_norm2(const FieldState& state) {
  const double dx = state.grid.dx();
  return dx * (state.phi.squaredNorm() + forward_difference(state.phi, dx).squaredNorm() +
               state.phi_t.squaredNorm());
}

double orbital_distance(const FieldState& state, const Profile& prof, double omega) {
  OrbitReference ref(prof, omega, state.grid);
  return ref.distance(state);
}

SimulationBlowup::SimulationBlowup(double time, TimeSeries partial)
    : Error(ErrorKind::NumericBlowup,
            "numerical blow-up at t = " + std::to_string(time) +
                " (scheme or dynamics; refine dt and dx before drawing conclusions)"),
      time_(time),
      partial_(std::move(partial)) {}

TimeSeries run(const SimConfig& cfg) {
  return run(cfg, init_state(cfg), profile_closed_form(cfg.params, cfg.omega));
}

TimeSeries run(const SimConfig& cfg, FieldState initial, const std::optional<Profile>& reference) {
  cfg.validate();
  if (!(initial.grid == cfg.grid)) {
    throw Error(ErrorKind::GridMismatch, "initial state lives on a different grid");
  }
  const long steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  TimeSeries series;
  series.dt = cfg.t_end / steps;

  std::optional<OrbitReference> orbit;
  if (reference) orbit.emplace(*reference, cfg.omega, cfg.grid);

  const auto record = [&](const FieldState& st) {
    const double dist = orbit ? orbit->distance(st) : std::sqrt(x_norm2(st));
    series.rows.push_back({st.time, energy(st, cfg.params), charge(st), dist, sup_norm(st.phi)});
    const TimeSeriesRow& first = series.rows.front();
    const TimeSeriesRow& last = series.rows.back();
    const auto drift = [](double now, double start) {
      return start != 0 ? std::abs(now - start) / std::abs(start) : std::abs(now - start);
    };
    series.max_energy_drift = std::max(series.max_energy_drift, drift(last.energy, first.energy));
    series.max_charge_drift = std::max(series.max_charge_drift, drift(last.charge, first.charge));
  };

  const double t0 = initial.time;
  Leapfrog lf(std::move(initial), cfg.params);
  record(lf.state());
  try {
    for (long s = 1; s <= steps; ++s) {
      // Times from the step index, so t_end is hit without accumulated rounding.
      lf.advance(series.dt, s == steps ? t0 + cfg.t_end : t0 + s * series.dt);
      if (s % cfg.sample_every == 0 || s == steps) record(lf.state());
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NumericBlowup) throw;
    series.blowup_time = lf.state().time;
    throw SimulationBlowup(lf.state().time, std::move(series));
  }
  return series;
}

}  // namespace nlkg
