#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <numbers>

#include "common.hpp"
#include "nlkg/bifurcation.hpp"
#include "nlkg/simulator.hpp"

using namespace nlkg;
using testing::rel_err;
using testing::thrown_kind;
using cdouble = std::complex<double>;

namespace {

/// (1,1,2) at omega = 1.9 on a box of the default width with n points.
SimConfig canonical(int n) {
  const ModelParams p = testing::tau8();
  SimConfig cfg = default_sim_config(p, 1.9);
  cfg.grid = PeriodicGrid(cfg.grid.half_width(), n);
  cfg.dt = cfg.grid.dx() / 2;
  return cfg;
}

FieldState evolve(FieldState st, const ModelParams& p, double dt, int steps) {
  for (int s = 0; s < steps; ++s) st = step(st, p, dt);
  return st;
}

FieldState cyclic_shift(const FieldState& st, int k) {
  FieldState out = st;
  const int n = st.grid.n_points();
  for (int j = 0; j < n; ++j) {
    out.phi((j + k) % n) = st.phi(j);
    out.phi_t((j + k) % n) = st.phi_t(j);
  }
  return out;
}

FieldState scaled(const FieldState& st, cdouble z) {
  FieldState out = st;
  out.phi *= z;
  out.phi_t *= z;
  return out;
}

FieldState difference(const FieldState& a, const FieldState& b) {
  FieldState out = a;
  out.phi -= b.phi;
  out.phi_t -= b.phi_t;
  return out;
}

/// max_j |phi(t, x_j) - e^{-i omega t} R(x_j)|.
double standing_wave_deviation(const FieldState& st, const ModelParams& p, double omega) {
  const Profile prof = profile_closed_form(p, omega);
  const cdouble phase = std::exp(cdouble(0, -omega * st.time));
  double worst = 0;
  for (int j = 0; j < st.grid.n_points(); ++j) {
    worst = std::max(worst, std::abs(st.phi(j) - phase * sample(prof, st.grid.x(j))));
  }
  return worst;
}

}  // namespace

TEST_CASE("grid and configuration") {
  const PeriodicGrid g(10.0, 200);
  CHECK(g.dx() == doctest::Approx(0.1));
  CHECK(g.x(0) == -10.0);
  CHECK(thrown_kind([] { PeriodicGrid(10.0, 64); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([] { PeriodicGrid(10.0, 201); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([] { PeriodicGrid(0.0, 256); }) == ErrorKind::DomainViolation);

  const SimConfig cfg = default_sim_config(testing::tau8(), 1.9);
  CHECK(cfg.grid.n_points() == kDefaultSimPoints);
  CHECK(cfg.grid.half_width() == doctest::Approx(40 / std::sqrt(0.39)));
  CHECK(cfg.dt == doctest::Approx(cfg.grid.dx() / 2));
  CHECK(cfg.t_end == 50.0);

  SimConfig bad = cfg;
  bad.dt = 0.91 * cfg.grid.dx();
  CHECK(thrown_kind([&] { bad.validate(); }) == ErrorKind::DomainViolation);
  bad = cfg;
  bad.t_end = 0;
  CHECK(thrown_kind([&] { bad.validate(); }) == ErrorKind::DomainViolation);
  bad = cfg;
  bad.sample_every = 0;
  CHECK(thrown_kind([&] { bad.validate(); }) == ErrorKind::DomainViolation);

  bad = cfg;
  bad.grid = PeriodicGrid(20.0, 4096);
  bad.dt = bad.grid.dx() / 2;
  CHECK(thrown_kind([&] { init_state(bad); }) == ErrorKind::GridMismatch);
  CHECK(thrown_kind([&] { run(cfg, zero_state(PeriodicGrid(30.0, 256)), std::nullopt); }) ==
        ErrorKind::GridMismatch);
}

TEST_CASE("conserved quantities of the standing-wave datum") {
  const SimConfig cfg = canonical(4096);
  const FieldState st = init_state(cfg);
  CHECK(rel_err(charge(st), sigma(cfg.params, 1.9)) < 1e-6);
  CHECK(rel_err(energy(st, cfg.params), energy_e(cfg.params, 1.9)) < 1e-3);

  // Quadrature error of the forward-difference energy is O(dx^2).
  const double e = energy_e(cfg.params, 1.9, 8192);
  const double err_coarse = std::abs(energy(init_state(canonical(2048)), cfg.params) - e);
  const double err_fine = std::abs(energy(st, cfg.params) - e);
  CHECK(err_coarse / err_fine == doctest::Approx(4).epsilon(0.1));

  FieldState conj = st;
  conj.phi_t = -st.phi_t;
  CHECK(charge(conj) == -charge(st));
  CHECK(energy(conj, cfg.params) == energy(st, cfg.params));

  const FieldState zero = zero_state(cfg.grid);
  CHECK(energy(zero, cfg.params) == 0.0);
  CHECK(charge(zero) == 0.0);
  CHECK(x_norm2(zero) == 0.0);
}

TEST_CASE("zero data stay zero") {
  const SimConfig cfg = canonical(256);
  const FieldState zero = zero_state(cfg.grid);
  CHECK(acceleration(zero, cfg.params).cwiseAbs().maxCoeff() == 0.0);
  const FieldState later = evolve(zero, cfg.params, cfg.dt, 50);
  CHECK(later.phi.cwiseAbs().maxCoeff() == 0.0);
  CHECK(later.phi_t.cwiseAbs().maxCoeff() == 0.0);
  CHECK(later.time == doctest::Approx(50 * cfg.dt));

  SimConfig short_run = cfg;
  short_run.t_end = 5;
  const TimeSeries ts = run(short_run, zero, std::nullopt);
  CHECK(ts.rows.front().t == 0.0);
  CHECK(ts.rows.back().t == 5.0);
  for (const TimeSeriesRow& row : ts.rows) {
    CHECK(row.energy == 0.0);
    CHECK(row.charge == 0.0);
    CHECK(row.orbital_distance == 0.0);
    CHECK(row.sup_norm == 0.0);
  }
  CHECK(ts.max_energy_drift == 0.0);
}

TEST_CASE("orbital distance") {
  const SimConfig cfg = canonical(2048);
  const Profile prof = profile_closed_form(cfg.params, 1.9);
  const FieldState st = init_state(cfg);
  CHECK(orbital_distance(st, prof, 1.9) < 1e-12);

  // Orbit membership for grid-aligned shifts and any phase.
  for (int k : {1, 17, 300, 2047}) {
    const cdouble z = std::polar(1.0, 0.37 * k);
    CHECK(orbital_distance(scaled(cyclic_shift(st, k), z), prof, 1.9) < 1e-12);
  }

  // A bump perturbation: the distance is invariant under a global phase,
  // bounded by the perturbation norm and equal to a brute-force minimum.
  SimConfig pert_cfg = cfg;
  pert_cfg.perturbation = {PerturbationKind::Bump, 1e-2, 0};
  const FieldState pert = init_state(pert_cfg);
  const double d = orbital_distance(pert, prof, 1.9);
  CHECK(d > 0);
  CHECK(d <= std::sqrt(x_norm2(difference(pert, st))) * (1 + 1e-12));
  CHECK(std::abs(orbital_distance(scaled(pert, std::polar(1.0, 2.1)), prof, 1.9) - d) < 1e-12);

  double brute = INFINITY;
  const double dx = cfg.grid.dx();
  for (int iy = -50; iy <= 50; ++iy) {
    const double y = iy * dx / 50;
    FieldState ref = zero_state(cfg.grid);
    for (int j = 0; j < cfg.grid.n_points(); ++j) {
      ref.phi(j) = sample(prof, cfg.grid.x(j) + y);
    }
    ref.phi_t = cdouble(0, -1.9) * ref.phi;
    for (int iz = -200; iz <= 200; ++iz) {
      const cdouble z = std::polar(1.0, iz * 1e-4);
      brute = std::min(brute, std::sqrt(x_norm2(difference(pert, scaled(ref, z)))));
    }
  }
  CHECK(rel_err(d, brute) < 1e-3);
}

TEST_CASE("plane wave converges at second order") {
  // phi = A e^{i(kx - Omega t)} with Omega^2 = k^2 + m^2 - 4aA^2 + 6bA^4.
  const ModelParams p = testing::tau8();
  const double amp = 0.3, k = 2.0, t_end = 5.0;
  const double omega = std::sqrt(k * k + 4 - 4 * amp * amp + 6 * std::pow(amp, 4));
  std::vector<double> errors;
  for (int n : {128, 256, 512}) {
    const PeriodicGrid grid(std::numbers::pi, n);
    FieldState st = zero_state(grid);
    for (int j = 0; j < n; ++j) {
      st.phi(j) = std::polar(amp, k * grid.x(j));
      st.phi_t(j) = cdouble(0, -omega) * st.phi(j);
    }
    const int steps = n / 2 * 5;
    const double dt = t_end / steps;
    CHECK(dt <= 0.9 * grid.dx());
    st = evolve(st, p, dt, steps);
    double worst = 0;
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(st.phi(j) - std::polar(amp, k * grid.x(j) - omega * t_end)));
    }
    errors.push_back(worst);
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4).epsilon(0.1));
  CHECK(errors[1] / errors[2] == doctest::Approx(4).epsilon(0.1));
}

TEST_CASE("standing wave deviation converges at second order") {
  std::vector<double> deviations;
  for (int n : {1024, 2048}) {
    SimConfig cfg = canonical(n);
    const int steps = static_cast<int>(std::lround(10 / cfg.dt));
    const FieldState st = evolve(init_state(cfg), cfg.params, 10.0 / steps, steps);
    deviations.push_back(standing_wave_deviation(st, cfg.params, 1.9));
  }
  const double ratio = deviations[0] / deviations[1];
  CHECK_MESSAGE(ratio > 3, "ratio " << ratio);
  CHECK_MESSAGE(ratio < 5, "ratio " << ratio);
}

TEST_CASE("phase and translation equivariance") {
  SimConfig cfg = canonical(512);
  cfg.perturbation = {PerturbationKind::Random, 1e-2, 5};
  const FieldState st = init_state(cfg);
  const FieldState evolved = evolve(st, cfg.params, cfg.dt, 200);
  const double scale = evolved.phi.cwiseAbs().maxCoeff();

  const cdouble z = std::polar(1.0, 0.8);
  const FieldState rotated = evolve(scaled(st, z), cfg.params, cfg.dt, 200);
  CHECK((rotated.phi - z * evolved.phi).cwiseAbs().maxCoeff() < 1e-12 * scale);

  const FieldState shifted = evolve(cyclic_shift(st, 37), cfg.params, cfg.dt, 200);
  CHECK((shifted.phi - cyclic_shift(evolved, 37).phi).cwiseAbs().maxCoeff() < 1e-15 * scale);
}

TEST_CASE("energy and charge drift are second order in dt") {
  // A perturbed datum: for the exact standing wave the leading drift term
  // is constant along the orbit and the observed order is higher.
  SimConfig cfg = canonical(1024);
  cfg.perturbation = {PerturbationKind::Bump, 1e-2, 0};
  cfg.t_end = 20;
  std::vector<double> drifts;
  for (int refine : {2, 4, 8}) {
    cfg.dt = cfg.grid.dx() / refine;
    drifts.push_back(run(cfg).max_energy_drift);
  }
  for (int i = 0; i < 2; ++i) {
    const double ratio = drifts[i] / drifts[i + 1];
    CHECK_MESSAGE(ratio > 3, "ratio " << ratio);
    CHECK_MESSAGE(ratio < 5, "ratio " << ratio);
  }
}

TEST_CASE("unperturbed run conserves energy and charge") {
  const SimConfig cfg = default_sim_config(testing::tau8(), 1.9);
  const TimeSeries ts = run(cfg);
  CHECK(ts.rows.front().t == 0.0);
  CHECK(ts.rows.back().t == 50.0);
  for (std::size_t i = 1; i < ts.rows.size(); ++i) CHECK(ts.rows[i].t > ts.rows[i - 1].t);
  CHECK(ts.max_energy_drift < 1e-6);
  CHECK(ts.max_charge_drift < 1e-6);
  CHECK_FALSE(ts.blowup_time);
}

TEST_CASE("blow-up is reported with the partial series") {
  const ModelParams p = testing::tau8();
  SimConfig cfg = canonical(256);
  cfg.t_end = 1;
  FieldState huge = zero_state(cfg.grid);
  huge.phi.setConstant(20 * p.s_star());
  CHECK(thrown_kind([&] { step(huge, p, cfg.dt); }) == ErrorKind::NumericBlowup);
  try {
    run(cfg, huge, std::nullopt);
    FAIL("expected a blow-up");
  } catch (const SimulationBlowup& e) {
    CHECK(e.kind() == ErrorKind::NumericBlowup);
    CHECK(e.partial().rows.size() == 1);
    CHECK(e.partial().blowup_time == e.time());
    CHECK(e.time() > 0);
  }

  // Violating the CFL bound by hand makes the linear part unstable.
  FieldState noisy = init_state(canonical(256));
  noisy.phi(7) += 1e-3;
  CHECK(thrown_kind([&] { evolve(noisy, p, 1.5 * noisy.grid.dx(), 2000); }) ==
        ErrorKind::NumericBlowup);
}
