#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "common.hpp"
#include "nlkg/bifurcation.hpp"
#include "nlkg/profile.hpp"

using namespace nlkg;
using testing::rel_err;
using testing::thrown_kind;

namespace {

std::vector<ModelParams> triples() {
  return {testing::tau8(), testing::tau_m1(1.5), testing::tau_m1(1.05)};
}

}  // namespace

TEST_CASE("spatial grid") {
  const SpatialGrid g(10.0, 100);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.x(0) == 0.0);
  CHECK(g.x(100) == doctest::Approx(10.0));
  CHECK(g.nodes().size() == 101);
  CHECK(thrown_kind([] { SpatialGrid(10.0, 8); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([] { SpatialGrid(10.0, 17); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([] { SpatialGrid(-1.0, 64); }) == ErrorKind::DomainViolation);

  const ModelParams p = testing::tau8();
  CHECK(default_half_width(p, 1.9) == doctest::Approx(40 / std::sqrt(0.39)));
  CHECK(default_grid(p, 1.9).n() == 4096);
}

TEST_CASE("closed-form profile at the canonical frequency") {
  const ModelParams p = testing::tau8();
  const Profile prof = profile_closed_form(p, 1.9);
  CHECK(prof.values(0) == r_star(p, 1.9));
  CHECK(std::abs(prof.values(0) - 0.5152467486640052) < 1e-15);
  CHECK(prof.derivative(0) == 0.0);

  // The closed form at x = 0 reproduces R_* up to rounding.
  CHECK(rel_err(closed_form_value(p, 1.9, 0.0), r_star(p, 1.9)) < 1e-14);

  // Exponential tail with rate sqrt(c): fit over the last quarter.
  const int n = prof.grid.n();
  const int j0 = 3 * n / 4;
  const double slope =
      (std::log(prof.values(n)) - std::log(prof.values(j0))) / (prof.grid.x(n) - prof.grid.x(j0));
  CHECK(rel_err(-slope, std::sqrt(0.39)) < 0.05);
  CHECK(prof.decay_rate() == doctest::Approx(std::sqrt(0.39)));

  // R(5) is O(R_* e^{-sqrt(c) 5}).
  const double r5 = closed_form_value(p, 1.9, 5.0);
  const double envelope = prof.values(0) * std::exp(-std::sqrt(0.39) * 5);
  CHECK(r5 / envelope > 0.1);
  CHECK(r5 / envelope < 10);

  // The derivative matches centered differences of the value.
  for (double x : {0.3, 1.0, 4.0, 12.0}) {
    const double h = 1e-5;
    const double fd = (closed_form_value(p, 1.9, x + h) - closed_form_value(p, 1.9, x - h)) / (2 * h);
    CHECK(std::abs(fd - closed_form_derivative(p, 1.9, x)) < 1e-9);
  }
  CHECK(closed_form_value(p, 1.9, -2.0) == closed_form_value(p, 1.9, 2.0));
  CHECK(closed_form_derivative(p, 1.9, -2.0) == -closed_form_derivative(p, 1.9, 2.0));
}

TEST_CASE("profiles need a frequency inside the window") {
  const ModelParams p = testing::tau8();
  CHECK(thrown_kind([&] { profile_closed_form(p, p.omega_star()); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([&] { profile_closed_form(p, p.m()); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([&] { profile_closed_form(p, 2.5); }) == ErrorKind::DomainViolation);
  CHECK(thrown_kind([&] { profile_shoot(p, 1.0, SpatialGrid(10, 64)); }) ==
        ErrorKind::DomainViolation);
  // A grid too short for the tail fails the invariant check.
  CHECK(thrown_kind([&] { profile_closed_form(p, 1.9, SpatialGrid(5.0, 256)); }) ==
        ErrorKind::ToleranceFailure);
}

TEST_CASE("shooting oracle agrees with the closed form") {
  const ModelParams p = testing::tau8();
  const SpatialGrid grid = default_grid(p, 1.9);
  const Profile cf = profile_closed_form(p, 1.9, grid);
  const Profile sh = profile_shoot(p, 1.9, grid);
  CHECK((cf.values - sh.values).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(sh.derivative(0) == 0.0);
  for (int j = 1; j <= grid.n(); ++j) CHECK(sh.values(j) < sh.values(j - 1));

  std::mt19937_64 rng(7);
  for (const ModelParams& q : triples()) {
    const FrequencyWindow w = default_window(q);
    for (int i = 0; i < 20; ++i) {
      const double omega = w.omega_lo + w.width() * ((rng() >> 11) * 0x1.0p-53);
      const SpatialGrid g = default_grid(q, omega);
      const double err =
          (profile_closed_form(q, omega, g).values - profile_shoot(q, omega, g).values)
              .cwiseAbs()
              .maxCoeff();
      CHECK_MESSAGE(err < 1e-8, "omega = " << omega << ", tau = " << q.tau());
    }
  }
}

TEST_CASE("shooting blows up when the step is far too coarse") {
  const ModelParams p = testing::tau_m1(1.05);
  const FrequencyWindow w = default_window(p);
  const double omega = w.omega_lo + 1e-5 * w.width();  // plateau near s_*: the most sensitive case
  const SpatialGrid grid = default_grid(p, omega, 16);
  CHECK(thrown_kind([&] { profile_shoot(p, omega, grid, {.step = 1.0}); }) ==
        ErrorKind::IntegrationBlowup);
  CHECK(thrown_kind([&] { profile_shoot(p, omega, grid, {.step = 0.0}); }) ==
        ErrorKind::DomainViolation);
}

TEST_CASE("first-integral residual") {
  for (const ModelParams& p : triples()) {
    for (double t : {0.1, 0.5, 0.9}) {
      const FrequencyWindow w = default_window(p);
      const double omega = w.omega_lo + t * w.width();
      const Profile prof = profile_closed_form(p, omega);
      const double c = p.m() * p.m() - omega * omega;
      CHECK(first_integral_residual(prof) < 1e-10 * c * prof.values(0) * prof.values(0));
    }
  }

  const ModelParams p = testing::tau8();
  Profile zero = profile_closed_form(p, 1.9);
  zero.values.setZero();
  zero.derivative.setZero();
  CHECK(first_integral_residual(zero) == 0.0);
  CHECK(energy_of_profile(zero).direct == 0.0);

  // RK4 shooting: residual scales like h^4 on the integrated core. The linear
  // tail past the cutoff has its own h-independent residual, so it is excluded.
  const SpatialGrid grid(40.96, 4096);  // spacing 0.01, so each step divides it exactly
  std::vector<double> residuals;
  for (double h : {1e-2, 5e-3, 2.5e-3}) {
    const Profile sh = profile_shoot(p, 1.9, grid, {.step = h, .tail_cutoff = 1e-3});
    Profile core = sh;
    const int keep = 1000;  // x <= 10, still above the cutoff
    core.values = sh.values.head(keep + 1);
    core.derivative = sh.derivative.head(keep + 1);
    residuals.push_back(first_integral_residual(core));
  }
  for (int i = 0; i < 2; ++i) {
    const double ratio = residuals[i] / residuals[i + 1];
    CHECK_MESSAGE(ratio > 12, "ratio " << ratio);
    CHECK_MESSAGE(ratio < 20, "ratio " << ratio);
  }
}

TEST_CASE("charge of the profile") {
  const ModelParams p = testing::tau8();
  const Profile prof = profile_closed_form(p, 1.9);
  CHECK(rel_err(charge_of_profile(prof), sigma(p, 1.9)) < 1e-6);
  CHECK(std::abs(charge_of_profile(prof) - 1.8675) < 1e-3);

  // Linear in omega for a fixed values array.
  Profile scaled = prof;
  scaled.omega = 2 * 1.9 - 2;  // any other frequency: charge is omega * mass
  CHECK(charge_of_profile(scaled) / scaled.omega ==
        doctest::Approx(charge_of_profile(prof) / prof.omega).epsilon(1e-15));

  // sigma -> 0 as omega -> m.
  double previous = INFINITY;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const double s = charge_of_profile(profile_closed_form(p, p.m() - d));
    CHECK(s < previous);
    previous = s;
  }
  CHECK(previous < 0.05);
}

TEST_CASE("energy: direct and identity evaluations agree") {
  for (const ModelParams& p : triples()) {
    const FrequencyWindow w = default_window(p);
    for (double t : {0.05, 0.3, 0.7, 0.95}) {
      const double omega = w.omega_lo + t * w.width();
      const ProfileEnergy e = energy_of_profile(profile_closed_form(p, omega));
      CHECK(e.direct > 0);
      CHECK(std::abs(e.difference) < 1e-8 * std::abs(e.direct));
      CHECK(e.difference == e.direct - e.identity);
    }
  }
}

TEST_CASE("energy matches the exact integral") {
  // e = int_0^{R_*^2} sqrt(c - 2a s + 2b s^2) ds + omega sigma, from the first integral
  // written in s = R^2.
  const ModelParams p = testing::tau_m1(1.05);
  for (double omega : {0.25, 0.4, 0.6, 0.9}) {
    const double c = 1 - omega * omega;
    const double top = r_star(p, omega) * r_star(p, omega);
    const double integral = adaptive_simpson(
        [&](double s) { return std::sqrt(std::max(0.0, c - 2 * p.a() * s + 2 * p.b() * s * s)); },
        0.0, top, 1e-14);
    const double exact = integral + omega * sigma(p, omega);
    CHECK(rel_err(energy_of_profile(profile_closed_form(p, omega)).direct, exact) < 1e-10);
  }
}

TEST_CASE("omega derivative, sampling and reflection") {
  const ModelParams p = testing::tau8();
  const SpatialGrid grid = default_grid(p, 1.9);
  const Profile prof = profile_closed_form(p, 1.9, grid);

  const Eigen::VectorXd dr = omega_derivative(p, 1.9, grid, 1e-5);
  // d/domega of the mass matches d/domega (sigma / omega).
  const double dmass = 2 * 2 * simpson(prof.values.cwiseProduct(dr), grid.spacing());
  const double expected = (sigma_prime(p, 1.9) * 1.9 - sigma(p, 1.9)) / (1.9 * 1.9);
  CHECK(rel_err(dmass, expected) < 1e-6);

  for (int j : {0, 7, 100, 2000}) CHECK(sample(prof, grid.x(j)) == doctest::Approx(prof.values(j)).epsilon(1e-14));
  for (double x : {0.01234, 1.777, 9.5}) {
    CHECK(std::abs(sample(prof, x) - closed_form_value(p, 1.9, x)) < 1e-9);
    CHECK(sample(prof, -x) == sample(prof, x));
  }
  const double beyond = grid.half_width() + 3;
  CHECK(sample(prof, beyond) < prof.values(grid.n()));
  CHECK(sample(prof, beyond) > 0);

  const FullLine fl = reflect(prof);
  const int n = grid.n();
  CHECK(fl.x.size() == 2 * n + 1);
  CHECK(fl.x(0) == doctest::Approx(-grid.half_width()));
  CHECK(fl.values(n) == prof.values(0));
  CHECK(fl.values(n - 5) == fl.values(n + 5));
  CHECK(fl.derivative(n - 5) == -fl.derivative(n + 5));
}
