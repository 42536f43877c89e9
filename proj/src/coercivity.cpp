#include "nlkg/coercivity.hpp"

#include <cmath>

#include "nlkg/numerics.hpp"

namespace nlkg {

namespace {

template <typename F>
double simpson_on(F&& f, double lo, double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / intervals;
  Eigen::VectorXd samples(intervals + 1);
  for (int j = 0; j <= intervals; ++j) samples(j) = f(lo + j * h);
  return simpson(samples, h);
}

}  // namespace

CoercivityTable coercivity_demo(const ModelParams& params, double s0, double sigma, int k_max,
                                int samples_per_unit) {
  if (!(s0 > 0) || !(sigma > 0) || k_max < 1 || samples_per_unit < 2) {
    throw Error(ErrorKind::DomainViolation, "need s0 > 0, sigma > 0, k_max >= 1");
  }
  const double w0 = w_eval(params, s0);
  if (std::abs(w0) > 1e-10) {
    throw Error(ErrorKind::PreconditionViolation,
                "W(s0) must vanish (got " + std::to_string(w0) + "); requires tau <= 1");
  }

  const double a = params.a(), b = params.b(), m = params.m();
  const double s2 = s0 * s0;
  const double w_int = m * m * s0 * s2 / 6 - a * std::pow(s0, 5) / 5 + b * std::pow(s0, 7) / 7;

  CoercivityTable table{s0, sigma, w_int, s2 + 2 / s0 * w_int, {}};
  for (int k = 1; k <= k_max; ++k) {
    const double kk = k;
    const auto ramp = [&](double x) { return s0 * (kk + 1 - x); };
    const int plateau_n = samples_per_unit * k;

    // Half line, doubled by evenness; plateau [0, k] and ramp [k, k+1] separately.
    const double mass = 2 * (simpson_on([&](double) { return s2; }, 0, kk, plateau_n) +
                             simpson_on([&](double x) { return ramp(x) * ramp(x); }, kk, kk + 1,
                                        samples_per_unit));
    const double grad = 2 * simpson_on([&](double) { return s2; }, kk, kk + 1, samples_per_unit);
    const double pot =
        2 * (simpson_on([&](double) { return w_eval(params, s0); }, 0, kk, plateau_n) +
             simpson_on([&](double x) { return w_eval(params, ramp(x)); }, kk, kk + 1,
                        samples_per_unit));

    CoercivityRow row;
    row.k = k;
    row.mass_closed = 2 * s2 * (kk + 1.0 / 3.0);
    row.grad_closed = 2 * s2;
    row.energy_closed = s2 + 3 * sigma * sigma / (4 * s2 * (3 * kk + 1)) + 2 / s0 * w_int;
    row.mass_quad = mass;
    row.grad_quad = grad;
    row.energy_quad = grad / 2 + sigma * sigma / (2 * mass) + pot;
    row.omega_k = sigma / row.mass_closed;
    row.h1_norm2 = row.mass_closed + row.grad_closed;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace nlkg
