#pragma once

// Non-coercivity of E* on the charge constraint when W >= 0 vanishes at some
// s0 > 0 (tau <= 1). The trapezoid test functions
//   u_k(x) = s0 on |x| <= k, s0 (k + 1 - |x|) on k <= |x| <= k + 1, 0 beyond,
// at omega_k = sigma / ||u_k||^2 have H^1 norm growing linearly in k while
// E*(u_k, omega_k) stays bounded.

#include <vector>

#include "nlkg/model.hpp"

namespace nlkg {

struct CoercivityRow {
  int k;
  double omega_k;
  double mass_closed;    // ||u_k||^2 = 2 s0^2 (k + 1/3)
  double mass_quad;
  double grad_closed;    // ||u_k'||^2 = 2 s0^2
  double grad_quad;
  double energy_closed;  // s0^2 + 3 sigma^2 / (4 s0^2 (3k + 1)) + (2/s0) int_0^s0 W
  double energy_quad;
  double h1_norm2;       // mass_closed + grad_closed
};

struct CoercivityTable {
  double s0;
  double sigma;
  double w_integral;    // int_0^s0 W(t) dt, closed form
  double energy_limit;  // s0^2 + (2/s0) w_integral
  std::vector<CoercivityRow> rows;
};

/// params may violate tau > 1 (use ModelParams::relaxed). Throws
/// PreconditionViolation unless |W(s0)| <= 1e-10. Quadratures are composite
/// Simpson on each linear piece of u_k with samples_per_unit intervals per
/// unit length.
CoercivityTable coercivity_demo(const ModelParams& params, double s0, double sigma, int k_max,
                                int samples_per_unit = 2000);

}  // namespace nlkg
