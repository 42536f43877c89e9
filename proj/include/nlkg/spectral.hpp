#pragma once

// Constrained Hessian of E* at a standing wave, discretised in the even
// sector: unknowns v_0..v_{n-1} on the half-line grid, even reflection at
// x = 0 and v_n = 0 at x = L. Full-line integrals use the weights
// w_0 = h, w_j = 2h.

#include <Eigen/Core>

#include "nlkg/profile.hpp"

namespace nlkg {

struct HessianSystem {
  Profile profile;
  Eigen::VectorXd weights;    // w_j, j = 0..n-1
  Eigen::VectorXd potential;  // G''(R(x_j)) + m^2 - omega^2, j = 0..n
  /// W^{-1/2} K W^{-1/2} + diag(potential): the symmetric tridiagonal
  /// matrix of the L+ quadratic form in L2-orthonormal coordinates.
  Eigen::VectorXd diagonal;
  Eigen::VectorXd off_diagonal;
  Eigen::VectorXd constraint_vector;  // 2 omega R_j, j = 0..n-1
  double mass_scalar;                 // ||R||^2 over the full line

  int size() const { return static_cast<int>(weights.size()); }
};

HessianSystem assemble(const Profile& prof);

/// Discrete L+ v = -v'' + (G''(R) + m^2 - omega^2) v at nodes 0..n-1 for a
/// vector of n+1 nodal values. Even parity reflects v_{-1} = v_1, odd
/// parity v_{-1} = -v_1. The last entry of the result is zero.
enum class Parity { Even, Odd };
Eigen::VectorXd apply_lplus(const HessianSystem& sys, const Eigen::VectorXd& v, Parity parity);

/// H[Y, Z] for Y = (v, eta), Z = (w, kappa): the discrete
/// int v'w' + int (G'' + m^2 - omega^2) v w + eta kappa ||R||^2.
double hessian_form(const HessianSystem& sys, const Eigen::VectorXd& v, double eta,
                    const Eigen::VectorXd& w, double kappa);

/// eta ||R||^2 + 2 omega (R, v); zero on the tangent space.
double constraint_residual(const HessianSystem& sys, const Eigen::VectorXd& v, double eta);

/// eta^2 + ||v||^2.
double tangent_norm2(const HessianSystem& sys, const Eigen::VectorXd& v, double eta);

/// k-th smallest eigenvalue (0-based) of a symmetric tridiagonal matrix by
/// Sturm-count bisection.
double tridiagonal_eigenvalue(const Eigen::VectorXd& diagonal, const Eigen::VectorXd& off_diagonal,
                              int k);

struct ConstrainedEigen {
  double value;
  Eigen::VectorXd v;  // nodal values 0..n (v_n = 0)
  double eta;
  int iterations;
};

/// Minimum of H[Y, Y] over the unit sphere eta^2 + ||v||^2 = 1 intersected
/// with the tangent space. The minimiser satisfies (B - lambda) y = beta c,
/// so lambda is the root of the secular function c^T (B - lambda)^{-1} c
/// between the two smallest poles of B = diag(L+, ||R||^2).
ConstrainedEigen constrained_min_eig(const HessianSystem& sys);

struct HessianReport {
  double omega;
  int n;
  double min_eigenvalue;
  double kernel_overlap;  // |<minimiser, (d_omega R, 1)/norm>|
  double sigma_prime;
  double xi_kernel;       // H[(d_omega R, 1), (d_omega R, 1)], equal to sigma'(omega)
};

/// Assemble at the closed-form profile on default_grid(p, omega, n) and
/// evaluate the diagnostics above. d_omega R uses centered differences with
/// step 1e-5 (m - omega_*).
HessianReport analyze_hessian(const ModelParams& p, double omega, int n = kDefaultProfileIntervals);
HessianReport analyze_hessian(const ModelParams& p, double omega, const SpatialGrid& grid);

}  // namespace nlkg
