#pragma once

// Small numerical kernels shared by the modules: bracketed bisection,
// composite Simpson on uniform samples and adaptive Simpson.

#include <Eigen/Core>
#include <cmath>
#include <limits>
#include <utility>

#include "nlkg/errors.hpp"

namespace nlkg {

/// Bisection on [lo, hi] where f(lo) has sign sign_lo (+1/-1) and f(hi) has
/// the opposite sign. The endpoint values are never evaluated, so the bracket
/// may sit on singularities of f. Stops when the bracket is narrower than
/// x_tol or cannot shrink any further.
template <typename Scalar, typename F>
Scalar bisect_signed(F&& f, Scalar lo, Scalar hi, int sign_lo, Scalar x_tol, int max_iter = 400) {
  using std::abs;
  for (int it = 0; it < max_iter; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (!(hi - lo > x_tol) || mid <= lo || mid >= hi) return mid;
    const Scalar fm = f(mid);
    if (fm == 0) return mid;
    if ((fm > 0) == (sign_lo > 0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorKind::ConvergenceFailure, "bisection iteration cap reached");
}

/// Bisection with endpoint evaluation; throws ToleranceFailure when [lo, hi]
/// does not bracket a sign change.
template <typename Scalar, typename F>
Scalar bisect(F&& f, Scalar lo, Scalar hi, Scalar x_tol, int max_iter = 400) {
  const Scalar flo = f(lo);
  const Scalar fhi = f(hi);
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw Error(ErrorKind::ToleranceFailure, "root is not bracketed");
  }
  return bisect_signed(f, lo, hi, flo > 0 ? 1 : -1, x_tol, max_iter);
}

/// Composite Simpson over uniformly spaced samples; the number of intervals
/// (size - 1) must be even.
template <typename Derived>
typename Derived::Scalar simpson(const Eigen::DenseBase<Derived>& f, typename Derived::Scalar h) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = f.size() - 1;
  if (n < 2 || n % 2 != 0) {
    throw Error(ErrorKind::DomainViolation, "Simpson rule needs an even, positive number of intervals");
  }
  Scalar odd = 0;
  Scalar even = 0;
  for (Eigen::Index j = 1; j < n; j += 2) odd += f(j);
  for (Eigen::Index j = 2; j < n; j += 2) even += f(j);
  return h / 3 * (f(0) + f(n) + 4 * odd + 2 * even);
}

namespace detail {

template <typename Scalar, typename F>
Scalar adaptive_simpson_step(F& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb, Scalar whole,
                             Scalar tol, int depth) {
  using std::abs;
  const Scalar m = (a + b) / 2;
  const Scalar lm = (a + m) / 2;
  const Scalar rm = (m + b) / 2;
  const Scalar flm = f(lm);
  const Scalar frm = f(rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Scalar delta = left + right - whole;
  const Scalar roundoff = 4 * std::numeric_limits<Scalar>::epsilon() * (abs(left) + abs(right));
  if (depth <= 0 || abs(delta) <= 15 * tol || abs(delta) <= roundoff) {
    return left + right + delta / 15;
  }
  return adaptive_simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction; tol is absolute.
template <typename Scalar, typename F>
Scalar adaptive_simpson(F&& f, Scalar a, Scalar b, Scalar tol, int max_depth = 48) {
  if (a == b) return Scalar(0);
  const Scalar fa = f(a);
  const Scalar fb = f(b);
  const Scalar m = (a + b) / 2;
  const Scalar fm = f(m);
  const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return detail::adaptive_simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace nlkg
