#pragma once

// Double-power nonlinearity G(s) = -a s^4 + b s^6 and the pointwise
// quantities derived from it. Everything here is templated on the scalar
// type so that oracle checks can re-run in extended precision.

#include <cmath>
#include <limits>
#include <string>

#include "nlkg/errors.hpp"

namespace nlkg {

template <typename Scalar>
class BasicModelParams {
 public:
  /// Validated construction: a, b, m > 0 and tau = 2 m^2 b / a^2 > 1.
  static BasicModelParams create(Scalar a, Scalar b, Scalar m) {
    BasicModelParams p = relaxed(a, b, m);
    if (!(p.tau_ > Scalar(1))) {
      throw Error(ErrorKind::RegimeViolation,
                  "tau = 2 m^2 b / a^2 must exceed 1 (got " + std::to_string(double(p.tau_)) + ")");
    }
    return p;
  }

  /// Positivity-only construction. Used by the non-coercivity demo, which
  /// deliberately lives at tau <= 1; omega_star() and friends are unavailable.
  static BasicModelParams relaxed(Scalar a, Scalar b, Scalar m) {
    using std::isfinite;
    if (!isfinite(a) || !isfinite(b) || !isfinite(m)) {
      throw Error(ErrorKind::NonPositiveCoefficient, "coefficients must be finite");
    }
    if (!(a > 0) || !(b > 0) || !(m > 0)) {
      throw Error(ErrorKind::NonPositiveCoefficient, "a, b and m must all be positive");
    }
    return BasicModelParams(a, b, m);
  }

  Scalar a() const { return a_; }
  Scalar b() const { return b_; }
  Scalar m() const { return m_; }
  Scalar tau() const { return tau_; }
  bool in_regime() const { return tau_ > Scalar(1); }

  /// inf W(s)/s^2 over s > 0, i.e. m^2/2 - a^2/(4b).
  Scalar mu() const { return a_ * a_ / (4 * b_) * (tau_ - 1); }

  /// Location and value of the maximum of V(s) = 2as^2 - 2bs^4.
  Scalar s_star() const {
    using std::sqrt;
    return sqrt(a_ / (2 * b_));
  }
  Scalar v_max() const { return a_ * a_ / (2 * b_); }

  Scalar omega_star() const {
    using std::sqrt;
    require_regime();
    return sqrt(m_ * m_ - v_max());
  }

  template <typename Other>
  BasicModelParams<Other> cast() const {
    return BasicModelParams<Other>::relaxed(Other(a_), Other(b_), Other(m_));
  }

  void require_regime() const {
    if (!in_regime()) {
      throw Error(ErrorKind::RegimeViolation, "operation requires tau > 1");
    }
  }

  friend bool operator==(const BasicModelParams&, const BasicModelParams&) = default;

 private:
  BasicModelParams(Scalar a, Scalar b, Scalar m)
      : a_(a), b_(b), m_(m), tau_(2 * m * m * b / (a * a)) {}

  Scalar a_;
  Scalar b_;
  Scalar m_;
  Scalar tau_;
};

using ModelParams = BasicModelParams<double>;

inline ModelParams params_new(double a, double b, double m) { return ModelParams::create(a, b, m); }

/// tau(a, b, m) without validation.
template <typename Scalar>
Scalar tau_of(Scalar a, Scalar b, Scalar m) {
  return 2 * m * m * b / (a * a);
}

// ---------------------------------------------------------------------------
// Nonlinearity

/// G, G' or G'' at s depending on order (0, 1, 2).
template <typename Scalar>
Scalar g_eval(const BasicModelParams<Scalar>& p, Scalar s, int order) {
  const Scalar s2 = s * s;
  switch (order) {
    case 0: return s2 * s2 * (-p.a() + p.b() * s2);
    case 1: return s2 * s * (-4 * p.a() + 6 * p.b() * s2);
    case 2: return s2 * (-12 * p.a() + 30 * p.b() * s2);
    default: throw Error(ErrorKind::DomainViolation, "derivative order must be 0, 1 or 2");
  }
}

/// W(s) = m^2 s^2 / 2 + G(s).
template <typename Scalar>
Scalar w_eval(const BasicModelParams<Scalar>& p, Scalar s) {
  return p.m() * p.m() * s * s / 2 + g_eval(p, s, 0);
}

/// V(s) = -2G(s)/s^2 in polynomial form, so V(0) = 0.
template <typename Scalar>
Scalar potential_v(const BasicModelParams<Scalar>& p, Scalar s) {
  const Scalar s2 = s * s;
  return 2 * p.a() * s2 - 2 * p.b() * s2 * s2;
}

template <typename Scalar>
Scalar omega_star(const BasicModelParams<Scalar>& p) {
  return p.omega_star();
}

// ---------------------------------------------------------------------------
// Frequency parametrisation

namespace detail {

template <typename Scalar>
Scalar closed_slack(Scalar scale) {
  return 64 * std::numeric_limits<Scalar>::epsilon() * scale;
}

template <typename Scalar>
void require_closed_frequency(const BasicModelParams<Scalar>& p, Scalar omega) {
  const Scalar lo = p.omega_star();
  const Scalar slack = closed_slack(p.m());
  if (!(omega >= lo - slack && omega <= p.m() + slack)) {
    throw Error(ErrorKind::DomainViolation, "frequency outside [omega_*, m]");
  }
}

template <typename Scalar>
void require_open_frequency(const BasicModelParams<Scalar>& p, Scalar omega) {
  if (!(omega > p.omega_star() && omega < p.m())) {
    throw Error(ErrorKind::DomainViolation, "frequency must lie strictly inside (omega_*, m)");
  }
}

template <typename Scalar>
Scalar clamp_unit(Scalar x) {
  return x < 0 ? Scalar(0) : (x > 1 ? Scalar(1) : x);
}

}  // namespace detail

/// alpha(omega) = sqrt(2b (m^2 - omega^2)) / a, decreasing from 1 at omega_* to 0 at m.
template <typename Scalar>
Scalar alpha(const BasicModelParams<Scalar>& p, Scalar omega) {
  using std::sqrt;
  detail::require_closed_frequency(p, omega);
  const Scalar c = p.m() * p.m() - omega * omega;
  if (c <= 0) return Scalar(0);
  return detail::clamp_unit(sqrt(2 * p.b() * c) / p.a());
}

template <typename Scalar>
Scalar alpha_inv(const BasicModelParams<Scalar>& p, Scalar al) {
  using std::sqrt;
  p.require_regime();
  const Scalar slack = detail::closed_slack(Scalar(1));
  if (!(al >= -slack && al <= 1 + slack)) {
    throw Error(ErrorKind::DomainViolation, "alpha outside [0, 1]");
  }
  al = detail::clamp_unit(al);
  return p.a() / sqrt(2 * p.b()) * sqrt(p.tau() - al * al);
}

/// Smallest positive root of V(s) = m^2 - omega^2, from the explicit radical
/// R_*^2 = (a / 2b)(1 - sqrt(1 - alpha^2)).
template <typename Scalar>
Scalar r_star(const BasicModelParams<Scalar>& p, Scalar omega) {
  using std::sqrt;
  const Scalar al = alpha(p, omega);
  const Scalar beta = sqrt((1 - al) * (1 + al));
  // 1 - beta = alpha^2 / (1 + beta) avoids cancellation near omega = m.
  return sqrt(p.a() / (2 * p.b()) * (al * al / (1 + beta)));
}

/// Admissible open frequency interval strictly inside (omega_*, m).
template <typename Scalar>
struct BasicFrequencyWindow {
  Scalar omega_lo;
  Scalar omega_hi;

  bool contains(Scalar omega) const { return omega >= omega_lo && omega <= omega_hi; }
  Scalar width() const { return omega_hi - omega_lo; }
};

using FrequencyWindow = BasicFrequencyWindow<double>;

template <typename Scalar>
BasicFrequencyWindow<Scalar> make_window(const BasicModelParams<Scalar>& p, Scalar lo, Scalar hi) {
  const Scalar ws = p.omega_star();
  if (!(ws < lo && lo < hi && hi < p.m())) {
    throw Error(ErrorKind::DomainViolation, "frequency window must satisfy omega_* < lo < hi < m");
  }
  return {lo, hi};
}

/// The window used by profile and bifurcation operations: margins of
/// relative_margin * (m - omega_*) at both ends.
template <typename Scalar>
BasicFrequencyWindow<Scalar> default_window(const BasicModelParams<Scalar>& p,
                                            Scalar relative_margin = Scalar(1e-6)) {
  const Scalar ws = p.omega_star();
  const Scalar delta = relative_margin * (p.m() - ws);
  return make_window(p, ws + delta, p.m() - delta);
}

}  // namespace nlkg
