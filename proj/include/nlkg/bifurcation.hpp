#pragma once

// Charge curve sigma(omega), the universal threshold tau_*, critical
// frequencies, branch inversion and the equal-area level sigma_2.
//
// Everything that depends only on closed forms is a header template so it
// can be instantiated in long double for oracle runs. Operations that need
// profiles (energies, classification) are double-only and live in
// bifurcation.cpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "nlkg/model.hpp"
#include "nlkg/numerics.hpp"

namespace nlkg {

// ---------------------------------------------------------------------------
// Auxiliary functions of alpha in (0, 1)

namespace detail {

template <typename Scalar>
void require_open_unit(Scalar al) {
  if (!(al > 0 && al < 1)) throw Error(ErrorKind::DomainViolation, "alpha must lie in (0, 1)");
}

/// ln((1 + a) / (1 - a)).
template <typename Scalar>
Scalar log_ratio(Scalar al) {
  using std::atanh;
  return 2 * atanh(al);
}

}  // namespace detail

template <typename Scalar>
Scalar k1(Scalar tau, Scalar al) {
  using std::sqrt;
  detail::require_open_unit(al);
  if (!(tau >= 1)) throw Error(ErrorKind::DomainViolation, "k1 needs tau >= 1");
  return sqrt(tau - al * al) * detail::log_ratio(al);
}

/// k2(alpha) = alpha^2 + (alpha - alpha^3)/2 ln((1+alpha)/(1-alpha)).
template <typename Scalar>
Scalar k2(Scalar al) {
  detail::require_open_unit(al);
  return al * al + (al - al * al * al) / 2 * detail::log_ratio(al);
}

template <typename Scalar>
Scalar k2_prime(Scalar al) {
  detail::require_open_unit(al);
  return 3 * al + (1 - 3 * al * al) / 2 * detail::log_ratio(al);
}

template <typename Scalar>
Scalar k2_second(Scalar al) {
  detail::require_open_unit(al);
  return (4 - 6 * al * al) / (1 - al * al) - 3 * al * detail::log_ratio(al);
}

template <typename Scalar>
struct TauStar {
  Scalar tau;    // sup of k2 over (0, 1)
  Scalar alpha;  // the unique interior zero of k2'
};

/// Maximum of k2: bisection on k2' (positive near 0, -> -inf at 1) to full
/// working precision. Computed once per scalar type.
template <typename Scalar>
const TauStar<Scalar>& tau_star_point() {
  static const TauStar<Scalar> point = [] {
    const Scalar lo = Scalar(1) / 2;  // k2'(1/2) = 3/2 + ln(3)/8 > 0
    Scalar hi = Scalar(0.99);
    while (!(k2_prime(hi) < 0)) hi = (hi + 1) / 2;
    const Scalar as = bisect_signed([](Scalar a) { return k2_prime(a); }, lo, hi, +1, Scalar(0));
    return TauStar<Scalar>{k2(as), as};
  }();
  return point;
}

template <typename Scalar = double>
Scalar tau_star() {
  return tau_star_point<Scalar>().tau;
}

// ---------------------------------------------------------------------------
// Charge curve

/// sigma(omega) = omega / (2 sqrt(2b)) ln((1 + alpha)/(1 - alpha)).
template <typename Scalar>
Scalar sigma(const BasicModelParams<Scalar>& p, Scalar omega) {
  using std::sqrt;
  detail::require_open_frequency(p, omega);
  return omega / (2 * sqrt(2 * p.b())) * detail::log_ratio(alpha(p, omega));
}

/// The same curve written as (a / 4b) k1(alpha(omega)).
template <typename Scalar>
Scalar sigma_via_k1(const BasicModelParams<Scalar>& p, Scalar omega) {
  detail::require_open_frequency(p, omega);
  return p.a() / (4 * p.b()) * k1(p.tau(), alpha(p, omega));
}

/// alpha'(omega) = -2 b omega / (a^2 alpha).
template <typename Scalar>
Scalar alpha_prime(const BasicModelParams<Scalar>& p, Scalar omega) {
  return -2 * p.b() * omega / (p.a() * p.a() * alpha(p, omega));
}

/// sigma'(omega) = (a/2b) alpha' / ((1 - alpha^2) sqrt(tau - alpha^2)) (tau - k2(alpha)).
template <typename Scalar>
Scalar sigma_prime(const BasicModelParams<Scalar>& p, Scalar omega) {
  using std::sqrt;
  detail::require_open_frequency(p, omega);
  const Scalar al = alpha(p, omega);
  const Scalar ap = alpha_prime(p, omega);
  return p.a() / (2 * p.b()) * ap / ((1 - al) * (1 + al) * sqrt(p.tau() - al * al)) *
         (p.tau() - k2(al));
}

// ---------------------------------------------------------------------------
// Critical frequencies

enum class Regime { Supercritical, Critical, Subcritical };

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Supercritical: return "SUPERCRITICAL";
    case Regime::Critical: return "CRITICAL";
    case Regime::Subcritical: return "SUBCRITICAL";
  }
  return "UNKNOWN";
}

/// |tau - tau_*| below this counts as the critical regime.
inline constexpr double kCriticalBand = 1e-9;

template <typename Scalar>
struct BasicBifurcationReport {
  BasicModelParams<Scalar> params;
  Scalar tau;
  Regime regime;
  Scalar tau_star;
  std::optional<Scalar> omega_m;
  std::optional<Scalar> omega_M;
  std::optional<Scalar> omega_s;
  std::optional<Scalar> sigma_m;
  std::optional<Scalar> sigma_M;
  std::optional<Scalar> sigma_s;
  std::optional<Scalar> sigma_2;

  friend bool operator==(const BasicBifurcationReport&, const BasicBifurcationReport&) = default;
};

using BifurcationReport = BasicBifurcationReport<double>;

template <typename Scalar>
Regime regime_of(const BasicModelParams<Scalar>& p) {
  using std::abs;
  const Scalar ts = tau_star<Scalar>();
  if (abs(p.tau() - ts) < Scalar(kCriticalBand)) return Regime::Critical;
  return p.tau() > ts ? Regime::Supercritical : Regime::Subcritical;
}

/// Regime and critical points of sigma. Subcritical: the two roots
/// alpha_1 < alpha_s < alpha_2 of k2 = tau map to omega_m = alpha^{-1}(alpha_2)
/// and omega_M = alpha^{-1}(alpha_1). Critical: omega_s = alpha^{-1}(alpha_s).
template <typename Scalar>
BasicBifurcationReport<Scalar> critical_omegas(const BasicModelParams<Scalar>& p) {
  p.require_regime();
  const TauStar<Scalar>& ts = tau_star_point<Scalar>();
  BasicBifurcationReport<Scalar> rep{p, p.tau(), regime_of(p), ts.tau, {}, {}, {}, {}, {}, {}, {}};

  if (rep.regime == Regime::Critical) {
    rep.omega_s = alpha_inv(p, ts.alpha);
    rep.sigma_s = sigma(p, *rep.omega_s);
  } else if (rep.regime == Regime::Subcritical) {
    const Scalar tau = p.tau();
    const auto level = [tau](Scalar a) { return k2(a) - tau; };
    // k2 < tau near 0 and near 1, k2 > tau at alpha_s.
    const Scalar a1 = bisect_signed(level, Scalar(0), ts.alpha, -1, Scalar(0));
    Scalar hi = Scalar(1);
    bool bracketed = false;
    for (Scalar gap = Scalar(1e-1); gap > 8 * std::numeric_limits<Scalar>::epsilon(); gap /= 10) {
      hi = 1 - gap;
      if (level(hi) < 0) {
        bracketed = true;
        break;
      }
    }
    if (!bracketed) {
      throw Error(ErrorKind::ToleranceFailure, "cannot bracket the upper root of k2 = tau");
    }
    const Scalar a2 = bisect_signed(level, ts.alpha, hi, +1, Scalar(0));
    rep.omega_m = alpha_inv(p, a2);
    rep.omega_M = alpha_inv(p, a1);
    rep.sigma_m = sigma(p, *rep.omega_m);
    rep.sigma_M = sigma(p, *rep.omega_M);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Branch inversion

template <typename Scalar>
struct BranchInverse {
  std::vector<Scalar> roots;  // ascending
  /// A solution lies in the excluded margin next to omega_* or m.
  bool truncated = false;
};

/// Two charge levels closer than this (relative) are treated as equal when
/// matching a level against a critical value of sigma.
inline constexpr double kLevelMatch = 1e-12;

template <typename Scalar>
BranchInverse<Scalar> branch_inverse(const BasicBifurcationReport<Scalar>& rep, Scalar level) {
  using std::abs;
  if (!(level > 0)) throw Error(ErrorKind::DomainViolation, "charge level must be positive");
  const BasicModelParams<Scalar>& p = rep.params;
  const BasicFrequencyWindow<Scalar> window = default_window(p);

  struct Node {
    Scalar omega;
    Scalar value;   // sigma(omega)
    bool critical;  // a critical point of sigma
  };
  std::vector<Node> nodes{{window.omega_lo, sigma(p, window.omega_lo), false}};
  if (rep.omega_m) nodes.push_back({*rep.omega_m, *rep.sigma_m, true});
  if (rep.omega_s) nodes.push_back({*rep.omega_s, *rep.sigma_s, true});
  if (rep.omega_M) nodes.push_back({*rep.omega_M, *rep.sigma_M, true});
  nodes.push_back({window.omega_hi, sigma(p, window.omega_hi), false});

  for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
    if (!window.contains(nodes[i].omega)) {
      throw Error(ErrorKind::ToleranceFailure, "critical frequency falls in the excluded margin");
    }
  }

  BranchInverse<Scalar> out;
  std::vector<bool> matched(nodes.size(), false);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].critical && abs(nodes[i].value - level) <= Scalar(kLevelMatch) * level) {
      matched[i] = true;
      out.roots.push_back(nodes[i].omega);
    }
  }
  const auto f = [&](Scalar w) { return sigma(p, w) - level; };
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (matched[i] || matched[i + 1]) continue;
    const Scalar fa = nodes[i].value - level;
    const Scalar fb = nodes[i + 1].value - level;
    if (fa == 0 && !nodes[i].critical) {
      out.roots.push_back(nodes[i].omega);
    } else if (fb == 0 && !nodes[i + 1].critical && i + 2 == nodes.size()) {
      out.roots.push_back(nodes[i + 1].omega);
    } else if ((fa > 0 && fb < 0) || (fa < 0 && fb > 0)) {
      out.roots.push_back(
          bisect_signed(f, nodes[i].omega, nodes[i + 1].omega, fa > 0 ? 1 : -1, Scalar(0)));
    }
  }
  std::sort(out.roots.begin(), out.roots.end());
  out.truncated = level > nodes.front().value || level < nodes.back().value;
  return out;
}

template <typename Scalar>
BranchInverse<Scalar> branch_inverse(const BasicModelParams<Scalar>& p, Scalar level) {
  return branch_inverse(critical_omegas(p), level);
}

// ---------------------------------------------------------------------------
// Equal-area functions

template <typename Scalar>
struct AreaPair {
  Scalar g1;  // int_{w1}^{w2} (sigma - sigma(t)) dt
  Scalar g2;  // int_{w2}^{w3} (sigma(t) - sigma) dt
};

template <typename Scalar>
Scalar default_area_tolerance() {
  return Scalar(64) * std::numeric_limits<Scalar>::epsilon();
}

template <typename Scalar>
AreaPair<Scalar> g1_g2(const BasicBifurcationReport<Scalar>& rep, Scalar level,
                       Scalar tol = default_area_tolerance<Scalar>()) {
  if (rep.regime != Regime::Subcritical) {
    throw Error(ErrorKind::RegimeViolation, "equal-area functions need 1 < tau < tau_*");
  }
  if (!(level > *rep.sigma_m && level < *rep.sigma_M)) {
    throw Error(ErrorKind::DomainViolation, "level must lie strictly inside (sigma_m, sigma_M)");
  }
  const BranchInverse<Scalar> inv = branch_inverse(rep, level);
  if (inv.roots.size() != 3) {
    throw Error(ErrorKind::ToleranceFailure, "expected three branches inside (sigma_m, sigma_M)");
  }
  const BasicModelParams<Scalar>& p = rep.params;
  const Scalar w1 = inv.roots[0], w2 = inv.roots[1], w3 = inv.roots[2];
  const Scalar g1 = adaptive_simpson([&](Scalar t) { return level - sigma(p, t); }, w1, w2, tol);
  const Scalar g2 = adaptive_simpson([&](Scalar t) { return sigma(p, t) - level; }, w2, w3, tol);
  return {g1, g2};
}

template <typename Scalar>
AreaPair<Scalar> g1_g2(const BasicModelParams<Scalar>& p, Scalar level) {
  return g1_g2(critical_omegas(p), level);
}

/// Unique zero of g1 - g2 on (sigma_m, sigma_M). g1 - g2 increases from
/// -g2(sigma_m) < 0 to g1(sigma_M) > 0, so the endpoint signs are known.
template <typename Scalar>
Scalar sigma2(const BasicBifurcationReport<Scalar>& rep, Scalar rel_tol = Scalar(1e-13),
              Scalar area_tol = default_area_tolerance<Scalar>()) {
  if (rep.regime != Regime::Subcritical) {
    throw Error(ErrorKind::RegimeViolation, "sigma_2 exists only for 1 < tau < tau_*");
  }
  const auto diff = [&](Scalar s) {
    const AreaPair<Scalar> g = g1_g2(rep, s, area_tol);
    return g.g1 - g.g2;
  };
  return bisect_signed(diff, *rep.sigma_m, *rep.sigma_M, -1, rel_tol * *rep.sigma_M);
}

template <typename Scalar>
Scalar sigma2(const BasicModelParams<Scalar>& p) {
  return sigma2(critical_omegas(p));
}

/// critical_omegas plus sigma_2 when subcritical.
template <typename Scalar>
BasicBifurcationReport<Scalar> analyze(const BasicModelParams<Scalar>& p) {
  BasicBifurcationReport<Scalar> rep = critical_omegas(p);
  if (rep.regime == Regime::Subcritical) rep.sigma_2 = sigma2(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Profile-dependent quantities (double only)

/// e(omega) = E*(R_omega, omega) by quadrature of the closed-form profile.
double energy_e(const ModelParams& p, double omega, int n = 4096);

struct Branch {
  double omega;
  double energy;
  bool is_minimum;
  bool is_degenerate;

  friend bool operator==(const Branch&, const Branch&) = default;
};

/// Counts refer to positive solutions; each has a mirror image -R_omega.
struct LevelClassification {
  double sigma;
  int cr_count;
  int k_count;
  std::vector<Branch> branches;

  friend bool operator==(const LevelClassification&, const LevelClassification&) = default;
};

/// Minimality tolerance on energies (relative) and degeneracy threshold on
/// |sigma'| in units of a / 2b.
inline constexpr double kMinimumEnergyTol = 1e-9;
inline constexpr double kDegeneracyTol = 1e-8;

LevelClassification classify(const BifurcationReport& rep, double level);
LevelClassification classify(const ModelParams& p, double level);

}  // namespace nlkg
