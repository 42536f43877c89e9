#include "nlkg/bifurcation.hpp"

#include <algorithm>
#include <cmath>

#include "nlkg/profile.hpp"

namespace nlkg {

double energy_e(const ModelParams& p, double omega, int n) {
  const Profile prof = profile_closed_form(p, omega, default_grid(p, omega, n));
  return energy_of_profile(prof).direct;
}

LevelClassification classify(const BifurcationReport& rep, double level) {
  const ModelParams& p = rep.params;
  const BranchInverse<double> inv = branch_inverse(rep, level);
  if (inv.truncated) {
    throw Error(ErrorKind::DomainViolation,
                "charge level has a solution inside the excluded frequency margin");
  }
  if (inv.roots.empty()) {
    throw Error(ErrorKind::ToleranceFailure, "no critical point found at this charge level");
  }

  LevelClassification out{level, static_cast<int>(inv.roots.size()), 0, {}};
  double least = INFINITY;
  for (double w : inv.roots) {
    const double e = energy_e(p, w);
    out.branches.push_back({w, e, false, false});
    least = std::min(least, e);
  }
  const double degenerate_scale = kDegeneracyTol * p.a() / (2 * p.b());
  for (Branch& br : out.branches) {
    br.is_minimum = br.energy - least <= kMinimumEnergyTol * std::abs(least);
    br.is_degenerate = br.is_minimum && std::abs(sigma_prime(p, br.omega)) < degenerate_scale;
    if (br.is_minimum) ++out.k_count;
  }
  return out;
}

LevelClassification classify(const ModelParams& p, double level) {
  return classify(critical_omegas(p), level);
}

}  // namespace nlkg
