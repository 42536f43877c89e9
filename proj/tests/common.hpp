#pragma once

#include <cmath>
#include <optional>

#include "nlkg/errors.hpp"
#include "nlkg/model.hpp"

namespace testing {

/// The kind of nlkg::Error raised by f, or nullopt if it returns normally.
template <typename F>
std::optional<nlkg::ErrorKind> thrown_kind(F&& f) {
  try {
    f();
  } catch (const nlkg::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

inline nlkg::ModelParams tau8() { return nlkg::ModelParams::create(1, 1, 2); }
inline nlkg::ModelParams tau_m1(double tau) {
  return nlkg::ModelParams::create(std::sqrt(2 / tau), 1, 1);
}

}  // namespace testing
