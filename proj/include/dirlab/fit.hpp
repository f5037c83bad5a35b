#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace dirlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept. Needs at least 3 points
// and two distinct x values; otherwise nullopt.
std::optional<LinearFit> fit_line(std::span<const double> x, std::span<const double> y);

// Fit of log(y) against log(x). Pairs with a nonpositive entry are dropped
// before the point count is checked.
std::optional<LinearFit> fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace dirlab
