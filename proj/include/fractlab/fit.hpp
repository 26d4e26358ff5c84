#pragma once

#include <utility>
#include <vector>

namespace fractlab {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log-space
  double residual = 0.0;   // RMS of log-residuals
};

// Unweighted least squares on (log x, log y).  Requires >= 3 strictly
// positive points.
PowerLawFit fit_powerlaw(const std::vector<std::pair<double, double>>& points);

}  // namespace fractlab
