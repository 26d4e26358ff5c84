#include "fractlab/fit.hpp"

#include <cmath>

#include "fractlab/errors.hpp"

namespace fractlab {

PowerLawFit fit_powerlaw(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw ValidationError("fit_powerlaw: need >= 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0.0) || !(y > 0.0))
      throw ValidationError("fit_powerlaw: points must be strictly positive");
    double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double n = static_cast<double>(points.size());
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("fit_powerlaw: degenerate abscissae");
  PowerLawFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (const auto& [x, y] : points) {
    double e = std::log(y) - (fit.intercept + fit.slope * std::log(x));
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace fractlab
