#pragma once

#include <cmath>
#include <vector>

#include "calderon/errors.hpp"

namespace calderon {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;  // RMS residual of the fit
};

/// Least squares line y = intercept + slope * x.
inline LinearFit fit_linear(const std::vector<double>& xs,
                            const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error("fit_linear: need at least two points");
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw Error("fit_linear: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - fit.intercept - fit.slope * xs[i];
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

struct PowerLawFit {
  double coefficient = 0.0;  // c in y = c * x^e
  double exponent = 0.0;
  double residual = 0.0;  // RMS residual in log-log
};

/// Least squares power law through positive samples.
inline PowerLawFit fit_power_law(const std::vector<double>& xs,
                                 const std::vector<double>& ys) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0 && ys[i] > 0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  const LinearFit lin = fit_linear(lx, ly);
  PowerLawFit fit;
  fit.coefficient = std::exp(lin.intercept);
  fit.exponent = lin.slope;
  fit.residual = lin.residual;
  return fit;
}

}  // namespace calderon
