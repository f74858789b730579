#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace brp::harness {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;  // root mean square residual
  int n = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two matched points");
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  out.n = n;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    double r = y[i] - (out.intercept + out.slope * x[i]);
    rss += r * r;
  }
  out.rms = std::sqrt(rss / n);
  return out;
}

}  // namespace brp::harness
