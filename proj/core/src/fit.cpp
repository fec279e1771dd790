#include "shearlab/fit.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, double confidence) {
  if (x.size() != y.size()) throw DomainError("linear_fit: x and y differ in length");
  LinearFit fit;
  fit.n = x.size();
  const double inf = std::numeric_limits<double>::infinity();
  if (fit.n < 2) {
    fit.degenerate = true;
    fit.slope_ci = inf;
    return fit;
  }
  const double n = static_cast<double>(fit.n);
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) {
    fit.degenerate = true;
    fit.slope_ci = inf;
    fit.intercept = my;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < fit.n; ++i) {
    const double r = y[i] - (fit.slope * x[i] + fit.intercept);
    ssr += r * r;
  }
  fit.residual_rms = std::sqrt(ssr / n);
  if (fit.n < 3) {
    fit.degenerate = true;
    fit.slope_ci = inf;
    return fit;
  }
  const double dof = n - 2.0;
  const double se = std::sqrt(ssr / dof / sxx);
  const boost::math::students_t dist(dof);
  const double q = boost::math::quantile(boost::math::complement(dist, 0.5 * (1.0 - confidence)));
  fit.slope_ci = q * se;
  return fit;
}

PowerLawFit power_law_fit(std::span<const double> x, std::span<const double> y,
                          double confidence) {
  if (x.size() != y.size()) throw DomainError("power_law_fit: x and y differ in length");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw DomainError("power_law_fit: samples must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const auto lf = linear_fit(lx, ly, confidence);
  return {lf.slope, std::exp(lf.intercept), lf.slope_ci, lf.n, lf.degenerate};
}

double samples_per_decade(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*lo > 0.0)) throw DomainError("samples_per_decade: x must be positive");
  const double decades = std::log10(*hi / *lo);
  if (decades <= 0.0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(x.size()) / decades;
}

}  // namespace shearlab
