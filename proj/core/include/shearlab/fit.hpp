#pragma once

// Least-squares line fits with Student-t confidence intervals.

#include <cstddef>
#include <span>

namespace shearlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  // Half-width of the two-sided confidence interval on the slope.
  double slope_ci = 0.0;
  double residual_rms = 0.0;
  std::size_t n = 0;
  bool degenerate = false;
};

// y = slope * x + intercept. Degenerate when n < 3 or x has no spread;
// slope_ci is then infinite.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y,
                     double confidence = 0.95);

// log y = exponent * log x + log prefactor. Throws DomainError on
// non-positive samples.
struct PowerLawFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double exponent_ci = 0.0;
  std::size_t n = 0;
  bool degenerate = false;
};

PowerLawFit power_law_fit(std::span<const double> x, std::span<const double> y,
                          double confidence = 0.95);

// Samples per decade of x = n / log10(max/min); x must be positive.
double samples_per_decade(std::span<const double> x);

}  // namespace shearlab
