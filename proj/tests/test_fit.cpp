#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "shearlab/error.hpp"
#include "shearlab/fit.hpp"

using namespace shearlab;

namespace {

std::vector<double> mu_grid(int n) {
  std::vector<double> mu;
  for (int i = 0; i < n; ++i) mu.push_back(std::pow(10.0, -2.0 - 2.0 * i / (n - 1)));
  return mu;
}

}  // namespace

TEST_CASE("exact power law") {
  const auto mu = mu_grid(7);
  std::vector<double> y;
  for (double m : mu) y.push_back(3.0 * std::pow(m, -0.5));
  const auto fit = power_law_fit(mu, y);
  CHECK(std::abs(fit.exponent + 0.5) <= 1e-12);
  CHECK(fit.prefactor == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(fit.exponent_ci <= 1e-10);
  CHECK_FALSE(fit.degenerate);
}

TEST_CASE("constant series") {
  const auto mu = mu_grid(5);
  const std::vector<double> y(mu.size(), 2.5);
  CHECK(std::abs(power_law_fit(mu, y).exponent) <= 1e-14);
}

TEST_CASE("degenerate and invalid input") {
  const std::vector<double> x{1.0, 2.0};
  const std::vector<double> y{1.0, 2.0};
  const auto fit = linear_fit(x, y);
  CHECK(fit.degenerate);
  CHECK(std::isinf(fit.slope_ci));
  const std::vector<double> same{1.0, 1.0, 1.0};
  CHECK(linear_fit(same, same).degenerate);
  const std::vector<double> bad{1.0, -1.0, 2.0};
  CHECK_THROWS_AS(power_law_fit(bad, same), DomainError);
  CHECK(samples_per_decade(std::vector<double>{1.0, 10.0, 100.0}) == doctest::Approx(1.5));
}

TEST_CASE("confidence interval calibration") {
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> noise(0.0, 0.05);
  const auto mu = mu_grid(6);
  const int trials = 2000;
  int covered = 0;
  for (int n = 0; n < trials; ++n) {
    std::vector<double> y;
    for (double m : mu) y.push_back(std::pow(m, 2.0 / 3.0) * (1.0 + noise(rng)));
    const auto fit = power_law_fit(mu, y);
    if (std::abs(fit.exponent - 2.0 / 3.0) <= fit.exponent_ci) ++covered;
  }
  const double rate = static_cast<double>(covered) / trials;
  MESSAGE("coverage " << rate);
  CHECK(rate >= 0.93);
  CHECK(rate <= 0.97);
}
