#include "shearlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "shearlab/error.hpp"
#include "shearlab/linear.hpp"
#include "shearlab/spectral.hpp"

namespace shearlab {

namespace {

double prefactor(const WeightParams& p) { return (1.0 + 1.0 / std::abs(p.alpha)) / p.c; }

// (1 + a^2 + b^2)^{-2} = <a, b>^{-4}
double inv_bracket4(double a, double b) {
  const double q = 1.0 + a * a + b * b;
  return 1.0 / (q * q);
}

// Sum over all of Z^2 of <a, b>^{-4}: a finite box plus the shell bound.
double full_lattice_sum() {
  static const double value = [] {
    constexpr int box = 96;
    double s = 0.0;
    for (int a = -box; a <= box; ++a) {
      for (int b = -box; b <= box; ++b) s += inv_bracket4(a, b);
    }
    return s + 4.0 / (1.0 + static_cast<double>(box) * box);
  }();
  return value;
}

// Bound on sum of <j - k, i - l>^{-4} over (i, j) outside the box |i|,|j| <= J.
// Shells max(|a|,|b|) = r hold 8r points, each at most (1 + r^2)^{-2}, and
// 8r / (1 + r^2)^2 is decreasing for r >= 1, so the shell sum from R is at
// most the integral from R - 1, i.e. 4 / (1 + (R - 1)^2).
double truncation_tail(int k, int l, int J) {
  const int R = J + 1 - std::max(std::abs(k), std::abs(l));
  if (R >= 2) return 4.0 / (1.0 + static_cast<double>(R - 1) * (R - 1));
  return full_lattice_sum();
}

}  // namespace

void WeightParams::validate() const {
  std::ostringstream msg;
  if (!(c > 0.0 && c <= 1.0)) msg << "c must lie in (0, 1]; ";
  if (alpha == 0.0 || !std::isfinite(alpha)) msg << "alpha must be finite and nonzero; ";
  if (!(mu > 0.0 && mu <= 1.0)) msg << "mu must lie in (0, 1]; ";
  if (N < 7) msg << "N must be >= 7; ";
  if (trunc_J < 8) msg << "trunc_J must be >= 8; ";
  if (!(gamma >= 5.0 / 6.0 && gamma <= 1.0)) msg << "gamma must lie in [5/6, 1]; ";
  if (!msg.str().empty()) throw DomainError("WeightParams: " + msg.str());
}

double weight_Mmu(double t, int k, double eta, double mu) {
  if (k == 0) return 1.0;
  const double m3 = std::cbrt(mu);
  const double crit = eta / k;
  return std::exp(-(std::atan(m3 * (t - crit)) + std::atan(m3 * crit)));
}

double dlog_Mmu(double t, int k, double eta, double mu) {
  if (k == 0) return 0.0;
  const double m3 = std::cbrt(mu);
  const double d = t - eta / k;
  return m3 / (1.0 + m3 * m3 * d * d);
}

TruncatedSum dlog_m(double t, int k, double eta, int l, const WeightParams& params) {
  const int J = params.trunc_J;
  double sum = 0.0;
  for (int j = -J; j <= J; ++j) {
    if (j == 0) continue;
    const double jj = static_cast<double>(j) * j;
    const double ky = eta - j * t;
    for (int i = -J; i <= J; ++i) {
      const double denom = jj + ky * ky + static_cast<double>(i) * i;
      sum += jj / denom * inv_bracket4(j - k, i - l);
    }
  }
  const double C = prefactor(params);
  return {C * sum, C * truncation_tail(k, l, J)};
}

TruncatedSum log_weight_m(double t, int k, double eta, int l, const WeightParams& params) {
  const int J = params.trunc_J;
  double sum = 0.0;
  for (int j = -J; j <= J; ++j) {
    if (j == 0) continue;
    const double aj = std::abs(j);
    const double sgn = j > 0 ? 1.0 : -1.0;
    const double ky = j * t - eta;
    for (int i = -J; i <= J; ++i) {
      const double s = std::sqrt(aj * aj + static_cast<double>(i) * i);
      const double integral = (aj / s) * (0.5 * kPi + std::atan(sgn * ky / s));
      sum += integral * inv_bracket4(j - k, i - l);
    }
  }
  const double C = prefactor(params);
  return {C * sum, C * kPi * truncation_tail(k, l, J)};
}

double weight_m(double t, int k, double eta, int l, const WeightParams& params) {
  return std::exp(log_weight_m(t, k, eta, l, params).value);
}

double log_weight_m_upper_bound(const WeightParams& params) {
  return prefactor(params) * kPi * full_lattice_sum();
}

double log_weight_A(double t, int k, double eta, int l, const WeightParams& params) {
  const double log_m = log_weight_m(t, k, eta, l, params).value;
  if (k == 0) return -log_m + params.N * std::log(bracket(eta, l));
  return -params.c * std::cbrt(params.mu) * t - log_m +
         std::log(weight_Mmu(t, k, eta, params.mu)) + params.N * std::log(bracket(k, eta, l));
}

double weight_A(double t, int k, double eta, int l, const WeightParams& params) {
  return std::exp(log_weight_A(t, k, eta, l, params));
}

double weight_Ag_factor(double t, int k, double eta, double mu) {
  if (k == 0) return 1.0;
  return 1.0 + std::abs(k) + std::hypot(k, eta) / bracket(std::cbrt(mu) * t);
}

double log_weight_Ag(double t, int k, double eta, const WeightParams& params) {
  return log_weight_A(t, k, eta, 0, params) + std::log(weight_Ag_factor(t, k, eta, params.mu));
}

double weight_Ag(double t, int k, double eta, const WeightParams& params) {
  return std::exp(log_weight_Ag(t, k, eta, params));
}

double al_exponent(double t, int k, double eta, int l, double mu, double alpha) {
  double e = mu * adv_heat_integral(k, eta, l, t);
  if (k != 0 && l != 0) {
    const double s = std::hypot(k, l);
    // int_0^t dtau / (s^2 + (k tau - eta)^2)
    const double integral = (std::atan((k * t - eta) / s) - std::atan(-eta / s)) / (k * s);
    e += (2.0 / std::abs(alpha)) * (static_cast<double>(k) * k / std::abs(l)) * integral;
  }
  return e;
}

}  // namespace shearlab
