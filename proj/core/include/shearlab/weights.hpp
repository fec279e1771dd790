#pragma once

// Time-dependent Fourier multipliers used by the energy functionals.
//
// Orientation convention (fixed for the whole library):
//   * M_mu is the increasing solution of  d/dt log M_mu = dlog_Mmu  with
//     M_mu(0) = 1. weight_Mmu returns its reciprocal 1 / M_mu, which is the
//     factor that enters A, so weight_Mmu is non-increasing in t and lies in
//     [e^{-pi}, 1]. Hence  d/dt log weight_Mmu = -dlog_Mmu.
//   * m is the increasing weight built from an integral starting at
//     t = -infinity; weight_m returns m itself. A carries m^{-1}.
//   * Because the prefactor 1/c can be large (c = 0.01 by default), m easily
//     exceeds the double range. All m-dependent weights are therefore also
//     available in log form; weight_* = exp(log_weight_*) may overflow or
//     underflow for extreme parameters, the log forms never do.

namespace shearlab {

struct WeightParams {
  double c = 0.01;
  double alpha = 1.0;
  double mu = 1e-3;
  int N = 7;
  int trunc_J = 32;
  double gamma = 5.0 / 6.0;

  void validate() const;
};

// A truncated lattice sum together with a rigorous bound on what the
// truncation discarded. All summands are non-negative, so
// value <= exact <= value + tail_bound.
struct TruncatedSum {
  double value = 0.0;
  double tail_bound = 0.0;
};

// 1 / M_mu(t, k, eta): exp(-[atan(mu^{1/3}(t - eta/k)) + atan(mu^{1/3} eta/k)])
// for k != 0 and 1 for k == 0.
double weight_Mmu(double t, int k, double eta, double mu);

// d/dt log M_mu = mu^{1/3} / (1 + mu^{2/3} (t - eta/k)^2); 0 for k == 0.
double dlog_Mmu(double t, int k, double eta, double mu);

// d/dt log m = c^{-1}(1 + 1/|alpha|) sum_{|i|,|j| <= J, j != 0}
//                 j^2 / (j^2 + (eta - j t)^2 + i^2) * <j - k, i - l>^{-4}.
TruncatedSum dlog_m(double t, int k, double eta, int l, const WeightParams& params);

// log m(t, k, eta, l): every term of the tau-integral from -infinity is an
// arctan primitive and is evaluated in closed form.
TruncatedSum log_weight_m(double t, int k, double eta, int l, const WeightParams& params);

double weight_m(double t, int k, double eta, int l, const WeightParams& params);

// Uniform upper bound on log m over all (t, k, eta, l) for these params.
double log_weight_m_upper_bound(const WeightParams& params);

// log A with A = e^{-c mu^{1/3} t} M^{-1} <k, eta, l>^N for k != 0 and
// M^{-1} <eta, l>^N for k == 0, M = m M_mu.
double log_weight_A(double t, int k, double eta, int l, const WeightParams& params);
double weight_A(double t, int k, double eta, int l, const WeightParams& params);

// A^g / A(k, eta, 0) = 1 + |k| + |k, eta| / <mu^{1/3} t> 1_{k != 0}.
double weight_Ag_factor(double t, int k, double eta, double mu);
double log_weight_Ag(double t, int k, double eta, const WeightParams& params);
double weight_Ag(double t, int k, double eta, const WeightParams& params);

// Exponent E(t) with A_L = exp(-E):
//   E = int_0^t mu |k, eta - k tau, l|^2
//             + (2/|alpha|) |k^2 / l| 1_{k,l != 0} / |k, eta - k tau, l|^2 dtau.
double al_exponent(double t, int k, double eta, int l, double mu, double alpha);

}  // namespace shearlab
