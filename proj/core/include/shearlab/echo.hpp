#pragma once

// Resonance-chain toy model for a frozen low mode g_low = -eps cos(x).
// At fixed eta, with |q_j|^2 = j^2 + (eta - j t)^2:
//   full coupling:
//     f(k)' = eps <t>^2 eta [g(k+1) - g(k-1)]
//     g(k)' = eps eta [-f(k+1) / |q_{k+1}|^2 + f(k-1) / |q_{k-1}|^2]
//   dominant transfer g(k+1) -> f(k) -> g(k-1):
//     f(k)'   = eps <t>^2 eta g(k+1)
//     g(k-1)' = eps eta f(k) / |q_k|^2
// The top g mode never receives input in the dominant-transfer model.
// Critical times are t_k = eta / k.

#include <complex>
#include <vector>

namespace shearlab {

enum class EchoCoupling { Dominant, Full };

struct EchoMode {
  int k = 0;
  std::complex<double> f{};
  std::complex<double> g{};
};

struct EchoChainState {
  double eta = 1.0;
  double mu = 1e-3;
  double eps = 0.0;
  double t = 0.0;
  // Strictly decreasing k.
  std::vector<EchoMode> modes;

  // Modes k_max + 1, ..., 1 with a unit seed in g(k_max + 1).
  static EchoChainState seeded(double eta, double mu, double eps, int k_max = 8);
  void validate() const;
};

struct EchoDerivative {
  std::vector<std::complex<double>> df;
  std::vector<std::complex<double>> dg;
};

EchoDerivative echo_rhs(const EchoChainState& state, double t,
                        EchoCoupling coupling = EchoCoupling::Dominant);

// Integrates from state.t to t_end (t_end < state.t integrates backwards).
EchoChainState echo_integrate(const EchoChainState& state, double t_end,
                              EchoCoupling coupling = EchoCoupling::Dominant,
                              double rel_tol = 1e-10);

enum class EchoWindow {
  Exact,  // [t_{k+1}, t_{k-1}]
  Wide,   // [0, t_{k-1}]
};

struct EchoGain {
  double f_gain = 0.0;       // f(t_{k-1}, k) / (eta g_seed)
  double g_gain = 0.0;       // g(t_{k-1}, k-1) / g_seed
  double f_at_critical = 0;  // f(t_k, k) / g_seed
};

// Three-mode chain g(k+1), f(k), g(k-1) seeded with g(k+1) = 1 at the window
// start. Throws DomainError when k < 2.
EchoGain echo_gain(double eta, double mu, double eps, int k,
                   EchoWindow window = EchoWindow::Exact,
                   EchoCoupling coupling = EchoCoupling::Dominant);

// Largest per-echo g gain over k = k_max, ..., 2 at eta = eta_factor mu^{-1/3}.
double max_echo_gain(double mu, double eps, int k_max = 8, double eta_factor = 1.0,
                     EchoWindow window = EchoWindow::Exact);

struct ThresholdCell {
  double eps = 0.0;
  double mu = 0.0;
  bool suppressed = false;
  double g_gain = 0.0;
  double f_gain = 0.0;
};

struct ThresholdMap {
  std::vector<ThresholdCell> cells;  // row-major: mu outer, eps inner
  std::vector<double> mu;
  std::vector<double> boundary_eps;  // eps*(mu), gain = 1
  double boundary_slope = 0.0;       // d log eps* / d log mu
  double boundary_slope_ci = 0.0;
};

// A cell is suppressed when every per-echo g gain is below one.
ThresholdMap threshold_map(const std::vector<double>& eps_grid, const std::vector<double>& mu_grid,
                           int k_max = 8, double eta_factor = 1.0);

// Bisection in log eps for max_echo_gain = 1.
double threshold_boundary(double mu, int k_max = 8, double eta_factor = 1.0);

}  // namespace shearlab
