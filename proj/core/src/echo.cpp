#include "shearlab/echo.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <map>

#include "shearlab/error.hpp"
#include "shearlab/fit.hpp"

namespace shearlab {

namespace {

using Cx = std::complex<double>;

double q2(int j, double eta, double t) {
  const double ky = eta - j * t;
  return static_cast<double>(j) * j + ky * ky;
}

std::vector<double> pack(const EchoChainState& s) {
  std::vector<double> x;
  x.reserve(4 * s.modes.size());
  for (const auto& m : s.modes) {
    x.push_back(m.f.real());
    x.push_back(m.f.imag());
    x.push_back(m.g.real());
    x.push_back(m.g.imag());
  }
  return x;
}

void unpack(const std::vector<double>& x, EchoChainState& s) {
  for (std::size_t m = 0; m < s.modes.size(); ++m) {
    s.modes[m].f = {x[4 * m], x[4 * m + 1]};
    s.modes[m].g = {x[4 * m + 2], x[4 * m + 3]};
  }
}

}  // namespace

EchoChainState EchoChainState::seeded(double eta, double mu, double eps, int k_max) {
  EchoChainState s;
  s.eta = eta;
  s.mu = mu;
  s.eps = eps;
  for (int k = k_max + 1; k >= 1; --k) s.modes.push_back({k, {}, {}});
  s.modes.front().g = 1.0;
  return s;
}

void EchoChainState::validate() const {
  if (!(eta > 0.0)) throw DomainError("EchoChainState: eta must be positive");
  for (std::size_t m = 1; m < modes.size(); ++m) {
    if (modes[m].k >= modes[m - 1].k) throw DomainError("EchoChainState: k must strictly decrease");
  }
}

EchoDerivative echo_rhs(const EchoChainState& s, double t, EchoCoupling coupling) {
  std::map<int, std::size_t> index;
  for (std::size_t m = 0; m < s.modes.size(); ++m) index[s.modes[m].k] = m;
  const auto f_at = [&](int k) {
    const auto it = index.find(k);
    return it == index.end() ? Cx{} : s.modes[it->second].f;
  };
  const auto g_at = [&](int k) {
    const auto it = index.find(k);
    return it == index.end() ? Cx{} : s.modes[it->second].g;
  };
  // Transfer f(j) -> g, eta f(j) / |q_j|^2; vanishes when |q_j| = 0.
  const auto transfer = [&](int j) {
    const double d = q2(j, s.eta, t);
    return d > 0.0 ? s.eta * f_at(j) / d : Cx{};
  };

  const double shear = (1.0 + t * t) * s.eta;
  EchoDerivative d;
  d.df.resize(s.modes.size());
  d.dg.resize(s.modes.size());
  for (std::size_t m = 0; m < s.modes.size(); ++m) {
    const int k = s.modes[m].k;
    if (coupling == EchoCoupling::Dominant) {
      d.df[m] = s.eps * shear * g_at(k + 1);
      d.dg[m] = s.eps * transfer(k + 1);
    } else {
      d.df[m] = s.eps * shear * (g_at(k + 1) - g_at(k - 1));
      d.dg[m] = s.eps * (transfer(k + 1) - transfer(k - 1));
    }
  }
  return d;
}

EchoChainState echo_integrate(const EchoChainState& state, double t_end, EchoCoupling coupling,
                              double rel_tol) {
  state.validate();
  if (t_end == state.t) return state;
  namespace odeint = boost::numeric::odeint;
  using Vec = std::vector<double>;
  EchoChainState work = state;
  auto system = [&](const Vec& x, Vec& dxdt, double t) {
    unpack(x, work);
    const auto d = echo_rhs(work, t, coupling);
    dxdt.resize(x.size());
    for (std::size_t m = 0; m < d.df.size(); ++m) {
      dxdt[4 * m] = d.df[m].real();
      dxdt[4 * m + 1] = d.df[m].imag();
      dxdt[4 * m + 2] = d.dg[m].real();
      dxdt[4 * m + 3] = d.dg[m].imag();
    }
  };
  Vec x = pack(state);
  const double span = t_end - state.t;
  // The resonances have unit width in t; never step across one blindly.
  const double h0 = std::copysign(std::min(0.01, std::abs(span)), span);
  auto stepper = odeint::make_controlled(1e-300, rel_tol, odeint::runge_kutta_dopri5<Vec>());
  odeint::integrate_adaptive(stepper, system, x, state.t, t_end, h0);
  EchoChainState out = state;
  unpack(x, out);
  out.t = t_end;
  return out;
}

EchoGain echo_gain(double eta, double mu, double eps, int k, EchoWindow window,
                   EchoCoupling coupling) {
  if (k < 2) throw DomainError("echo_gain: the chain needs k >= 2");
  EchoChainState s;
  s.eta = eta;
  s.mu = mu;
  s.eps = eps;
  s.modes = {{k + 1, {}, 1.0}, {k, {}, {}}, {k - 1, {}, {}}};
  s.t = window == EchoWindow::Exact ? eta / (k + 1) : 0.0;
  EchoGain gain;
  if (eps == 0.0) return gain;
  const auto mid = echo_integrate(s, eta / k, coupling);
  const auto end = echo_integrate(mid, eta / (k - 1), coupling);
  gain.f_at_critical = std::abs(mid.modes[1].f);
  gain.f_gain = std::abs(end.modes[1].f) / eta;
  gain.g_gain = std::abs(end.modes[2].g);
  return gain;
}

double max_echo_gain(double mu, double eps, int k_max, double eta_factor, EchoWindow window) {
  const double eta = eta_factor * std::pow(mu, -1.0 / 3.0);
  double best = 0.0;
  for (int k = k_max; k >= 2; --k) best = std::max(best, echo_gain(eta, mu, eps, k, window).g_gain);
  return best;
}

double threshold_boundary(double mu, int k_max, double eta_factor) {
  double lo = -30.0;
  double hi = 5.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (max_echo_gain(mu, std::exp(mid), k_max, eta_factor) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

ThresholdMap threshold_map(const std::vector<double>& eps_grid, const std::vector<double>& mu_grid,
                           int k_max, double eta_factor) {
  ThresholdMap map;
  map.mu = mu_grid;
  for (double mu : mu_grid) {
    const double eta = eta_factor * std::pow(mu, -1.0 / 3.0);
    for (double eps : eps_grid) {
      ThresholdCell cell;
      cell.eps = eps;
      cell.mu = mu;
      for (int k = k_max; k >= 2; --k) {
        const auto g = echo_gain(eta, mu, eps, k);
        cell.g_gain = std::max(cell.g_gain, g.g_gain);
        cell.f_gain = std::max(cell.f_gain, g.f_gain);
      }
      cell.suppressed = cell.g_gain < 1.0;
      map.cells.push_back(cell);
    }
    map.boundary_eps.push_back(threshold_boundary(mu, k_max, eta_factor));
  }
  if (mu_grid.size() >= 2) {
    const auto fit = power_law_fit(map.mu, map.boundary_eps);
    map.boundary_slope = fit.exponent;
    map.boundary_slope_ci = fit.exponent_ci;
  }
  return map;
}

}  // namespace shearlab
