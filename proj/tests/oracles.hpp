#pragma once

// Reference computations used by the tests. They are deliberately naive and
// share no code with the library beyond the field container.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "shearlab/spectral.hpp"

namespace oracle {

using shearlab::Complex;
using shearlab::GridSpec;
using shearlab::SpectralField2D;

// Adaptive Simpson quadrature.
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                           double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13,
                        int depth = 50) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Composite integration over equal panels, for integrands with sharp peaks.
inline double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels,
                               double tol = 1e-14) {
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    sum += integrate(f, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels, tol / panels);
  }
  return sum;
}

// Classical fixed-step RK4 for y' = F(t, y).
template <class State, class Rhs>
State rk4(State y, double t0, double t1, int steps, Rhs&& rhs) {
  const double h = (t1 - t0) / steps;
  double t = t0;
  for (int n = 0; n < steps; ++n) {
    const State k1 = rhs(t, y);
    State y2 = y;
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] += 0.5 * h * k1[i];
    const State k2 = rhs(t + 0.5 * h, y2);
    State y3 = y;
    for (std::size_t i = 0; i < y.size(); ++i) y3[i] += 0.5 * h * k2[i];
    const State k3 = rhs(t + 0.5 * h, y3);
    State y4 = y;
    for (std::size_t i = 0; i < y.size(); ++i) y4[i] += h * k3[i];
    const State k4 = rhs(t + h, y4);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t += h;
  }
  return y;
}

// Random Hermitian, mean-free field supported on |k| <= kmax, |j| <= jmax.
inline SpectralField2D random_field(const GridSpec& grid, int kmax, int jmax, std::mt19937_64& rng,
                                    double amplitude = 1.0, double decay = 0.0) {
  std::normal_distribution<double> normal;
  SpectralField2D f(grid);
  for (int k = 0; k <= kmax; ++k) {
    for (int j = -jmax; j <= jmax; ++j) {
      if (k == 0 && j <= 0) continue;
      const double eta = grid.eta_spacing() * j;
      const double scale = amplitude / std::pow(1.0 + k * k + eta * eta, decay);
      f.set_real_mode(k, j, scale * Complex{normal(rng), normal(rng)});
    }
  }
  return f;
}

// Sparse list of nonzero modes (k, j, value).
struct Mode {
  int k;
  int j;
  Complex value;
};

inline std::vector<Mode> nonzero_modes(const SpectralField2D& f) {
  std::vector<Mode> out;
  const auto& g = f.grid();
  for (int ix = 0; ix < g.n_x; ++ix) {
    for (int iy = 0; iy < g.n_y; ++iy) {
      if (f.at(ix, iy) != Complex{}) out.push_back({g.k_of(ix), g.eta_index_of(iy), f.at(ix, iy)});
    }
  }
  return out;
}

// Direct convolution of (d_y a)(d_x b) - (d_x a)(d_y b) with per-mode
// multipliers ma and mb applied to a and b first.
inline SpectralField2D bracket_convolution(const SpectralField2D& a, const SpectralField2D& b,
                                           const std::function<Complex(int, double)>& ma,
                                           const std::function<Complex(int, double)>& mb) {
  const auto& g = a.grid();
  const double d = g.eta_spacing();
  SpectralField2D out(g);
  const auto am = nonzero_modes(a);
  const auto bm = nonzero_modes(b);
  for (const auto& p : am) {
    const Complex pa = ma(p.k, d * p.j) * p.value;
    if (pa == Complex{}) continue;
    for (const auto& q : bm) {
      const Complex qb = mb(q.k, d * q.j) * q.value;
      const int k = p.k + q.k;
      const int j = p.j + q.j;
      if (g.index_of(k, j) < 0) continue;
      // (i eta_a)(i k_b) - (i k_a)(i eta_b) = -(eta_a k_b - k_a eta_b)
      const double cross = -(d * p.j * q.k - p.k * d * q.j);
      out.mode(k, j) += cross * pa * qb;
    }
  }
  return out;
}

inline double max_abs_diff(const SpectralField2D& a, const SpectralField2D& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) m = std::max(m, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return m;
}

}  // namespace oracle
