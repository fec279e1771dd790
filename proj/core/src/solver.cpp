#include "shearlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "fft.hpp"
#include "shearlab/linear.hpp"

namespace shearlab {

namespace {

constexpr Complex kI{0.0, 1.0};

// Two real fields per complex transform: z = a + i b.
void inverse_pair(const GridSpec& grid, const std::vector<Complex>& a,
                  const std::vector<Complex>& b, std::vector<double>& pa,
                  std::vector<double>& pb) {
  const std::size_t n = grid.size();
  std::vector<Complex> z(n);
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + kI * b[i];
  detail::Fft2D::get(grid.n_x, grid.n_y)->backward(z.data(), out.data());
  pa.resize(n);
  pb.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    pa[i] = out[i].real();
    pb[i] = out[i].imag();
  }
}

// Forward transform of two real arrays, normalised, dealiased, mean removed.
void forward_pair(const GridSpec& grid, const std::vector<double>& pa,
                  const std::vector<double>& pb, SpectralField2D& a, SpectralField2D& b) {
  const std::size_t n = grid.size();
  std::vector<Complex> z(n);
  std::vector<Complex> out(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = {pa[i], pb[i]};
  detail::Fft2D::get(grid.n_x, grid.n_y)->forward(z.data(), out.data());
  const double norm = 1.0 / static_cast<double>(n);
  a = SpectralField2D(grid);
  b = SpectralField2D(grid);
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int jx = (grid.n_x - ix) % grid.n_x;
    for (int iy = 0; iy < grid.n_y; ++iy) {
      if (!grid.is_kept(ix, iy)) continue;
      const int jy = (grid.n_y - iy) % grid.n_y;
      const Complex zk = out[static_cast<std::size_t>(ix) * grid.n_y + iy] * norm;
      const Complex zm = std::conj(out[static_cast<std::size_t>(jx) * grid.n_y + jy]) * norm;
      a.at(ix, iy) = 0.5 * (zk + zm);
      b.at(ix, iy) = (zk - zm) / (2.0 * kI);
    }
  }
  a.at(0, 0) = 0.0;
  b.at(0, 0) = 0.0;
}

struct Speeds {
  double flow = 0.0;      // max |grad psi|
  double magnetic = 0.0;  // max |grad g|
};

struct Evaluation {
  NonlinearTerms terms;
  Speeds speeds;
};

Evaluation evaluate(const SpectralField2D& f, const SpectralField2D& g, double t) {
  if (!(f.grid() == g.grid())) throw GridMismatch("nonlinear_terms: f and g grids differ");
  const auto& grid = f.grid();
  const std::size_t n = grid.size();
  std::vector<Complex> psi_x(n), psi_y(n), f_x(n), f_y(n), g_x(n), g_y(n), lap_x(n), lap_y(n);
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const std::size_t i = static_cast<std::size_t>(ix) * grid.n_y + iy;
      const Complex fc = f.coeffs()[i];
      const Complex gc = g.coeffs()[i];
      if (fc == Complex{} && gc == Complex{}) continue;
      const double eta = grid.eta_of(iy);
      const double q2 = shear_symbol(k, eta, 0, t);
      const Complex dx = kI * static_cast<double>(k);
      const Complex dy = kI * eta;
      const Complex psi = q2 > 0.0 ? fc / q2 : Complex{};
      const Complex lap = -q2 * gc;
      psi_x[i] = dx * psi;
      psi_y[i] = dy * psi;
      f_x[i] = dx * fc;
      f_y[i] = dy * fc;
      g_x[i] = dx * gc;
      g_y[i] = dy * gc;
      lap_x[i] = dx * lap;
      lap_y[i] = dy * lap;
    }
  }
  std::vector<double> ppx, ppy, pfx, pfy, pgx, pgy, plx, ply;
  inverse_pair(grid, psi_x, psi_y, ppx, ppy);
  inverse_pair(grid, f_x, f_y, pfx, pfy);
  inverse_pair(grid, g_x, g_y, pgx, pgy);
  inverse_pair(grid, lap_x, lap_y, plx, ply);

  std::vector<double> nf(n), ng(n);
  Speeds speeds;
  for (std::size_t i = 0; i < n; ++i) {
    nf[i] = ppy[i] * pfx[i] - ppx[i] * pfy[i] + pgy[i] * plx[i] - pgx[i] * ply[i];
    ng[i] = ppy[i] * pgx[i] - ppx[i] * pgy[i];
    speeds.flow = std::max(speeds.flow, std::hypot(ppx[i], ppy[i]));
    speeds.magnetic = std::max(speeds.magnetic, std::hypot(pgx[i], pgy[i]));
  }
  Evaluation e;
  forward_pair(grid, nf, ng, e.terms.f, e.terms.g);
  e.speeds = speeds;
  return e;
}

double limit_from_speeds(const GridSpec& grid, const Speeds& s, double t_far, double safety) {
  const double k_max = grid.kept_k();
  const double eta_max = grid.kept_eta_index() * grid.eta_spacing();
  const double wave = std::max(k_max, eta_max);
  const double q_max = std::hypot(k_max, eta_max + k_max * t_far);
  const double rate = s.flow * wave + s.magnetic * (wave + q_max);
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  // 2.8: extent of the RK4 stability region along the imaginary axis.
  return safety * 2.8 / rate;
}

// out = factor(t0 -> t1) * in, mode-wise.
void apply_heat(const GridSpec& grid, double mu, double t0, double t1, std::vector<double>& factor) {
  factor.resize(grid.size());
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      factor[static_cast<std::size_t>(ix) * grid.n_y + iy] =
          heat_factor(k, grid.eta_of(iy), 0, t0, t1, mu);
    }
  }
}

double weighted_log_norm(const SpectralField2D& field, double t, const WeightParams& w, bool ag) {
  const auto& grid = field.grid();
  const double cutoff = 1e-16 * field.max_abs();
  std::vector<double> logs;
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const double a = std::abs(field.at(ix, iy));
      if (a == 0.0 || a < cutoff) continue;
      const double eta = grid.eta_of(iy);
      const double log_w = ag ? log_weight_Ag(t, k, eta, w) : log_weight_A(t, k, eta, 0, w);
      logs.push_back(2.0 * (log_w + std::log(a)));
    }
  }
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(logs.begin(), logs.end());
  double s = 0.0;
  for (double x : logs) s += std::exp(x - top);
  return 0.5 * (top + std::log(s) + std::log(lattice_measure(grid)));
}

}  // namespace

void SolverParams::validate() const {
  std::ostringstream msg;
  if (!(mu > 0.0 && mu <= 1.0)) msg << "mu must lie in (0, 1]; ";
  if (!(delta > 0.0)) msg << "delta must be positive; ";
  if (eps < 0.0) msg << "eps must be non-negative; ";
  if (!(dt_cfl > 0.0 && dt_cfl <= 1.0)) msg << "dt_cfl must lie in (0, 1]; ";
  if (beta1 < 0.0) msg << "beta1 must be non-negative; ";
  if (N_diag < 0) msg << "N_diag must be non-negative; ";
  if (!msg.str().empty()) throw DomainError("SolverParams: " + msg.str());
}

NonlinearTerms nonlinear_terms(const SpectralField2D& f, const SpectralField2D& g, double t) {
  return evaluate(f, g, t).terms;
}

SpectralField2D rhs_f(const SolverState& state) {
  auto out = nonlinear_terms(state.f, state.g, state.t).f;
  out += apply_symbol(state.f, symbols::neg_laplacian_t(), state.t) *= -state.params.mu;
  return out;
}

SpectralField2D rhs_g(const SolverState& state) {
  auto out = nonlinear_terms(state.f, state.g, state.t).g;
  out += apply_symbol(state.g, symbols::neg_laplacian_t(), state.t) *= -state.params.mu;
  return out;
}

double cfl_limit(const SolverState& state, double horizon) {
  const auto e = evaluate(state.f, state.g, state.t);
  return limit_from_speeds(state.f.grid(), e.speeds, state.t + horizon, state.params.dt_cfl);
}

double dissipation_rate(const SpectralField2D& g, double t, double mu, int N) {
  const auto& grid = g.grid();
  double sum = 0.0;
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const double a2 = std::norm(g.at(ix, iy));
      if (a2 == 0.0) continue;
      const double eta = grid.eta_of(iy);
      sum += std::pow(1.0 + k * k + eta * eta, N + 1) * shear_symbol(k, eta, 0, t) * a2;
    }
  }
  return mu * lattice_measure(grid) * sum;
}

SolverState step(const SolverState& state, double dt) {
  if (dt < 0.0) throw DomainError("step: dt must be non-negative");
  if (dt == 0.0) return state;
  const auto& grid = state.f.grid();
  const double mu = state.params.mu;
  const double t = state.t;
  const double h = dt;
  const std::size_t n = grid.size();

  const auto e1 = evaluate(state.f, state.g, t);
  const double limit = limit_from_speeds(grid, e1.speeds, t + h, state.params.dt_cfl);
  if (h > limit) {
    std::ostringstream msg;
    msg << "step: dt = " << h << " exceeds the CFL limit " << limit << " at t = " << t;
    throw CflViolation(msg.str(), 0.9 * limit);
  }

  std::vector<double> e_a, e_b;
  apply_heat(grid, mu, t, t + 0.5 * h, e_a);
  apply_heat(grid, mu, t + 0.5 * h, t + h, e_b);

  const auto& f0 = state.f.coeffs();
  const auto& g0 = state.g.coeffs();
  const auto& k1f = e1.terms.f.coeffs();
  const auto& k1g = e1.terms.g.coeffs();

  SpectralField2D fa(grid), ga(grid);
  for (std::size_t i = 0; i < n; ++i) {
    fa.coeffs()[i] = e_a[i] * (f0[i] + 0.5 * h * k1f[i]);
    ga.coeffs()[i] = e_a[i] * (g0[i] + 0.5 * h * k1g[i]);
  }
  const auto k2 = nonlinear_terms(fa, ga, t + 0.5 * h);

  SpectralField2D fb(grid), gb(grid);
  for (std::size_t i = 0; i < n; ++i) {
    fb.coeffs()[i] = e_a[i] * f0[i] + 0.5 * h * k2.f.coeffs()[i];
    gb.coeffs()[i] = e_a[i] * g0[i] + 0.5 * h * k2.g.coeffs()[i];
  }
  const auto k3 = nonlinear_terms(fb, gb, t + 0.5 * h);

  SpectralField2D fc(grid), gc(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const double full = e_a[i] * e_b[i];
    fc.coeffs()[i] = full * f0[i] + h * e_b[i] * k3.f.coeffs()[i];
    gc.coeffs()[i] = full * g0[i] + h * e_b[i] * k3.g.coeffs()[i];
  }
  const auto k4 = nonlinear_terms(fc, gc, t + h);

  SolverState next = state;
  next.t = t + h;
  auto& f1 = next.f.coeffs();
  auto& g1 = next.g.coeffs();
  for (std::size_t i = 0; i < n; ++i) {
    const double full = e_a[i] * e_b[i];
    f1[i] = full * f0[i] + h / 6.0 *
                               (full * k1f[i] + 2.0 * e_b[i] * (k2.f.coeffs()[i] + k3.f.coeffs()[i]) +
                                k4.f.coeffs()[i]);
    g1[i] = full * g0[i] + h / 6.0 *
                               (full * k1g[i] + 2.0 * e_b[i] * (k2.g.coeffs()[i] + k3.g.coeffs()[i]) +
                                k4.g.coeffs()[i]);
  }
  next.f.mode(0, 0) = 0.0;
  next.g.mode(0, 0) = 0.0;

  const int N = state.params.N_diag;
  next.dissipation_integral +=
      0.5 * h * (dissipation_rate(state.g, t, mu, N) + dissipation_rate(next.g, next.t, mu, N));
  return next;
}

SolverState integrate(SolverState state, double t_end, double dt, const StepObserver& observer) {
  if (!(dt > 0.0)) throw DomainError("integrate: dt must be positive");
  const double t0 = state.t;
  const auto steps = static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9));
  for (long s = 1; s <= steps; ++s) {
    const double target = (s == steps) ? t_end : t0 + s * dt;
    state = step(state, target - state.t);
    if (observer) observer(state);
  }
  return state;
}

EnergyReport energy_report(const SolverState& state, const ReportOptions& options) {
  const auto& p = state.params;
  const auto& grid = state.f.grid();
  EnergyReport r;
  r.t = state.t;
  r.f_l2 = sobolev_norm(state.f, 0);
  r.f_hn = sobolev_norm(state.f, p.N_diag);
  r.f_hn_scaled = std::pow(p.mu, 1.0 - p.gamma) * r.f_hn;
  r.g_hn1 = sobolev_norm(state.g, p.N_diag + 1);
  r.g_h1 = sobolev_norm(state.g, 1);
  r.dissipation_integral = state.dissipation_integral;
  r.dissipation_norm = std::sqrt(state.dissipation_integral);
  r.critical_energy = r.f_hn_scaled + r.g_hn1 + r.dissipation_norm;

  double bx = 0.0;
  double avg = 0.0;
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const double eta = grid.eta_of(iy);
      if (k != 0) {
        const double ky = eta - k * state.t;
        bx += ky * ky * std::norm(state.g.at(ix, iy));
      } else if (eta != 0.0) {
        avg += std::pow(1.0 + eta * eta, p.N_diag - 2) / (eta * eta) * std::norm(state.f.at(ix, iy));
      }
    }
  }
  const double measure = lattice_measure(grid);
  r.bx_nonzero_l2 = std::sqrt(measure * bx);
  r.average_velocity = std::sqrt(measure * avg);

  if (options.weighted) {
    r.log_af = weighted_log_norm(state.f, state.t, options.weights, false);
    r.log_agg = weighted_log_norm(state.g, state.t, options.weights, true);
  }
  return r;
}

}  // namespace shearlab
