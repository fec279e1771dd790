#pragma once

// Pseudo-spectral solver for the reduced 2D system in the moving frame:
//   d_t f = mu Delta_t f + (grad^perp Lambda_t^{-2} f . grad) f + (grad^perp g . grad) Delta_t g
//   d_t g = mu Delta_t g + (grad^perp Lambda_t^{-2} f . grad) g
// with (grad^perp psi . grad) phi = d_y psi d_x phi - d_x psi d_y phi. The
// bracket is invariant under the shear change of variables, so it is
// evaluated with the plain symbols (i k, i eta).

#include <functional>
#include <optional>

#include "shearlab/spectral.hpp"
#include "shearlab/weights.hpp"

namespace shearlab {

struct SolverParams {
  double mu = 1e-3;
  double gamma = 5.0 / 6.0;
  double beta1 = 1.0 / 6.0;
  double delta = 0.05;
  double eps = 0.0;
  // Fraction of the explicit RK4 stability limit that a step may use.
  double dt_cfl = 0.5;
  int N_diag = 7;

  void validate() const;
};

struct SolverState {
  SpectralField2D f;
  SpectralField2D g;
  double t = 0.0;
  SolverParams params;
  // Trapezoid accumulation of mu |grad_t g|^2_{H^{N+1}} over [0, t].
  double dissipation_integral = 0.0;
};

// Quadratic terms only (no diffusion).
struct NonlinearTerms {
  SpectralField2D f;
  SpectralField2D g;
};
NonlinearTerms nonlinear_terms(const SpectralField2D& f, const SpectralField2D& g, double t);

SpectralField2D rhs_f(const SolverState& state);
SpectralField2D rhs_g(const SolverState& state);

// Largest stable step from the current state (advective and magnetic speeds
// times the largest moving-frame wavenumber reached by t + horizon).
double cfl_limit(const SolverState& state, double horizon);

// One Lawson RK4 step with the exact heat factor exp(-mu [I(t+h) - I(t)]).
// Throws CflViolation carrying a suggested dt when dt exceeds the limit.
SolverState step(const SolverState& state, double dt);

// Steps with a fixed dt (the last step is shortened to land on t_end) and
// calls observer after every step.
using StepObserver = std::function<void(const SolverState&)>;
SolverState integrate(SolverState state, double t_end, double dt,
                      const StepObserver& observer = nullptr);

double dissipation_rate(const SpectralField2D& g, double t, double mu, int N);

struct ReportOptions {
  // Weighted norms cost a lattice sum per active mode; off by default.
  bool weighted = false;
  WeightParams weights{};
};

struct EnergyReport {
  double t = 0.0;
  double f_l2 = 0.0;
  double f_hn = 0.0;
  double f_hn_scaled = 0.0;  // mu^{1 - gamma} |f|_{H^N}
  double g_hn1 = 0.0;        // |g|_{H^{N+1}}
  double g_h1 = 0.0;
  double dissipation_integral = 0.0;
  double dissipation_norm = 0.0;  // sqrt of the integral
  double critical_energy = 0.0;   // f_hn_scaled + g_hn1 + dissipation_norm
  double bx_nonzero_l2 = 0.0;     // |d_y^t g_{k != 0}|_{L^2}
  double average_velocity = 0.0;  // | |d_y|^{-1} f_{k = 0} |_{H^{N-2}}
  double log_af = 0.0;            // log |A f|_{L^2}, when weighted
  double log_agg = 0.0;           // log |A^g g|_{L^2}, when weighted
};

EnergyReport energy_report(const SolverState& state, const ReportOptions& options = {});

}  // namespace shearlab
