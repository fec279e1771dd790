#pragma once

// Linearized dynamics around Couette flow with a constant vertical field.
//
// Per-mode 3D system (symbol vector q = (k, eta - k t, l)):
//   dv/dt = -e1 v_y + 2 k q v_y / |q|^2 - mu |q|^2 v + i alpha l b
//   db/dt =  e1 b_y                     - mu |q|^2 b + i alpha l v
// Both q.v and q.b are conserved by the flow.

#include <array>
#include <span>
#include <vector>

#include "shearlab/spectral.hpp"

namespace shearlab {

// int_0^t |k, eta - k tau, l|^2 dtau
//   = (k^2 + l^2) t + t (k^2 t^2 / 12 + (k t / 2 - eta)^2).
double adv_heat_integral(int k, double eta, int l, double t);

// exp(-mu [I(t1) - I(t0)]) for a single mode.
double heat_factor(int k, double eta, int l, double t0, double t1, double mu);

// Unknowns of the z-average (l = 0) problem.
struct AdaptedState {
  SpectralField2D f;
  SpectralField2D g;
  SpectralField2D h1;
  SpectralField2D h2;
};

SpectralField2D heat_propagate(const SpectralField2D& field, double t0, double t1, double mu);
AdaptedState heat_propagate(const AdaptedState& state, double t0, double t1, double mu);

using Vec3 = std::array<Complex, 3>;

struct ModeState3D {
  int k = 0;
  double eta = 0.0;
  int l = 0;
  Vec3 v{};
  Vec3 b{};
  double t = 0.0;

  [[nodiscard]] std::array<double, 3> symbol_vector() const {
    return {static_cast<double>(k), eta - k * t, static_cast<double>(l)};
  }
  // q . v and q . b, up to the factor i.
  [[nodiscard]] Complex divergence_v() const;
  [[nodiscard]] Complex divergence_b() const;
  // Removes the components along q.
  void project_solenoidal();
};

struct ModeDerivative {
  Vec3 dv{};
  Vec3 db{};
};

// Throws SingularSymbol for the (0, 0, 0) mode.
ModeDerivative linear3d_rhs(const ModeState3D& state, double alpha, double mu);

struct IntegratorTolerance {
  double abs = 1e-13;
  double rel = 1e-11;
};

// Samples at t0, t0 + dt, ..., t_end (the last sample lands exactly on
// t_end). The diffusive factor is scalar per mode and commutes with the rest
// of the operator, so the transport/coupling part is integrated with an
// adaptive Dormand-Prince scheme and the exact heat factor is applied on top.
// Solutions are re-projected onto q^perp after every output interval.
std::vector<ModeState3D> linear3d_integrate(const ModeState3D& initial, double t_end, double dt,
                                            double alpha, double mu,
                                            IntegratorTolerance tol = {});

// Adapted unknowns of a single z-averaged mode.
struct ZAverageMode {
  Complex f;   // d_y^t v_x - d_x v_y
  Complex g;   // Lambda_t^{-2} (d_y^t b_x - d_x b_y)
  Complex h1;  // v_z
  Complex h2;  // b_z
};

// Requires l == 0 and (k, eta) != (0, 0).
ZAverageMode to_zaverage(const ModeState3D& state);
// Inverse map: v = (-d_y^t Lambda_t^{-2} f, d_x Lambda_t^{-2} f, h1),
//              b = (-d_y^t g, d_x g, h2).
ModeState3D from_zaverage(int k, double eta, double t, const ZAverageMode& unknowns);

// alpha-stabilized unknowns; require l != 0.
struct TildeMode {
  Vec3 v;  // v + e1 b_y / (i alpha l)
  Vec3 b;
};
TildeMode to_tilde(const ModeState3D& state, double alpha);
ModeState3D from_tilde(int k, double eta, int l, double t, const TildeMode& tilde, double alpha);

// Inviscid-damping unknowns; require l != 0.
struct RhoMode {
  Complex rho1;
  Complex rho2;
  Complex rho1_tilde;
};
RhoMode to_rho(const ModeState3D& state, double alpha);

// |A_L (v~, b~)|^2 weighted by <k, eta, l>^4, for l != 0 modes.
double al_energy(const ModeState3D& state, double alpha, double mu);

// Field-level version of the z-average map for 2D (l = 0) data.
struct PrimitiveFields2D {
  SpectralField2D vx, vy, vz, bx, by, bz;
};
AdaptedState to_adapted(const PrimitiveFields2D& fields, double t);
PrimitiveFields2D from_adapted(const AdaptedState& state, double t);

// Least-squares decay/growth rates along a single-mode trajectory.
struct DampingReport {
  double vy_slope = 0.0;        // log|v_y| vs log<t>
  double vx_slope = 0.0;        // log|v_x| vs log<t>
  double bx_slope = 0.0;        // log|b_x| vs log<t>
  double vyby_slope = 0.0;      // log|(v_y, b_y)| vs log<t>
  double envelope_rate = 0.0;   // log|(v, b)| vs mu t^3
  std::size_t samples = 0;
};

// Fits over samples with t in [t_min, t_max]. The diffusive envelope
// e^{-mu I(t)} is divided out before the <t>-slopes are fitted when
// remove_heat is set. Throws DomainError below 10 samples per decade.
DampingReport damping_diagnostics(std::span<const ModeState3D> trajectory, double mu,
                                  double t_min, double t_max, bool remove_heat = true);

}  // namespace shearlab
