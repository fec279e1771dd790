#include "shearlab/linear.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "shearlab/fit.hpp"
#include "shearlab/weights.hpp"

namespace shearlab {

namespace {

constexpr Complex kI{0.0, 1.0};

using OdeState = std::array<double, 12>;

OdeState pack(const Vec3& v, const Vec3& b) {
  OdeState s{};
  for (int c = 0; c < 3; ++c) {
    s[2 * c] = v[c].real();
    s[2 * c + 1] = v[c].imag();
    s[6 + 2 * c] = b[c].real();
    s[6 + 2 * c + 1] = b[c].imag();
  }
  return s;
}

void unpack(const OdeState& s, Vec3& v, Vec3& b) {
  for (int c = 0; c < 3; ++c) {
    v[c] = {s[2 * c], s[2 * c + 1]};
    b[c] = {s[6 + 2 * c], s[6 + 2 * c + 1]};
  }
}

void require_nonzero(const ModeState3D& s, const char* what) {
  if (s.k == 0 && s.eta == 0.0 && s.l == 0) {
    throw SingularSymbol(std::string(what) + ": the (0, 0, 0) mode has no moving-frame symbol");
  }
}

void require_l(const ModeState3D& s, bool nonzero, const char* what) {
  if ((s.l != 0) != nonzero) {
    throw DomainError(std::string(what) + (nonzero ? ": requires a z-dependent mode (l != 0)"
                                                   : ": requires a z-averaged mode (l == 0)"));
  }
}

double norm3(const Vec3& a) { return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2])); }

}  // namespace

double adv_heat_integral(int k, double eta, int l, double t) {
  const double kk = static_cast<double>(k) * k;
  const double ll = static_cast<double>(l) * l;
  const double c = k * t / 2.0 - eta;
  return (kk + ll) * t + t * (kk * t * t / 12.0 + c * c);
}

double heat_factor(int k, double eta, int l, double t0, double t1, double mu) {
  if (mu == 0.0 || t0 == t1) return 1.0;
  return std::exp(-mu * (adv_heat_integral(k, eta, l, t1) - adv_heat_integral(k, eta, l, t0)));
}

SpectralField2D heat_propagate(const SpectralField2D& field, double t0, double t1, double mu) {
  if (t1 < t0 || t0 < 0.0) throw DomainError("heat_propagate: requires t1 >= t0 >= 0");
  SpectralField2D out = field;
  if (mu == 0.0) return out;
  const auto& grid = field.grid();
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      auto& c = out.at(ix, iy);
      if (c == Complex{0.0, 0.0}) continue;
      c *= heat_factor(k, grid.eta_of(iy), 0, t0, t1, mu);
    }
  }
  return out;
}

AdaptedState heat_propagate(const AdaptedState& state, double t0, double t1, double mu) {
  return {heat_propagate(state.f, t0, t1, mu), heat_propagate(state.g, t0, t1, mu),
          heat_propagate(state.h1, t0, t1, mu), heat_propagate(state.h2, t0, t1, mu)};
}

Complex ModeState3D::divergence_v() const {
  const auto q = symbol_vector();
  return q[0] * v[0] + q[1] * v[1] + q[2] * v[2];
}

Complex ModeState3D::divergence_b() const {
  const auto q = symbol_vector();
  return q[0] * b[0] + q[1] * b[1] + q[2] * b[2];
}

void ModeState3D::project_solenoidal() {
  const auto q = symbol_vector();
  const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
  if (q2 == 0.0) return;
  const Complex dv = divergence_v() / q2;
  const Complex db = divergence_b() / q2;
  for (int c = 0; c < 3; ++c) {
    v[c] -= dv * q[c];
    b[c] -= db * q[c];
  }
}

ModeDerivative linear3d_rhs(const ModeState3D& s, double alpha, double mu) {
  require_nonzero(s, "linear3d_rhs");
  const auto q = s.symbol_vector();
  const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
  const Complex coupling = kI * alpha * static_cast<double>(s.l);
  ModeDerivative d;
  for (int c = 0; c < 3; ++c) {
    d.dv[c] = 2.0 * s.k * q[c] * s.v[1] / q2 - mu * q2 * s.v[c] + coupling * s.b[c];
    d.db[c] = -mu * q2 * s.b[c] + coupling * s.v[c];
  }
  d.dv[0] -= s.v[1];
  d.db[0] += s.b[1];
  return d;
}

std::vector<ModeState3D> linear3d_integrate(const ModeState3D& initial, double t_end, double dt,
                                            double alpha, double mu, IntegratorTolerance tol) {
  require_nonzero(initial, "linear3d_integrate");
  if (!(dt > 0.0)) throw DomainError("linear3d_integrate: dt must be positive");
  if (t_end < initial.t) throw DomainError("linear3d_integrate: t_end precedes the initial time");

  namespace odeint = boost::numeric::odeint;
  // Transport and coupling only; the scalar heat factor is applied afterwards.
  auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    ModeState3D s = initial;
    s.t = t;
    unpack(x, s.v, s.b);
    const auto d = linear3d_rhs(s, alpha, 0.0);
    dxdt = pack(d.dv, d.db);
  };
  auto stepper = odeint::make_controlled(tol.abs, tol.rel, odeint::runge_kutta_dopri5<OdeState>());

  std::vector<ModeState3D> out;
  out.push_back(initial);
  OdeState x = pack(initial.v, initial.b);
  const double t0 = initial.t;
  const auto steps = static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9));
  double t = t0;
  for (long n = 1; n <= steps; ++n) {
    const double t_next = (n == steps) ? t_end : t0 + n * dt;
    odeint::integrate_adaptive(stepper, system, x, t, t_next, std::min(dt, 0.05));
    t = t_next;
    ModeState3D s = initial;
    s.t = t;
    unpack(x, s.v, s.b);
    s.project_solenoidal();
    x = pack(s.v, s.b);
    const double factor = heat_factor(s.k, s.eta, s.l, t0, t, mu);
    for (int c = 0; c < 3; ++c) {
      s.v[c] *= factor;
      s.b[c] *= factor;
    }
    out.push_back(s);
  }
  return out;
}

ZAverageMode to_zaverage(const ModeState3D& s) {
  require_l(s, false, "to_zaverage");
  require_nonzero(s, "to_zaverage");
  const double ky = s.eta - s.k * s.t;
  const double q2 = static_cast<double>(s.k) * s.k + ky * ky;
  ZAverageMode z;
  z.f = kI * ky * s.v[0] - kI * static_cast<double>(s.k) * s.v[1];
  z.g = (kI * ky * s.b[0] - kI * static_cast<double>(s.k) * s.b[1]) / q2;
  z.h1 = s.v[2];
  z.h2 = s.b[2];
  return z;
}

ModeState3D from_zaverage(int k, double eta, double t, const ZAverageMode& z) {
  ModeState3D s;
  s.k = k;
  s.eta = eta;
  s.l = 0;
  s.t = t;
  require_nonzero(s, "from_zaverage");
  const double ky = eta - k * t;
  const double q2 = static_cast<double>(k) * k + ky * ky;
  s.v = {-kI * ky * z.f / q2, kI * static_cast<double>(k) * z.f / q2, z.h1};
  s.b = {-kI * ky * z.g, kI * static_cast<double>(k) * z.g, z.h2};
  return s;
}

TildeMode to_tilde(const ModeState3D& s, double alpha) {
  require_l(s, true, "to_tilde");
  TildeMode m{s.v, s.b};
  m.v[0] += s.b[1] / (kI * alpha * static_cast<double>(s.l));
  return m;
}

ModeState3D from_tilde(int k, double eta, int l, double t, const TildeMode& tilde, double alpha) {
  ModeState3D s;
  s.k = k;
  s.eta = eta;
  s.l = l;
  s.t = t;
  require_l(s, true, "from_tilde");
  s.v = tilde.v;
  s.b = tilde.b;
  s.v[0] -= s.b[1] / (kI * alpha * static_cast<double>(l));
  return s;
}

RhoMode to_rho(const ModeState3D& s, double alpha) {
  const auto tilde = to_tilde(s, alpha);
  const auto q = s.symbol_vector();
  const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
  const double scale = std::sqrt(q2) / bracket(s.k);
  RhoMode r;
  r.rho1 = scale * tilde.v[1];
  r.rho2 = scale * tilde.b[1];
  r.rho1_tilde = r.rho1 + (s.k / (alpha * s.l)) * kI * q[1] / q2 * r.rho2;
  return r;
}

double al_energy(const ModeState3D& s, double alpha, double mu) {
  const auto tilde = to_tilde(s, alpha);
  const double e = al_exponent(s.t, s.k, s.eta, s.l, mu, alpha);
  const double w = std::pow(bracket(s.k, s.eta, s.l), 4);
  const double n2 = norm3(tilde.v) * norm3(tilde.v) + norm3(tilde.b) * norm3(tilde.b);
  return std::exp(-2.0 * e) * w * n2;
}

AdaptedState to_adapted(const PrimitiveFields2D& p, double t) {
  const auto grad_y = symbols::dy_t();
  const auto grad_x = symbols::dx();
  AdaptedState a;
  a.f = apply_symbol(p.vx, grad_y, t) - apply_symbol(p.vy, grad_x, t);
  a.g = apply_symbol(apply_symbol(p.bx, grad_y, t) - apply_symbol(p.by, grad_x, t),
                     symbols::inv_neg_laplacian_t(), t);
  a.h1 = p.vz;
  a.h2 = p.bz;
  return a;
}

PrimitiveFields2D from_adapted(const AdaptedState& a, double t) {
  const auto grad_y = symbols::dy_t();
  const auto grad_x = symbols::dx();
  const auto psi = apply_symbol(a.f, symbols::inv_neg_laplacian_t(), t);
  PrimitiveFields2D p;
  p.vx = -1.0 * apply_symbol(psi, grad_y, t);
  p.vy = apply_symbol(psi, grad_x, t);
  p.vz = a.h1;
  p.bx = -1.0 * apply_symbol(a.g, grad_y, t);
  p.by = apply_symbol(a.g, grad_x, t);
  p.bz = a.h2;
  return p;
}

DampingReport damping_diagnostics(std::span<const ModeState3D> trajectory, double mu,
                                  double t_min, double t_max, bool remove_heat) {
  std::vector<double> log_t, t3, vy, vx, bx, vyby, total;
  for (const auto& s : trajectory) {
    if (s.t < t_min || s.t > t_max) continue;
    const double heat =
        remove_heat ? heat_factor(s.k, s.eta, s.l, trajectory.front().t, s.t, mu) : 1.0;
    const auto safe_log = [heat](double x) { return std::log(std::max(x / heat, 1e-300)); };
    log_t.push_back(std::log(bracket(s.t)));
    t3.push_back(mu * s.t * s.t * s.t);
    vy.push_back(safe_log(std::abs(s.v[1])));
    vx.push_back(safe_log(std::abs(s.v[0])));
    bx.push_back(safe_log(std::abs(s.b[0])));
    vyby.push_back(safe_log(std::hypot(std::abs(s.v[1]), std::abs(s.b[1]))));
    total.push_back(std::log(std::max(std::hypot(norm3(s.v), norm3(s.b)), 1e-300)));
  }
  std::vector<double> brackets(log_t.size());
  std::transform(log_t.begin(), log_t.end(), brackets.begin(), [](double x) { return std::exp(x); });
  if (log_t.size() < 3 || samples_per_decade(brackets) < 10.0) {
    std::ostringstream msg;
    msg << "damping_diagnostics: " << log_t.size()
        << " samples in the window, fewer than 10 per decade";
    throw DomainError(msg.str());
  }
  DampingReport r;
  r.samples = log_t.size();
  r.vy_slope = linear_fit(log_t, vy).slope;
  r.vx_slope = linear_fit(log_t, vx).slope;
  r.bx_slope = linear_fit(log_t, bx).slope;
  r.vyby_slope = linear_fit(log_t, vyby).slope;
  r.envelope_rate = linear_fit(t3, total).slope;
  return r;
}

}  // namespace shearlab
