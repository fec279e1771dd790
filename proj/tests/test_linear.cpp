#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearlab/linear.hpp"

using namespace shearlab;

namespace {

constexpr Complex kI{0.0, 1.0};

GridSpec grid_2d() {
  GridSpec g;
  g.n_x = 16;
  g.n_y = 64;
  g.l_y = 4.0 * kPi;
  return g;
}

ModeState3D random_mode(std::mt19937_64& rng, int k, double eta, int l) {
  std::normal_distribution<double> n;
  ModeState3D s;
  s.k = k;
  s.eta = eta;
  s.l = l;
  for (int c = 0; c < 3; ++c) {
    s.v[c] = {n(rng), n(rng)};
    s.b[c] = {n(rng), n(rng)};
  }
  s.project_solenoidal();
  return s;
}

double norm3(const Vec3& a) { return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2])); }

}  // namespace

TEST_CASE("adv_heat_integral") {
  CHECK(adv_heat_integral(0, 2.0, 1, 3.0) == doctest::Approx(15.0).epsilon(1e-15));
  for (double t : {0.0, 0.5, 3.0, 40.0}) {
    CHECK(adv_heat_integral(1, 0.0, 0, t) == doctest::Approx(t + t * t * t / 3.0).epsilon(1e-14));
  }
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 200; ++n) {
    const int k = static_cast<int>(-10 + 21 * u(rng));
    const int l = static_cast<int>(-5 + 11 * u(rng));
    const double eta = -50 + 100 * u(rng);
    const double t = 60 * u(rng);
    const double scale = t * (1.0 + k * k + eta * eta + l * l + k * k * t * t);
    const double quad = oracle::integrate(
        [&](double tau) { return shear_symbol(k, eta, l, tau); }, 0.0, t, 1e-15 * scale);
    const double exact = adv_heat_integral(k, eta, l, t);
    CHECK(std::abs(exact - quad) <= 1e-10 * std::max(1.0, std::abs(quad)));
    CHECK(exact >= k * k * t * t * t / 12.0);
  }
}

TEST_CASE("heat_propagate") {
  const auto grid = grid_2d();
  std::mt19937_64 rng(103);
  const auto f = oracle::random_field(grid, 6, 20, rng, 1.0, 1.0);

  CHECK(heat_propagate(f, 0.0, 5.0, 0.0).coeffs() == f.coeffs());

  const double mu = 1e-2;
  const auto direct = heat_propagate(f, 0.0, 7.0, mu);
  const auto split = heat_propagate(heat_propagate(f, 0.0, 2.5, mu), 2.5, 7.0, mu);
  CHECK(oracle::max_abs_diff(direct, split) <= 1e-14 * f.max_abs());

  const auto nonzero = project(f, XPart::Nonzero);
  for (int N : {0, 2, 5}) {
    double prev = sobolev_norm(f, N);
    for (double t = 0.5; t <= 20.0; t += 0.5) {
      const auto ft = heat_propagate(f, 0.0, t, mu);
      const double now = sobolev_norm(ft, N);
      CHECK(now <= prev * (1.0 + 1e-14));
      prev = now;
      const double envelope = std::exp(-mu * t * t * t / 12.0) * sobolev_norm(nonzero, N);
      CHECK(sobolev_norm(project(ft, XPart::Nonzero), N) <= envelope * (1.0 + 1e-14));
    }
  }
  CHECK_THROWS_AS(heat_propagate(f, 2.0, 1.0, mu), DomainError);

  AdaptedState state{f, 0.5 * f, 2.0 * f, -1.0 * f};
  const auto out = heat_propagate(state, 0.0, 3.0, mu);
  CHECK(oracle::max_abs_diff(out.h1, 2.0 * heat_propagate(f, 0.0, 3.0, mu)) <= 1e-14);
}

TEST_CASE("linear3d_rhs") {
  std::mt19937_64 rng(107);

  SUBCASE("no field, no viscosity: linearized Euler") {
    auto s = random_mode(rng, 2, 3.0, 1);
    for (auto& c : s.b) c = 0.0;
    s.t = 0.7;
    s.project_solenoidal();
    const auto d = linear3d_rhs(s, 0.0, 0.0);
    const auto q = s.symbol_vector();
    const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
    for (int c = 0; c < 3; ++c) {
      const Complex expected = 2.0 * s.k * q[c] * s.v[1] / q2 - (c == 0 ? s.v[1] : Complex{});
      CHECK(std::abs(d.dv[c] - expected) <= 1e-14);
      CHECK(d.db[c] == Complex{});
    }
  }
  SUBCASE("x-independent modes: lift-up only") {
    auto s = random_mode(rng, 0, 2.0, 3);
    const auto d = linear3d_rhs(s, 0.0, 0.0);
    CHECK(std::abs(d.dv[0] + s.v[1]) <= 1e-14);
    CHECK(d.dv[1] == Complex{});
    CHECK(d.dv[2] == Complex{});
  }
  SUBCASE("constraint is preserved by the vector field") {
    for (int n = 0; n < 50; ++n) {
      std::uniform_real_distribution<double> u(-5.0, 5.0);
      const int k = static_cast<int>(u(rng));
      const int l = static_cast<int>(u(rng));
      auto s = random_mode(rng, k, u(rng), l);
      s.t = 3.0 + u(rng);
      s.project_solenoidal();
      const auto d = linear3d_rhs(s, 1.3, 1e-2);
      const auto q = s.symbol_vector();
      // d/dt (q . v) = q'. v + q . v', with q' = (0, -k, 0)
      const Complex dv = q[0] * d.dv[0] + q[1] * d.dv[1] + q[2] * d.dv[2] - static_cast<double>(s.k) * s.v[1];
      const Complex db = q[0] * d.db[0] + q[1] * d.db[1] + q[2] * d.db[2] - static_cast<double>(s.k) * s.b[1];
      const double scale = 1.0 + norm3(s.v) + norm3(s.b);
      CHECK(std::abs(dv) <= 1e-12 * scale);
      CHECK(std::abs(db) <= 1e-12 * scale);
    }
  }
  SUBCASE("(0, 0, 0) is rejected") {
    ModeState3D s;
    CHECK_THROWS_AS(linear3d_rhs(s, 1.0, 1e-3), SingularSymbol);
  }
}

TEST_CASE("linear3d_integrate") {
  std::mt19937_64 rng(109);

  SUBCASE("t_end = 0 returns the initial state") {
    const auto s = random_mode(rng, 1, 2.0, 1);
    const auto traj = linear3d_integrate(s, 0.0, 0.1, 1.0, 1e-3);
    REQUIRE(traj.size() == 1);
    CHECK(traj[0].v == s.v);
    CHECK(traj[0].b == s.b);
  }
  SUBCASE("decoupled components follow their closed forms") {
    const double mu = 1e-3;
    for (int l : {0, 2}) {
      const auto s = random_mode(rng, 2, 5.0, l);
      const auto traj = linear3d_integrate(s, 12.0, 0.25, 0.0, mu);
      const double q0 = shear_symbol(s.k, s.eta, s.l, 0.0);
      for (const auto& x : traj) {
        const double heat = heat_factor(s.k, s.eta, s.l, 0.0, x.t, mu);
        const double qt = shear_symbol(s.k, s.eta, s.l, x.t);
        // |q|^2 v_y is transported; b_x picks up t b_y
        CHECK(std::abs(x.v[1] - q0 / qt * heat * s.v[1]) <= 1e-6 * norm3(s.v));
        CHECK(std::abs(x.b[1] - heat * s.b[1]) <= 1e-6 * norm3(s.b));
        CHECK(std::abs(x.b[0] - heat * (s.b[0] + x.t * s.b[1])) <= 1e-6 * norm3(s.b) * (1.0 + x.t));
      }
    }
  }
  SUBCASE("divergence drift and A_L energy") {
    for (int n = 0; n < 6; ++n) {
      const double mu = std::pow(10.0, -2.0 - 0.4 * n);
      const double alpha = n % 2 == 0 ? 0.5 : 2.0;
      const auto s = random_mode(rng, 1 + n % 3, -2.0 + n, 1 + n % 2);
      const auto traj = linear3d_integrate(s, 3.0 / std::cbrt(mu), 0.05, alpha, mu);
      double prev = al_energy(traj.front(), alpha, mu);
      for (const auto& x : traj) {
        CHECK(std::abs(x.divergence_v()) <= 1e-8 * norm3(x.v) + 1e-300);
        CHECK(std::abs(x.divergence_b()) <= 1e-8 * norm3(x.b) + 1e-300);
        const double e = al_energy(x, alpha, mu);
        CHECK(e <= prev * (1.0 + 1e-7));
        prev = e;
      }
    }
  }
  SUBCASE("bad arguments") {
    const auto s = random_mode(rng, 1, 0.0, 1);
    CHECK_THROWS_AS(linear3d_integrate(s, 1.0, 0.0, 1.0, 1e-3), DomainError);
  }
}

TEST_CASE("adapted unknowns") {
  std::mt19937_64 rng(113);

  SUBCASE("z-average round trip") {
    for (int n = 0; n < 20; ++n) {
      const int k = n % 5 - 2;
      const double eta = 0.7 * n - 6.0;
      auto s = random_mode(rng, k, eta, 0);
      s.t = 0.3 * n;
      s.project_solenoidal();
      const auto back = from_zaverage(k, eta, s.t, to_zaverage(s));
      for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(back.v[c] - s.v[c]) <= 1e-12 * norm3(s.v));
        CHECK(std::abs(back.b[c] - s.b[c]) <= 1e-12 * norm3(s.b));
      }
    }
  }
  SUBCASE("z-average of an x-independent mode") {
    ZAverageMode z{{0.3, -0.2}, {0.1, 0.4}, {1.0, 0.0}, {0.0, 2.0}};
    const double eta = 2.5;
    const auto s = from_zaverage(0, eta, 4.0, z);
    // v_x = d_y d_y^{-2} f, v_y = 0, v_z = h1
    CHECK(std::abs(s.v[0] - z.f / (kI * eta)) <= 1e-15);
    CHECK(s.v[1] == Complex{});
    CHECK(s.v[2] == z.h1);
  }
  SUBCASE("vorticity of a z-averaged velocity") {
    auto s = random_mode(rng, 1, 3.0, 0);
    const auto z = to_zaverage(s);
    CHECK(std::abs(z.f - (kI * 3.0 * s.v[0] - kI * s.v[1])) <= 1e-15);
  }
  SUBCASE("tilde round trip and domain checks") {
    auto s = random_mode(rng, 2, 1.0, 3);
    s.t = 1.5;
    const auto back = from_tilde(2, 1.0, 3, 1.5, to_tilde(s, 0.5), 0.5);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(back.v[c] - s.v[c]) <= 1e-14 * norm3(s.v));
    const auto flat = random_mode(rng, 2, 1.0, 0);
    CHECK_THROWS_AS(to_tilde(flat, 1.0), DomainError);
    CHECK_THROWS_AS(to_rho(flat, 1.0), DomainError);
    CHECK_THROWS_AS(to_zaverage(s), DomainError);
  }
  SUBCASE("field-level round trip") {
    GridSpec g = grid_2d();
    AdaptedState a{oracle::random_field(g, 5, 12, rng), oracle::random_field(g, 5, 12, rng),
                   oracle::random_field(g, 5, 12, rng), oracle::random_field(g, 5, 12, rng)};
    const double t = 1.7;
    const auto back = to_adapted(from_adapted(a, t), t);
    CHECK(oracle::max_abs_diff(back.f, a.f) <= 1e-12 * a.f.max_abs());
    CHECK(oracle::max_abs_diff(back.g, a.g) <= 1e-12 * a.g.max_abs());
    CHECK(oracle::max_abs_diff(back.h1, a.h1) == 0.0);
  }
}

TEST_CASE("damping diagnostics") {
  SUBCASE("constant signal has zero slope") {
    std::vector<ModeState3D> traj;
    for (int i = 0; i <= 400; ++i) {
      ModeState3D s;
      s.k = 1;
      s.l = 1;
      s.t = 0.05 * i;
      s.v = {1.0, 2.0, 0.5};
      s.b = {0.5, 1.0, 0.0};
      traj.push_back(s);
    }
    const auto r = damping_diagnostics(traj, 0.0, 0.0, 20.0, false);
    CHECK(std::abs(r.vy_slope) < 1e-12);
    CHECK(std::abs(r.bx_slope) < 1e-12);
    CHECK(std::abs(r.envelope_rate) < 1e-12);
    const std::vector<ModeState3D> sparse{traj.front(), traj[traj.size() / 2], traj.back()};
    CHECK_THROWS_AS(damping_diagnostics(sparse, 0.0, 0.0, 20.0), DomainError);
  }
  SUBCASE("inviscid damping keeps <t> |v_y| bounded") {
    std::mt19937_64 rng(127);
    const auto s = random_mode(rng, 1, 0.0, 1);
    const auto traj = linear3d_integrate(s, 200.0, 0.1, 20.0, 0.0);
    const double initial = std::hypot(norm3(s.v), norm3(s.b));
    double worst = 0.0;
    for (const auto& x : traj) worst = std::max(worst, bracket(x.t) * std::abs(x.v[1]) / initial);
    CHECK(worst < 10.0);
  }
}
