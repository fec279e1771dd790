#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "shearlab/linear.hpp"
#include "shearlab/solver.hpp"

using namespace shearlab;

namespace {

GridSpec solver_grid() {
  GridSpec g;
  g.n_x = 16;
  g.n_y = 64;
  g.l_y = 4.0 * kPi;
  return g;
}

SolverState make_state(const SpectralField2D& f, const SpectralField2D& g, double mu, double t = 0.0) {
  SolverState s;
  s.f = f;
  s.g = g;
  s.t = t;
  s.params.mu = mu;
  return s;
}

// Quadratic terms by direct convolution.
NonlinearTerms oracle_terms(const SpectralField2D& f, const SpectralField2D& g, double t) {
  const auto psi = [t](int k, double eta) {
    const double q2 = shear_symbol(k, eta, 0, t);
    return q2 > 0.0 ? Complex{1.0 / q2, 0.0} : Complex{};
  };
  const auto one = [](int, double) { return Complex{1.0, 0.0}; };
  const auto neg_lap = [t](int k, double eta) { return Complex{-shear_symbol(k, eta, 0, t), 0.0}; };
  NonlinearTerms out;
  out.f = oracle::bracket_convolution(f, f, psi, one) + oracle::bracket_convolution(g, g, one, neg_lap);
  out.g = oracle::bracket_convolution(f, g, psi, one);
  for (auto* field : {&out.f, &out.g}) {
    dealias_in_place(*field);
    field->mode(0, 0) = 0.0;
  }
  return out;
}

double inner(const SpectralField2D& a, const SpectralField2D& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) s += (std::conj(a.coeffs()[i]) * b.coeffs()[i]).real();
  return s;
}

}  // namespace

TEST_CASE("single-mode right-hand sides") {
  const auto grid = solver_grid();
  const double mu = 1e-2;
  const double t = 0.8;
  SpectralField2D zero(grid);

  SpectralField2D f(grid);
  f.set_real_mode(2, 3, {0.4, -0.1});
  auto expected = apply_symbol(f, symbols::neg_laplacian_t(), t);
  expected *= -mu;
  CHECK(oracle::max_abs_diff(rhs_f(make_state(f, zero, mu, t)), expected) <= 1e-15);

  SpectralField2D g(grid);
  g.set_real_mode(1, 0, 0.5);
  CHECK(rhs_f(make_state(zero, g, 0.0, t)).max_abs() <= 1e-16);
  auto expected_g = apply_symbol(g, symbols::neg_laplacian_t(), t);
  expected_g *= -mu;
  CHECK(oracle::max_abs_diff(rhs_g(make_state(zero, g, mu, t)), expected_g) <= 1e-15);

  SpectralField2D aligned(grid);
  aligned.set_real_mode(2, 0, 0.3);
  CHECK(nonlinear_terms(aligned, g, t).g.max_abs() <= 1e-16);
}

TEST_CASE("two-mode g matches the hand convolution") {
  const auto grid = solver_grid();
  SpectralField2D g(grid);
  g.set_real_mode(1, 0, 0.5);
  for (int j = 4; j <= 8; ++j) g.set_real_mode(2, j, 0.1);
  SpectralField2D zero(grid);
  for (double t : {0.0, 1.5}) {
    const auto terms = nonlinear_terms(zero, g, t);
    const auto ref = oracle_terms(zero, g, t);
    for (int j = 4; j <= 8; ++j) {
      CHECK(std::abs(terms.f.mode(3, j) - ref.f.mode(3, j)) <= 1e-12);
      // By hand: (g(1,0), g(2,eta)) -> k = 3 carries eta (|q(2,eta)|^2 - |q(1,0)|^2) g1 g2 times +-1
      const double eta = grid.eta_spacing() * j;
      const double hand = 0.5 * 0.1 * (-(0.0 * 2 - 1 * eta)) *
                          (-shear_symbol(2, eta, 0, t) + shear_symbol(1, 0.0, 0, t));
      CHECK(ref.f.mode(3, j).real() == doctest::Approx(hand).epsilon(1e-12));
    }
  }
}

TEST_CASE("quadratic terms match the direct convolution") {
  const auto grid = solver_grid();
  std::mt19937_64 rng(211);
  for (int trial = 0; trial < 10; ++trial) {
    const double t = 0.37 * trial;
    const auto f = oracle::random_field(grid, 2, 10, rng);
    const auto g = oracle::random_field(grid, 2, 10, rng);
    const auto got = nonlinear_terms(f, g, t);
    const auto ref = oracle_terms(f, g, t);
    CHECK(oracle::max_abs_diff(got.f, ref.f) <= 1e-10 * std::max(1.0, ref.f.max_abs()));
    CHECK(oracle::max_abs_diff(got.g, ref.g) <= 1e-10 * std::max(1.0, ref.g.max_abs()));
    // Transport is L^2-skew.
    const auto self = nonlinear_terms(f, SpectralField2D(grid), t);
    CHECK(std::abs(inner(f, self.f)) <= 1e-12 * std::max(1.0, self.f.max_abs()));
    CHECK(std::abs(inner(g, got.g)) <= 1e-12 * std::max(1.0, got.g.max_abs()));
  }
}

TEST_CASE("step basics") {
  const auto grid = solver_grid();
  std::mt19937_64 rng(223);
  const auto f = oracle::random_field(grid, 2, 10, rng, 1e-2);
  const auto g = oracle::random_field(grid, 2, 10, rng, 1e-3);
  const auto s = make_state(f, g, 1e-2, 0.5);

  SUBCASE("dt = 0") {
    const auto same = step(s, 0.0);
    CHECK(same.t == s.t);
    CHECK(same.f.coeffs() == s.f.coeffs());
    CHECK(same.g.coeffs() == s.g.coeffs());
  }
  SUBCASE("CFL rejection") {
    try {
      step(s, 1e3);
      FAIL("expected CflViolation");
    } catch (const CflViolation& e) {
      CHECK(e.suggested_dt() > 0.0);
      CHECK(e.suggested_dt() < 1e3);
      CHECK_NOTHROW(step(s, e.suggested_dt()));
    }
  }
  SUBCASE("tiny amplitudes follow the heat flow") {
    for (double amp : {1e-4, 1e-5}) {
      auto tiny = make_state(amp * f, amp * g, 1e-2, 0.5);
      const auto end = integrate(tiny, 2.5, 0.05);
      const auto lin_f = heat_propagate(tiny.f, 0.5, 2.5, 1e-2);
      const auto lin_g = heat_propagate(tiny.g, 0.5, 2.5, 1e-2);
      const double dev = std::max(oracle::max_abs_diff(end.f, lin_f), oracle::max_abs_diff(end.g, lin_g));
      CHECK(dev <= 100.0 * amp * amp);
    }
  }
  SUBCASE("zero state") {
    SolverState z = make_state(SpectralField2D(grid), SpectralField2D(grid), 1e-2);
    const auto next = integrate(z, 1.0, 0.1);
    CHECK(next.f.max_abs() == 0.0);
    const auto r = energy_report(next, {.weighted = true});
    CHECK(r.f_l2 == 0.0);
    CHECK(r.g_hn1 == 0.0);
    CHECK(r.critical_energy == 0.0);
    CHECK(r.average_velocity == 0.0);
  }
}

TEST_CASE("Richardson order") {
  const auto grid = solver_grid();
  std::mt19937_64 rng(227);
  const auto f = oracle::random_field(grid, 2, 6, rng, 0.03, 1.0);
  const auto g = oracle::random_field(grid, 2, 6, rng, 0.01, 1.0);
  const auto s = make_state(f, g, 1e-2);
  const double T = 1.0;
  const auto a = integrate(s, T, 0.1);
  const auto b = integrate(s, T, 0.05);
  const auto c = integrate(s, T, 0.025);
  const double e1 = oracle::max_abs_diff(a.f, b.f) + oracle::max_abs_diff(a.g, b.g);
  const double e2 = oracle::max_abs_diff(b.f, c.f) + oracle::max_abs_diff(b.g, c.g);
  const double order = std::log2(e1 / e2);
  MESSAGE("observed order " << order);
  CHECK(order >= 4.0);
}

TEST_CASE("energy report") {
  const auto grid = solver_grid();
  const double mu = 1e-3;
  SolverState s = make_state(SpectralField2D(grid), SpectralField2D(grid), mu, 2.0);
  s.params.gamma = 5.0 / 6.0;
  const int N = s.params.N_diag;
  const double measure = lattice_measure(grid);
  const double eta = 2.0 * grid.eta_spacing();
  s.f.mode(0, 2) = 1.0;
  s.g.mode(1, 2) = 1.0;
  const auto r = energy_report(s);
  CHECK(r.f_l2 == doctest::Approx(std::sqrt(measure)));
  CHECK(r.f_hn == doctest::Approx(std::sqrt(measure) * std::pow(bracket(eta), N)));
  CHECK(r.f_hn_scaled == doctest::Approx(std::pow(mu, 1.0 / 6.0) * r.f_hn));
  CHECK(r.g_hn1 == doctest::Approx(std::sqrt(measure) * std::pow(bracket(1.0, eta), N + 1)));
  CHECK(r.g_h1 == doctest::Approx(std::sqrt(measure) * bracket(1.0, eta)));
  CHECK(r.bx_nonzero_l2 == doctest::Approx(std::sqrt(measure) * std::abs(eta - 2.0)));
  CHECK(r.average_velocity == doctest::Approx(std::sqrt(measure) * std::pow(bracket(eta), N - 2) / eta));
}

TEST_CASE("dissipation accumulator is the trapezoid rule") {
  const auto grid = solver_grid();
  std::mt19937_64 rng(229);
  auto s = make_state(oracle::random_field(grid, 2, 6, rng, 1e-3), oracle::random_field(grid, 2, 6, rng, 1e-3), 1e-2);
  std::vector<double> times{0.0};
  std::vector<double> rates{dissipation_rate(s.g, 0.0, 1e-2, s.params.N_diag)};
  const auto end = integrate(s, 3.0, 0.07, [&](const SolverState& x) {
    times.push_back(x.t);
    rates.push_back(dissipation_rate(x.g, x.t, 1e-2, x.params.N_diag));
  });
  double trap = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) trap += 0.5 * (times[i] - times[i - 1]) * (rates[i] + rates[i - 1]);
  CHECK(end.dissipation_integral == doctest::Approx(trap).epsilon(1e-12));
  CHECK(end.t == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("Navier-Stokes limit dissipates L2") {
  const auto grid = solver_grid();
  std::mt19937_64 rng(233);
  auto s = make_state(oracle::random_field(grid, 2, 8, rng, 0.05, 0.5), SpectralField2D(grid), 1e-2);
  double prev = sobolev_norm(s.f, 0);
  integrate(s, 4.0, 0.02, [&](const SolverState& x) {
    const double now = sobolev_norm(x.f, 0);
    CHECK(now <= prev * (1.0 + 1e-6 * 0.02));
    prev = now;
  });
}

TEST_CASE("linear regime responds linearly to the data size") {
  const auto grid = solver_grid();
  std::mt19937_64 rng(239);
  const auto f = oracle::random_field(grid, 2, 8, rng, 1.0, 0.5);
  const auto g = oracle::random_field(grid, 2, 8, rng, 1.0, 0.5);
  auto max_f = [&](double eps) {
    double m = 0.0;
    integrate(make_state(eps * f, eps * g, 1e-2), 3.0, 0.02,
              [&](const SolverState& x) { m = std::max(m, sobolev_norm(x.f, 0)); });
    return m;
  };
  const double ratio = max_f(1e-4) / max_f(5e-5);
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
}
