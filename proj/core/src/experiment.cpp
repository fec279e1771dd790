#include "shearlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "shearlab/echo.hpp"
#include "shearlab/fit.hpp"
#include "shearlab/linear.hpp"

namespace shearlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<ExperimentKind, std::string>& kind_names() {
  static const std::map<ExperimentKind, std::string> names{
      {ExperimentKind::Linear3d, "linear3d"},
      {ExperimentKind::Heat2d, "heat2d"},
      {ExperimentKind::VorticityGrowth, "vorticity-growth"},
      {ExperimentKind::PotentialGrowth, "potential-growth"},
      {ExperimentKind::EchoMap, "echo-map"},
      {ExperimentKind::MuScan, "mu-scan"}};
  return names;
}

int next_power_of_two(double x) {
  int n = 1;
  while (n < x) n *= 2;
  return n;
}

SolverParams params_for(const ExperimentConfig& cfg, double mu) {
  SolverParams p = cfg.solver;
  p.mu = mu;
  p.gamma = cfg.gamma;
  p.beta1 = cfg.beta1;
  p.delta = cfg.delta;
  p.eps = cfg.delta * std::pow(mu, cfg.gamma);
  return p;
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string describe_grid(const GridSpec& g) {
  std::ostringstream s;
  s << g.n_x << "x" << g.n_y << ", l_y=" << g.l_y;
  return s.str();
}

// Lattice indices j with |j * spacing - center| <= halfwidth.
std::vector<int> band_indices(const GridSpec& grid, double center, double halfwidth) {
  const double d = grid.eta_spacing();
  std::vector<int> out;
  const int lo = static_cast<int>(std::ceil((center - halfwidth) / d - 1e-9));
  const int hi = static_cast<int>(std::floor((center + halfwidth) / d + 1e-9));
  for (int j = lo; j <= hi; ++j) out.push_back(j);
  return out;
}

void require_in_band(const GridSpec& grid, int k, const std::vector<int>& js, const char* what) {
  if (js.empty()) throw DomainError(std::string(what) + ": band holds no lattice points");
  for (int j : js) {
    const long idx = grid.index_of(k, j);
    if (idx < 0 || !grid.is_kept(static_cast<int>(idx / grid.n_y), static_cast<int>(idx % grid.n_y))) {
      throw DomainError(std::string(what) + ": grid too coarse for the data bands");
    }
  }
}

void check_resolution(const SolverState& s, double limit) {
  const double tf = spectral_tail_fraction(s.f);
  const double tg = spectral_tail_fraction(s.g);
  if (tf > limit || tg > limit) {
    std::ostringstream msg;
    msg << "resolution monitor: spectral tail fraction (f " << tf << ", g " << tg
        << ") exceeds " << limit << " at t = " << s.t;
    throw NumericalAbort(msg.str());
  }
}

json summary_json(const RunRecord& r) {
  json j = json::object();
  for (const auto& [k, v] : r.summary) j[k] = v;
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) { return kind_names().at(kind); }

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names()) {
    if (n == name) return k;
  }
  throw DomainError("unknown experiment kind '" + name + "'");
}

void ExperimentConfig::validate() const {
  grid.validate();
  solver.validate();
  std::ostringstream msg;
  if (mu_list.empty()) msg << "mu_list is empty; ";
  for (std::size_t i = 0; i < mu_list.size(); ++i) {
    if (!(mu_list[i] > 0.0 && mu_list[i] <= 1.0)) msg << "mu values must lie in (0, 1]; ";
    if (i > 0 && !(mu_list[i] < mu_list[i - 1])) msg << "mu_list must be strictly decreasing; ";
  }
  const bool growth = kind == ExperimentKind::VorticityGrowth ||
                      kind == ExperimentKind::PotentialGrowth || kind == ExperimentKind::MuScan;
  if (growth && !(horizon_factor > 0.0 && horizon_factor <= 1.0)) {
    msg << "horizon_factor must lie in (0, 1]; ";
  }
  if (!(horizon_factor > 0.0)) msg << "horizon_factor must be positive; ";
  if (!(dt > 0.0)) msg << "dt must be positive; ";
  if (cadence < 1) msg << "cadence must be >= 1; ";
  if (workers < 1) msg << "workers must be >= 1; ";
  if (!(delta > 0.0)) msg << "delta must be positive; ";
  if (!msg.str().empty()) throw DomainError("ExperimentConfig: " + msg.str());
}

GridSpec ExperimentConfig::grid_for(double mu) const {
  GridSpec g = grid;
  if (scale_ny) {
    const double factor = std::cbrt(ny_reference_mu / mu);
    g.n_y = next_power_of_two(grid.n_y * factor - 1e-9);
  }
  return g;
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.grid.n_x = 128;
  c.grid.n_y = 1024;
  c.grid.l_y = 8.0 * kPi;
  switch (kind) {
    case ExperimentKind::PotentialGrowth:
      c.grid.n_x = 64;
      c.scale_ny = true;
      c.ny_reference_mu = 1e-4;
      c.horizon_factor = 1.0;
      c.dt = 0.02;
      c.cadence = 25;
      break;
    case ExperimentKind::Heat2d:
      c.grid.n_x = 64;
      c.grid.n_y = 256;
      c.horizon_factor = 2.0;
      c.mu_list = {1e-2, 1e-3, 1e-4};
      break;
    case ExperimentKind::EchoMap:
      c.mu_list.clear();
      for (int i = 0; i <= 8; ++i) c.mu_list.push_back(std::pow(10.0, -2.0 - 0.25 * i));
      break;
    case ExperimentKind::Linear3d:
      c.mu_list = {1e-2, 1e-3, 1e-4};
      break;
    default:
      break;
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("kind")) c = default_config(parse_kind(j["kind"]));
    if (j.contains("scan_kind")) {
      const auto scan = parse_kind(j["scan_kind"]);
      if (c.kind == ExperimentKind::MuScan) {
        c = default_config(scan);
        c.kind = ExperimentKind::MuScan;
      }
      c.scan_kind = scan;
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      c.solver.dt_cfl = s.value("dt_cfl", c.solver.dt_cfl);
      c.solver.N_diag = s.value("N_diag", c.solver.N_diag);
    }
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      c.grid.n_x = g.value("n_x", c.grid.n_x);
      c.grid.n_y = g.value("n_y", c.grid.n_y);
      if (g.contains("l_y_over_pi")) c.grid.l_y = g["l_y_over_pi"].get<double>() * kPi;
      c.grid.l_y = g.value("l_y", c.grid.l_y);
      c.grid.dealias_fraction = g.value("dealias_fraction", c.grid.dealias_fraction);
    }
    c.mu_list = j.value("mu_list", c.mu_list);
    if (j.contains("mu_log10")) {
      c.mu_list.clear();
      for (double e : j["mu_log10"].get<std::vector<double>>()) c.mu_list.push_back(std::pow(10.0, e));
    }
    c.gamma = j.value("gamma", c.gamma);
    c.beta1 = j.value("beta1", c.beta1);
    c.delta = j.value("delta", c.delta);
    c.horizon_factor = j.value("horizon_factor", c.horizon_factor);
    c.dt = j.value("dt", c.dt);
    c.scale_ny = j.value("scale_ny", c.scale_ny);
    c.ny_reference_mu = j.value("ny_reference_mu", c.ny_reference_mu);
    if (j.contains("seed")) {
      const auto& s = j["seed"];
      c.seed.high_center = s.value("high_center", c.seed.high_center);
      c.seed.high_halfwidth = s.value("high_halfwidth", c.seed.high_halfwidth);
      c.seed.low_halfwidth = s.value("low_halfwidth", c.seed.low_halfwidth);
      c.seed.k0 = s.value("k0", c.seed.k0);
      c.seed.eta0_c = s.value("eta0_c", c.seed.eta0_c);
    }
    if (j.contains("linear3d")) {
      const auto& s = j["linear3d"];
      c.linear3d.k_values = s.value("k_values", c.linear3d.k_values);
      c.linear3d.l_values = s.value("l_values", c.linear3d.l_values);
      c.linear3d.eta_values = s.value("eta_values", c.linear3d.eta_values);
      c.linear3d.alpha_values = s.value("alpha_values", c.linear3d.alpha_values);
      c.linear3d.horizon_factor = s.value("horizon_factor", c.linear3d.horizon_factor);
      c.linear3d.samples = s.value("samples", c.linear3d.samples);
    }
    if (j.contains("echo")) {
      const auto& s = j["echo"];
      c.echo.eps_grid = s.value("eps_grid", c.echo.eps_grid);
      c.echo.k_max = s.value("k_max", c.echo.k_max);
      c.echo.eta_factor = s.value("eta_factor", c.echo.eta_factor);
      c.echo.gain_eps = s.value("gain_eps", c.echo.gain_eps);
    }
    c.output_dir = j.value("output_dir", c.output_dir);
    c.cadence = j.value("cadence", c.cadence);
    c.workers = j.value("workers", c.workers);
    c.tail_limit = j.value("tail_limit", c.tail_limit);
    c.check_envelope = j.value("check_envelope", c.check_envelope);
  } catch (const json::exception& e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["scan_kind"] = to_string(c.scan_kind);
  j["solver"] = {{"dt_cfl", c.solver.dt_cfl}, {"N_diag", c.solver.N_diag}};
  j["grid"] = {{"n_x", c.grid.n_x},
               {"n_y", c.grid.n_y},
               {"l_y", c.grid.l_y},
               {"dealias_fraction", c.grid.dealias_fraction}};
  j["mu_list"] = c.mu_list;
  j["gamma"] = c.gamma;
  j["beta1"] = c.beta1;
  j["delta"] = c.delta;
  j["horizon_factor"] = c.horizon_factor;
  j["dt"] = c.dt;
  j["scale_ny"] = c.scale_ny;
  j["ny_reference_mu"] = c.ny_reference_mu;
  j["seed"] = {{"high_center", c.seed.high_center},
               {"high_halfwidth", c.seed.high_halfwidth},
               {"low_halfwidth", c.seed.low_halfwidth},
               {"k0", c.seed.k0},
               {"eta0_c", c.seed.eta0_c}};
  j["linear3d"] = {{"k_values", c.linear3d.k_values},
                   {"l_values", c.linear3d.l_values},
                   {"eta_values", c.linear3d.eta_values},
                   {"alpha_values", c.linear3d.alpha_values},
                   {"horizon_factor", c.linear3d.horizon_factor},
                   {"samples", c.linear3d.samples}};
  j["echo"] = {{"eps_grid", c.echo.eps_grid},
               {"k_max", c.echo.k_max},
               {"eta_factor", c.echo.eta_factor},
               {"gain_eps", c.echo.gain_eps}};
  j["output_dir"] = c.output_dir;
  j["cadence"] = c.cadence;
  j["workers"] = c.workers;
  j["tail_limit"] = c.tail_limit;
  j["check_envelope"] = c.check_envelope;
  return j.dump(2);
}

void write_record(const RunRecord& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_file_atomic(dir / "config.json", r.config_json + "\n");
  for (const auto& [name, table] : r.tables) write_csv(table, dir / (name + ".csv"));
  Table fits{{"exponent", "ci", "expected", "n", "degenerate"}, {}};
  std::ostringstream names;
  for (const auto& f : r.fits) {
    fits.add_row({f.exponent, f.ci, f.expected, static_cast<double>(f.n), f.degenerate ? 1.0 : 0.0});
    names << f.quantity << "\n";
  }
  if (!r.fits.empty()) {
    write_csv(fits, dir / "fits.csv");
    write_file_atomic(dir / "fits_quantities.txt", names.str());
  }
  write_file_atomic(dir / "summary.json", summary_json(r).dump(2) + "\n");
  json extra = {{"resolution", r.resolution}, {"wall_seconds", r.wall_seconds}};
  write_manifest(dir, extra.dump());
}

SolverState make_data_vorticity_growth(const GridSpec& grid, double delta, double mu, double gamma,
                                       const SeedData& seed) {
  grid.validate();
  if (!(delta > 0.0) || !(mu > 0.0)) throw DomainError("make_data_vorticity_growth: bad parameters");
  const auto high = band_indices(grid, seed.high_center, seed.high_halfwidth);
  const auto low = band_indices(grid, 0.0, seed.low_halfwidth);
  require_in_band(grid, 1, high, "make_data_vorticity_growth");
  require_in_band(grid, 2, low, "make_data_vorticity_growth");
  SolverState s;
  s.f = SpectralField2D(grid);
  s.g = SpectralField2D(grid);
  for (int j : high) s.g.set_real_mode(1, j, 1.0);
  for (int j : low) s.g.set_real_mode(2, j, 1.0);
  s.params.mu = mu;
  s.params.gamma = gamma;
  s.params.delta = delta;
  s.params.eps = delta * std::pow(mu, gamma);
  const double norm = sobolev_norm(s.g, s.params.N_diag + 1);
  s.g *= s.params.eps / norm;
  return s;
}

SolverState make_data_potential_growth(const GridSpec& grid, double delta, double mu, double gamma,
                                       double beta1, double eta0_c, int k0) {
  grid.validate();
  if (!(delta > 0.0) || !(mu > 0.0) || !(eta0_c > 0.0) || k0 < 2) {
    throw DomainError("make_data_potential_growth: bad parameters");
  }
  const double eta0 = eta0_c / std::cbrt(mu);
  const auto fband = band_indices(grid, eta0, 1.0);
  const auto gband = band_indices(grid, 0.0, 1.0);
  try {
    require_in_band(grid, k0, fband, "make_data_potential_growth");
  } catch (const DomainError&) {
    throw DomainError("make_data_potential_growth: eta0 outside the lattice range");
  }
  require_in_band(grid, 1, gband, "make_data_potential_growth");

  SolverState s;
  s.params.mu = mu;
  s.params.gamma = gamma;
  s.params.beta1 = beta1;
  s.params.delta = delta;
  s.params.eps = delta * std::pow(mu, gamma);
  const int N = s.params.N_diag;
  s.f = SpectralField2D(grid);
  s.g = SpectralField2D(grid);
  const double f_amp = std::pow(mu, gamma - beta1) / std::pow(bracket(k0, eta0), N);
  const double g_amp = -std::pow(mu, gamma);
  for (int j : fband) s.f.set_real_mode(k0, j, f_amp);
  for (int j : gband) s.g.set_real_mode(1, j, g_amp);
  const double total = std::pow(mu, beta1) * sobolev_norm(s.f, N) + sobolev_norm(s.g, N + 1);
  const double scale = delta * std::pow(mu, gamma) / total;
  s.f *= scale;
  s.g *= scale;
  return s;
}

double restricted_norm(const SpectralField2D& field, int k, int s) {
  const auto& grid = field.grid();
  double sum = 0.0;
  for (int sign : {1, -1}) {
    const int kk = sign * k;
    if (kk <= -grid.n_x / 2 || kk >= grid.n_x / 2) continue;
    const int ix = kk >= 0 ? kk : kk + grid.n_x;
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const double eta = grid.eta_of(iy);
      sum += std::pow(1.0 + static_cast<double>(kk) * kk + eta * eta, s) * std::norm(field.at(ix, iy));
    }
    if (k == 0) break;
  }
  return std::sqrt(lattice_measure(grid) * sum);
}

SpectralField2D potential_growth_oracle(const SolverState& initial, double t, int k0) {
  const auto& grid = initial.f.grid();
  const double mu = initial.params.mu;
  const int k = k0 - 1;
  const int l = -1;
  struct Pair {
    double xi;
    double eta_f;
    Complex coeff;
  };
  std::map<int, std::vector<Pair>> targets;
  for (int jg = -grid.n_y / 2 + 1; jg < grid.n_y / 2; ++jg) {
    const Complex gc = initial.g.mode(l, jg);
    if (gc == Complex{}) continue;
    for (int jf = -grid.n_y / 2 + 1; jf < grid.n_y / 2; ++jf) {
      const Complex fc = initial.f.mode(k0, jf);
      if (fc == Complex{}) continue;
      targets[jf + jg].push_back({grid.eta_spacing() * jg, grid.eta_spacing() * jf, fc * gc});
    }
  }
  SpectralField2D out(grid);
  using boost::math::quadrature::gauss_kronrod;
  for (const auto& [j, pairs] : targets) {
    if (grid.index_of(k, j) < 0) continue;
    const double eta = grid.eta_spacing() * j;
    const double i_t = adv_heat_integral(k, eta, 0, t);
    const auto integrand = [&](double tau, bool imag) {
      double total = 0.0;
      for (const auto& p : pairs) {
        const double kernel = (k * p.xi - eta * l) / shear_symbol(k0, p.eta_f, 0, tau);
        const double decay =
            std::exp(-mu * (i_t - adv_heat_integral(k, eta, 0, tau)) -
                     mu * adv_heat_integral(k0, p.eta_f, 0, tau) - mu * adv_heat_integral(l, p.xi, 0, tau));
        total += kernel * decay * (imag ? p.coeff.imag() : p.coeff.real());
      }
      return total;
    };
    const double re =
        gauss_kronrod<double, 61>::integrate([&](double tau) { return integrand(tau, false); }, 0.0, t, 12, 1e-12);
    const double im =
        gauss_kronrod<double, 61>::integrate([&](double tau) { return integrand(tau, true); }, 0.0, t, 12, 1e-12);
    out.set_real_mode(k, j, {re, im});
  }
  return out;
}

RunRecord run_vorticity_growth(const ExperimentConfig& cfg, double mu) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec grid = cfg.grid_for(mu);
  SolverState state = make_data_vorticity_growth(grid, cfg.delta, mu, cfg.gamma, cfg.seed);
  state.params = params_for(cfg, mu);
  const double T = cfg.horizon_factor / std::cbrt(mu);
  const auto steps = static_cast<long>(std::ceil(T / cfg.dt - 1e-9));
  const double h = T / static_cast<double>(steps);
  const SpectralField2D g_in = state.g;
  const SpectralField2D zero(grid);
  // First iterate of the proof: g1 is the heat flow of g_in and f1 is driven
  // only by (grad^perp g1 . grad) Delta_t g1.
  const auto source = [&](double tau) {
    return nonlinear_terms(zero, heat_propagate(g_in, 0.0, tau, mu), tau).f;
  };
  SpectralField2D f1(grid);
  SpectralField2D s_now = source(0.0);

  Table series{{"t", "f_l2", "f1_l2", "f_minus_f1_l2", "g_hn1", "g_h1", "g_lin_dev", "f_hn_scaled",
                "stability", "critical_energy", "average_velocity", "bx_nonzero_l2", "tail_f", "tail_g"},
               {}};
  double max_f = 0.0;
  double min_g_h1 = std::numeric_limits<double>::infinity();
  double max_lin_dev = 0.0;
  double max_stability = 0.0;
  const double eps = state.params.eps;
  const auto record = [&](const SolverState& s) {
    const auto rep = energy_report(s);
    const auto g1 = heat_propagate(g_in, 0.0, s.t, mu);
    const double lin_dev = sobolev_norm(s.g - g1, 0) / sobolev_norm(g1, 0);
    const double stability =
        sobolev_norm(s.g, s.params.N_diag) + std::pow(mu, 1.0 / 6.0) * sobolev_norm(s.f, s.params.N_diag);
    max_f = std::max(max_f, rep.f_l2);
    min_g_h1 = std::min(min_g_h1, rep.g_h1);
    max_lin_dev = std::max(max_lin_dev, lin_dev);
    max_stability = std::max(max_stability, stability / eps);
    series.add_row({s.t, rep.f_l2, sobolev_norm(f1, 0), sobolev_norm(s.f - f1, 0), rep.g_hn1, rep.g_h1,
                    lin_dev, rep.f_hn_scaled, stability, rep.critical_energy, rep.average_velocity,
                    rep.bx_nonzero_l2, spectral_tail_fraction(s.f), spectral_tail_fraction(s.g)});
  };
  record(state);
  for (long n = 1; n <= steps; ++n) {
    const double t = state.t;
    const auto s_half = source(t + 0.5 * h);
    const auto s_next = source(t + h);
    auto update = heat_propagate(s_now, t, t + h, mu);
    update += 4.0 * heat_propagate(s_half, t + 0.5 * h, t + h, mu);
    update += s_next;
    f1 = heat_propagate(f1, t, t + h, mu) + (h / 6.0) * update;
    s_now = s_next;
    state = step(state, h);
    if (n % cfg.cadence == 0 || n == steps) {
      check_resolution(state, cfg.tail_limit);
      record(state);
    }
  }

  RunRecord r;
  r.config_json = to_json(cfg);
  r.resolution = describe_grid(grid);
  const double f_T = sobolev_norm(state.f, 0);
  const double f1_T = sobolev_norm(f1, 0);
  const double diff_T = sobolev_norm(state.f - f1, 0);
  r.summary = {{"mu", mu},
               {"T", T},
               {"eps", eps},
               {"steps", static_cast<double>(steps)},
               {"dt", h},
               {"f_T_l2", f_T},
               {"f1_T_l2", f1_T},
               {"f_minus_f1_T_l2", diff_T},
               {"decomposition_ratio", f1_T > 0.0 ? diff_T / f1_T : 0.0},
               {"max_f_l2", max_f},
               {"min_g_h1", min_g_h1},
               {"g_lin_dev_max", max_lin_dev},
               {"stability_ratio_max", max_stability},
               {"n_x", static_cast<double>(grid.n_x)},
               {"n_y", static_cast<double>(grid.n_y)},
               {"l_y", grid.l_y}};
  r.tables["series"] = std::move(series);
  r.wall_seconds = elapsed_seconds(start);
  return r;
}

RunRecord run_potential_growth(const ExperimentConfig& cfg, double mu) {
  if (cfg.gamma < 0.75 || cfg.beta1 < 1.0 - cfg.gamma || cfg.gamma < cfg.beta1 + 0.5) {
    throw DomainError("run_potential_growth: needs gamma >= 3/4, beta1 >= 1 - gamma, gamma >= beta1 + 1/2");
  }
  const auto start = std::chrono::steady_clock::now();
  const GridSpec grid = cfg.grid_for(mu);
  SolverState state = make_data_potential_growth(grid, cfg.delta, mu, cfg.gamma, cfg.beta1,
                                                 cfg.seed.eta0_c, cfg.seed.k0);
  state.params = params_for(cfg, mu);
  const SolverState initial = state;
  const int k_probe = cfg.seed.k0 - 1;
  const int s_norm = state.params.N_diag + 1;
  const double T = cfg.horizon_factor / std::cbrt(mu);
  const auto steps = static_cast<long>(std::ceil(T / cfg.dt - 1e-9));
  const double h = T / static_cast<double>(steps);

  Table series{{"t", "g_probe_hn1", "oracle_probe_hn1", "g_hn1", "f_hn", "f_l2", "critical_energy"}, {}};
  double max_probe = 0.0;
  double t_peak = 0.0;
  const auto record = [&](const SolverState& s) {
    const auto rep = energy_report(s);
    const double oracle = s.t > 0.0
                              ? restricted_norm(potential_growth_oracle(initial, s.t, cfg.seed.k0), k_probe, s_norm)
                              : 0.0;
    series.add_row({s.t, restricted_norm(s.g, k_probe, s_norm), oracle, rep.g_hn1, rep.f_hn, rep.f_l2,
                    rep.critical_energy});
  };
  record(state);
  for (long n = 1; n <= steps; ++n) {
    state = step(state, h);
    const double probe = restricted_norm(state.g, k_probe, s_norm);
    if (probe > max_probe) {
      max_probe = probe;
      t_peak = state.t;
    }
    if (n % cfg.cadence == 0 || n == steps) {
      check_resolution(state, cfg.tail_limit);
      record(state);
    }
  }
  const double oracle_peak =
      restricted_norm(potential_growth_oracle(initial, t_peak, cfg.seed.k0), k_probe, s_norm);
  const double scale = 1.0 / std::cbrt(mu);
  RunRecord r;
  r.config_json = to_json(cfg);
  r.resolution = describe_grid(grid);
  r.summary = {{"mu", mu},
               {"T", T},
               {"eps", state.params.eps},
               {"steps", static_cast<double>(steps)},
               {"dt", h},
               {"eta0", cfg.seed.eta0_c * scale},
               {"max_g_probe_hn1", max_probe},
               {"t_peak", t_peak},
               {"oracle_at_peak", oracle_peak},
               {"oracle_ratio", oracle_peak > 0.0 ? max_probe / oracle_peak : 0.0},
               {"window_lo", cfg.seed.eta0_c / 10.0 * scale},
               {"window_hi", scale},
               {"peak_in_window",
                (t_peak >= cfg.seed.eta0_c / 10.0 * scale && t_peak <= scale) ? 1.0 : 0.0},
               {"n_x", static_cast<double>(grid.n_x)},
               {"n_y", static_cast<double>(grid.n_y)},
               {"l_y", grid.l_y}};
  r.tables["series"] = std::move(series);
  r.wall_seconds = elapsed_seconds(start);
  return r;
}

namespace {

// Deterministic H^2-type data with a fixed phase pattern per field.
SpectralField2D envelope_data(const GridSpec& grid, double phase) {
  SpectralField2D f(grid);
  const int kmax = std::min(8, grid.kept_k());
  const int jmax = std::min(32, grid.kept_eta_index());
  for (int k = 0; k <= kmax; ++k) {
    for (int j = -jmax; j <= jmax; ++j) {
      if (k == 0 && j <= 0) continue;
      const double eta = grid.eta_spacing() * j;
      const double amp = 1.0 / std::pow(bracket(k, eta), 4);
      f.set_real_mode(k, j, amp * Complex{std::cos(phase + 1.3 * k + 0.7 * j), std::sin(2.1 * phase + 0.4 * k - 0.9 * j)});
    }
  }
  return f;
}

}  // namespace

RunRecord run_heat2d(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const GridSpec grid = cfg.grid;
  AdaptedState data{envelope_data(grid, 0.1), envelope_data(grid, 0.7), envelope_data(grid, 1.9),
                    envelope_data(grid, 2.6)};
  const int N = 2;
  Table series{{"mu", "t", "field", "log_ratio", "violation"}, {}};
  double worst = -std::numeric_limits<double>::infinity();
  for (double mu : cfg.mu_list) {
    const double T = cfg.horizon_factor / std::cbrt(mu);
    const int samples = 20;
    for (int n = 1; n <= samples; ++n) {
      const double t = T * n / samples;
      const auto out = heat_propagate(data, 0.0, t, mu);
      const std::array<std::pair<const SpectralField2D*, const SpectralField2D*>, 4> pairs{
          {{&data.f, &out.f}, {&data.g, &out.g}, {&data.h1, &out.h1}, {&data.h2, &out.h2}}};
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const double before = sobolev_norm(project(*pairs[i].first, XPart::Nonzero), N);
        const double after = sobolev_norm(project(*pairs[i].second, XPart::Nonzero), N);
        const double log_ratio = std::log(after / before);
        const double violation = log_ratio + mu * t * t * t / 12.0;
        worst = std::max(worst, violation);
        series.add_row({mu, t, static_cast<double>(i), log_ratio, violation});
      }
    }
  }
  RunRecord r;
  r.config_json = to_json(cfg);
  r.resolution = describe_grid(grid);
  r.summary = {{"max_envelope_violation", worst}};
  r.tables["envelope"] = std::move(series);
  r.wall_seconds = elapsed_seconds(start);
  return r;
}

RunRecord run_linear3d(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto& sw = cfg.linear3d;
  Table modes{{"mu", "alpha", "k", "eta", "l", "div_drift", "al_increase", "vy_slope", "vy_inviscid_slope"},
              {}};
  double worst_div = 0.0;
  double worst_al = -std::numeric_limits<double>::infinity();
  double worst_slope = -std::numeric_limits<double>::infinity();
  double worst_inviscid = -std::numeric_limits<double>::infinity();
  for (double mu : cfg.mu_list) {
    for (double alpha : sw.alpha_values) {
      for (int k : sw.k_values) {
        for (int l : sw.l_values) {
          for (double eta : sw.eta_values) {
            if (k == 0 && l == 0 && eta == 0.0) continue;
            ModeState3D s;
            s.k = k;
            s.eta = eta;
            s.l = l;
            s.v = {Complex{1.0, 0.2}, Complex{0.5, -0.4}, Complex{-0.3, 0.1}};
            s.b = {Complex{0.2, 0.6}, Complex{-0.7, 0.1}, Complex{0.4, 0.3}};
            s.project_solenoidal();
            const double t_end = sw.horizon_factor / std::cbrt(mu);
            const auto traj = linear3d_integrate(s, t_end, t_end / sw.samples, alpha, mu);
            double div = 0.0;
            double al = -std::numeric_limits<double>::infinity();
            double prev = l != 0 ? al_energy(traj.front(), alpha, mu) : 0.0;
            for (const auto& x : traj) {
              const auto q = x.symbol_vector();
              const double qn = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
              const double vn = std::sqrt(std::norm(x.v[0]) + std::norm(x.v[1]) + std::norm(x.v[2]));
              if (vn > 1e-250) div = std::max(div, std::abs(x.divergence_v()) / (vn * qn));
              if (l != 0) {
                const double e = al_energy(x, alpha, mu);
                if (prev > 1e-250) al = std::max(al, (e - prev) / prev);
                prev = e;
              }
            }
            const double t_min = std::max(1.0, k != 0 ? 2.0 * std::abs(eta / k) : 1.0);
            double slope = std::nan("");
            double inviscid = std::nan("");
            if (k != 0 && l != 0 && t_min < t_end / 2.0) {
              slope = damping_diagnostics(traj, mu, t_min, t_end, false).vy_slope;
              inviscid = damping_diagnostics(traj, mu, t_min, t_end, true).vy_slope;
              worst_slope = std::max(worst_slope, slope);
              worst_inviscid = std::max(worst_inviscid, inviscid);
            }
            worst_div = std::max(worst_div, div);
            worst_al = std::max(worst_al, al);
            modes.add_row({mu, alpha, static_cast<double>(k), eta, static_cast<double>(l), div, al, slope,
                           inviscid});
          }
        }
      }
    }
  }
  RunRecord r;
  r.config_json = to_json(cfg);
  r.resolution = "per-mode";
  r.summary = {{"max_div_drift", worst_div},
               {"max_al_increase", worst_al},
               {"max_vy_slope", worst_slope},
               {"max_vy_inviscid_slope", worst_inviscid}};
  r.tables["modes"] = std::move(modes);
  r.wall_seconds = elapsed_seconds(start);
  return r;
}

RunRecord run_echo_map(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const auto& e = cfg.echo;
  Table gains{{"mu", "eta", "f_gain_exact", "g_gain_exact", "f_gain_wide", "g_gain_wide"}, {}};
  std::vector<double> fe, ge, fw, gw;
  for (double mu : cfg.mu_list) {
    const double eta = e.eta_factor / std::cbrt(mu);
    const auto a = echo_gain(eta, mu, e.gain_eps, 2, EchoWindow::Exact);
    const auto b = echo_gain(eta, mu, e.gain_eps, 2, EchoWindow::Wide);
    gains.add_row({mu, eta, a.f_gain, a.g_gain, b.f_gain, b.g_gain});
    fe.push_back(a.f_gain);
    ge.push_back(a.g_gain);
    fw.push_back(b.f_gain);
    gw.push_back(b.g_gain);
  }
  RunRecord r;
  r.config_json = to_json(cfg);
  r.resolution = "ode";
  const auto add_fit = [&](const std::string& name, const std::vector<double>& y, double expected) {
    const auto fit = power_law_fit(cfg.mu_list, y);
    r.fits.push_back({name, fit.exponent, fit.exponent_ci, expected, fit.n, fit.degenerate});
  };
  if (cfg.mu_list.size() >= 2) {
    add_fit("f_gain_exact", fe, -1.0);
    add_fit("g_gain_exact", ge, -5.0 / 3.0);
    add_fit("f_gain_wide", fw, -1.0);
    add_fit("g_gain_wide", gw, -5.0 / 3.0);
  }
  const auto map = threshold_map(e.eps_grid, cfg.mu_list, e.k_max, e.eta_factor);
  Table cells{{"eps", "mu", "label", "g_gain", "f_gain"}, {}};
  for (const auto& c : map.cells) cells.add_row({c.eps, c.mu, c.suppressed ? 1.0 : 0.0, c.g_gain, c.f_gain});
  Table boundary{{"mu", "eps_star"}, {}};
  for (std::size_t i = 0; i < map.mu.size(); ++i) boundary.add_row({map.mu[i], map.boundary_eps[i]});
  if (cfg.mu_list.size() >= 2) {
    r.fits.push_back({"boundary_eps_star", map.boundary_slope, map.boundary_slope_ci, 5.0 / 6.0,
                      map.mu.size(), false});
  }
  r.tables["gains"] = std::move(gains);
  r.tables["threshold"] = std::move(cells);
  r.tables["boundary"] = std::move(boundary);
  r.wall_seconds = elapsed_seconds(start);
  return r;
}

RunRecord mu_scan(const ExperimentConfig& cfg, const fs::path& dir) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  if (cfg.scan_kind != ExperimentKind::VorticityGrowth && cfg.scan_kind != ExperimentKind::PotentialGrowth) {
    throw DomainError("mu_scan: scan_kind must be vorticity-growth or potential-growth");
  }
  const auto& mus = cfg.mu_list;
  if (mus.size() < 4 || std::log10(mus.front() / mus.back()) < 1.5 - 1e-9) {
    throw DomainError("mu_scan: needs at least 4 values of mu spanning 1.5 decades");
  }
  std::vector<RunRecord> runs(mus.size());
  std::vector<std::exception_ptr> errors(mus.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < mus.size(); i = next++) {
      try {
        runs[i] = cfg.scan_kind == ExperimentKind::VorticityGrowth ? run_vorticity_growth(cfg, mus[i])
                                                                   : run_potential_growth(cfg, mus[i]);
        if (!dir.empty()) write_record(runs[i], dir / ("mu_" + std::to_string(i)));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::min<int>(cfg.workers, static_cast<int>(mus.size())));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunRecord r;
  r.config_json = to_json(cfg);
  r.resolution = runs.front().resolution;
  std::vector<std::pair<std::string, double>> tracked;
  if (cfg.scan_kind == ExperimentKind::VorticityGrowth) {
    tracked = {{"f_T_l2", 2.0 * cfg.gamma - 1.0}, {"f1_T_l2", 2.0 * cfg.gamma - 1.0}};
  } else {
    tracked = {{"max_g_probe_hn1", 2.0 * cfg.gamma - 2.0 / 3.0 - cfg.beta1},
               {"oracle_at_peak", 2.0 * cfg.gamma - 2.0 / 3.0 - cfg.beta1}};
  }
  std::vector<std::string> cols{"mu"};
  for (const auto& [name, expected] : tracked) cols.push_back(name);
  Table scan{cols, {}};
  for (const auto& run : runs) {
    std::vector<double> row{run.summary.at("mu")};
    for (const auto& [name, expected] : tracked) row.push_back(run.summary.at(name));
    scan.add_row(row);
  }
  for (const auto& [name, expected] : tracked) {
    const auto fit = power_law_fit(scan.column("mu"), scan.column(name));
    r.fits.push_back({name, fit.exponent, fit.exponent_ci, expected, fit.n, fit.degenerate});
  }
  r.tables["scan"] = std::move(scan);
  r.wall_seconds = elapsed_seconds(start);
  if (!dir.empty()) write_record(r, dir);
  return r;
}

}  // namespace shearlab
