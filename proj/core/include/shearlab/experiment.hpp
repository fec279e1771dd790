#pragma once

// Declarative experiments: configuration, data recipes, runners and the
// run record that gets persisted.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "shearlab/io.hpp"
#include "shearlab/solver.hpp"

namespace shearlab {

enum class ExperimentKind { Linear3d, Heat2d, VorticityGrowth, PotentialGrowth, EchoMap, MuScan };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

struct SeedData {
  // Vorticity-growth data: g on k = 1, |eta - high_center| <= high_halfwidth
  // and k = 2, |eta| <= low_halfwidth (plus Hermitian partners).
  double high_center = 10.0;
  double high_halfwidth = 2.0;
  double low_halfwidth = 1.0;
  // Potential-growth data: f on k = k0, |eta - eta0| <= 1 with
  // eta0 = eta0_c mu^{-1/3}; g on k = +-1, |eta| <= 1.
  int k0 = 10;
  double eta0_c = 0.5;
};

struct Linear3dSweep {
  std::vector<int> k_values{1, 2, 3};
  std::vector<int> l_values{1, 2};
  std::vector<double> eta_values{-3.0, 0.0, 3.0};
  std::vector<double> alpha_values{0.5, 2.0};
  double horizon_factor = 5.0;  // t_end = horizon_factor mu^{-1/3}
  int samples = 2000;
};

struct EchoSettings {
  std::vector<double> eps_grid{1e-5, 1e-4, 1e-3, 1e-2};
  int k_max = 8;
  double eta_factor = 1.0;
  double gain_eps = 1e-3;  // eps used for the gain-exponent fits
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::VorticityGrowth;
  // Per-mu job kind for mu-scan.
  ExperimentKind scan_kind = ExperimentKind::VorticityGrowth;
  SolverParams solver;
  GridSpec grid;
  std::vector<double> mu_list{1e-3};
  double gamma = 5.0 / 6.0;
  double beta1 = 1.0 / 6.0;
  double delta = 0.05;
  double horizon_factor = 0.1;
  double dt = 0.01;
  // Scale n_y with mu^{-1/3} relative to ny_reference_mu (power of two).
  bool scale_ny = false;
  double ny_reference_mu = 1e-3;
  SeedData seed;
  Linear3dSweep linear3d;
  EchoSettings echo;
  std::string output_dir = "runs";
  int cadence = 10;
  int workers = 1;
  double tail_limit = 1e-6;
  bool check_envelope = false;

  // mu_list strictly decreasing and in (0, 1]; horizon_factor in (0, 1]
  // for the growth experiments; positive dt and cadence.
  void validate() const;
  // Grid actually used for a given mu (applies scale_ny).
  [[nodiscard]] GridSpec grid_for(double mu) const;
};

// Defaults per kind: grid, horizon and step size used when a config file
// leaves them out.
ExperimentConfig default_config(ExperimentKind kind);

// Starts from default_config(kind) and applies the keys present in the text.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& config);

struct FitResult {
  std::string quantity;
  double exponent = 0.0;
  double ci = 0.0;
  double expected = 0.0;
  std::size_t n = 0;
  bool degenerate = false;
};

struct RunRecord {
  std::string config_json;
  std::map<std::string, Table> tables;
  std::map<std::string, double> summary;
  std::vector<FitResult> fits;
  std::string resolution;
  double wall_seconds = 0.0;
};

// CSV per table, summary.json and fits.csv, then the manifest (last).
void write_record(const RunRecord& record, const std::filesystem::path& dir);

SolverState make_data_vorticity_growth(const GridSpec& grid, double delta, double mu, double gamma,
                                       const SeedData& seed = {});

SolverState make_data_potential_growth(const GridSpec& grid, double delta, double mu, double gamma,
                                       double beta1, double eta0_c = 0.5, int k0 = 10);

// |g restricted to |k| = k|_{H^s}.
double restricted_norm(const SpectralField2D& field, int k, int s);

// Proof-level first iterate for the potential-growth data at |k| = k0 - 1:
// the Duhamel double integral of the heat-flowed data, with the tau-integral
// done by adaptive Gauss-Kronrod quadrature on each eta of the lattice.
SpectralField2D potential_growth_oracle(const SolverState& initial, double t, int k0);

RunRecord run_vorticity_growth(const ExperimentConfig& config, double mu);
RunRecord run_potential_growth(const ExperimentConfig& config, double mu);
RunRecord run_heat2d(const ExperimentConfig& config);
RunRecord run_linear3d(const ExperimentConfig& config);
RunRecord run_echo_map(const ExperimentConfig& config);

// Runs scan_kind for every mu (concurrently up to config.workers), writes
// each run under dir/mu_<i> when dir is non-empty, and fits power laws of
// the tracked quantities against mu.
RunRecord mu_scan(const ExperimentConfig& config, const std::filesystem::path& dir = {});

}  // namespace shearlab
