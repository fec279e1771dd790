#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>

#include "shearlab/experiment.hpp"
#include "shearlab/plot.hpp"

namespace shearlab::cli {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config_path;
  std::vector<double> mu;
  std::optional<std::string> output;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<double> delta;
  std::optional<double> gamma;
  std::optional<int> n_x;
  std::optional<int> n_y;
  std::optional<int> workers;
  std::optional<std::string> scan_kind;
  bool check_envelope = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config_path, "JSON config file");
  sub->add_option("--mu", o.mu, "viscosity values (replaces mu_list)");
  sub->add_option("-o,--output", o.output, "output directory for this run");
  sub->add_option("--horizon", o.horizon, "horizon factor (T = factor * mu^{-1/3})");
  sub->add_option("--dt", o.dt, "time step");
  sub->add_option("--delta", o.delta, "data size constant");
  sub->add_option("--gamma", o.gamma, "size exponent");
  sub->add_option("--nx", o.n_x, "grid points in x");
  sub->add_option("--ny", o.n_y, "grid points in y");
}

ExperimentConfig build_config(ExperimentKind kind, const Overrides& o) {
  ExperimentConfig c = default_config(kind);
  if (kind == ExperimentKind::MuScan && o.scan_kind) {
    c = default_config(parse_kind(*o.scan_kind));
    c.kind = kind;
  }
  if (!o.config_path.empty()) {
    if (!fs::exists(o.config_path)) throw DomainError("config file not found: " + o.config_path);
    c = load_config(o.config_path);
    if (c.kind != kind) {
      throw DomainError("config kind '" + to_string(c.kind) + "' does not match subcommand '" +
                        to_string(kind) + "'");
    }
  }
  if (!o.mu.empty()) c.mu_list = o.mu;
  if (o.horizon) c.horizon_factor = *o.horizon;
  if (o.dt) c.dt = *o.dt;
  if (o.delta) c.delta = *o.delta;
  if (o.gamma) c.gamma = *o.gamma;
  if (o.n_x) c.grid.n_x = *o.n_x;
  if (o.n_y) c.grid.n_y = *o.n_y;
  if (o.workers) c.workers = *o.workers;
  if (o.scan_kind) c.scan_kind = parse_kind(*o.scan_kind);
  c.check_envelope = c.check_envelope || o.check_envelope;
  c.validate();
  return c;
}

fs::path output_dir(const ExperimentConfig& c, const Overrides& o) {
  if (o.output) return *o.output;
  fs::path root = c.output_dir;
  if (const char* env = std::getenv("SHEARLAB_OUTPUT_ROOT"); env != nullptr && *env != '\0') root = env;
  return root / to_string(c.kind);
}

void print_record(const RunRecord& r, std::ostream& out) {
  out << std::setprecision(6);
  for (const auto& [key, value] : r.summary) out << "  " << key << " = " << value << "\n";
  for (const auto& f : r.fits) {
    out << "  fit " << f.quantity << ": exponent " << f.exponent << " +- " << f.ci << " (expected "
        << f.expected << ", n = " << f.n << (f.degenerate ? ", degenerate" : "") << ")\n";
  }
}

int run_kind(ExperimentKind kind, const Overrides& o, std::ostream& out) {
  const auto config = build_config(kind, o);
  const auto dir = output_dir(config, o);
  switch (kind) {
    case ExperimentKind::VorticityGrowth:
    case ExperimentKind::PotentialGrowth: {
      const bool many = config.mu_list.size() > 1;
      for (std::size_t i = 0; i < config.mu_list.size(); ++i) {
        const double mu = config.mu_list[i];
        const auto r = kind == ExperimentKind::VorticityGrowth ? run_vorticity_growth(config, mu)
                                                               : run_potential_growth(config, mu);
        const auto sub = many ? dir / ("mu_" + std::to_string(i)) : dir;
        write_record(r, sub);
        out << to_string(kind) << " mu = " << mu << " -> " << sub.string() << "\n";
        print_record(r, out);
      }
      return kExitOk;
    }
    case ExperimentKind::Heat2d: {
      const auto r = run_heat2d(config);
      write_record(r, dir);
      const double v = r.summary.at("max_envelope_violation");
      out << "heat2d -> " << dir.string() << "\n";
      out << "max envelope violation (log scale, must be <= 0): " << std::setprecision(6) << v << "\n";
      if (config.check_envelope && v > 0.0) {
        out << "envelope check failed\n";
        return kExitNumerical;
      }
      return kExitOk;
    }
    case ExperimentKind::Linear3d: {
      const auto r = run_linear3d(config);
      write_record(r, dir);
      out << "linear3d -> " << dir.string() << "\n";
      print_record(r, out);
      return kExitOk;
    }
    case ExperimentKind::EchoMap: {
      const auto r = run_echo_map(config);
      write_record(r, dir);
      out << "echo-map -> " << dir.string() << "\n";
      print_record(r, out);
      return kExitOk;
    }
    case ExperimentKind::MuScan: {
      const auto r = mu_scan(config, dir);
      out << "mu-scan (" << to_string(config.scan_kind) << ") -> " << dir.string() << "\n";
      print_record(r, out);
      return kExitOk;
    }
  }
  return kExitUsage;
}

int render_reports(const fs::path& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw DomainError("report: not a directory: " + dir.string());
  int written = 0;
  std::vector<fs::path> csvs;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") csvs.push_back(entry.path());
  }
  std::sort(csvs.begin(), csvs.end());
  for (const auto& path : csvs) {
    const auto stem = path.stem().string();
    const auto table = read_csv(path);
    const auto target = path.parent_path() / "plots" / (stem + ".svg");
    std::string svg;
    if (stem == "series") {
      std::vector<PlotSeries> series;
      const auto t = table.column("t");
      for (const auto& col : table.columns) {
        if (col != "t") series.push_back({col, t, table.column(col)});
      }
      svg = line_plot_svg(series, {"norms vs time", "t", "norm", false, true});
    } else if (stem == "scan" || stem == "gains" || stem == "boundary") {
      std::vector<PlotSeries> series;
      const auto mu = table.column("mu");
      for (const auto& col : table.columns) {
        if (col != "mu" && col != "eta") series.push_back({col, mu, table.column(col)});
      }
      svg = line_plot_svg(series, {stem + " vs mu", "mu", stem, true, true});
    } else if (stem == "threshold") {
      svg = threshold_map_svg(table);
    } else {
      continue;
    }
    write_svg(svg, target);
    out << "wrote " << target.string() << "\n";
    ++written;
  }
  out << written << " plot(s)\n";
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"shearlab: shear-flow MHD experiments"};
  app.require_subcommand(1);
  Overrides o;
  std::map<CLI::App*, ExperimentKind> kinds;
  const std::vector<std::pair<std::string, ExperimentKind>> subs{
      {"linear3d", ExperimentKind::Linear3d},
      {"heat2d", ExperimentKind::Heat2d},
      {"vorticity-growth", ExperimentKind::VorticityGrowth},
      {"potential-growth", ExperimentKind::PotentialGrowth},
      {"echo-map", ExperimentKind::EchoMap},
      {"mu-scan", ExperimentKind::MuScan}};
  for (const auto& [name, kind] : subs) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    add_common(sub, o);
    kinds[sub] = kind;
    if (kind == ExperimentKind::Heat2d) {
      sub->add_flag("--check-envelope", o.check_envelope, "exit 3 if the envelope is violated");
    }
    if (kind == ExperimentKind::MuScan) {
      sub->add_option("--workers", o.workers, "concurrent runs");
      sub->add_option("--scan-kind", o.scan_kind, "vorticity-growth or potential-growth");
    }
  }
  std::string report_dir;
  auto* report = app.add_subcommand("report", "render CSV records under a run directory to SVG");
  report->add_option("dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (report->parsed()) return render_reports(report_dir, out);
    for (const auto& [sub, kind] : kinds) {
      if (sub->parsed()) return run_kind(kind, o, out);
    }
  } catch (const CflViolation& e) {
    err << "numerical abort: " << e.what() << " (suggested dt " << e.suggested_dt() << ")\n";
    return kExitNumerical;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace shearlab::cli
