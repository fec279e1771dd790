#pragma once

// Run persistence: CSV tables, content-hashed manifests and checkpoints.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "shearlab/solver.hpp"

namespace shearlab {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

// Shortest round-trip decimal form, so equal doubles give equal bytes.
std::string format_double(double value);

void write_csv(const Table& table, const std::filesystem::path& path);
Table read_csv(const std::filesystem::path& path);

std::string sha256_hex(std::span<const unsigned char> bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes text to path via a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

// manifest.json listing every regular file under dir (except the manifest)
// with its size and SHA-256. Written last and atomically.
void write_manifest(const std::filesystem::path& dir, const std::string& extra_json = "{}");

// Versioned JSON checkpoint of grid, coefficients, time and parameters.
inline constexpr int kCheckpointVersion = 1;
void save_checkpoint(const SolverState& state, const std::filesystem::path& path);
SolverState load_checkpoint(const std::filesystem::path& path);

}  // namespace shearlab
