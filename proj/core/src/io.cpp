#include "shearlab/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

namespace shearlab {

namespace fs = std::filesystem;
using nlohmann::json;

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw DomainError("Table::add_row: column count mismatch");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("Table::column: no column named " + name);
  const auto c = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), res.ptr};
}

void write_csv(const Table& table, const fs::path& path) {
  std::ostringstream out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

Table read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("read_csv: cannot open " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{}) throw DomainError("read_csv: bad number '" + cell + "'");
      row.push_back(v);
    }
    t.add_row(std::move(row));
  }
  return t;
}

std::string sha256_hex(std::span<const unsigned char> bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw Error("sha256_hex: digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) {
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  }
  return hex.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("sha256_file: cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex({reinterpret_cast<const unsigned char*>(data.data()), data.size()});
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("write_file_atomic: cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write_file_atomic: write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_manifest(const fs::path& dir, const std::string& extra_json) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir);
    if (rel == "manifest.json" || rel.extension() == ".tmp") continue;
    files.push_back(rel);
  }
  std::sort(files.begin(), files.end());
  json manifest;
  manifest["files"] = json::array();
  for (const auto& rel : files) {
    manifest["files"].push_back({{"path", rel.generic_string()},
                                 {"bytes", fs::file_size(dir / rel)},
                                 {"sha256", sha256_file(dir / rel)}});
  }
  manifest["run"] = json::parse(extra_json);
  write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

namespace {

json field_to_json(const SpectralField2D& field) {
  json re = json::array();
  json im = json::array();
  for (const auto& c : field.coeffs()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"re", re}, {"im", im}};
}

SpectralField2D field_from_json(const GridSpec& grid, const json& j) {
  SpectralField2D field(grid);
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (re.size() != grid.size() || im.size() != grid.size()) {
    throw DomainError("load_checkpoint: coefficient count does not match grid");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    field.coeffs()[i] = {re[i].get<double>(), im[i].get<double>()};
  }
  return field;
}

}  // namespace

void save_checkpoint(const SolverState& state, const fs::path& path) {
  const auto& g = state.f.grid();
  const auto& p = state.params;
  json j;
  j["format"] = "shearlab-checkpoint";
  j["version"] = kCheckpointVersion;
  j["grid"] = {{"n_x", g.n_x}, {"n_y", g.n_y}, {"l_y", g.l_y}, {"dealias_fraction", g.dealias_fraction}};
  j["params"] = {{"mu", p.mu},         {"gamma", p.gamma},   {"beta1", p.beta1},
                 {"delta", p.delta},   {"eps", p.eps},       {"dt_cfl", p.dt_cfl},
                 {"N_diag", p.N_diag}};
  j["t"] = state.t;
  j["dissipation_integral"] = state.dissipation_integral;
  j["f"] = field_to_json(state.f);
  j["g"] = field_to_json(state.g);
  write_file_atomic(path, j.dump());
}

SolverState load_checkpoint(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("load_checkpoint: cannot open " + path.string());
  const json j = json::parse(in);
  if (j.value("format", "") != "shearlab-checkpoint") {
    throw DomainError("load_checkpoint: not a shearlab checkpoint");
  }
  if (j.at("version").get<int>() != kCheckpointVersion) {
    throw DomainError("load_checkpoint: unsupported checkpoint version");
  }
  GridSpec grid;
  const auto& jg = j.at("grid");
  grid.n_x = jg.at("n_x");
  grid.n_y = jg.at("n_y");
  grid.l_y = jg.at("l_y");
  grid.dealias_fraction = jg.at("dealias_fraction");
  grid.validate();
  SolverState s;
  const auto& jp = j.at("params");
  s.params.mu = jp.at("mu");
  s.params.gamma = jp.at("gamma");
  s.params.beta1 = jp.at("beta1");
  s.params.delta = jp.at("delta");
  s.params.eps = jp.at("eps");
  s.params.dt_cfl = jp.at("dt_cfl");
  s.params.N_diag = jp.at("N_diag");
  s.t = j.at("t");
  s.dissipation_integral = j.at("dissipation_integral");
  s.f = field_from_json(grid, j.at("f"));
  s.g = field_from_json(grid, j.at("g"));
  return s;
}

}  // namespace shearlab
