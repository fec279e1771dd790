#include "shearlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fft.hpp"

namespace shearlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    throw GridMismatch(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace

void GridSpec::validate() const {
  std::ostringstream msg;
  if (!is_power_of_two(n_x) || n_x < 8) msg << "n_x must be a power of two >= 8; ";
  if (!is_power_of_two(n_y) || n_y < 16) msg << "n_y must be a power of two >= 16; ";
  if (!(l_y > 0.0) || !std::isfinite(l_y)) msg << "l_y must be positive; ";
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    msg << "dealias_fraction must lie in (0, 1]; ";
  }
  if (!msg.str().empty()) throw DomainError("GridSpec: " + msg.str());
}

int GridSpec::kept_k() const {
  return static_cast<int>(std::floor(dealias_fraction * n_x / 2.0 + 1e-12));
}

int GridSpec::kept_eta_index() const {
  return static_cast<int>(std::floor(dealias_fraction * n_y / 2.0 + 1e-12));
}

bool GridSpec::is_kept(int ix, int iy) const {
  const int k = k_of(ix);
  const int j = eta_index_of(iy);
  // The Nyquist row/column has no Hermitian partner and is always dropped.
  if (ix == n_x / 2 || iy == n_y / 2) return false;
  return std::abs(k) <= kept_k() && std::abs(j) <= kept_eta_index();
}

long GridSpec::index_of(int k, int eta_index) const {
  if (k <= -n_x / 2 || k >= n_x / 2) return -1;
  if (eta_index <= -n_y / 2 || eta_index >= n_y / 2) return -1;
  const int ix = k >= 0 ? k : k + n_x;
  const int iy = eta_index >= 0 ? eta_index : eta_index + n_y;
  return static_cast<long>(ix) * n_y + iy;
}

double shear_symbol(const ShearedFrequency& freq) {
  return shear_symbol(freq.k, freq.eta, freq.l, freq.t);
}

SpectralField2D::SpectralField2D(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  coeffs_.assign(grid_.size(), Complex{0.0, 0.0});
}

Complex& SpectralField2D::mode(int k, int eta_index) {
  const long idx = grid_.index_of(k, eta_index);
  if (idx < 0) throw DomainError("SpectralField2D::mode: wavenumber outside band");
  return coeffs_[static_cast<std::size_t>(idx)];
}

Complex SpectralField2D::mode(int k, int eta_index) const {
  const long idx = grid_.index_of(k, eta_index);
  if (idx < 0) throw DomainError("SpectralField2D::mode: wavenumber outside band");
  return coeffs_[static_cast<std::size_t>(idx)];
}

void SpectralField2D::set_real_mode(int k, int eta_index, Complex value) {
  if (k == 0 && eta_index == 0) {
    mode(0, 0) = Complex{value.real(), 0.0};
    return;
  }
  mode(k, eta_index) = value;
  mode(-k, -eta_index) = std::conj(value);
}

bool SpectralField2D::is_hermitian(double tol) const {
  const double scale = std::max(1.0, max_abs());
  for (int ix = 0; ix < grid_.n_x; ++ix) {
    const int jx = (grid_.n_x - ix) % grid_.n_x;
    for (int iy = 0; iy < grid_.n_y; ++iy) {
      const int jy = (grid_.n_y - iy) % grid_.n_y;
      if (std::abs(at(ix, iy) - std::conj(at(jx, jy))) > tol * scale) return false;
    }
  }
  return true;
}

double SpectralField2D::max_abs() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SpectralField2D& SpectralField2D::operator+=(const SpectralField2D& other) {
  require_same_grid(grid_, other.grid_, "operator+=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField2D& SpectralField2D::operator-=(const SpectralField2D& other) {
  require_same_grid(grid_, other.grid_, "operator-=");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField2D& SpectralField2D::operator*=(double s) {
  for (auto& c : coeffs_) c *= s;
  return *this;
}

SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b) { return a += b; }
SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b) { return a -= b; }
SpectralField2D operator*(double s, SpectralField2D a) { return a *= s; }

std::vector<double> to_physical(const SpectralField2D& field) {
  const auto& grid = field.grid();
  auto fft = detail::Fft2D::get(grid.n_x, grid.n_y);
  std::vector<Complex> out(grid.size());
  fft->backward(field.coeffs().data(), out.data());
  std::vector<double> values(grid.size());
  std::transform(out.begin(), out.end(), values.begin(), [](const Complex& c) { return c.real(); });
  return values;
}

SpectralField2D from_physical(const GridSpec& grid, const std::vector<double>& values) {
  SpectralField2D field(grid);
  if (values.size() != grid.size()) {
    throw GridMismatch("from_physical: sample count does not match grid");
  }
  auto fft = detail::Fft2D::get(grid.n_x, grid.n_y);
  std::vector<Complex> in(values.begin(), values.end());
  fft->forward(in.data(), field.coeffs().data());
  const double norm = 1.0 / static_cast<double>(grid.size());
  for (auto& c : field.coeffs()) c *= norm;
  // Nyquist modes carry no Hermitian partner.
  for (int iy = 0; iy < grid.n_y; ++iy) field.at(grid.n_x / 2, iy) = 0.0;
  for (int ix = 0; ix < grid.n_x; ++ix) field.at(ix, grid.n_y / 2) = 0.0;
  return field;
}

SpectralField2D apply_symbol(const SpectralField2D& field, const Symbol& symbol, double t) {
  const auto& grid = field.grid();
  SpectralField2D out(grid);
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const Complex c = field.at(ix, iy);
      if (c == Complex{0.0, 0.0}) continue;
      const double eta = grid.eta_of(iy);
      const Complex s = symbol(k, eta, t);
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
        std::ostringstream msg;
        msg << "apply_symbol: symbol singular at (k=" << k << ", eta=" << eta
            << ") where the field is nonzero";
        throw SingularSymbol(msg.str());
      }
      out.at(ix, iy) = s * c;
    }
  }
  return out;
}

namespace symbols {

Symbol identity() {
  return [](int, double, double) { return Complex{1.0, 0.0}; };
}

Symbol dx() {
  return [](int k, double, double) { return Complex{0.0, static_cast<double>(k)}; };
}

Symbol dy() {
  return [](int, double eta, double) { return Complex{0.0, eta}; };
}

Symbol dy_t() {
  return [](int k, double eta, double t) { return Complex{0.0, eta - k * t}; };
}

Symbol neg_laplacian_t() {
  return [](int k, double eta, double t) { return Complex{shear_symbol(k, eta, 0, t), 0.0}; };
}

Symbol inv_neg_laplacian_t() { return inv_neg_laplacian_t_pow(1); }

Symbol inv_neg_laplacian_t_pow(int p) {
  return [p](int k, double eta, double t) {
    const double s = shear_symbol(k, eta, 0, t);
    if (s == 0.0) return Complex{std::numeric_limits<double>::infinity(), 0.0};
    return Complex{std::pow(s, -p), 0.0};
  };
}

}  // namespace symbols

SpectralField2D project(const SpectralField2D& field, XPart part) {
  SpectralField2D out = field;
  const auto& grid = field.grid();
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const bool zero_row = grid.k_of(ix) == 0;
    const bool keep = (part == XPart::Zero) ? zero_row : !zero_row;
    if (keep) continue;
    for (int iy = 0; iy < grid.n_y; ++iy) out.at(ix, iy) = 0.0;
  }
  return out;
}

double lattice_measure(const GridSpec& grid) { return 2.0 * kPi * grid.l_y; }

double sobolev_norm(const SpectralField2D& field, int N) {
  if (N < 0) throw DomainError("sobolev_norm: N must be non-negative");
  const auto& grid = field.grid();
  double sum = 0.0;
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const double k = grid.k_of(ix);
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const double a2 = std::norm(field.at(ix, iy));
      if (a2 == 0.0) continue;
      const double eta = grid.eta_of(iy);
      sum += std::pow(1.0 + k * k + eta * eta, N) * a2;
    }
  }
  return std::sqrt(lattice_measure(grid) * sum);
}

void dealias_in_place(SpectralField2D& field) {
  const auto& grid = field.grid();
  for (int ix = 0; ix < grid.n_x; ++ix) {
    for (int iy = 0; iy < grid.n_y; ++iy) {
      if (!grid.is_kept(ix, iy)) field.at(ix, iy) = 0.0;
    }
  }
}

SpectralField2D dealiased_product(const SpectralField2D& a, const SpectralField2D& b,
                                  ProductOptions options) {
  require_same_grid(a.grid(), b.grid(), "dealiased_product");
  const auto& grid = a.grid();
  const auto pa = to_physical(a);
  const auto pb = to_physical(b);
  std::vector<double> prod(grid.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = pa[i] * pb[i];
  auto out = from_physical(grid, prod);
  dealias_in_place(out);
  if (options.remove_mean) out.mode(0, 0) = 0.0;
  return out;
}

double spectral_tail_fraction(const SpectralField2D& field) {
  const auto& grid = field.grid();
  // Outer shell: the last sixth of the retained band in either direction.
  const int k_inner = (grid.kept_k() * 5) / 6;
  const int j_inner = (grid.kept_eta_index() * 5) / 6;
  double total = 0.0;
  double tail = 0.0;
  for (int ix = 0; ix < grid.n_x; ++ix) {
    const int k = std::abs(grid.k_of(ix));
    for (int iy = 0; iy < grid.n_y; ++iy) {
      const double a2 = std::norm(field.at(ix, iy));
      total += a2;
      if (k > k_inner || std::abs(grid.eta_index_of(iy)) > j_inner) tail += a2;
    }
  }
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

}  // namespace shearlab
