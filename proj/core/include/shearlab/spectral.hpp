#pragma once

// Fourier representation of scalar fields on the sheared torus T x T_{l_y}
// (a periodic stand-in for T x R), together with the moving-frame symbol
// algebra used by every other module.
//
// Convention: f(x, y) = sum_{k, eta} c(k, eta) exp(i (k x + eta y)), with
// x in [0, 2 pi), y in [0, l_y), k integer and eta on the lattice
// (2 pi / l_y) Z. Coefficients are stored row-major in FFT order, index
// ix * n_y + iy; the Nyquist rows are kept at zero.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "shearlab/error.hpp"

namespace shearlab {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Japanese bracket <x> = (1 + |x|^2)^{1/2}, and its multi-argument form.
inline double bracket(double a) { return std::sqrt(1.0 + a * a); }
inline double bracket(double a, double b) { return std::sqrt(1.0 + a * a + b * b); }
inline double bracket(double a, double b, double c) {
  return std::sqrt(1.0 + a * a + b * b + c * c);
}

struct GridSpec {
  int n_x = 128;
  int n_y = 1024;
  double l_y = 2.0 * kPi;
  double dealias_fraction = 2.0 / 3.0;

  // Throws DomainError when the invariants (powers of two, n_x >= 8,
  // n_y >= 16, l_y > 0, dealias_fraction in (0, 1]) fail.
  void validate() const;

  [[nodiscard]] double eta_spacing() const { return 2.0 * kPi / l_y; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(n_x) * static_cast<std::size_t>(n_y);
  }
  [[nodiscard]] int k_of(int ix) const { return ix < n_x / 2 ? ix : ix - n_x; }
  [[nodiscard]] int eta_index_of(int iy) const { return iy < n_y / 2 ? iy : iy - n_y; }
  [[nodiscard]] double eta_of(int iy) const { return eta_spacing() * eta_index_of(iy); }
  // Largest |eta| retained by the 2/3-rule truncation.
  [[nodiscard]] int kept_k() const;
  [[nodiscard]] int kept_eta_index() const;
  [[nodiscard]] bool is_kept(int ix, int iy) const;

  // Storage index of integer wavenumber k and eta-lattice index j; -1 when
  // the pair is outside the representable band.
  [[nodiscard]] long index_of(int k, int eta_index) const;

  bool operator==(const GridSpec&) const = default;
};

// A point (k, eta, l, t) of the moving frame.
struct ShearedFrequency {
  int k = 0;
  double eta = 0.0;
  int l = 0;
  double t = 0.0;
};

// |nabla_t|^2 = k^2 + (eta - k t)^2 + l^2, the symbol of -Delta_t.
double shear_symbol(const ShearedFrequency& freq);

inline double shear_symbol(int k, double eta, int l, double t) {
  const double ky = eta - k * t;
  return static_cast<double>(k) * k + ky * ky + static_cast<double>(l) * l;
}

class SpectralField2D {
 public:
  SpectralField2D() = default;
  explicit SpectralField2D(const GridSpec& grid);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::vector<Complex>& coeffs() { return coeffs_; }
  [[nodiscard]] const std::vector<Complex>& coeffs() const { return coeffs_; }

  Complex& at(int ix, int iy) { return coeffs_[static_cast<std::size_t>(ix) * grid_.n_y + iy]; }
  [[nodiscard]] const Complex& at(int ix, int iy) const {
    return coeffs_[static_cast<std::size_t>(ix) * grid_.n_y + iy];
  }

  // Access by wavenumber; throws DomainError outside the band.
  Complex& mode(int k, int eta_index);
  [[nodiscard]] Complex mode(int k, int eta_index) const;

  // Sets coefficient (k, j) and its Hermitian partner (-k, -j).
  void set_real_mode(int k, int eta_index, Complex value);

  [[nodiscard]] bool is_hermitian(double tol = 1e-12) const;
  // Max |c| over all modes.
  [[nodiscard]] double max_abs() const;

  SpectralField2D& operator+=(const SpectralField2D& other);
  SpectralField2D& operator-=(const SpectralField2D& other);
  SpectralField2D& operator*=(double s);

 private:
  GridSpec grid_{};
  std::vector<Complex> coeffs_;
};

SpectralField2D operator+(SpectralField2D a, const SpectralField2D& b);
SpectralField2D operator-(SpectralField2D a, const SpectralField2D& b);
SpectralField2D operator*(double s, SpectralField2D a);

// Real samples f(x_i, y_j) stored row-major (i * n_y + j).
std::vector<double> to_physical(const SpectralField2D& field);
SpectralField2D from_physical(const GridSpec& grid, const std::vector<double>& values);

using Symbol = std::function<Complex(int k, double eta, double t)>;

// Pointwise multiplication in Fourier space. Throws SingularSymbol if the
// symbol is not finite at a lattice point carrying a nonzero coefficient.
SpectralField2D apply_symbol(const SpectralField2D& field, const Symbol& symbol, double t);

// Common moving-frame symbols.
namespace symbols {
Symbol identity();
Symbol dx();                        // i k
Symbol dy();                        // i eta
Symbol dy_t();                      // i (eta - k t)
Symbol neg_laplacian_t();           // |nabla_t|^2
Symbol inv_neg_laplacian_t();       // |nabla_t|^{-2}, infinite at (0, 0)
Symbol inv_neg_laplacian_t_pow(int p);  // |nabla_t|^{-2p}
}  // namespace symbols

enum class XPart { Zero, Nonzero };

// k = 0 part (x-average) or k != 0 part.
SpectralField2D project(const SpectralField2D& field, XPart part);

// Lattice measure 2 pi l_y turning coefficient sums into L^2 integrals over
// one period cell.
double lattice_measure(const GridSpec& grid);

// ( measure * sum <k, eta>^{2N} |c|^2 )^{1/2}.
double sobolev_norm(const SpectralField2D& field, int N);

struct ProductOptions {
  bool remove_mean = false;
};

// Pseudo-spectral product with 2/3-rule truncation. Throws GridMismatch.
SpectralField2D dealiased_product(const SpectralField2D& a, const SpectralField2D& b,
                                  ProductOptions options = {});

// Zeroes every mode outside the retained band.
void dealias_in_place(SpectralField2D& field);

// Fraction of the L^2 mass sitting in the outer (truncated) shell of the
// retained band; used as a resolution monitor.
double spectral_tail_fraction(const SpectralField2D& field);

}  // namespace shearlab
