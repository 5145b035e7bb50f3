#pragma once

#include <Eigen/Dense>

#include "dbar/grid.hpp"
#include "dbar/types.hpp"

namespace dbar {

// The two components of the d-bar system carry slightly different Fourier
// truncations so that multiplication by e^{-i phi} (resp. e^{+i phi}) maps one
// range exactly onto the other:
//
//   kPsi1: n = -nphi/2 .. nphi/2-1   (psi1 / Phi1 / a-coefficients)
//   kPsi2: n = -nphi/2+1 .. nphi/2   (psi2 / Phi2 / b-coefficients)
//
// Storage always uses standard FFT bin order (bin b holds mode n with
// n == b mod nphi); the ranges only decide how the shared Nyquist bin
// b = nphi/2 is interpreted (-nphi/2 for kPsi1, +nphi/2 for kPsi2).
enum class FourierRange { kPsi1, kPsi2 };

int mode_of_bin(FourierRange range, int nphi, int bin);
int bin_of_mode(FourierRange range, int nphi, int mode);

// Samples on the grid, radial-major: values(j, i) = f(r_j, phi_i).
struct PhysicalField {
  Grid grid;
  Eigen::MatrixXcd values;  // (nr+1) x nphi
};

// Chebyshev(row m) x Fourier(column = FFT bin) coefficients:
//   f(r, phi) ~= sum_b sum_m coeffs(m, b) T_m(2r - 1) e^{i n(b) phi}
struct SpectralField {
  Grid grid;
  FourierRange range = FourierRange::kPsi1;
  Eigen::MatrixXcd coeffs;  // (nr+1) x nphi
};

PhysicalField make_physical(const Grid& grid);
SpectralField make_spectral(const Grid& grid, FourierRange range);

// Forward = FFT in phi (1/nphi scaling) followed by a Chebyshev analysis in
// the radial direction (DCT-I with half-weighted endpoints). Inverse is the
// exact round-trip partner. Free-function forms keep a per-thread plan cache
// keyed on the grid shape, so repeated calls are cheap and thread-safe.
SpectralField forward_transform(const PhysicalField& f, FourierRange range);
PhysicalField inverse_transform(const SpectralField& f);

// Rim trace: g_b = sum_m coeffs(m, b), the Fourier coefficients of f(1, phi)
// in bin order (T_m(1) = 1 for every m).
Eigen::VectorXcd rim_coeffs(const SpectralField& f);

// Spectral-resolution indicators: magnitude of the highest Chebyshev row
// (resp. the Nyquist Fourier column) relative to the largest coefficient.
// Both return 0 for an identically zero field.
double trailing_chebyshev_ratio(const SpectralField& f);
double trailing_fourier_ratio(const SpectralField& f);

// Physical rim values f(1, phi_i) from the bin-order rim coefficients.
Eigen::VectorXcd rim_values(const SpectralField& f);

// Plan-owning transform for one grid shape. Instances are not thread-safe;
// create one per thread (the free functions above do exactly that).
class DiskTransform {
 public:
  explicit DiskTransform(const Grid& grid);
  ~DiskTransform();

  DiskTransform(const DiskTransform&) = delete;
  DiskTransform& operator=(const DiskTransform&) = delete;

  const Grid& grid() const { return grid_; }

  SpectralField forward(const PhysicalField& f, FourierRange range);
  PhysicalField inverse(const SpectralField& f);

  // Inverse DFT of a single bin-order Fourier coefficient vector (length
  // nphi) to angular samples; used for rim traces.
  Eigen::VectorXcd synthesize_ring(const Eigen::VectorXcd& bins);
  // Forward DFT (with 1/nphi) of angular samples to bin-order coefficients.
  Eigen::VectorXcd analyze_ring(const Eigen::VectorXcd& values);

 private:
  struct Plans;
  Grid grid_;
  Plans* plans_;
};

// Access to the per-thread transform cache used by the free functions.
DiskTransform& thread_transform(const Grid& grid);

}  // namespace dbar
