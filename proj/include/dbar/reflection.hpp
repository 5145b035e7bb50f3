#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dbar/cgo.hpp"
#include "dbar/picard.hpp"
#include "dbar/potential.hpp"

namespace dbar {

// Stationary-phase approximation of the reflection coefficient of the unit
// characteristic potential for real k > 0:
//   r_asym(k) = cos(2k - 3 pi / 4) / sqrt(pi k^3).
double r_asym(double k);

enum class SweepMethod { kFundamental, kPicard };

struct SweepSample {
  Complex k;
  Complex reflection{0.0, 0.0};
  SweepMethod method = SweepMethod::kPicard;
  int nr = 0;
  int nphi = 0;
  int steps = 0;       // iteration count; 0 for the fundamental method
  bool ok = false;
  std::string error;   // structured "kind: message" when not ok
  bool has_asym = false;
  double asym = 0.0;   // r_asym(k), recorded for real positive k on request
};

struct ReflectionSweep {
  std::vector<SweepSample> samples;  // strictly increasing |k|
};

struct SweepOptions {
  SweepMethod method = SweepMethod::kPicard;
  bool with_asym = false;
  int workers = 1;
  int nr = 0;    // 0 = default 32 (fundamental) or per-k policy (picard)
  int nphi = 0;  // 0 = default 64 (fundamental) or per-k policy (picard)
  double tol = 1e-10;
  int max_steps = 100;
};

// Per-|k| resolution policy for the iterative solver: the angular count
// grows linearly with |k| so the modulated potential stays resolved, the
// radial count proportionally. Returns (nr, nphi).
std::pair<int, int> resolution_for(double abs_k);

// R(k) over a k grid with strictly increasing modulus. The fundamental
// method factorizes the basis once at a fixed resolution and evaluates the
// per-k condition systems against it; the iterative method solves each k
// independently at the policy resolution with shared mode banks. Per-sample
// failures are recorded in the sample, never thrown.
ReflectionSweep sweep(const Potential& q, const std::vector<Complex>& ks,
                      const SweepOptions& options = SweepOptions());

struct AsymRow {
  Complex k;
  Complex reflection;
  double asym = 0.0;
  double residual = 0.0;  // |k|^{5/2} |R - r_asym|
};

// Comparison table against the stationary-phase law; uses the samples that
// succeeded and carry an asymptotic value.
std::vector<AsymRow> compare_asym(const ReflectionSweep& sweep);

// Least-squares slope of log |R| versus log |k| over the strict local maxima
// of |R| in the sweep; needs at least three peaks. The expected value for
// the characteristic potential is -3/2.
double envelope_slope(const ReflectionSweep& sweep);

// Straight-line slope of y against x by least squares.
double linear_fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y);

// Integral of f over the unit disk (area measure), evaluated from the
// Chebyshev-Fourier coefficients: only the angular mean survives, weighted
// by the exact moments of T_m(2r - 1) r dr.
Complex disk_integral(const PhysicalField& f);

// Reflection coefficient from the area integral
//   R = conj( (1/pi) iint conj(q) e^{k z - conj(k) conj(z)} Phi1 dA ),
// the validation partner of the rim-trace formulas.
Complex reflection_quadrature(const PhysicalField& q,
                              const SpectralField& phi1, Complex k);

}  // namespace dbar
