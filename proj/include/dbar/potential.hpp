#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "dbar/spectral.hpp"

namespace dbar {

// Potentials live on the closed unit disk and are identically zero outside;
// the discontinuity sits on the rim, which is a grid line.
enum class PotentialKind { kCharacteristic, kRadialProfile, kSampled };

struct Potential {
  PotentialKind kind = PotentialKind::kCharacteristic;
  Complex amplitude{1.0, 0.0};
  // kRadialProfile: Chebyshev coefficients of f in T_m(2r - 1).
  Eigen::VectorXd profile;
  // kSampled: fixed samples with their own grid.
  PhysicalField samples;
};

Potential characteristic_potential(Complex amplitude = Complex(1.0, 0.0));
Potential radial_potential(const Eigen::VectorXd& profile,
                           Complex amplitude = Complex(1.0, 0.0));
Potential sampled_potential(const PhysicalField& samples,
                            Complex amplitude = Complex(1.0, 0.0));

// Evaluates the potential at every grid node. Sampled potentials only admit
// their own grid shape; anything else is a shape error.
PhysicalField sample(const Potential& p, const Grid& grid);

// Sampled-potential file format: one text header
//   dbar-potential v1 nr=<Nr> nphi=<Nphi>
// followed by (Nr+1)*Nphi lines "j,i,re,im" in radial-major order.
void save_sampled(const std::string& path, const PhysicalField& field);
Potential load_sampled(const std::string& path);

// The oscillatory factor attached to the potential in the k-explicit system.
// kForward multiplies by e^{conj(k) conj(z) - k z}, kBackward by its inverse;
// both exponents are purely imaginary, so the factor is a pure phase.
enum class ModulationSign { kForward, kBackward };

PhysicalField phase_modulated(const PhysicalField& q, Complex k,
                              ModulationSign sign);

// Resolution rule: the modulated potential must be spectrally resolved, i.e.
// its trailing Chebyshev row and trailing (Nyquist) Fourier column must fall
// below `threshold` relative to the largest coefficient.
bool resolution_check(const Potential& q, Complex k, int nr, int nphi,
                      double threshold = 1e-13);

// Doubling search that grows nphi (and nr proportionally) from the given
// starting shape until resolution_check passes. Fails with a resolution
// error once a candidate field would exceed max_field_bytes.
std::pair<int, int> autotune_resolution(const Potential& q, Complex k,
                                        int nr0, int nphi0,
                                        double threshold = 1e-13,
                                        std::size_t max_field_bytes =
                                            std::size_t(1) << 30);

}  // namespace dbar
