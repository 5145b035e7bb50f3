#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "dbar/spectral.hpp"

namespace dbar {

// The discretized d-bar system on all modes at once. Unknown ordering: the
// a-coefficients (psi1) come first, bin-major with the Chebyshev degree
// fastest, then the b-coefficients (psi2) with the same layout.
struct AssembledOperator {
  Grid grid;
  Eigen::MatrixXcd matrix;  // 2 (nr+1) nphi square
  bool tau_applied = false;
};

int index_a(const Grid& grid, int bin, int m);
int index_b(const Grid& grid, int bin, int m);

// Modes whose radial operator is rank deficient and therefore carries a rim
// boundary condition: a-modes 0..nphi/2-1 and b-modes -nphi/2+1..0, each
// listed by storage bin.
std::vector<int> constrained_a_bins(int nphi);
std::vector<int> constrained_b_bins(int nphi);

// Builds the operator: per-bin diagonal blocks D -/+ nR, and coupling blocks
// realizing multiplication by q e^{-i phi} (and conj(q) e^{+i phi}) as a
// cyclic Fourier convolution of Chebyshev product matrices.
AssembledOperator assemble(const PhysicalField& q);

// Replaces the highest-degree Chebyshev row of every constrained mode with
// the rim functional sum_m coeffs = boundary value (T_m(1) = 1).
void apply_tau(AssembledOperator& op);

// Right-hand side selecting fundamental column j (1-based): a unit rim value
// on the j-th constrained mode, zero on the others. Columns 1..nphi/2 hit
// the a-modes 0..nphi/2-1; column nphi/2+1 hits b-mode 0 and the remaining
// columns the b-modes j-1-nphi.
Eigen::VectorXcd tau_rhs(const Grid& grid, int j);

struct FundamentalBasis {
  Grid grid;
  std::vector<SpectralField> psi1;  // nphi columns, kPsi1 range
  std::vector<SpectralField> psi2;  // nphi columns, kPsi2 range
  // Rim traces psi(1, phi_i) per column: rows = angular index, cols = j.
  Eigen::MatrixXcd rim1;
  Eigen::MatrixXcd rim2;
  double condition_estimate = 0.0;  // 1-norm condition estimate of the solve
  std::uint64_t potential_hash = 0;
};

// One factorization, nphi right-hand sides.
FundamentalBasis solve_basis(const PhysicalField& q);

}  // namespace dbar
