#pragma once

#include <Eigen/Dense>

#include "dbar/fundamental.hpp"

namespace dbar {

// Asymptotic conditions at a given k, evaluated against every basis column:
// the first nphi/2 rows demand c_n = delta_{n0} (n = 0..nphi/2-1), the last
// nphi/2 rows demand d_n = 0 (n = 0, -1, ..., -nphi/2+1).
struct CGOConditionMatrix {
  Complex k;
  Eigen::MatrixXcd matrix;     // nphi x nphi, columns = basis index j
  Eigen::VectorXcd rhs;        // unit entry in the c_0 row
  Eigen::RowVectorXcd d1_row;  // the d_1 functional per column
};

CGOConditionMatrix condition_rows(const FundamentalBasis& basis, Complex k);

// Solves for the combination coefficients gamma; the system is expected to
// be uniquely solvable in the defocusing case. A large solve residual is
// reported as a singular system (a possible exceptional point only if the
// focusing case was fed in by mistake).
Eigen::VectorXcd solve_gamma(const CGOConditionMatrix& cond);

enum class Gauge { kPsi, kPhi };

struct CGODiagnostics {
  double condition_residual = 0.0;  // max |M gamma - rhs| (iterative: last delta)
  double trailing_cheb = 0.0;
  double trailing_fourier = 0.0;
};

struct CGOSolution {
  Complex k;
  Gauge gauge = Gauge::kPsi;
  SpectralField field1;  // psi1 or phi1 depending on gauge
  SpectralField field2;
  Eigen::VectorXcd gamma;  // empty for iterative solutions
  Complex reflection{0.0, 0.0};
  bool reflection_defined = false;
  CGODiagnostics diagnostics;
};

// Linear combination sum_j gamma_j psi^{(j)} in coefficient space; the kPhi
// gauge additionally strips the exponentials e^{k z} / e^{conj(k) conj(z)}
// pointwise in physical space and re-expands.
CGOSolution assemble_cgo(const FundamentalBasis& basis,
                         const CGOConditionMatrix& cond,
                         const Eigen::VectorXcd& gamma, Gauge gauge);

// R = 2 conj(d_1 . gamma), available from the same transform pass that
// built the condition rows.
Complex reflection_from_conditions(const CGOConditionMatrix& cond,
                                   const Eigen::VectorXcd& gamma);

}  // namespace dbar
