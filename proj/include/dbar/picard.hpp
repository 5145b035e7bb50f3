#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "dbar/cgo.hpp"
#include "dbar/potential.hpp"

namespace dbar {

struct IterationTrace {
  Complex k;
  int nr = 0;
  int nphi = 0;
  double tolerance = 1e-10;
  std::vector<double> deltas;  // sup-norm change per step
  int steps = 0;
  bool converged = false;
  bool resolution_ok = true;  // result of the pre-solve resolution check
};

// Per-mode radial solvers shared by all iterations and all k at one grid
// shape. Constrained modes (a: n = 0..nphi/2-1, b: n = -nphi/2+1..0) carry
// the rim functional sum_m coeffs = boundary value in place of their
// highest-degree row; the remaining modes are uniquely solvable as plain
// PDE rows. Within the memory budget every distinct matrix is LU-factorized
// once; above it the bank switches to an on-the-fly elimination that needs
// no stored factorizations.
class ModeSolveBank {
 public:
  static constexpr std::size_t kDefaultBudgetBytes = std::size_t(1) << 30;

  explicit ModeSolveBank(const Grid& grid,
                         std::size_t budget_bytes = kDefaultBudgetBytes);

  const Grid& grid() const { return grid_; }
  bool factorized() const { return !lu_.empty(); }
  // Number of per-mode factorizations the bank serves (a and b component for
  // every bin); 0 when the bank operates in the on-the-fly regime.
  int factorization_count() const {
    return factorized() ? 2 * grid_.nphi : 0;
  }
  int matrix_size() const { return grid_.nr + 1; }

  static bool constrained_a(int nphi, int bin);
  static bool constrained_b(int nphi, int bin);

  // Solve the mode system of the given storage bin. `pde_rhs` holds the
  // right-hand side in coefficient space; for constrained modes its last
  // entry is ignored and the built-in boundary value (delta_{n0} for a,
  // 0 for b) is enforced instead.
  Eigen::VectorXcd solve_a(int bin, const Eigen::VectorXcd& pde_rhs) const;
  Eigen::VectorXcd solve_b(int bin, const Eigen::VectorXcd& pde_rhs) const;

 private:
  // The on-the-fly path substitutes x = M_r u, which turns D + sR into the
  // upper-triangular D M_r + sI with exact integer diagonal {1+s, ..., nr+s,
  // s}. Unconstrained modes reduce to one back substitution. Constrained
  // modes replace the last row with the rim functional; substituting through
  // that bordered system amplifies exponentially once the diagonal turns
  // negative, so the rim row is folded in with Givens rotations instead,
  // which keep every intermediate on the scale of the data.
  Eigen::VectorXcd solve_mode(int s, const Eigen::VectorXcd& pde_rhs,
                              bool constrained, double bc) const;
  Eigen::VectorXcd solve_direct(int s, const Eigen::VectorXcd& pde_rhs,
                                bool constrained, double bc) const;
  Eigen::VectorXcd apply_mult_r(const Eigen::VectorXcd& u) const;

  Grid grid_;
  // Keyed by the integer s in D + sR; a-bins use s = -n, b-bins s = +n, so
  // both components share one factorization per value.
  std::map<int, Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  Eigen::MatrixXd h0_;          // D * M_r (direct path only)
  Eigen::MatrixXd h0t_;         // its transpose, for row-wise access
  Eigen::MatrixXd mult_r_;      // M_r, tridiagonal
  Eigen::RowVectorXd tau_row_;  // ones^T M_r, rim functional on u
};

// Process-wide bank cache (small LRU); sweeps over many k share banks per
// resolution.
std::shared_ptr<const ModeSolveBank> shared_mode_bank(const Grid& grid);

// The pointwise kernels q e^{conj(k) conj(z) - k z} e^{-i phi} and
// conj(q) e^{k z - conj(k) conj(z)} e^{+i phi} feeding the two equations.
std::pair<PhysicalField, PhysicalField> modulation_kernels(
    const PhysicalField& q, Complex k);

// One fixed-point step: multiply in physical space, transform, solve every
// mode, re-impose the rim values.
std::pair<SpectralField, SpectralField> picard_step(
    const SpectralField& phi1, const SpectralField& phi2,
    const PhysicalField& q_mod_fwd, const PhysicalField& q_mod_bwd,
    const ModeSolveBank& bank);

// Full iteration from (1, 0); returns the solution in the kPhi gauge with
// its reflection value attached. Throws kNonConvergence when the budget is
// exhausted or the deltas grow five steps in a row, kNonFinite on NaN/Inf.
std::pair<CGOSolution, IterationTrace> solve_cgo_iterative(
    const Potential& q, Complex k, const Grid& grid, double tol = 1e-10,
    int max_steps = 100,
    std::shared_ptr<const ModeSolveBank> bank = nullptr);

// R = 2 conj(sum_m b_{1m}): twice the conjugated rim value of the n = 1
// Fourier mode of phi2.
Complex reflection_iterative(const SpectralField& phi2);

}  // namespace dbar
