#include "dbar/fundamental.hpp"

#include <string>
#include <utility>

#include "dbar/chebyshev.hpp"
#include "dbar/io.hpp"

namespace dbar {
namespace {

// Dense LU of the full operator; keep the dimension within a few GB.
constexpr int kMaxOperatorDim = 16384;

PhysicalField angular_shift_product(const PhysicalField& q, int direction,
                                    bool conjugate) {
  PhysicalField out = make_physical(q.grid);
  for (int i = 0; i < q.grid.nphi; ++i) {
    const Complex phase = std::polar(1.0, direction * q.grid.phi[i]);
    for (int j = 0; j <= q.grid.nr; ++j) {
      const Complex v = conjugate ? std::conj(q.values(j, i)) : q.values(j, i);
      out.values(j, i) = v * phase;
    }
  }
  return out;
}

}  // namespace

int index_a(const Grid& grid, int bin, int m) {
  return bin * (grid.nr + 1) + m;
}

int index_b(const Grid& grid, int bin, int m) {
  return (grid.nphi + bin) * (grid.nr + 1) + m;
}

std::vector<int> constrained_a_bins(int nphi) {
  std::vector<int> bins;
  for (int bin = 0; bin < nphi / 2; ++bin) bins.push_back(bin);  // modes 0..
  return bins;
}

std::vector<int> constrained_b_bins(int nphi) {
  std::vector<int> bins;
  bins.push_back(0);  // mode 0
  for (int bin = nphi / 2 + 1; bin < nphi; ++bin) bins.push_back(bin);
  return bins;
}

AssembledOperator assemble(const PhysicalField& q) {
  const Grid& grid = q.grid;
  const int nr1 = grid.nr + 1;
  const int nphi = grid.nphi;
  const int dim = 2 * nr1 * nphi;
  require(q.values.rows() == nr1 && q.values.cols() == nphi, ErrorKind::kShape,
          "assemble: potential samples do not match the grid");
  require(dim <= kMaxOperatorDim, ErrorKind::kResolution,
          "assemble: operator dimension " + std::to_string(dim) +
              " exceeds the dense solver limit; use the iterative solver");

  AssembledOperator op;
  op.grid = grid;
  op.matrix = Eigen::MatrixXcd::Zero(dim, dim);

  const Eigen::MatrixXd& d = diff_matrix(grid.nr);
  const Eigen::MatrixXd& r = div_matrix(grid.nr);
  for (int bin = 0; bin < nphi; ++bin) {
    const int n1 = mode_of_bin(FourierRange::kPsi1, nphi, bin);
    const int n2 = mode_of_bin(FourierRange::kPsi2, nphi, bin);
    op.matrix.block(index_a(grid, bin, 0), index_a(grid, bin, 0), nr1, nr1) =
        d - n1 * r;
    op.matrix.block(index_b(grid, bin, 0), index_b(grid, bin, 0), nr1, nr1) =
        d + n2 * r;
  }

  if (q.values.cwiseAbs().maxCoeff() == 0.0) return op;  // decoupled system

  // Coupling kernels q e^{-i phi} and conj(q) e^{+i phi}, expanded once; a
  // product with a solution component is then a cyclic convolution over
  // Fourier bins of fixed Chebyshev multiplication blocks.
  const SpectralField wf = forward_transform(
      angular_shift_product(q, -1, false), FourierRange::kPsi1);
  const SpectralField wb = forward_transform(
      angular_shift_product(q, +1, true), FourierRange::kPsi1);
  std::vector<Eigen::MatrixXcd> mf(nphi), mb(nphi);
  for (int shift = 0; shift < nphi; ++shift) {
    mf[shift] = cheb_mult_matrix(wf.coeffs.col(shift));
    mb[shift] = cheb_mult_matrix(wb.coeffs.col(shift));
  }
  for (int i = 0; i < nphi; ++i) {
    for (int beta = 0; beta < nphi; ++beta) {
      const int shift = (i - beta + nphi) % nphi;
      op.matrix.block(index_a(grid, i, 0), index_b(grid, beta, 0), nr1, nr1) =
          -mf[shift];
      op.matrix.block(index_b(grid, i, 0), index_a(grid, beta, 0), nr1, nr1) =
          -mb[shift];
    }
  }
  return op;
}

void apply_tau(AssembledOperator& op) {
  require(!op.tau_applied, ErrorKind::kInvalidArgument,
          "apply_tau: boundary rows already applied");
  const Grid& grid = op.grid;
  const int nr = grid.nr;
  for (int bin : constrained_a_bins(grid.nphi)) {
    const int row = index_a(grid, bin, nr);
    op.matrix.row(row).setZero();
    for (int m = 0; m <= nr; ++m) op.matrix(row, index_a(grid, bin, m)) = 1.0;
  }
  for (int bin : constrained_b_bins(grid.nphi)) {
    const int row = index_b(grid, bin, nr);
    op.matrix.row(row).setZero();
    for (int m = 0; m <= nr; ++m) op.matrix(row, index_b(grid, bin, m)) = 1.0;
  }
  op.tau_applied = true;
}

Eigen::VectorXcd tau_rhs(const Grid& grid, int j) {
  require(j >= 1 && j <= grid.nphi, ErrorKind::kInvalidArgument,
          "tau_rhs: column index out of range");
  Eigen::VectorXcd rhs =
      Eigen::VectorXcd::Zero(2 * (grid.nr + 1) * grid.nphi);
  if (j <= grid.nphi / 2) {
    rhs(index_a(grid, j - 1, grid.nr)) = 1.0;  // a-mode j-1
  } else if (j == grid.nphi / 2 + 1) {
    rhs(index_b(grid, 0, grid.nr)) = 1.0;  // b-mode 0
  } else {
    rhs(index_b(grid, j - 1, grid.nr)) = 1.0;  // b-mode j-1-nphi at bin j-1
  }
  return rhs;
}

FundamentalBasis solve_basis(const PhysicalField& q) {
  const Grid grid = q.grid;
  const int nr1 = grid.nr + 1;
  const int nphi = grid.nphi;
  const int dim = 2 * nr1 * nphi;

  AssembledOperator op = assemble(q);
  apply_tau(op);

  Eigen::MatrixXcd rhs(dim, nphi);
  for (int j = 1; j <= nphi; ++j) rhs.col(j - 1) = tau_rhs(grid, j);

  // Factorize in place; the assembled matrix is not needed afterwards.
  Eigen::PartialPivLU<Eigen::Ref<Eigen::MatrixXcd>> lu(op.matrix);
  const double rc = lu.rcond();
  require(std::isfinite(rc) && rc > 1e-18, ErrorKind::kSingular,
          "solve_basis: operator numerically singular, reciprocal condition "
          "estimate " + std::to_string(rc));
  const Eigen::MatrixXcd solution = lu.solve(rhs);

  FundamentalBasis basis;
  basis.grid = grid;
  basis.condition_estimate = 1.0 / rc;
  basis.potential_hash =
      fnv1a64(q.values.data(), sizeof(Complex) * q.values.size());
  basis.psi1.reserve(nphi);
  basis.psi2.reserve(nphi);
  basis.rim1.resize(nphi, nphi);
  basis.rim2.resize(nphi, nphi);
  DiskTransform& transform = thread_transform(grid);
  for (int j = 0; j < nphi; ++j) {
    SpectralField p1 = make_spectral(grid, FourierRange::kPsi1);
    SpectralField p2 = make_spectral(grid, FourierRange::kPsi2);
    for (int bin = 0; bin < nphi; ++bin) {
      p1.coeffs.col(bin) = solution.col(j).segment(index_a(grid, bin, 0), nr1);
      p2.coeffs.col(bin) = solution.col(j).segment(index_b(grid, bin, 0), nr1);
    }
    basis.rim1.col(j) = transform.synthesize_ring(rim_coeffs(p1));
    basis.rim2.col(j) = transform.synthesize_ring(rim_coeffs(p2));
    basis.psi1.push_back(std::move(p1));
    basis.psi2.push_back(std::move(p2));
  }
  return basis;
}

}  // namespace dbar
