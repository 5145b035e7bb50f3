#include "dbar/cgo.hpp"

#include <cmath>
#include <string>

namespace dbar {

CGOConditionMatrix condition_rows(const FundamentalBasis& basis, Complex k) {
  const int nphi = basis.grid.nphi;
  const int half = nphi / 2;
  DiskTransform& transform = thread_transform(basis.grid);

  // Weights on the rim; both factors are entire in k, no scaling issues for
  // the moderate |k| this route is meant for.
  Eigen::VectorXcd w1(nphi), w2(nphi);
  for (int i = 0; i < nphi; ++i) {
    const Complex eip = std::polar(1.0, basis.grid.phi[i]);
    w1(i) = std::exp(-k * eip);
    w2(i) = std::exp(-std::conj(k) * std::conj(eip));
  }
  require(w1.allFinite() && w2.allFinite(), ErrorKind::kInvalidArgument,
          "condition_rows: |k| too large for the direct route, the rim "
          "weights overflow; use the iterative solver");

  CGOConditionMatrix cond;
  cond.k = k;
  cond.matrix.resize(nphi, nphi);
  cond.rhs = Eigen::VectorXcd::Zero(nphi);
  cond.rhs(0) = 1.0;
  cond.d1_row.resize(nphi);
  for (int j = 0; j < nphi; ++j) {
    const Eigen::VectorXcd c =
        transform.analyze_ring(w1.cwiseProduct(basis.rim1.col(j)));
    const Eigen::VectorXcd d =
        transform.analyze_ring(w2.cwiseProduct(basis.rim2.col(j)));
    for (int n = 0; n < half; ++n) {
      cond.matrix(n, j) = c(n);                          // c_n, n >= 0
      cond.matrix(half + n, j) = d((nphi - n) % nphi);   // d_{-n}, n >= 0
    }
    cond.d1_row(j) = d(1);
  }
  return cond;
}

Eigen::VectorXcd solve_gamma(const CGOConditionMatrix& cond) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(cond.matrix);
  const Eigen::VectorXcd gamma = lu.solve(cond.rhs);
  const double residual =
      (cond.matrix * gamma - cond.rhs).cwiseAbs().maxCoeff();
  const double scale = cond.rhs.cwiseAbs().maxCoeff();
  require(std::isfinite(residual) && residual <= 1e-12 * scale,
          ErrorKind::kSingular,
          "solve_gamma: condition system residual " + std::to_string(residual) +
              "; singular system (exceptional point is only possible for the "
              "focusing sign)");
  return gamma;
}

CGOSolution assemble_cgo(const FundamentalBasis& basis,
                         const CGOConditionMatrix& cond,
                         const Eigen::VectorXcd& gamma, Gauge gauge) {
  const int nphi = basis.grid.nphi;
  require(gamma.size() == nphi, ErrorKind::kShape,
          "assemble_cgo: gamma length does not match the basis");

  CGOSolution sol;
  sol.k = cond.k;
  sol.gauge = gauge;
  sol.gamma = gamma;
  sol.field1 = make_spectral(basis.grid, FourierRange::kPsi1);
  sol.field2 = make_spectral(basis.grid, FourierRange::kPsi2);
  for (int j = 0; j < nphi; ++j) {
    if (gamma(j) == Complex(0.0, 0.0)) continue;
    sol.field1.coeffs += gamma(j) * basis.psi1[j].coeffs;
    sol.field2.coeffs += gamma(j) * basis.psi2[j].coeffs;
  }

  if (gauge == Gauge::kPhi) {
    PhysicalField f1 = inverse_transform(sol.field1);
    PhysicalField f2 = inverse_transform(sol.field2);
    for (int i = 0; i < nphi; ++i) {
      for (int j = 0; j <= basis.grid.nr; ++j) {
        const Complex z =
            basis.grid.r[j] * std::polar(1.0, basis.grid.phi[i]);
        f1.values(j, i) *= std::exp(-cond.k * z);
        f2.values(j, i) *= std::exp(-std::conj(cond.k) * std::conj(z));
      }
    }
    sol.field1 = forward_transform(f1, FourierRange::kPsi1);
    sol.field2 = forward_transform(f2, FourierRange::kPsi2);
  }

  sol.diagnostics.condition_residual =
      (cond.matrix * gamma - cond.rhs).cwiseAbs().maxCoeff();
  sol.diagnostics.trailing_cheb = std::max(trailing_chebyshev_ratio(sol.field1),
                                           trailing_chebyshev_ratio(sol.field2));
  sol.diagnostics.trailing_fourier = std::max(
      trailing_fourier_ratio(sol.field1), trailing_fourier_ratio(sol.field2));

  sol.reflection_defined = gamma.cwiseAbs().maxCoeff() > 0.0;
  if (sol.reflection_defined) {
    sol.reflection = reflection_from_conditions(cond, gamma);
  }
  return sol;
}

Complex reflection_from_conditions(const CGOConditionMatrix& cond,
                                   const Eigen::VectorXcd& gamma) {
  require(gamma.size() == cond.d1_row.size(), ErrorKind::kShape,
          "reflection_from_conditions: gamma length mismatch");
  return 2.0 * std::conj((cond.d1_row * gamma)(0, 0));
}

}  // namespace dbar
