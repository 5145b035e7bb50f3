#pragma once

#include <Eigen/Dense>

#include "dbar/types.hpp"

namespace dbar {

// Coefficient-space operators for Chebyshev expansions on r in [0,1] with
// l = 2r - 1. All matrices are (nr+1) x (nr+1) and act on coefficient
// vectors of sum_m a_m T_m(l).

// d/dr in coefficient space, derived from T'_{n+1}/(n+1) - T'_{n-1}/(n-1)
// = 2 T_n. Includes the chain-rule factor 2 from l = 2r - 1, so the matrix
// differentiates with respect to r directly. Strictly upper triangular.
// Cached per nr; the reference stays valid for the process lifetime.
const Eigen::MatrixXd& diff_matrix(int nr);

// Multiplication by r = (1+l)/2 built from T_{n+1} + T_{n-1} = 2 l T_n
// (column 0 uses l T_0 = T_1). Products beyond degree nr are truncated.
const Eigen::MatrixXd& mult_r_matrix(int nr);

// Division by r: the inverse of mult_r_matrix. Exact (up to roundoff) on
// coefficients of r*a(r) whenever deg a <= nr-1. Throws kSingular if the
// multiplication matrix cannot be inverted reliably at this size.
const Eigen::MatrixXd& div_matrix(int nr);

// Multiplication by a Chebyshev series f (given by its coefficients) using
// T_mu T_alpha = (T_{mu+alpha} + T_{|mu-alpha|}) / 2, truncated at degree nr.
Eigen::MatrixXcd cheb_mult_matrix(const Eigen::VectorXcd& f);

// The per-mode radial operator of the d-bar system:
//   sign = -1:  D - n R   (psi1 / a-component)
//   sign = +1:  D + n R   (psi2 / b-component)
struct ModeOperator {
  int mode = 0;
  int sign = 0;
  Eigen::MatrixXd matrix;
};

ModeOperator mode_operator(int mode, int sign, int nr);

}  // namespace dbar
