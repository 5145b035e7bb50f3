#pragma once

#include "dbar/spectral.hpp"

namespace dbar {

// Modified Bessel function of the first kind, I_n(x), by its ascending
// series truncated at term m = max_terms; the default reaches machine
// precision on the arguments used here (0 <= x <= 4). The order may be
// negative (I_{-n} = I_n) but is capped at 514; values underflow to zero
// for large |n| at small x, so use besseli_ratio when only ratios matter.
double besseli(int n, double x, int max_terms = 16);

// I_n(r) / I_n(1) for r in [0, 1], computed without forming either value,
// so it stays accurate at orders where both factors underflow.
double besseli_ratio(int n, double r);

struct ExactSolution {
  PhysicalField psi1;
  PhysicalField psi2;
};

// Closed-form column j (1-based, 1 <= j <= nphi) of the fundamental basis
// for the constant unit potential. Columns 1..nphi/2 carry the boundary
// impulse on psi1 modes 0..nphi/2-1; the rest carry it on psi2 modes
// 0, -nphi/2+1, ..., -1 in that order.
ExactSolution exact_fundamental(const Grid& grid, int j);

}  // namespace dbar
