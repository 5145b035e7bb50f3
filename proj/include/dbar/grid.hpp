#pragma once

#include <vector>

#include "dbar/types.hpp"

namespace dbar {

// Tensor grid on the closed unit disk: Chebyshev-Lobatto nodes in the radial
// direction and an equispaced periodic grid in the angle.
//
//   l_j   = cos(j pi / n_r),  j = 0..n_r      (l_0 = 1, l_{n_r} = -1)
//   r_j   = (1 + l_j) / 2                     (r_0 = 1 rim, r_{n_r} = 0 center)
//   phi_i = 2 pi i / n_phi,   i = 0..n_phi-1
//
// Fields sampled on the grid are stored radial-major: row j, column i.
struct Grid {
  int nr = 0;
  int nphi = 0;
  std::vector<double> l;    // size nr+1
  std::vector<double> r;    // size nr+1
  std::vector<double> phi;  // size nphi
};

// Builds a grid. Requires nr >= 2 and nphi >= 4 even. The Lobatto nodes are
// evaluated through sin so the set is exactly symmetric about l = 0 and the
// endpoints are exactly +-1.
Grid make_grid(int nr, int nphi);

inline bool same_shape(const Grid& a, const Grid& b) {
  return a.nr == b.nr && a.nphi == b.nphi;
}

}  // namespace dbar
