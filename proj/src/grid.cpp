#include "dbar/grid.hpp"

#include <cmath>

namespace dbar {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kNonFinite: return "non_finite";
    case ErrorKind::kSingular: return "singular";
    case ErrorKind::kNonConvergence: return "non_convergence";
    case ErrorKind::kResolution: return "resolution";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Grid make_grid(int nr, int nphi) {
  require(nr >= 2, ErrorKind::kInvalidArgument,
          "make_grid: nr must be at least 2");
  require(nphi >= 4 && nphi % 2 == 0, ErrorKind::kInvalidArgument,
          "make_grid: nphi must be even and at least 4");

  Grid g;
  g.nr = nr;
  g.nphi = nphi;
  g.l.resize(nr + 1);
  g.r.resize(nr + 1);
  g.phi.resize(nphi);

  // cos(j pi / nr) written as a sine of the signed distance from the middle of
  // the interval; this makes l_j antisymmetric to the last bit and pins the
  // endpoints and (for even nr) the center node exactly.
  for (int j = 0; j <= nr; ++j) {
    g.l[j] = std::sin(M_PI * (nr - 2 * j) / (2.0 * nr));
    g.r[j] = 0.5 * (1.0 + g.l[j]);
  }
  for (int i = 0; i < nphi; ++i) {
    g.phi[i] = 2.0 * M_PI * i / nphi;
  }
  return g;
}

}  // namespace dbar
