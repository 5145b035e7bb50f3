#include "dbar/picard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "dbar/chebyshev.hpp"

namespace dbar {

namespace {

std::string short_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr int kDivergenceRun = 5;  // consecutive growing deltas before abort

}  // namespace

bool ModeSolveBank::constrained_a(int nphi, int bin) {
  return bin < nphi / 2;
}

bool ModeSolveBank::constrained_b(int nphi, int bin) {
  return bin == 0 || bin > nphi / 2;
}

ModeSolveBank::ModeSolveBank(const Grid& grid, std::size_t budget_bytes)
    : grid_(grid) {
  const int nphi = grid_.nphi;
  const int n = grid_.nr + 1;
  require(nphi >= 4 && nphi % 2 == 0, ErrorKind::kInvalidArgument,
          "mode bank needs an even angular count of at least 4");
  require(grid_.nr >= 2, ErrorKind::kInvalidArgument,
          "mode bank needs at least 2 radial intervals");

  mult_r_ = mult_r_matrix(grid_.nr);
  tau_row_ = Eigen::RowVectorXd::Ones(n) * mult_r_;

  const std::size_t lu_bytes = std::size_t(nphi) * std::size_t(n) *
                               std::size_t(n) * sizeof(double);
  if (lu_bytes <= budget_bytes) {
    const Eigen::MatrixXd& d = diff_matrix(grid_.nr);
    const Eigen::MatrixXd& rinv = div_matrix(grid_.nr);
    Eigen::MatrixXd m(n, n);
    for (int s = -nphi / 2 + 1; s <= nphi / 2; ++s) {
      m = d + double(s) * rinv;
      if (s <= 0) m.row(n - 1) = Eigen::RowVectorXd::Ones(n);
      auto& lu = lu_[s];
      lu.compute(m);
      const double rc = lu.rcond();
      require(std::isfinite(rc) && rc > 1e-18, ErrorKind::kSingular,
              "mode operator with multiplier " + std::to_string(s) +
                  " is numerically singular (rcond " + short_g(rc) + ")");
    }
    return;
  }

  // Direct path: D M_r is upper triangular with diagonal exactly
  // {1, 2, ..., nr, 0}, so D M_r + sI has integer diagonal and every mode
  // is solvable in O(nr^2) without stored factorizations.
  h0_ = diff_matrix(grid_.nr) * mult_r_;
  h0t_ = h0_.transpose();
}

Eigen::VectorXcd ModeSolveBank::apply_mult_r(const Eigen::VectorXcd& u) const {
  const int n = int(u.size());
  Eigen::VectorXcd x(n);
  x(0) = mult_r_(0, 0) * u(0) + mult_r_(0, 1) * u(1);
  for (int m = 1; m < n - 1; ++m) {
    x(m) = mult_r_(m, m - 1) * u(m - 1) + mult_r_(m, m) * u(m) +
           mult_r_(m, m + 1) * u(m + 1);
  }
  x(n - 1) = mult_r_(n - 1, n - 2) * u(n - 2) + mult_r_(n - 1, n - 1) * u(n - 1);
  return x;
}

Eigen::VectorXcd ModeSolveBank::solve_direct(int s,
                                             const Eigen::VectorXcd& pde_rhs,
                                             bool constrained,
                                             double bc) const {
  const int n = grid_.nr + 1;

  if (!constrained) {
    Eigen::VectorXcd y = pde_rhs;
    Eigen::VectorXcd u(n);
    for (int c = n - 1; c >= 0; --c) {
      u(c) = y(c) / (h0_(c, c) + double(s));
      y.head(c) -= u(c) * h0_.col(c).head(c);
    }
    return apply_mult_r(u);
  }

  // Bordered system: triangular rows 0..n-2 plus the rim functional in
  // place of the highest-degree row. Substituting through the sign-flipped
  // diagonal entries below -s amplifies exponentially, so the rim row is
  // folded in with Givens rotations from the top instead; the orthogonal
  // updates keep all intermediates on the scale of the data for every
  // multiplier and grid size, and singularity shows up only as a vanishing
  // rotated pivot.
  Eigen::MatrixXd rot(n, n);  // rotated triangle, stored transposed
  Eigen::VectorXd w = tau_row_.transpose();
  Eigen::VectorXcd rhs(n);
  Complex rhs_w = bc;
  for (int c = 0; c < n - 1; ++c) {
    const double a = h0_(c, c) + double(s);
    const double b = w(c);
    const double r = std::hypot(a, b);
    const double co = r > 0.0 ? a / r : 1.0;
    const double si = r > 0.0 ? b / r : 0.0;
    rot(c, c) = r;
    for (int j = c + 1; j < n; ++j) {
      const double t = h0t_(j, c);
      rot(j, c) = co * t + si * w(j);
      w(j) = co * w(j) - si * t;
    }
    const Complex yc = pde_rhs(c);
    rhs(c) = co * yc + si * rhs_w;
    rhs_w = co * rhs_w - si * yc;
  }
  rot(n - 1, n - 1) = w(n - 1);
  rhs(n - 1) = rhs_w;

  Eigen::VectorXcd u(n);
  for (int c = n - 1; c >= 0; --c) {
    require(std::abs(rot(c, c)) > 1e-250, ErrorKind::kSingular,
            "constrained mode with multiplier " + std::to_string(s) +
                " is numerically singular");
    Complex acc = rhs(c);
    for (int j = c + 1; j < n; ++j) acc -= rot(j, c) * u(j);
    u(c) = acc / rot(c, c);
  }
  return apply_mult_r(u);
}

Eigen::VectorXcd ModeSolveBank::solve_mode(int s,
                                           const Eigen::VectorXcd& pde_rhs,
                                           bool constrained, double bc) const {
  require(constrained == (s <= 0), ErrorKind::kInvalidArgument,
          "constraint flag does not match the multiplier sign");
  if (!factorized()) return solve_direct(s, pde_rhs, constrained, bc);

  const int n = grid_.nr + 1;
  Eigen::VectorXcd y = pde_rhs;
  if (constrained) y(n - 1) = bc;
  Eigen::MatrixXd ri(n, 2);
  ri.col(0) = y.real();
  ri.col(1) = y.imag();
  const Eigen::MatrixXd sol = lu_.at(s).solve(ri);
  Eigen::VectorXcd x(n);
  x.real() = sol.col(0);
  x.imag() = sol.col(1);
  return x;
}

Eigen::VectorXcd ModeSolveBank::solve_a(int bin,
                                        const Eigen::VectorXcd& pde_rhs) const {
  require(bin >= 0 && bin < grid_.nphi, ErrorKind::kInvalidArgument,
          "bin index out of range");
  require(int(pde_rhs.size()) == matrix_size(), ErrorKind::kShape,
          "mode right-hand side has the wrong length");
  const int mode = mode_of_bin(FourierRange::kPsi1, grid_.nphi, bin);
  const double bc = bin == 0 ? 1.0 : 0.0;
  return solve_mode(-mode, pde_rhs, constrained_a(grid_.nphi, bin), bc);
}

Eigen::VectorXcd ModeSolveBank::solve_b(int bin,
                                        const Eigen::VectorXcd& pde_rhs) const {
  require(bin >= 0 && bin < grid_.nphi, ErrorKind::kInvalidArgument,
          "bin index out of range");
  require(int(pde_rhs.size()) == matrix_size(), ErrorKind::kShape,
          "mode right-hand side has the wrong length");
  const int mode = mode_of_bin(FourierRange::kPsi2, grid_.nphi, bin);
  return solve_mode(mode, pde_rhs, constrained_b(grid_.nphi, bin), 0.0);
}

std::shared_ptr<const ModeSolveBank> shared_mode_bank(const Grid& grid) {
  struct Entry {
    int nr = 0;
    int nphi = 0;
    std::uint64_t stamp = 0;
    std::shared_ptr<const ModeSolveBank> bank;
  };
  static std::mutex mutex;
  static std::vector<Entry> cache;
  static std::uint64_t clock = 0;
  constexpr std::size_t kCapacity = 4;

  std::lock_guard<std::mutex> lock(mutex);
  for (Entry& entry : cache) {
    if (entry.nr == grid.nr && entry.nphi == grid.nphi) {
      entry.stamp = ++clock;
      return entry.bank;
    }
  }
  if (cache.size() >= kCapacity) {
    auto oldest = std::min_element(
        cache.begin(), cache.end(),
        [](const Entry& a, const Entry& b) { return a.stamp < b.stamp; });
    cache.erase(oldest);
  }
  Entry entry;
  entry.nr = grid.nr;
  entry.nphi = grid.nphi;
  entry.stamp = ++clock;
  entry.bank = std::make_shared<const ModeSolveBank>(grid);
  cache.push_back(entry);
  return entry.bank;
}

std::pair<PhysicalField, PhysicalField> modulation_kernels(
    const PhysicalField& q, Complex k) {
  PhysicalField fwd = phase_modulated(q, k, ModulationSign::kForward);
  PhysicalField qbar = q;
  qbar.values = q.values.conjugate();
  PhysicalField bwd = phase_modulated(qbar, k, ModulationSign::kBackward);
  for (int i = 0; i < q.grid.nphi; ++i) {
    fwd.values.col(i) *= std::polar(1.0, -q.grid.phi[i]);
    bwd.values.col(i) *= std::polar(1.0, q.grid.phi[i]);
  }
  return {std::move(fwd), std::move(bwd)};
}

namespace {

// One fixed-point update from physical-space iterates; shared by the public
// step and the iteration loop so physical fields are transformed only once.
std::pair<SpectralField, SpectralField> step_from_physical(
    const PhysicalField& p1, const PhysicalField& p2,
    const PhysicalField& q_mod_fwd, const PhysicalField& q_mod_bwd,
    const ModeSolveBank& bank) {
  const Grid& grid = bank.grid();
  PhysicalField rhs1 = make_physical(grid);
  rhs1.values = q_mod_fwd.values.cwiseProduct(p2.values);
  PhysicalField rhs2 = make_physical(grid);
  rhs2.values = q_mod_bwd.values.cwiseProduct(p1.values);
  const SpectralField f1 = forward_transform(rhs1, FourierRange::kPsi1);
  const SpectralField f2 = forward_transform(rhs2, FourierRange::kPsi2);

  SpectralField n1 = make_spectral(grid, FourierRange::kPsi1);
  SpectralField n2 = make_spectral(grid, FourierRange::kPsi2);
  for (int bin = 0; bin < grid.nphi; ++bin) {
    n1.coeffs.col(bin) = bank.solve_a(bin, f1.coeffs.col(bin));
    n2.coeffs.col(bin) = bank.solve_b(bin, f2.coeffs.col(bin));
  }
  return {std::move(n1), std::move(n2)};
}

}  // namespace

std::pair<SpectralField, SpectralField> picard_step(
    const SpectralField& phi1, const SpectralField& phi2,
    const PhysicalField& q_mod_fwd, const PhysicalField& q_mod_bwd,
    const ModeSolveBank& bank) {
  const Grid& grid = bank.grid();
  require(same_shape(phi1.grid, grid) && same_shape(phi2.grid, grid) &&
              same_shape(q_mod_fwd.grid, grid) &&
              same_shape(q_mod_bwd.grid, grid),
          ErrorKind::kShape, "iterate and bank grids do not match");
  require(phi1.range == FourierRange::kPsi1 &&
              phi2.range == FourierRange::kPsi2,
          ErrorKind::kInvalidArgument,
          "iterates must carry their component's Fourier range");
  return step_from_physical(inverse_transform(phi1), inverse_transform(phi2),
                            q_mod_fwd, q_mod_bwd, bank);
}

std::pair<CGOSolution, IterationTrace> solve_cgo_iterative(
    const Potential& q, Complex k, const Grid& grid, double tol, int max_steps,
    std::shared_ptr<const ModeSolveBank> bank) {
  require(std::isfinite(tol) && tol > 0.0, ErrorKind::kInvalidArgument,
          "tolerance must be positive");
  require(max_steps >= 1, ErrorKind::kInvalidArgument,
          "step budget must be at least 1");
  if (!bank) bank = shared_mode_bank(grid);
  require(same_shape(bank->grid(), grid), ErrorKind::kShape,
          "mode bank was built for a different grid");

  IterationTrace trace;
  trace.k = k;
  trace.nr = grid.nr;
  trace.nphi = grid.nphi;
  trace.tolerance = tol;
  trace.resolution_ok = resolution_check(q, k, grid.nr, grid.nphi);

  const PhysicalField q_phys = sample(q, grid);
  const auto [fwd, bwd] = modulation_kernels(q_phys, k);

  SpectralField phi1 = make_spectral(grid, FourierRange::kPsi1);
  phi1.coeffs(0, 0) = Complex(1.0, 0.0);
  SpectralField phi2 = make_spectral(grid, FourierRange::kPsi2);
  PhysicalField p1 = inverse_transform(phi1);
  PhysicalField p2 = inverse_transform(phi2);

  int growth_run = 0;
  for (int step = 1; step <= max_steps; ++step) {
    auto [n1, n2] = step_from_physical(p1, p2, fwd, bwd, *bank);
    PhysicalField np1 = inverse_transform(n1);
    PhysicalField np2 = inverse_transform(n2);
    const double delta = (np1.values - p1.values).cwiseAbs().maxCoeff() +
                         (np2.values - p2.values).cwiseAbs().maxCoeff();
    require(std::isfinite(delta), ErrorKind::kNonFinite,
            "iterate became non-finite at step " + std::to_string(step));
    const bool grew =
        !trace.deltas.empty() && delta > trace.deltas.back();
    growth_run = grew ? growth_run + 1 : 0;
    trace.deltas.push_back(delta);
    trace.steps = step;

    phi1 = std::move(n1);
    phi2 = std::move(n2);
    p1 = std::move(np1);
    p2 = std::move(np2);

    if (delta <= tol) {
      trace.converged = true;
      break;
    }
    require(growth_run < kDivergenceRun, ErrorKind::kNonConvergence,
            "iteration diverging: delta grew " +
                std::to_string(kDivergenceRun) +
                " consecutive steps (step " + std::to_string(step) +
                ", delta " + short_g(delta) + ")");
  }
  require(trace.converged, ErrorKind::kNonConvergence,
          "no convergence within " + std::to_string(max_steps) +
              " steps (last delta " +
              short_g(trace.deltas.empty() ? 0.0 : trace.deltas.back()) + ")");

  CGOSolution sol;
  sol.k = k;
  sol.gauge = Gauge::kPhi;
  sol.field1 = std::move(phi1);
  sol.field2 = std::move(phi2);
  sol.reflection = reflection_iterative(sol.field2);
  sol.reflection_defined = true;
  sol.diagnostics.condition_residual = trace.deltas.back();
  sol.diagnostics.trailing_cheb =
      std::max(trailing_chebyshev_ratio(sol.field1),
               trailing_chebyshev_ratio(sol.field2));
  sol.diagnostics.trailing_fourier =
      std::max(trailing_fourier_ratio(sol.field1),
               trailing_fourier_ratio(sol.field2));
  return {std::move(sol), std::move(trace)};
}

Complex reflection_iterative(const SpectralField& phi2) {
  require(phi2.range == FourierRange::kPsi2, ErrorKind::kInvalidArgument,
          "reflection reads the second component's Fourier range");
  require(phi2.grid.nphi >= 4, ErrorKind::kInvalidArgument,
          "reflection needs the n = 1 Fourier mode");
  return 2.0 * std::conj(rim_coeffs(phi2)(1));
}

}  // namespace dbar
