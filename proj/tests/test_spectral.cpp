#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "dbar/chebyshev.hpp"
#include "dbar/grid.hpp"
#include "dbar/spectral.hpp"
#include "doctest.h"

using dbar::Complex;
using dbar::Error;
using dbar::ErrorKind;
using dbar::FourierRange;
using dbar::Grid;

namespace {

constexpr double kPi = std::numbers::pi;

dbar::PhysicalField random_field(const Grid& grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  dbar::PhysicalField f = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i)
    for (int j = 0; j <= grid.nr; ++j)
      f.values(j, i) = Complex(dist(rng), dist(rng));
  return f;
}

double cheb(int m, double l) { return std::cos(m * std::acos(l)); }

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid nodes are exact at the endpoints and symmetric") {
  const Grid grid = dbar::make_grid(8, 16);
  CHECK(grid.l[0] == 1.0);
  CHECK(grid.l[8] == -1.0);
  CHECK(grid.r[0] == 1.0);
  CHECK(grid.r[8] == 0.0);
  CHECK(grid.l[4] == 0.0);
  for (int j = 0; j <= 8; ++j) CHECK(grid.l[j] == -grid.l[8 - j]);
  for (int i = 0; i < 16; ++i)
    CHECK(grid.phi[i] == doctest::Approx(2.0 * kPi * i / 16).epsilon(1e-15));
}

TEST_CASE("grid construction rejects bad shapes") {
  CHECK_THROWS_AS(dbar::make_grid(1, 16), Error);
  CHECK_THROWS_AS(dbar::make_grid(8, 2), Error);
  CHECK_THROWS_AS(dbar::make_grid(8, 15), Error);
  try {
    dbar::make_grid(8, 15);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInvalidArgument);
  }
}

TEST_CASE("mode_of_bin and bin_of_mode invert each other on both ranges") {
  const int nphi = 12;
  for (FourierRange range : {FourierRange::kPsi1, FourierRange::kPsi2}) {
    const int lo = range == FourierRange::kPsi1 ? -nphi / 2 : -nphi / 2 + 1;
    const int hi = range == FourierRange::kPsi1 ? nphi / 2 - 1 : nphi / 2;
    for (int n = lo; n <= hi; ++n) {
      const int bin = dbar::bin_of_mode(range, nphi, n);
      CHECK(bin >= 0);
      CHECK(bin < nphi);
      CHECK(((n % nphi) + nphi) % nphi == bin);
      CHECK(dbar::mode_of_bin(range, nphi, bin) == n);
    }
  }
  // The shared Nyquist bin is the only place the two ranges disagree.
  CHECK(dbar::mode_of_bin(FourierRange::kPsi1, nphi, nphi / 2) == -nphi / 2);
  CHECK(dbar::mode_of_bin(FourierRange::kPsi2, nphi, nphi / 2) == nphi / 2);
  CHECK_THROWS_AS(dbar::mode_of_bin(FourierRange::kPsi1, nphi, nphi), Error);
  CHECK_THROWS_AS(dbar::bin_of_mode(FourierRange::kPsi1, nphi, nphi / 2),
                  Error);
}

TEST_CASE("forward recovers the coefficients of a known smooth function") {
  const Grid grid = dbar::make_grid(10, 16);
  dbar::PhysicalField f = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i) {
    for (int j = 0; j <= grid.nr; ++j) {
      const double l = grid.l[j];
      f.values(j, i) = cheb(3, l) * std::polar(1.0, 2.0 * grid.phi[i]) +
                       0.5 * std::polar(1.0, -grid.phi[i]) -
                       Complex(0.0, 2.0) * cheb(7, l);
    }
  }
  const dbar::SpectralField c = dbar::forward_transform(f, FourierRange::kPsi1);
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(grid.nr + 1, grid.nphi);
  expect(3, dbar::bin_of_mode(FourierRange::kPsi1, 16, 2)) = 1.0;
  expect(0, dbar::bin_of_mode(FourierRange::kPsi1, 16, -1)) = 0.5;
  expect(7, 0) = Complex(0.0, -2.0);
  CHECK((c.coeffs - expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("transforms round-trip random data in both directions") {
  const Grid grid = dbar::make_grid(14, 24);
  const dbar::PhysicalField f = random_field(grid, 7u);
  for (FourierRange range : {FourierRange::kPsi1, FourierRange::kPsi2}) {
    const dbar::SpectralField c = dbar::forward_transform(f, range);
    const dbar::PhysicalField g = dbar::inverse_transform(c);
    CHECK((g.values - f.values).cwiseAbs().maxCoeff() < 1e-13);

    // Spectral -> physical -> spectral as well.
    dbar::SpectralField c2 = c;
    c2.coeffs = dbar::forward_transform(dbar::inverse_transform(c), range).coeffs;
    CHECK((c2.coeffs - c.coeffs).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("forward of a real field has conjugate-symmetric Fourier bins") {
  const Grid grid = dbar::make_grid(9, 20);
  dbar::PhysicalField f = random_field(grid, 11u);
  f.values = f.values.real().cast<Complex>();
  const dbar::SpectralField c = dbar::forward_transform(f, FourierRange::kPsi1);
  for (int bin = 0; bin < grid.nphi; ++bin) {
    const int mirror = (grid.nphi - bin) % grid.nphi;
    CHECK((c.coeffs.col(bin) - c.coeffs.col(mirror).conjugate())
              .cwiseAbs()
              .maxCoeff() < 1e-13);
  }
}

TEST_CASE("rim coefficients match a direct ring analysis of the rim row") {
  const Grid grid = dbar::make_grid(12, 16);
  const dbar::PhysicalField f = random_field(grid, 3u);
  const dbar::SpectralField c = dbar::forward_transform(f, FourierRange::kPsi2);
  const Eigen::VectorXcd rim = dbar::rim_coeffs(c);
  dbar::DiskTransform transform(grid);
  const Eigen::VectorXcd direct =
      transform.analyze_ring(f.values.row(0).transpose());
  CHECK((rim - direct).cwiseAbs().maxCoeff() < 1e-13);

  const Eigen::VectorXcd vals = dbar::rim_values(c);
  CHECK((vals - f.values.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("ring analysis and synthesis invert each other") {
  const Grid grid = dbar::make_grid(4, 32);
  dbar::DiskTransform transform(grid);
  std::mt19937 rng(5u);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  Eigen::VectorXcd bins(grid.nphi);
  for (int i = 0; i < grid.nphi; ++i) bins(i) = Complex(dist(rng), dist(rng));
  const Eigen::VectorXcd values = transform.synthesize_ring(bins);
  CHECK((transform.analyze_ring(values) - bins).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("trailing ratios flag unresolved content and ignore zero fields") {
  const Grid grid = dbar::make_grid(8, 16);
  dbar::SpectralField c = dbar::make_spectral(grid, FourierRange::kPsi1);
  CHECK(dbar::trailing_chebyshev_ratio(c) == 0.0);
  CHECK(dbar::trailing_fourier_ratio(c) == 0.0);

  c.coeffs(2, 1) = 4.0;
  CHECK(dbar::trailing_chebyshev_ratio(c) == 0.0);
  c.coeffs(grid.nr, 3) = 1.0;
  CHECK(dbar::trailing_chebyshev_ratio(c) == doctest::Approx(0.25));
  c.coeffs(1, grid.nphi / 2) = 2.0;
  CHECK(dbar::trailing_fourier_ratio(c) == doctest::Approx(0.5));
}

TEST_CASE("free transform functions are safe to use from several threads") {
  const Grid grid = dbar::make_grid(10, 16);
  std::vector<dbar::PhysicalField> fields;
  for (unsigned t = 0; t < 4; ++t) fields.push_back(random_field(grid, 100 + t));

  std::vector<Eigen::MatrixXcd> serial;
  for (const auto& f : fields)
    serial.push_back(dbar::forward_transform(f, FourierRange::kPsi1).coeffs);

  std::vector<Eigen::MatrixXcd> parallel(4);
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int rep = 0; rep < 20; ++rep)
        parallel[t] =
            dbar::forward_transform(fields[t], FourierRange::kPsi1).coeffs;
    });
  }
  for (auto& th : threads) th.join();
  for (int t = 0; t < 4; ++t)
    CHECK((parallel[t] - serial[t]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("transform rejects mismatched grids") {
  const Grid grid = dbar::make_grid(8, 16);
  dbar::DiskTransform transform(grid);
  const dbar::PhysicalField f = random_field(dbar::make_grid(8, 32), 1u);
  CHECK_THROWS_AS(transform.forward(f, FourierRange::kPsi1), Error);
}

TEST_CASE("chebyshev differentiation matrix is exact on polynomials") {
  const int nr = 12;
  const Eigen::MatrixXd& d = dbar::diff_matrix(nr);
  // r^5: coefficients via the transform of the sampled function.
  const Grid grid = dbar::make_grid(nr, 4);
  dbar::PhysicalField f = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i)
    for (int j = 0; j <= nr; ++j)
      f.values(j, i) = std::pow(grid.r[j], 5);
  const Eigen::VectorXcd a =
      dbar::forward_transform(f, FourierRange::kPsi1).coeffs.col(0);
  const Eigen::VectorXcd da = d.cast<Complex>() * a;
  // Compare 5 r^4 at the nodes.
  for (int j = 0; j <= nr; ++j) {
    Complex v(0.0, 0.0);
    for (int m = 0; m <= nr; ++m) v += da(m) * cheb(m, grid.l[j]);
    CHECK(std::abs(v - 5.0 * std::pow(grid.r[j], 4)) < 1e-12);
  }
}

TEST_CASE("multiplication and division by r are mutually inverse") {
  const int nr = 10;
  const Eigen::MatrixXd& mr = dbar::mult_r_matrix(nr);
  const Eigen::MatrixXd& dr = dbar::div_matrix(nr);
  CHECK((dr * mr - Eigen::MatrixXd::Identity(nr + 1, nr + 1))
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // Structure of mult_r in T_m(2r - 1): tridiagonal with the documented
  // first column exception.
  CHECK(mr(0, 0) == doctest::Approx(0.5));
  CHECK(mr(1, 0) == doctest::Approx(0.5));
  CHECK(mr(0, 1) == doctest::Approx(0.25));
  for (int m = 2; m < nr; ++m) {
    CHECK(mr(m, m) == doctest::Approx(0.5));
    CHECK(mr(m, m - 1) == doctest::Approx(0.25));
    CHECK(mr(m, m + 1) == doctest::Approx(0.25));
  }
}

TEST_CASE("mult_r matches pointwise multiplication on a smooth function") {
  const int nr = 16;
  const Grid grid = dbar::make_grid(nr, 4);
  dbar::PhysicalField f = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i)
    for (int j = 0; j <= nr; ++j)
      f.values(j, i) = std::exp(grid.r[j]) * Complex(1.0, -0.5);
  const Eigen::VectorXcd a =
      dbar::forward_transform(f, FourierRange::kPsi1).coeffs.col(0);
  const Eigen::VectorXcd ra = dbar::mult_r_matrix(nr).cast<Complex>() * a;
  for (int j = 0; j <= nr; ++j) {
    Complex v(0.0, 0.0);
    for (int m = 0; m <= nr; ++m) v += ra(m) * cheb(m, grid.l[j]);
    CHECK(std::abs(v - grid.r[j] * f.values(j, 0)) < 1e-13);
  }
}

TEST_CASE("cheb_mult_matrix realizes a coefficient-space product") {
  const int nr = 12;
  const Grid grid = dbar::make_grid(nr, 4);
  dbar::PhysicalField f = dbar::make_physical(grid);
  dbar::PhysicalField g = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i) {
    for (int j = 0; j <= nr; ++j) {
      // Keep the product inside degree nr so truncation is exact.
      f.values(j, i) = Complex(0.3, 1.0) * std::pow(grid.r[j], 3) + 0.25;
      g.values(j, i) = std::pow(grid.r[j], 2) - Complex(0.0, 0.125);
    }
  }
  const Eigen::VectorXcd fc =
      dbar::forward_transform(f, FourierRange::kPsi1).coeffs.col(0);
  const Eigen::VectorXcd gc =
      dbar::forward_transform(g, FourierRange::kPsi1).coeffs.col(0);
  const Eigen::VectorXcd pc = dbar::cheb_mult_matrix(fc) * gc;
  for (int j = 0; j <= nr; ++j) {
    Complex v(0.0, 0.0);
    for (int m = 0; m <= nr; ++m) v += pc(m) * cheb(m, grid.l[j]);
    CHECK(std::abs(v - f.values(j, 0) * g.values(j, 0)) < 1e-13);
  }
}

TEST_CASE("mode operator is singular exactly when the tau row is needed") {
  // D - n R annihilates r^n; with the rim row appended the system becomes
  // uniquely solvable. Check the kernel vector explicitly for n = 3.
  const int nr = 10;
  const int n = 3;
  const Grid grid = dbar::make_grid(nr, 4);
  dbar::PhysicalField f = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i)
    for (int j = 0; j <= nr; ++j) f.values(j, i) = std::pow(grid.r[j], n);
  const Eigen::VectorXcd rn =
      dbar::forward_transform(f, FourierRange::kPsi1).coeffs.col(0);
  const dbar::ModeOperator op = dbar::mode_operator(n, -1, nr);
  CHECK(op.matrix.rows() == nr + 1);
  CHECK((op.matrix.cast<Complex>() * rn).cwiseAbs().maxCoeff() < 1e-12);

  // The rim functional of the kernel vector is 1, so the bordered system
  // (tau row sum_m a_m) pins it uniquely.
  CHECK(std::abs(rn.sum() - Complex(1.0, 0.0)) < 1e-13);
}

}  // TEST_SUITE
