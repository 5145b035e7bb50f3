#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include "dbar/io.hpp"
#include "dbar/potential.hpp"
#include "doctest.h"

using dbar::Complex;
using dbar::Error;
using dbar::ErrorKind;
using dbar::Grid;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

dbar::ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kInvalidArgument;
}

double cheb(int m, double l) { return std::cos(m * std::acos(l)); }

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("characteristic potential samples to a constant") {
  const Grid grid = dbar::make_grid(6, 8);
  const dbar::Potential p = dbar::characteristic_potential(Complex(2.0, -0.5));
  const dbar::PhysicalField f = dbar::sample(p, grid);
  CHECK((f.values.array() - Complex(2.0, -0.5)).abs().maxCoeff() == 0.0);
}

TEST_CASE("radial profile evaluates its chebyshev series at the nodes") {
  const Grid grid = dbar::make_grid(10, 8);
  Eigen::VectorXd profile(3);
  profile << 0.5, -1.0, 0.25;
  const dbar::Potential p = dbar::radial_potential(profile, Complex(0.0, 3.0));
  const dbar::PhysicalField f = dbar::sample(p, grid);
  for (int j = 0; j <= grid.nr; ++j) {
    double v = 0.0;
    for (int m = 0; m < profile.size(); ++m)
      v += profile(m) * cheb(m, grid.l[j]);
    for (int i = 0; i < grid.nphi; ++i)
      CHECK(std::abs(f.values(j, i) - Complex(0.0, 3.0) * v) <= 1e-14);
  }
}

TEST_CASE("potential constructors validate their inputs") {
  CHECK(kind_of([] {
          dbar::characteristic_potential(
              Complex(std::nan(""), 0.0));
        }) == ErrorKind::kNonFinite);
  CHECK(kind_of([] { dbar::radial_potential(Eigen::VectorXd()); }) ==
        ErrorKind::kInvalidArgument);
  Eigen::VectorXd bad(2);
  bad << 1.0, std::numeric_limits<double>::infinity();
  CHECK(kind_of([&] { dbar::radial_potential(bad); }) == ErrorKind::kNonFinite);
}

TEST_CASE("sampled potentials only admit their own grid") {
  const Grid grid = dbar::make_grid(6, 8);
  dbar::PhysicalField f = dbar::make_physical(grid);
  f.values.setConstant(Complex(1.0, 1.0));
  const dbar::Potential p = dbar::sampled_potential(f);
  CHECK_NOTHROW(dbar::sample(p, grid));
  CHECK(kind_of([&] { dbar::sample(p, dbar::make_grid(6, 16)); }) ==
        ErrorKind::kShape);
}

TEST_CASE("save and load round-trip sampled values exactly") {
  const Grid grid = dbar::make_grid(5, 8);
  dbar::PhysicalField f = dbar::make_physical(grid);
  std::mt19937 rng(17u);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int i = 0; i < grid.nphi; ++i)
    for (int j = 0; j <= grid.nr; ++j)
      f.values(j, i) = Complex(dist(rng), dist(rng));

  const std::string path = temp_path("dbar_pot_roundtrip.csv");
  dbar::save_sampled(path, f);
  const dbar::Potential p = dbar::load_sampled(path);
  const dbar::PhysicalField g = dbar::sample(p, grid);
  // 17-digit decimal dumps reparse to the identical binary64 values.
  CHECK((g.values - f.values).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}

TEST_CASE("loader rejects each malformed input with the right kind") {
  const Grid grid = dbar::make_grid(2, 4);
  dbar::PhysicalField f = dbar::make_physical(grid);
  f.values.setConstant(Complex(1.0, 0.0));
  const std::string good = temp_path("dbar_pot_good.csv");
  dbar::save_sampled(good, f);
  const std::string text = dbar::read_text_file(good);

  auto write_variant = [&](const std::string& name, const std::string& body) {
    const std::string path = temp_path(name);
    dbar::write_text_file(path, body);
    return path;
  };

  CHECK(kind_of([&] { dbar::load_sampled(temp_path("missing_file.csv")); }) ==
        ErrorKind::kIo);

  const std::string bad_header =
      write_variant("dbar_pot_header.csv", "potential nr=2 nphi=4\n");
  CHECK(kind_of([&] { dbar::load_sampled(bad_header); }) == ErrorKind::kFormat);

  // Drop the last line: fewer rows than the header promised.
  std::string truncated = text;
  truncated.erase(truncated.find_last_of('\n', truncated.size() - 2) + 1);
  const std::string short_file = write_variant("dbar_pot_short.csv", truncated);
  CHECK(kind_of([&] { dbar::load_sampled(short_file); }) == ErrorKind::kShape);

  std::string junk = text;
  junk.replace(junk.find("0,0,"), 4, "0,x,");
  const std::string bad_row = write_variant("dbar_pot_row.csv", junk);
  CHECK(kind_of([&] { dbar::load_sampled(bad_row); }) == ErrorKind::kFormat);

  std::string nonfinite = text;
  nonfinite.replace(nonfinite.find("0,0,1,0"), 7, "0,0,nan,0");
  const std::string bad_value = write_variant("dbar_pot_nan.csv", nonfinite);
  CHECK(kind_of([&] { dbar::load_sampled(bad_value); }) ==
        ErrorKind::kNonFinite);

  const std::string trailing =
      write_variant("dbar_pot_trailing.csv", text + "0,0,1,0\n");
  CHECK(kind_of([&] { dbar::load_sampled(trailing); }) == ErrorKind::kShape);

  for (const std::string& p : {good, bad_header, short_file, bad_row,
                               bad_value, trailing})
    std::remove(p.c_str());
}

TEST_CASE("phase modulation is a pure phase and inverts cleanly") {
  const Grid grid = dbar::make_grid(8, 16);
  dbar::PhysicalField q = dbar::make_physical(grid);
  for (int i = 0; i < grid.nphi; ++i)
    for (int j = 0; j <= grid.nr; ++j)
      q.values(j, i) = Complex(1.5, -0.25) * (1.0 - grid.r[j] * grid.r[j]);

  const Complex k(2.0, 1.0);
  const dbar::PhysicalField fwd =
      dbar::phase_modulated(q, k, dbar::ModulationSign::kForward);
  const dbar::PhysicalField bwd =
      dbar::phase_modulated(q, k, dbar::ModulationSign::kBackward);
  for (int i = 0; i < grid.nphi; ++i) {
    for (int j = 0; j <= grid.nr; ++j) {
      CHECK(std::abs(std::abs(fwd.values(j, i)) - std::abs(q.values(j, i))) <=
            1e-14);
      // Forward and backward phases cancel exactly.
      CHECK(std::abs(fwd.values(j, i) * bwd.values(j, i) -
                     q.values(j, i) * q.values(j, i)) <= 1e-13);
      // Hand-evaluated exponent at this node.
      const Complex z = grid.r[j] * std::polar(1.0, grid.phi[i]);
      const Complex expo = std::conj(k) * std::conj(z) - k * z;
      CHECK(std::abs(fwd.values(j, i) - q.values(j, i) * std::exp(expo)) <=
            1e-13);
    }
  }

  // k = 0 leaves the samples untouched.
  const dbar::PhysicalField id =
      dbar::phase_modulated(q, Complex(0.0, 0.0),
                            dbar::ModulationSign::kForward);
  CHECK((id.values - q.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("resolution check accepts resolved and flags unresolved settings") {
  const dbar::Potential one = dbar::characteristic_potential();
  CHECK(dbar::resolution_check(one, Complex(0.0, 0.0), 32, 64));
  CHECK(dbar::resolution_check(one, Complex(1.0, 0.0), 32, 64));
  // 2|k| well beyond the angular truncation.
  CHECK_FALSE(dbar::resolution_check(one, Complex(40.0, 0.0), 32, 64));
  CHECK(kind_of([&] {
          dbar::resolution_check(one, Complex(1.0, 0.0), 32, 64, 0.0);
        }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("autotune doubles the shape until the check passes") {
  const dbar::Potential one = dbar::characteristic_potential();
  const auto [nr, nphi] =
      dbar::autotune_resolution(one, Complex(12.0, 0.0), 32, 64);
  CHECK(nphi == 128);
  CHECK(nr == 64);
  CHECK(dbar::resolution_check(one, Complex(12.0, 0.0), nr, nphi));

  // An impossible byte budget turns into a resolution error.
  CHECK(kind_of([&] {
          dbar::autotune_resolution(one, Complex(50.0, 0.0), 32, 64, 1e-13,
                                    1024);
        }) == ErrorKind::kResolution);
}

}  // TEST_SUITE
