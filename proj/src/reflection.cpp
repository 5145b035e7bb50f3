#include "dbar/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dbar/parallel.hpp"

namespace dbar {

namespace {

constexpr double kPi = std::numbers::pi;

std::string describe(const Error& e) {
  return std::string(error_kind_name(e.kind())) + ": " + e.what();
}

// Exact value of int_{-1}^{1} T_j(l) dl.
double chebyshev_line_moment(int j) {
  if (j % 2 != 0) return 0.0;
  return 2.0 / (1.0 - double(j) * double(j));
}

// Exact value of int_0^1 T_m(2r - 1) r dr via r = (1 + l)/2.
double chebyshev_disk_moment(int m) {
  const double plain = chebyshev_line_moment(m);
  const double tilted = 0.5 * (chebyshev_line_moment(m + 1) +
                               chebyshev_line_moment(std::abs(m - 1)));
  return 0.25 * (plain + tilted);
}

}  // namespace

double r_asym(double k) {
  require(std::isfinite(k) && k > 0.0, ErrorKind::kInvalidArgument,
          "asymptotic reflection law needs real k > 0");
  return std::cos(2.0 * k - 0.75 * kPi) / std::sqrt(kPi * k * k * k);
}

std::pair<int, int> resolution_for(double abs_k) {
  require(std::isfinite(abs_k) && abs_k >= 0.0, ErrorKind::kInvalidArgument,
          "resolution policy needs a finite |k|");
  const double target = 4.6 * abs_k + 64.0;
  const int nphi =
      std::max(64, 64 * int(std::ceil(target / 64.0)));
  const int nr = std::max(32, 8 * int(std::ceil(double(nphi) / 24.0)));
  return {nr, nphi};
}

ReflectionSweep sweep(const Potential& q, const std::vector<Complex>& ks,
                      const SweepOptions& options) {
  require(!ks.empty(), ErrorKind::kInvalidArgument, "empty k grid");
  require(options.workers >= 1, ErrorKind::kInvalidArgument,
          "worker count must be at least 1");
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    require(std::abs(ks[i]) < std::abs(ks[i + 1]), ErrorKind::kInvalidArgument,
            "sweep k values must be strictly increasing in modulus");
  }

  const bool fundamental = options.method == SweepMethod::kFundamental;

  // The fundamental method pays for one factorization and reuses it; the
  // per-k condition systems are small.
  FundamentalBasis basis;
  if (fundamental) {
    const int nr = options.nr > 0 ? options.nr : 32;
    const int nphi = options.nphi > 0 ? options.nphi : 64;
    basis = solve_basis(sample(q, make_grid(nr, nphi)));
  }

  auto solve_one = [&](int i) -> SweepSample {
    SweepSample out;
    out.k = ks[std::size_t(i)];
    out.method = options.method;
    if (options.with_asym && out.k.imag() == 0.0 && out.k.real() > 0.0) {
      out.asym = r_asym(out.k.real());
      out.has_asym = true;
    }
    try {
      if (fundamental) {
        out.nr = basis.grid.nr;
        out.nphi = basis.grid.nphi;
        const CGOConditionMatrix cond = condition_rows(basis, out.k);
        const Eigen::VectorXcd gamma = solve_gamma(cond);
        out.reflection = reflection_from_conditions(cond, gamma);
      } else {
        int nr = options.nr;
        int nphi = options.nphi;
        if (nr <= 0 || nphi <= 0) {
          std::tie(nr, nphi) = resolution_for(std::abs(out.k));
        }
        out.nr = nr;
        out.nphi = nphi;
        const Grid grid = make_grid(nr, nphi);
        auto [sol, trace] = solve_cgo_iterative(q, out.k, grid, options.tol,
                                                options.max_steps);
        out.reflection = sol.reflection;
        out.steps = trace.steps;
      }
      out.ok = true;
    } catch (const Error& e) {
      out.error = describe(e);
    }
    return out;
  };

  ReflectionSweep result;
  result.samples =
      parallel_map<SweepSample>(int(ks.size()), options.workers, solve_one);
  return result;
}

std::vector<AsymRow> compare_asym(const ReflectionSweep& sweep) {
  std::vector<AsymRow> rows;
  rows.reserve(sweep.samples.size());
  for (const SweepSample& s : sweep.samples) {
    if (!s.ok || !s.has_asym) continue;
    AsymRow row;
    row.k = s.k;
    row.reflection = s.reflection;
    row.asym = s.asym;
    row.residual = std::pow(std::abs(s.k), 2.5) *
                   std::abs(s.reflection - Complex(s.asym, 0.0));
    rows.push_back(row);
  }
  return rows;
}

double linear_fit_slope(const std::vector<double>& x,
                        const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorKind::kInvalidArgument,
          "slope fit needs at least two points");
  const double n = double(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  require(sxx > 0.0, ErrorKind::kInvalidArgument,
          "slope fit needs distinct abscissae");
  return sxy / sxx;
}

double envelope_slope(const ReflectionSweep& sweep) {
  std::vector<double> abs_k;
  std::vector<double> abs_r;
  for (const SweepSample& s : sweep.samples) {
    if (!s.ok) continue;
    abs_k.push_back(std::abs(s.k));
    abs_r.push_back(std::abs(s.reflection));
  }
  std::vector<double> log_k;
  std::vector<double> log_r;
  for (std::size_t i = 1; i + 1 < abs_r.size(); ++i) {
    const bool peak = abs_r[i] > abs_r[i - 1] && abs_r[i] > abs_r[i + 1];
    if (!peak || abs_r[i] <= 0.0) continue;
    log_k.push_back(std::log(abs_k[i]));
    log_r.push_back(std::log(abs_r[i]));
  }
  require(log_k.size() >= 3, ErrorKind::kInvalidArgument,
          "envelope fit needs at least three peaks");
  return linear_fit_slope(log_k, log_r);
}

Complex disk_integral(const PhysicalField& f) {
  const SpectralField fh = forward_transform(f, FourierRange::kPsi1);
  Complex sum(0.0, 0.0);
  for (int m = 0; m <= f.grid.nr; ++m) {
    sum += chebyshev_disk_moment(m) * fh.coeffs(m, 0);
  }
  return 2.0 * kPi * sum;
}

Complex reflection_quadrature(const PhysicalField& q,
                              const SpectralField& phi1, Complex k) {
  require(same_shape(q.grid, phi1.grid), ErrorKind::kShape,
          "potential and solution grids do not match");
  require(phi1.range == FourierRange::kPsi1, ErrorKind::kInvalidArgument,
          "quadrature reads the first component's Fourier range");
  PhysicalField qbar = q;
  qbar.values = q.values.conjugate();
  PhysicalField integrand = phase_modulated(qbar, k, ModulationSign::kBackward);
  integrand.values =
      integrand.values.cwiseProduct(inverse_transform(phi1).values);
  return std::conj(disk_integral(integrand) / kPi);
}

}  // namespace dbar
