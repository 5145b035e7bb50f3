#include "dbar/bessel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace dbar {
namespace {

// Largest order served; covers every basis column up to nphi = 1024.
constexpr int kMaxOrder = 514;

// The hypergeometric tail sum_{m>=0} t_m with t_0 = 1 and
// t_{m+1} = t_m * u / ((m+1)(n+m+1)), where u = (x/2)^2. This is
// I_n(x) divided by its leading term (x/2)^n / n!. Terms below 1e-18
// relative cannot change the rounded sum, so the early exit is exact.
double bessel_tail(int n, double u, int max_terms) {
  double sum = 1.0;
  double term = 1.0;
  for (int m = 0; m < max_terms; ++m) {
    term *= u / ((m + 1.0) * (n + m + 1.0));
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

int checked_order(int n) {
  n = std::abs(n);
  require(n <= kMaxOrder, ErrorKind::kInvalidArgument,
          "besseli: order " + std::to_string(n) + " exceeds the cap " +
              std::to_string(kMaxOrder));
  return n;
}

// I_a(r) / I_b(1) for nearby orders, without forming either value, so the
// (1/2)^n / n! underflow at high order cancels analytically.
double bessel_shifted_ratio(int a, int b, double r) {
  const int big_a = checked_order(a);
  const int big_b = checked_order(b);
  double factor = std::pow(r, big_a) * std::pow(0.5, big_a - big_b);
  for (int m = big_b + 1; m <= big_a; ++m) factor /= m;
  for (int m = big_a + 1; m <= big_b; ++m) factor *= m;
  return factor * bessel_tail(big_a, 0.25 * r * r, 16) /
         bessel_tail(big_b, 0.25, 16);
}

}  // namespace

double besseli(int n, double x, int max_terms) {
  require(x >= 0.0 && x <= 4.0, ErrorKind::kInvalidArgument,
          "besseli: series evaluation restricted to 0 <= x <= 4, got " +
              std::to_string(x));
  require(max_terms >= 1, ErrorKind::kInvalidArgument,
          "besseli: max_terms must be positive");
  n = checked_order(n);
  const double half = 0.5 * x;
  // Leading term (x/2)^n / n!, built incrementally to delay underflow.
  double lead = 1.0;
  for (int m = 1; m <= n; ++m) lead *= half / m;
  if (lead == 0.0) return 0.0;
  return lead * bessel_tail(n, half * half, max_terms);
}

double besseli_ratio(int n, double r) {
  require(r >= 0.0 && r <= 1.0, ErrorKind::kInvalidArgument,
          "besseli_ratio: r must lie in [0, 1]");
  n = checked_order(n);
  // I_n(r)/I_n(1) = r^n * tail(r) / tail(1); the common (1/2)^n / n!
  // prefactor cancels exactly.
  return std::pow(r, n) * bessel_tail(n, 0.25 * r * r, 16) /
         bessel_tail(n, 0.25, 16);
}

ExactSolution exact_fundamental(const Grid& grid, int j) {
  const int nphi = grid.nphi;
  require(j >= 1 && j <= nphi, ErrorKind::kInvalidArgument,
          "exact_fundamental: column index out of range");

  // Modes (nu1, nu2) of psi1 and psi2 and the normalizing order n0, so that
  //   psi1 = I_{nu1}(r)/I_{n0}(1) e^{i nu1 phi},
  //   psi2 = I_{nu2}(r)/I_{n0}(1) e^{i nu2 phi}.
  int nu1 = 0;
  int nu2 = 0;
  int n0 = 0;
  if (j <= nphi / 2) {
    nu1 = j - 1;
    nu2 = j;
    n0 = nu1;
  } else {
    const int mode = (j == nphi / 2 + 1) ? 0 : j - 1 - nphi;
    nu1 = mode - 1;
    nu2 = mode;
    n0 = mode;
  }

  ExactSolution out;
  out.psi1 = make_physical(grid);
  out.psi2 = make_physical(grid);
  for (int row = 0; row <= grid.nr; ++row) {
    const double f1 = bessel_shifted_ratio(nu1, n0, grid.r[row]);
    const double f2 = bessel_shifted_ratio(nu2, n0, grid.r[row]);
    for (int col = 0; col < nphi; ++col) {
      const double phi = grid.phi[col];
      out.psi1.values(row, col) = f1 * std::polar(1.0, nu1 * phi);
      out.psi2.values(row, col) = f2 * std::polar(1.0, nu2 * phi);
    }
  }
  return out;
}

}  // namespace dbar
