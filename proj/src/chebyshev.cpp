#include "dbar/chebyshev.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>

namespace dbar {
namespace {

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

// c-tilde normalization: 2 at the endpoints of the coefficient range,
// 1 in between. Matches the half-weighting of the first and last rows
// in the DCT-I analysis.
double ctilde(int m, int nr) { return (m == 0 || m == nr) ? 2.0 : 1.0; }

Eigen::MatrixXd build_diff(int nr) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nr + 1, nr + 1);
  for (int m = 0; m <= nr; ++m) {
    for (int alpha = m + 1; alpha <= nr; ++alpha) {
      if ((alpha + m) % 2 == 0) continue;
      // d/dl contribution 2*alpha/ctilde(m), times 2 for dl/dr.
      d(m, alpha) = 2.0 * (2.0 * alpha / ctilde(m, nr));
    }
  }
  return d;
}

Eigen::MatrixXd build_mult_r(int nr) {
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(nr + 1);
  f(0) = Complex(0.5, 0.0);
  f(1) = Complex(0.5, 0.0);
  Eigen::MatrixXcd m = cheb_mult_matrix(f);
  require(m.imag().cwiseAbs().maxCoeff() == 0.0, ErrorKind::kShape,
          "mult_r_matrix: unexpected imaginary part");
  return m.real();
}

Eigen::MatrixXd build_div_r(int nr) {
  // Build a private copy instead of going through mult_r_matrix(); the
  // cached accessors share one mutex and must never nest.
  const Eigen::MatrixXd mr = build_mult_r(nr);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(mr);
  if (lu.rcond() < 1e-14) {
    fail(ErrorKind::kSingular,
         "div_matrix: multiplication-by-r matrix is numerically singular "
         "at nr=" + std::to_string(nr));
  }
  Eigen::MatrixXd inv = lu.inverse();
  double residual =
      (inv * mr - Eigen::MatrixXd::Identity(nr + 1, nr + 1)).cwiseAbs().maxCoeff();
  require(residual < 1e-10, ErrorKind::kSingular,
          "div_matrix: inverse residual too large: " + std::to_string(residual));
  return inv;
}

template <typename Builder>
const Eigen::MatrixXd& cached(std::map<int, std::unique_ptr<Eigen::MatrixXd>>& cache,
                              int nr, Builder builder) {
  std::lock_guard<std::mutex> lock(cache_mutex());
  auto it = cache.find(nr);
  if (it == cache.end()) {
    it = cache.emplace(nr, std::make_unique<Eigen::MatrixXd>(builder(nr))).first;
  }
  return *it->second;
}

}  // namespace

const Eigen::MatrixXd& diff_matrix(int nr) {
  require(nr >= 2, ErrorKind::kInvalidArgument, "diff_matrix: nr must be >= 2");
  static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
  return cached(cache, nr, build_diff);
}

const Eigen::MatrixXd& mult_r_matrix(int nr) {
  require(nr >= 2, ErrorKind::kInvalidArgument, "mult_r_matrix: nr must be >= 2");
  static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
  return cached(cache, nr, build_mult_r);
}

const Eigen::MatrixXd& div_matrix(int nr) {
  require(nr >= 2, ErrorKind::kInvalidArgument, "div_matrix: nr must be >= 2");
  static std::map<int, std::unique_ptr<Eigen::MatrixXd>> cache;
  return cached(cache, nr, build_div_r);
}

Eigen::MatrixXcd cheb_mult_matrix(const Eigen::VectorXcd& f) {
  const int nr = static_cast<int>(f.size()) - 1;
  require(nr >= 1, ErrorKind::kInvalidArgument,
          "cheb_mult_matrix: need at least two coefficients");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(nr + 1, nr + 1);
  // Row 0 (output T_0): T_alpha T_alpha contributes (T_0 + T_{2 alpha})/2,
  // so the T_0 pickup from column alpha is f_alpha / 2 for alpha >= 1.
  m(0, 0) = f(0);
  for (int alpha = 1; alpha <= nr; ++alpha) m(0, alpha) = 0.5 * f(alpha);
  for (int mu = 1; mu <= nr; ++mu) {
    for (int alpha = 0; alpha <= nr; ++alpha) {
      Complex v(0.0, 0.0);
      if (mu + alpha <= nr) v += f(mu + alpha);
      if (alpha <= mu) v += f(mu - alpha);
      if (alpha >= mu) v += f(alpha - mu);
      m(mu, alpha) = 0.5 * v;
    }
  }
  return m;
}

ModeOperator mode_operator(int mode, int sign, int nr) {
  require(sign == 1 || sign == -1, ErrorKind::kInvalidArgument,
          "mode_operator: sign must be +1 or -1");
  ModeOperator op;
  op.mode = mode;
  op.sign = sign;
  op.matrix = diff_matrix(nr) + (sign * mode) * div_matrix(nr);
  return op;
}

}  // namespace dbar
