#include "dbar/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace dbar {

namespace {

// FFTW's planner mutates global state; serialize plan creation/destruction.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

int mode_of_bin(FourierRange range, int nphi, int bin) {
  require(bin >= 0 && bin < nphi, ErrorKind::kInvalidArgument,
          "mode_of_bin: bin out of range");
  const int half = nphi / 2;
  if (range == FourierRange::kPsi1) {
    return bin < half ? bin : bin - nphi;  // bin nphi/2 -> -nphi/2
  }
  return bin <= half ? bin : bin - nphi;  // bin nphi/2 -> +nphi/2
}

int bin_of_mode(FourierRange range, int nphi, int mode) {
  const int half = nphi / 2;
  const int lo = range == FourierRange::kPsi1 ? -half : -half + 1;
  const int hi = range == FourierRange::kPsi1 ? half - 1 : half;
  require(mode >= lo && mode <= hi, ErrorKind::kInvalidArgument,
          "bin_of_mode: mode outside the truncation range");
  return (mode % nphi + nphi) % nphi;
}

PhysicalField make_physical(const Grid& grid) {
  PhysicalField f;
  f.grid = grid;
  f.values = Eigen::MatrixXcd::Zero(grid.nr + 1, grid.nphi);
  return f;
}

SpectralField make_spectral(const Grid& grid, FourierRange range) {
  SpectralField f;
  f.grid = grid;
  f.range = range;
  f.coeffs = Eigen::MatrixXcd::Zero(grid.nr + 1, grid.nphi);
  return f;
}

struct DiskTransform::Plans {
  fftw_complex* work = nullptr;       // (nr+1) x nphi, column-major
  fftw_complex* ring = nullptr;       // nphi scratch for 1-d ring transforms
  fftw_plan phi_fwd = nullptr;
  fftw_plan phi_bwd = nullptr;
  fftw_plan fct = nullptr;            // REDFT00 along the radial index
  fftw_plan ring_fwd = nullptr;
  fftw_plan ring_bwd = nullptr;
};

DiskTransform::DiskTransform(const Grid& grid) : grid_(grid), plans_(new Plans) {
  const int nr1 = grid.nr + 1;
  const int nphi = grid.nphi;

  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->work = fftw_alloc_complex(static_cast<size_t>(nr1) * nphi);
  plans_->ring = fftw_alloc_complex(nphi);
  require(plans_->work != nullptr && plans_->ring != nullptr, ErrorKind::kResolution,
          "DiskTransform: out of memory for transform buffers");

  // Angular FFTs: for each radial row j, the nphi samples live at stride nr1
  // (column-major storage), and consecutive rows are dist 1 apart.
  int n = nphi;
  plans_->phi_fwd = fftw_plan_many_dft(1, &n, nr1, plans_->work, nullptr, nr1, 1,
                                       plans_->work, nullptr, nr1, 1,
                                       FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->phi_bwd = fftw_plan_many_dft(1, &n, nr1, plans_->work, nullptr, nr1, 1,
                                       plans_->work, nullptr, nr1, 1,
                                       FFTW_BACKWARD, FFTW_ESTIMATE);

  // Radial DCT-I on the real and imaginary parts of every column. Viewed as
  // doubles the radial stride is 2, columns are 2*nr1 apart and the re/im
  // loop has dist 1; the guru interface expresses the two loops directly.
  fftw_iodim dim{nr1, 2, 2};
  fftw_iodim loops[2] = {{nphi, 2 * nr1, 2 * nr1}, {2, 1, 1}};
  fftw_r2r_kind kind = FFTW_REDFT00;
  plans_->fct = fftw_plan_guru_r2r(1, &dim, 2, loops,
                                   reinterpret_cast<double*>(plans_->work),
                                   reinterpret_cast<double*>(plans_->work),
                                   &kind, FFTW_ESTIMATE);

  plans_->ring_fwd = fftw_plan_dft_1d(nphi, plans_->ring, plans_->ring,
                                      FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->ring_bwd = fftw_plan_dft_1d(nphi, plans_->ring, plans_->ring,
                                      FFTW_BACKWARD, FFTW_ESTIMATE);

  require(plans_->phi_fwd && plans_->phi_bwd && plans_->fct && plans_->ring_fwd &&
              plans_->ring_bwd,
          ErrorKind::kResolution, "DiskTransform: FFTW plan creation failed");
}

DiskTransform::~DiskTransform() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->phi_fwd);
  fftw_destroy_plan(plans_->phi_bwd);
  fftw_destroy_plan(plans_->fct);
  fftw_destroy_plan(plans_->ring_fwd);
  fftw_destroy_plan(plans_->ring_bwd);
  fftw_free(plans_->work);
  fftw_free(plans_->ring);
  delete plans_;
}

SpectralField DiskTransform::forward(const PhysicalField& f, FourierRange range) {
  require(same_shape(f.grid, grid_), ErrorKind::kShape,
          "forward_transform: field grid does not match transform grid");
  const int nr = grid_.nr;
  const int nphi = grid_.nphi;
  auto* work = reinterpret_cast<Complex*>(plans_->work);

  Eigen::Map<Eigen::MatrixXcd>(work, nr + 1, nphi) = f.values;
  fftw_execute(plans_->phi_fwd);
  fftw_execute(plans_->fct);

  SpectralField out = make_spectral(grid_, range);
  out.coeffs = Eigen::Map<Eigen::MatrixXcd>(work, nr + 1, nphi);
  // REDFT00 returns X_m = v_0 + (-1)^m v_nr + 2 sum_{0<j<nr} v_j cos(pi j m/nr);
  // interpolation coefficients are X_m / nr, with the first and last halved.
  out.coeffs *= 1.0 / (static_cast<double>(nphi) * nr);
  out.coeffs.row(0) *= 0.5;
  out.coeffs.row(nr) *= 0.5;
  return out;
}

PhysicalField DiskTransform::inverse(const SpectralField& f) {
  require(same_shape(f.grid, grid_), ErrorKind::kShape,
          "inverse_transform: field grid does not match transform grid");
  const int nr = grid_.nr;
  const int nphi = grid_.nphi;
  auto* work = reinterpret_cast<Complex*>(plans_->work);

  // Pre-scale so REDFT00 evaluates sum_m c_m T_m(l_j) exactly.
  Eigen::Map<Eigen::MatrixXcd> m(work, nr + 1, nphi);
  m = f.coeffs;
  m.middleRows(1, nr - 1) *= 0.5;
  fftw_execute(plans_->fct);
  fftw_execute(plans_->phi_bwd);

  PhysicalField out = make_physical(grid_);
  out.values = m;
  return out;
}

Eigen::VectorXcd DiskTransform::synthesize_ring(const Eigen::VectorXcd& bins) {
  require(bins.size() == grid_.nphi, ErrorKind::kShape,
          "synthesize_ring: expected nphi coefficients");
  auto* ring = reinterpret_cast<Complex*>(plans_->ring);
  Eigen::Map<Eigen::VectorXcd>(ring, grid_.nphi) = bins;
  fftw_execute(plans_->ring_bwd);
  return Eigen::Map<Eigen::VectorXcd>(ring, grid_.nphi);
}

Eigen::VectorXcd DiskTransform::analyze_ring(const Eigen::VectorXcd& values) {
  require(values.size() == grid_.nphi, ErrorKind::kShape,
          "analyze_ring: expected nphi samples");
  auto* ring = reinterpret_cast<Complex*>(plans_->ring);
  Eigen::Map<Eigen::VectorXcd>(ring, grid_.nphi) = values;
  fftw_execute(plans_->ring_fwd);
  Eigen::VectorXcd out = Eigen::Map<Eigen::VectorXcd>(ring, grid_.nphi);
  out /= static_cast<double>(grid_.nphi);
  return out;
}

DiskTransform& thread_transform(const Grid& grid) {
  thread_local std::map<std::pair<int, int>, std::unique_ptr<DiskTransform>> cache;
  auto key = std::make_pair(grid.nr, grid.nphi);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<DiskTransform>(grid)).first;
  }
  return *it->second;
}

SpectralField forward_transform(const PhysicalField& f, FourierRange range) {
  return thread_transform(f.grid).forward(f, range);
}

PhysicalField inverse_transform(const SpectralField& f) {
  return thread_transform(f.grid).inverse(f);
}

Eigen::VectorXcd rim_coeffs(const SpectralField& f) {
  return f.coeffs.colwise().sum().transpose();
}

double trailing_chebyshev_ratio(const SpectralField& f) {
  const double scale = f.coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return f.coeffs.row(f.grid.nr).cwiseAbs().maxCoeff() / scale;
}

double trailing_fourier_ratio(const SpectralField& f) {
  const double scale = f.coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return f.coeffs.col(f.grid.nphi / 2).cwiseAbs().maxCoeff() / scale;
}

Eigen::VectorXcd rim_values(const SpectralField& f) {
  return thread_transform(f.grid).synthesize_ring(rim_coeffs(f));
}

}  // namespace dbar
