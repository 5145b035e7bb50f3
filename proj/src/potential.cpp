#include "dbar/potential.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dbar/io.hpp"

namespace dbar {
namespace {

double clenshaw(const Eigen::VectorXd& c, double x) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (int m = static_cast<int>(c.size()) - 1; m >= 1; --m) {
    const double b0 = c(m) + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c(0) + x * b1 - b2;
}

void require_finite_amplitude(Complex amplitude) {
  require(std::isfinite(amplitude.real()) && std::isfinite(amplitude.imag()),
          ErrorKind::kNonFinite, "potential: amplitude must be finite");
}

}  // namespace

Potential characteristic_potential(Complex amplitude) {
  require_finite_amplitude(amplitude);
  Potential p;
  p.kind = PotentialKind::kCharacteristic;
  p.amplitude = amplitude;
  return p;
}

Potential radial_potential(const Eigen::VectorXd& profile, Complex amplitude) {
  require_finite_amplitude(amplitude);
  require(profile.size() >= 1, ErrorKind::kInvalidArgument,
          "radial_potential: profile needs at least one coefficient");
  require(profile.allFinite(), ErrorKind::kNonFinite,
          "radial_potential: profile coefficients must be finite");
  Potential p;
  p.kind = PotentialKind::kRadialProfile;
  p.amplitude = amplitude;
  p.profile = profile;
  return p;
}

Potential sampled_potential(const PhysicalField& samples, Complex amplitude) {
  require_finite_amplitude(amplitude);
  require(samples.values.rows() == samples.grid.nr + 1 &&
              samples.values.cols() == samples.grid.nphi,
          ErrorKind::kShape, "sampled_potential: values do not match grid");
  require(samples.values.allFinite(), ErrorKind::kNonFinite,
          "sampled_potential: samples must be finite");
  Potential p;
  p.kind = PotentialKind::kSampled;
  p.amplitude = amplitude;
  p.samples = samples;
  return p;
}

PhysicalField sample(const Potential& p, const Grid& grid) {
  PhysicalField out = make_physical(grid);
  switch (p.kind) {
    case PotentialKind::kCharacteristic:
      out.values.setConstant(p.amplitude);
      break;
    case PotentialKind::kRadialProfile:
      for (int j = 0; j <= grid.nr; ++j) {
        const double fj = clenshaw(p.profile, grid.l[j]);
        require(std::isfinite(fj), ErrorKind::kNonFinite,
                "sample: radial profile evaluated to a non-finite value");
        out.values.row(j).setConstant(p.amplitude * fj);
      }
      break;
    case PotentialKind::kSampled:
      require(same_shape(p.samples.grid, grid), ErrorKind::kShape,
              "sample: sampled potential was stored on a different grid");
      out.values = p.amplitude * p.samples.values;
      break;
  }
  return out;
}

void save_sampled(const std::string& path, const PhysicalField& field) {
  std::ostringstream os;
  os << "dbar-potential v1 nr=" << field.grid.nr << " nphi=" << field.grid.nphi
     << "\n";
  for (int j = 0; j <= field.grid.nr; ++j) {
    for (int i = 0; i < field.grid.nphi; ++i) {
      const Complex v = field.values(j, i);
      os << j << ',' << i << ',' << format_g17(v.real()) << ','
         << format_g17(v.imag()) << "\n";
    }
  }
  write_text_file(path, os.str());
}

Potential load_sampled(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "load_sampled: cannot open " + path);

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::kFormat,
          "load_sampled: missing header line");
  int nr = 0;
  int nphi = 0;
  require(std::sscanf(line.c_str(), "dbar-potential v1 nr=%d nphi=%d", &nr,
                      &nphi) == 2,
          ErrorKind::kFormat, "load_sampled: unrecognized header: " + line);

  PhysicalField field = make_physical(make_grid(nr, nphi));
  for (int j = 0; j <= nr; ++j) {
    for (int i = 0; i < nphi; ++i) {
      require(static_cast<bool>(std::getline(in, line)), ErrorKind::kShape,
              "load_sampled: file truncated before row " + std::to_string(j) +
                  "," + std::to_string(i));
      int jj = 0;
      int ii = 0;
      double re = 0.0;
      double im = 0.0;
      require(std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &jj, &ii, &re, &im) ==
                  4,
              ErrorKind::kFormat, "load_sampled: malformed row: " + line);
      require(jj == j && ii == i, ErrorKind::kFormat,
              "load_sampled: rows out of order at " + line);
      require(std::isfinite(re) && std::isfinite(im), ErrorKind::kNonFinite,
              "load_sampled: non-finite sample at row " + line);
      field.values(j, i) = Complex(re, im);
    }
  }
  while (std::getline(in, line)) {
    require(line.find_first_not_of(" \t\r") == std::string::npos,
            ErrorKind::kShape, "load_sampled: file longer than declared shape");
  }
  return sampled_potential(field);
}

PhysicalField phase_modulated(const PhysicalField& q, Complex k,
                              ModulationSign sign) {
  PhysicalField out = make_physical(q.grid);
  const double dir = sign == ModulationSign::kForward ? -1.0 : 1.0;
  for (int i = 0; i < q.grid.nphi; ++i) {
    const double c = std::cos(q.grid.phi[i]);
    const double s = std::sin(q.grid.phi[i]);
    for (int j = 0; j <= q.grid.nr; ++j) {
      // conj(k) conj(z) - k z = -2i Im(k z) with z = r e^{i phi}.
      const double im_kz = q.grid.r[j] * (k.real() * s + k.imag() * c);
      out.values(j, i) = q.values(j, i) * std::polar(1.0, dir * 2.0 * im_kz);
    }
  }
  return out;
}

bool resolution_check(const Potential& q, Complex k, int nr, int nphi,
                      double threshold) {
  require(threshold > 0.0, ErrorKind::kInvalidArgument,
          "resolution_check: threshold must be positive");
  const Grid grid = make_grid(nr, nphi);
  const PhysicalField modulated =
      phase_modulated(sample(q, grid), k, ModulationSign::kForward);
  const SpectralField coeffs =
      forward_transform(modulated, FourierRange::kPsi1);
  return trailing_chebyshev_ratio(coeffs) <= threshold &&
         trailing_fourier_ratio(coeffs) <= threshold;
}

std::pair<int, int> autotune_resolution(const Potential& q, Complex k, int nr0,
                                        int nphi0, double threshold,
                                        std::size_t max_field_bytes) {
  int nr = nr0;
  int nphi = nphi0;
  while (true) {
    const std::size_t bytes =
        sizeof(Complex) * static_cast<std::size_t>(nr + 1) * nphi;
    require(bytes <= max_field_bytes, ErrorKind::kResolution,
            "autotune_resolution: memory budget exhausted at nr=" +
                std::to_string(nr) + " nphi=" + std::to_string(nphi));
    if (resolution_check(q, k, nr, nphi, threshold)) return {nr, nphi};
    nphi *= 2;
    nr *= 2;
  }
}

}  // namespace dbar
