#pragma once

#include <string>
#include <vector>

#include "dbar/types.hpp"

namespace dbar {

// One fully-specified invocation; the CLI fills this from flags and run()
// executes it. Fields the selected command does not use are ignored.
struct RunConfig {
  std::string command;  // fundamental | cgo | iterate | sweep | selftest

  // Potential selection.
  std::string potential = "characteristic";  // characteristic|radial|sampled
  std::string potential_path;                // sampled file
  std::vector<double> profile;               // radial Chebyshev coefficients
  Complex amplitude{1.0, 0.0};

  // Spectral parameter (single k) or sweep grid on the real axis.
  Complex k{0.0, 0.0};
  double kmin = 1.0;
  double kmax = 100.0;
  int n_samples = 128;

  // Resolution; 0 means the command's default (32/64 for basis work, the
  // |k| policy for iteration).
  int nr = 0;
  int nphi = 0;
  bool autotune = false;

  double tol = 1e-10;
  int max_steps = 100;

  std::string method = "picard";  // sweep solver
  bool with_asym = false;
  bool force_fundamental = false;  // keep cgo on the basis path for |k| > 1

  std::string out_dir = "out";
  int workers = 1;
};

// DBAR_WORKERS environment override; 1 when unset or unusable.
int default_workers();

// "re,im" with a bare real accepted as "re,0"; strict about trailing junk.
Complex parse_complex(const std::string& text);

// Comma-separated doubles, at least one.
std::vector<double> parse_double_list(const std::string& text);

// Executes the configured command, writing all artifacts plus manifest.json
// under config.out_dir. Returns the process exit status; failures emit a
// machine-readable error.json and mirror it to stderr.
int run(const RunConfig& config);

}  // namespace dbar
