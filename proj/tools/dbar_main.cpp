#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dbar/runner.hpp"

namespace {

struct TextArgs {
  std::string k = "0";
  std::string amplitude = "1";
  std::string profile;
};

void add_potential_options(CLI::App* sub, dbar::RunConfig& cfg,
                           TextArgs& text) {
  sub->add_option("--potential", cfg.potential,
                  "potential kind: characteristic|radial|sampled");
  sub->add_option("--profile", text.profile,
                  "radial Chebyshev coefficients c0,c1,...");
  sub->add_option("--potential-file", cfg.potential_path,
                  "sampled potential file");
  sub->add_option("--amplitude", text.amplitude, "complex amplitude re[,im]");
}

void add_common_options(CLI::App* sub, dbar::RunConfig& cfg) {
  sub->add_option("--nr", cfg.nr, "radial intervals (0 = default)");
  sub->add_option("--nphi", cfg.nphi, "angular points (0 = default)");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--workers", cfg.workers, "worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for the d-bar system on the unit disk"};
  app.require_subcommand(1);

  dbar::RunConfig cfg;
  cfg.workers = dbar::default_workers();
  TextArgs text;

  CLI::App* fundamental =
      app.add_subcommand("fundamental", "solve the full fundamental basis");
  add_potential_options(fundamental, cfg, text);
  add_common_options(fundamental, cfg);

  CLI::App* cgo =
      app.add_subcommand("cgo", "CGO solution at one spectral parameter");
  add_potential_options(cgo, cfg, text);
  add_common_options(cgo, cfg);
  cgo->add_option("--k", text.k, "spectral parameter re[,im]");
  cgo->add_flag("--autotune", cfg.autotune, "grow the grid until resolved");
  cgo->add_flag("--force-fundamental", cfg.force_fundamental,
                "keep the basis method even for |k| > 1");
  cgo->add_option("--tol", cfg.tol, "iteration tolerance");
  cgo->add_option("--max-steps", cfg.max_steps, "iteration budget");

  CLI::App* iterate =
      app.add_subcommand("iterate", "fixed-point solve at one k");
  add_potential_options(iterate, cfg, text);
  add_common_options(iterate, cfg);
  iterate->add_option("--k", text.k, "spectral parameter re[,im]");
  iterate->add_flag("--autotune", cfg.autotune, "grow the grid until resolved");
  iterate->add_option("--tol", cfg.tol, "iteration tolerance");
  iterate->add_option("--max-steps", cfg.max_steps, "iteration budget");

  CLI::App* sweep =
      app.add_subcommand("sweep", "reflection coefficient over a k grid");
  add_potential_options(sweep, cfg, text);
  add_common_options(sweep, cfg);
  sweep->add_option("--kmin", cfg.kmin, "smallest k (real axis)");
  sweep->add_option("--kmax", cfg.kmax, "largest k (real axis)");
  sweep->add_option("--n", cfg.n_samples, "number of samples");
  sweep->add_option("--method", cfg.method, "fundamental|picard");
  sweep->add_flag("--asym", cfg.with_asym,
                  "record the stationary-phase value per sample");
  sweep->add_option("--tol", cfg.tol, "iteration tolerance");
  sweep->add_option("--max-steps", cfg.max_steps, "iteration budget");

  CLI::App* selftest =
      app.add_subcommand("selftest", "built-in oracle and cross-method checks");
  selftest->add_option("--out", cfg.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  cfg.command = app.get_subcommands().front()->get_name();
  try {
    cfg.k = dbar::parse_complex(text.k);
    cfg.amplitude = dbar::parse_complex(text.amplitude);
    if (!text.profile.empty()) {
      cfg.profile = dbar::parse_double_list(text.profile);
    }
  } catch (const dbar::Error& e) {
    std::cerr << "{\n  \"error\": {\n    \"kind\": \""
              << dbar::error_kind_name(e.kind()) << "\",\n    \"message\": \""
              << e.what() << "\"\n  }\n}\n";
    return 1;
  }
  return dbar::run(cfg);
}
