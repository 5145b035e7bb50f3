#include "dbar/runner.hpp"

#include <fftw3.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <utility>

#include "json.hpp"

#include "dbar/bessel.hpp"
#include "dbar/cgo.hpp"
#include "dbar/fundamental.hpp"
#include "dbar/io.hpp"
#include "dbar/picard.hpp"
#include "dbar/potential.hpp"
#include "dbar/reflection.hpp"

namespace dbar {

namespace {

using nlohmann::json;

json complex_json(Complex z) {
  return json{{"re", z.real()}, {"im", z.imag()}};
}

// Collects written artifacts so the manifest can list them with hashes.
struct OutputLog {
  std::string dir;
  std::vector<std::pair<std::string, std::uint64_t>> files;

  void write(const std::string& name, const std::string& content) {
    write_text_file(dir + "/" + name, content);
    files.emplace_back(name, fnv1a64_bytes(content));
  }
};

Potential build_potential(const RunConfig& c) {
  if (c.potential == "characteristic") {
    return characteristic_potential(c.amplitude);
  }
  if (c.potential == "radial") {
    require(!c.profile.empty(), ErrorKind::kInvalidArgument,
            "radial potential needs --profile coefficients");
    Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(
        c.profile.data(), Eigen::Index(c.profile.size()));
    return radial_potential(p, c.amplitude);
  }
  if (c.potential == "sampled") {
    require(!c.potential_path.empty(), ErrorKind::kInvalidArgument,
            "sampled potential needs --potential-file");
    Potential p = load_sampled(c.potential_path);
    p.amplitude = c.amplitude;
    return p;
  }
  fail(ErrorKind::kInvalidArgument,
       "unknown potential kind '" + c.potential + "'");
}

std::pair<int, int> basis_resolution(const RunConfig& c) {
  const int nr = c.nr > 0 ? c.nr : 32;
  const int nphi = c.nphi > 0 ? c.nphi : 64;
  return {nr, nphi};
}

std::pair<int, int> iterate_resolution(const RunConfig& c, const Potential& q,
                                       Complex k) {
  int nr = c.nr;
  int nphi = c.nphi;
  if (nr <= 0 || nphi <= 0) std::tie(nr, nphi) = resolution_for(std::abs(k));
  if (c.autotune) std::tie(nr, nphi) = autotune_resolution(q, k, nr, nphi);
  return {nr, nphi};
}

json diagnostics_json(const CGODiagnostics& d) {
  return json{{"condition_residual", d.condition_residual},
              {"trailing_cheb", d.trailing_cheb},
              {"trailing_fourier", d.trailing_fourier}};
}

void run_fundamental(const RunConfig& c, OutputLog& log, json& diag) {
  const auto [nr, nphi] = basis_resolution(c);
  const Potential q = build_potential(c);
  const Grid grid = make_grid(nr, nphi);
  const FundamentalBasis basis = solve_basis(sample(q, grid));
  char name[48];
  for (int j = 1; j <= grid.nphi; ++j) {
    std::snprintf(name, sizeof name, "column_%04d_psi1.csv", j);
    log.write(name, coeffs_csv(basis.psi1[std::size_t(j - 1)]));
    std::snprintf(name, sizeof name, "column_%04d_psi2.csv", j);
    log.write(name, coeffs_csv(basis.psi2[std::size_t(j - 1)]));
  }
  diag["nr"] = grid.nr;
  diag["nphi"] = grid.nphi;
  diag["condition_estimate"] = basis.condition_estimate;
  diag["potential_hash"] = hash_hex(basis.potential_hash);
}

void run_cgo(const RunConfig& c, OutputLog& log, json& diag) {
  const Potential q = build_potential(c);
  const bool use_picard = std::abs(c.k) > 1.0 && !c.force_fundamental;
  json out;
  out["k"] = complex_json(c.k);

  if (use_picard) {
    const auto [nr, nphi] = iterate_resolution(c, q, c.k);
    const Grid grid = make_grid(nr, nphi);
    auto [sol, trace] =
        solve_cgo_iterative(q, c.k, grid, c.tol, c.max_steps);
    log.write("phi1.csv", coeffs_csv(sol.field1));
    log.write("phi2.csv", coeffs_csv(sol.field2));
    out["method"] = "picard";
    out["gauge"] = "phi";
    out["nr"] = grid.nr;
    out["nphi"] = grid.nphi;
    out["steps"] = trace.steps;
    out["resolution_ok"] = trace.resolution_ok;
    out["reflection"] = complex_json(sol.reflection);
    out["diagnostics"] = diagnostics_json(sol.diagnostics);
  } else {
    auto [nr, nphi] = basis_resolution(c);
    if (c.autotune) std::tie(nr, nphi) = autotune_resolution(q, c.k, nr, nphi);
    const Grid grid = make_grid(nr, nphi);
    const FundamentalBasis basis = solve_basis(sample(q, grid));
    const CGOConditionMatrix cond = condition_rows(basis, c.k);
    const Eigen::VectorXcd gamma = solve_gamma(cond);
    const CGOSolution sol = assemble_cgo(basis, cond, gamma, Gauge::kPsi);
    log.write("psi1.csv", coeffs_csv(sol.field1));
    log.write("psi2.csv", coeffs_csv(sol.field2));
    out["method"] = "fundamental";
    out["gauge"] = "psi";
    out["nr"] = grid.nr;
    out["nphi"] = grid.nphi;
    out["reflection"] = complex_json(sol.reflection);
    out["condition_estimate"] = basis.condition_estimate;
    out["diagnostics"] = diagnostics_json(sol.diagnostics);
    json g = json::array();
    for (Eigen::Index j = 0; j < gamma.size(); ++j) {
      g.push_back(complex_json(gamma(j)));
    }
    out["gamma"] = std::move(g);
  }
  log.write("cgo.json", out.dump(2) + "\n");
  diag = out;
  diag.erase("gamma");
}

void run_iterate(const RunConfig& c, OutputLog& log, json& diag) {
  const Potential q = build_potential(c);
  const auto [nr, nphi] = iterate_resolution(c, q, c.k);
  const Grid grid = make_grid(nr, nphi);
  auto [sol, trace] = solve_cgo_iterative(q, c.k, grid, c.tol, c.max_steps);
  log.write("phi1.csv", coeffs_csv(sol.field1));
  log.write("phi2.csv", coeffs_csv(sol.field2));

  json tj;
  tj["k"] = complex_json(trace.k);
  tj["nr"] = trace.nr;
  tj["nphi"] = trace.nphi;
  tj["tolerance"] = trace.tolerance;
  tj["steps"] = trace.steps;
  tj["converged"] = trace.converged;
  tj["resolution_ok"] = trace.resolution_ok;
  tj["deltas"] = trace.deltas;
  tj["reflection"] = complex_json(sol.reflection);
  tj["diagnostics"] = diagnostics_json(sol.diagnostics);
  log.write("trace.json", tj.dump(2) + "\n");
  diag = tj;
  diag.erase("deltas");
}

void run_sweep(const RunConfig& c, OutputLog& log, json& diag) {
  require(std::isfinite(c.kmin) && std::isfinite(c.kmax) && c.kmin >= 0.0,
          ErrorKind::kInvalidArgument, "sweep needs 0 <= kmin <= kmax");
  require(c.n_samples >= 1, ErrorKind::kInvalidArgument,
          "sweep needs at least one sample");
  require(c.n_samples == 1 || c.kmax > c.kmin, ErrorKind::kInvalidArgument,
          "sweep needs kmax > kmin for more than one sample");
  const Potential q = build_potential(c);

  std::vector<Complex> ks;
  ks.reserve(std::size_t(c.n_samples));
  for (int i = 0; i < c.n_samples; ++i) {
    const double t =
        c.n_samples == 1 ? 0.0 : double(i) / double(c.n_samples - 1);
    ks.emplace_back(c.kmin + t * (c.kmax - c.kmin), 0.0);
  }

  SweepOptions opts;
  if (c.method == "fundamental") {
    opts.method = SweepMethod::kFundamental;
  } else if (c.method == "picard") {
    opts.method = SweepMethod::kPicard;
  } else {
    fail(ErrorKind::kInvalidArgument,
         "unknown sweep method '" + c.method + "'");
  }
  opts.with_asym = c.with_asym;
  opts.workers = c.workers;
  opts.nr = c.nr;
  opts.nphi = c.nphi;
  opts.tol = c.tol;
  opts.max_steps = c.max_steps;

  const ReflectionSweep sw = sweep(q, ks, opts);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::string csv = "k_re,k_im,R_re,R_im,R_asym,residual,steps\n";
  json errors = json::array();
  int failed = 0;
  for (std::size_t i = 0; i < sw.samples.size(); ++i) {
    const SweepSample& s = sw.samples[i];
    const Complex r = s.ok ? s.reflection : Complex(nan, nan);
    const double asym = s.has_asym ? s.asym : nan;
    const double residual =
        (s.ok && s.has_asym)
            ? std::pow(std::abs(s.k), 2.5) * std::abs(s.reflection - s.asym)
            : nan;
    csv += format_g17(s.k.real()) + "," + format_g17(s.k.imag()) + "," +
           format_g17(r.real()) + "," + format_g17(r.imag()) + "," +
           format_g17(asym) + "," + format_g17(residual) + "," +
           std::to_string(s.steps) + "\n";
    if (!s.ok) {
      ++failed;
      errors.push_back(json{{"index", i},
                            {"k", complex_json(s.k)},
                            {"error", s.error}});
    }
  }
  log.write("sweep.csv", csv);
  diag["method"] = c.method;
  diag["samples"] = int(sw.samples.size());
  diag["failed"] = failed;
  diag["errors"] = std::move(errors);
}

int run_selftest(const RunConfig& c, OutputLog& log, json& diag) {
  (void)c;
  const Grid grid = make_grid(32, 64);
  const Potential one = characteristic_potential();
  const PhysicalField q = sample(one, grid);

  const FundamentalBasis basis = solve_basis(q);
  double bessel_err = 0.0;
  for (int j = 1; j <= grid.nphi; ++j) {
    if (j == grid.nphi / 2 + 1) continue;
    const ExactSolution exact = exact_fundamental(grid, j);
    const PhysicalField got1 = inverse_transform(basis.psi1[std::size_t(j - 1)]);
    const PhysicalField got2 = inverse_transform(basis.psi2[std::size_t(j - 1)]);
    bessel_err = std::max(
        bessel_err,
        (got1.values - exact.psi1.values).cwiseAbs().maxCoeff());
    bessel_err = std::max(
        bessel_err,
        (got2.values - exact.psi2.values).cwiseAbs().maxCoeff());
  }
  const double bessel_tol = 1e-12;
  const bool bessel_pass = bessel_err <= bessel_tol;

  const Complex k(1.0, 0.0);
  const CGOConditionMatrix cond = condition_rows(basis, k);
  const Eigen::VectorXcd gamma = solve_gamma(cond);
  const CGOSolution fund = assemble_cgo(basis, cond, gamma, Gauge::kPhi);
  // Tight tolerance: the comparison against the direct solve should be
  // limited by discretization, not by the iteration stopping rule.
  auto [pic, trace] = solve_cgo_iterative(one, k, grid, 1e-13, 100);
  const double cross_gap =
      (inverse_transform(fund.field1).values -
       inverse_transform(pic.field1).values)
          .cwiseAbs()
          .maxCoeff() +
      (inverse_transform(fund.field2).values -
       inverse_transform(pic.field2).values)
          .cwiseAbs()
          .maxCoeff();
  const double refl_gap = std::abs(fund.reflection - pic.reflection);
  const double quad_gap =
      std::abs(reflection_quadrature(q, pic.field1, k) - pic.reflection);
  const double cross_tol = 1e-11;
  const double refl_tol = 1e-10;
  const bool cross_pass =
      cross_gap <= cross_tol && refl_gap <= refl_tol && quad_gap <= refl_tol;

  std::printf("selftest bessel basis: max error %.3e (tolerance %.0e): %s\n",
              bessel_err, bessel_tol, bessel_pass ? "pass" : "FAIL");
  std::printf(
      "selftest cross-method k=1: field gap %.3e (tolerance %.0e), "
      "reflection gaps %.3e / %.3e (tolerance %.0e): %s\n",
      cross_gap, cross_tol, refl_gap, quad_gap, refl_tol,
      cross_pass ? "pass" : "FAIL");

  json sj;
  sj["bessel_max_error"] = bessel_err;
  sj["bessel_pass"] = bessel_pass;
  sj["cross_field_gap"] = cross_gap;
  sj["reflection_gap"] = refl_gap;
  sj["quadrature_gap"] = quad_gap;
  sj["iteration_steps"] = trace.steps;
  sj["cross_pass"] = cross_pass;
  sj["pass"] = bessel_pass && cross_pass;
  log.write("selftest.json", sj.dump(2) + "\n");
  diag = sj;
  return (bessel_pass && cross_pass) ? 0 : 1;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["potential"] = c.potential;
  j["potential_path"] = c.potential_path;
  j["profile"] = c.profile;
  j["amplitude"] = complex_json(c.amplitude);
  j["k"] = complex_json(c.k);
  j["kmin"] = c.kmin;
  j["kmax"] = c.kmax;
  j["n_samples"] = c.n_samples;
  j["nr"] = c.nr;
  j["nphi"] = c.nphi;
  j["autotune"] = c.autotune;
  j["tol"] = c.tol;
  j["max_steps"] = c.max_steps;
  j["method"] = c.method;
  j["with_asym"] = c.with_asym;
  j["force_fundamental"] = c.force_fundamental;
  j["out_dir"] = c.out_dir;
  return j;
}

int emit_error(const RunConfig& c, const char* kind,
               const std::string& message) {
  json err;
  err["error"] = json{{"kind", kind}, {"message", message}};
  err["command"] = c.command;
  const std::string text = err.dump(2) + "\n";
  std::cerr << text;
  try {
    std::filesystem::create_directories(c.out_dir);
    write_text_file(c.out_dir + "/error.json", text);
  } catch (...) {
    // stderr already carries the record
  }
  return 1;
}

}  // namespace

int default_workers() {
  const char* env = std::getenv("DBAR_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 4096) return 1;
  return int(v);
}

Complex parse_complex(const std::string& text) {
  auto parse_one = [&text](const std::string& part) {
    require(!part.empty(), ErrorKind::kFormat,
            "could not parse '" + text + "' as a complex number");
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    require(end == part.c_str() + part.size(), ErrorKind::kFormat,
            "could not parse '" + text + "' as a complex number");
    require(std::isfinite(v), ErrorKind::kNonFinite,
            "complex component in '" + text + "' is not finite");
    return v;
  };
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos) return {parse_one(text), 0.0};
  return {parse_one(text.substr(0, comma)), parse_one(text.substr(comma + 1))};
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    const std::string part = comma == std::string::npos
                                 ? text.substr(start)
                                 : text.substr(start, comma - start);
    require(!part.empty(), ErrorKind::kFormat,
            "empty entry in list '" + text + "'");
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    require(end == part.c_str() + part.size(), ErrorKind::kFormat,
            "could not parse list entry '" + part + "'");
    require(std::isfinite(v), ErrorKind::kNonFinite,
            "list entry '" + part + "' is not finite");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int run(const RunConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    require(config.workers >= 1, ErrorKind::kInvalidArgument,
            "worker count must be at least 1");
    require(std::isfinite(config.tol) && config.tol > 0.0,
            ErrorKind::kInvalidArgument, "tolerance must be positive");
    require(config.max_steps >= 1, ErrorKind::kInvalidArgument,
            "step budget must be at least 1");
    require(config.nr >= 0 && config.nphi >= 0, ErrorKind::kInvalidArgument,
            "resolution must be nonnegative");
    require(!config.out_dir.empty(), ErrorKind::kInvalidArgument,
            "output directory must be set");
    std::filesystem::create_directories(config.out_dir);

    OutputLog log;
    log.dir = config.out_dir;
    json diag;
    int status = 0;
    if (config.command == "fundamental") {
      run_fundamental(config, log, diag);
    } else if (config.command == "cgo") {
      run_cgo(config, log, diag);
    } else if (config.command == "iterate") {
      run_iterate(config, log, diag);
    } else if (config.command == "sweep") {
      run_sweep(config, log, diag);
    } else if (config.command == "selftest") {
      status = run_selftest(config, log, diag);
    } else {
      fail(ErrorKind::kInvalidArgument,
           "unknown command '" + config.command + "'");
    }

    const auto t1 = std::chrono::steady_clock::now();
    json manifest;
    manifest["command"] = config.command;
    manifest["config"] = config_json(config);
    manifest["workers"] = config.workers;
    manifest["versions"] =
        json{{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                           std::to_string(EIGEN_MAJOR_VERSION) + "." +
                           std::to_string(EIGEN_MINOR_VERSION)},
             {"fftw", std::string(fftw_version)}};
    manifest["timings_ms"] = json{
        {"total",
         std::chrono::duration<double, std::milli>(t1 - t0).count()}};
    manifest["diagnostics"] = diag;
    json outputs = json::array();
    for (const auto& [name, hash] : log.files) {
      outputs.push_back(json{{"file", name}, {"hash", hash_hex(hash)}});
    }
    manifest["outputs"] = std::move(outputs);
    write_text_file(config.out_dir + "/manifest.json",
                    manifest.dump(2) + "\n");
    return status;
  } catch (const Error& e) {
    return emit_error(config, error_kind_name(e.kind()), e.what());
  } catch (const std::exception& e) {
    return emit_error(config, "internal", e.what());
  }
}

}  // namespace dbar
