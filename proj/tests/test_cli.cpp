#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dbar/io.hpp"
#include "dbar/parallel.hpp"
#include "dbar/runner.hpp"
#include "json.hpp"

#include "doctest.h"

using dbar::Complex;
using dbar::Error;
using dbar::ErrorKind;
using nlohmann::json;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

json load_json(const std::filesystem::path& path) {
  return json::parse(dbar::read_text_file(path.string()));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("complex argument parser") {
  CHECK(dbar::parse_complex("1.5") == Complex(1.5, 0.0));
  CHECK(dbar::parse_complex("2,-3") == Complex(2.0, -3.0));
  CHECK(dbar::parse_complex("-0.25,1e-3") == Complex(-0.25, 1e-3));
  CHECK_THROWS_AS(dbar::parse_complex("1.5x"), Error);
  CHECK_THROWS_AS(dbar::parse_complex(""), Error);
  CHECK_THROWS_AS(dbar::parse_complex("1,2,3"), Error);
  try {
    dbar::parse_complex("nan");
    FAIL("expected rejection of nan");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNonFinite);
  }
}

TEST_CASE("double list parser") {
  CHECK(dbar::parse_double_list("1,2.5,-3e-2") ==
        std::vector<double>{1.0, 2.5, -3e-2});
  CHECK(dbar::parse_double_list("0.5") == std::vector<double>{0.5});
  CHECK_THROWS_AS(dbar::parse_double_list(""), Error);
  CHECK_THROWS_AS(dbar::parse_double_list(",1"), Error);
  CHECK_THROWS_AS(dbar::parse_double_list("1,,2"), Error);
  CHECK_THROWS_AS(dbar::parse_double_list("1,inf"), Error);
}

TEST_CASE("worker count comes from the environment when sane") {
  unsetenv("DBAR_WORKERS");
  CHECK(dbar::default_workers() == 1);
  setenv("DBAR_WORKERS", "3", 1);
  CHECK(dbar::default_workers() == 3);
  setenv("DBAR_WORKERS", "0", 1);
  CHECK(dbar::default_workers() == 1);
  setenv("DBAR_WORKERS", "many", 1);
  CHECK(dbar::default_workers() == 1);
  unsetenv("DBAR_WORKERS");
}

TEST_CASE("17-digit formatting round-trips doubles exactly") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23, 0.0}) {
    const std::string s = dbar::format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}

TEST_CASE("content hashes are stable and consistent") {
  // FNV-1a 64-bit offset basis for empty input.
  CHECK(dbar::fnv1a64_bytes("") == 0xcbf29ce484222325ull);
  const std::string payload = "k_re,k_im\n1,0\n";
  CHECK(dbar::fnv1a64_bytes(payload) ==
        dbar::fnv1a64(payload.data(), payload.size()));
  CHECK(dbar::hash_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(dbar::hash_hex(0x1ull) == "0000000000000001");
}

TEST_CASE("parallel map keeps input order and propagates errors") {
  const auto square = [](int i) { return i * i; };
  const std::vector<int> serial = dbar::parallel_map<int>(100, 1, square);
  const std::vector<int> threaded = dbar::parallel_map<int>(100, 4, square);
  CHECK(serial == threaded);
  for (int i = 0; i < 100; ++i) CHECK(serial[i] == i * i);

  CHECK(dbar::parallel_map<int>(0, 4, square).empty());

  std::atomic<int> calls{0};
  try {
    dbar::parallel_map<int>(50, 4, [&](int i) {
      ++calls;
      if (i == 7) throw std::runtime_error("boom");
      return i;
    });
    FAIL("expected propagation");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "boom");
  }
  CHECK(calls.load() >= 8);
}

TEST_CASE("iterate command writes fields, trace and manifest") {
  const auto dir = temp_dir("dbar_cli_iterate");
  dbar::RunConfig cfg;
  cfg.command = "iterate";
  cfg.k = Complex(0.5, 0.0);
  cfg.nr = 16;
  cfg.nphi = 32;
  cfg.out_dir = dir.string();
  CHECK(dbar::run(cfg) == 0);

  for (const char* name : {"phi1.csv", "phi2.csv", "trace.json",
                           "manifest.json"})
    CHECK(std::filesystem::exists(dir / name));

  const json trace = load_json(dir / "trace.json");
  CHECK(trace["converged"] == true);
  CHECK(trace["nr"] == 16);
  CHECK(trace["k"]["re"] == 0.5);
  CHECK(trace["deltas"].size() == trace["steps"]);
  CHECK(trace["deltas"].back().get<double>() <= 1e-10);

  // Every listed artifact hash must match a fresh hash of the file.
  const json manifest = load_json(dir / "manifest.json");
  CHECK(manifest["command"] == "iterate");
  CHECK(manifest["outputs"].size() >= 3);
  for (const auto& entry : manifest["outputs"]) {
    const std::string file = entry["file"].get<std::string>();
    const std::string body = dbar::read_text_file((dir / file).string());
    CHECK(entry["hash"].get<std::string>() ==
          dbar::hash_hex(dbar::fnv1a64_bytes(body)));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("phi1 dump starts from the leading coefficient") {
  const auto dir = temp_dir("dbar_cli_dump");
  dbar::RunConfig cfg;
  cfg.command = "iterate";
  cfg.k = Complex(0.0, 0.0);
  cfg.potential = "characteristic";
  cfg.amplitude = Complex(0.0, 0.0);
  cfg.nr = 8;
  cfg.nphi = 16;
  cfg.out_dir = dir.string();
  CHECK(dbar::run(cfg) == 0);
  const std::string body = dbar::read_text_file((dir / "phi1.csv").string());
  CHECK(body.rfind("m,n,re,im\n0,0,1,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("failures produce a structured error artifact and exit status 1") {
  const auto dir = temp_dir("dbar_cli_error");
  dbar::RunConfig cfg;
  cfg.command = "cgo";
  cfg.potential = "sampled";  // no file given
  cfg.out_dir = dir.string();
  CHECK(dbar::run(cfg) == 1);
  const json err = load_json(dir / "error.json");
  CHECK(err["error"]["kind"] == "invalid_argument");
  CHECK_FALSE(err["error"]["message"].get<std::string>().empty());
  std::filesystem::remove_all(dir);

  dbar::RunConfig bad;
  bad.command = "unknown";
  bad.out_dir = temp_dir("dbar_cli_unknown").string();
  CHECK(dbar::run(bad) == 1);
  std::filesystem::remove_all(bad.out_dir);
}

TEST_CASE("iteration failures are reported as non-convergence") {
  const auto dir = temp_dir("dbar_cli_nonconv");
  dbar::RunConfig cfg;
  cfg.command = "iterate";
  cfg.k = Complex(1.0, 0.0);
  cfg.nr = 16;
  cfg.nphi = 32;
  cfg.max_steps = 2;
  cfg.out_dir = dir.string();
  CHECK(dbar::run(cfg) == 1);
  const json err = load_json(dir / "error.json");
  CHECK(err["error"]["kind"] == "non_convergence");
  std::filesystem::remove_all(dir);
}

TEST_CASE("sweeps are bitwise identical for any worker count") {
  auto run_sweep = [&](int workers, const std::string& name) {
    const auto dir = temp_dir(name);
    dbar::RunConfig cfg;
    cfg.command = "sweep";
    cfg.method = "fundamental";
    cfg.kmin = 0.2;
    cfg.kmax = 1.0;
    cfg.n_samples = 8;
    cfg.nr = 8;
    cfg.nphi = 16;
    cfg.workers = workers;
    cfg.out_dir = dir.string();
    REQUIRE(dbar::run(cfg) == 0);
    const std::string body = dbar::read_text_file((dir / "sweep.csv").string());
    std::filesystem::remove_all(dir);
    return body;
  };
  const std::string serial = run_sweep(1, "dbar_cli_sweep1");
  const std::string threaded = run_sweep(4, "dbar_cli_sweep4");
  CHECK(serial == threaded);
  CHECK(serial.rfind("k_re,k_im,R_re,R_im,R_asym,residual,steps\n", 0) == 0);
  // Header plus one line per sample.
  CHECK(std::count(serial.begin(), serial.end(), '\n') == 9);
}

TEST_CASE("cgo command records gauge and reflection in its summary") {
  const auto dir = temp_dir("dbar_cli_cgo");
  dbar::RunConfig cfg;
  cfg.command = "cgo";
  cfg.k = Complex(0.5, 0.0);
  cfg.nr = 16;
  cfg.nphi = 32;
  cfg.out_dir = dir.string();
  CHECK(dbar::run(cfg) == 0);
  const json out = load_json(dir / "cgo.json");
  CHECK(out["method"] == "fundamental");
  CHECK(out["gauge"] == "psi");
  const double r_re = out["reflection"]["re"].get<double>();
  CHECK(r_re > 0.5);
  CHECK(r_re < 1.0);
  // gamma is reported for the basis route.
  CHECK(out["gamma"].size() == 32);
  std::filesystem::remove_all(dir);
}

TEST_CASE("selftest command succeeds end to end") {
  const auto dir = temp_dir("dbar_cli_selftest");
  dbar::RunConfig cfg;
  cfg.command = "selftest";
  cfg.out_dir = dir.string();
  CHECK(dbar::run(cfg) == 0);
  const json report = load_json(dir / "selftest.json");
  CHECK(report["pass"] == true);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
