#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "volterra/cli.hpp"
#include "volterra/config.hpp"
#include "volterra/error.hpp"

using namespace volterra;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vldp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

const char* kBase = R"({
  "model": {"kernel": {"family": "fbm", "H": 0.3}, "sigma": {"family": "constant", "sigma0": 0.2}},
  "rate_function": {"x": [0.1, -0.05], "n": 16, "perturbations": 1},
  "mc_verify": {"y": 0.1, "eps": [0.3, 0.5, 0.8], "paths": 6000, "n_steps": 8},
  "simulate": {"paths": 2, "n_steps": 4},
  "eigen": {"n": 32, "count": 4}
})";

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults and nested fields") {
    const auto c = parse_config(kBase);
    CHECK(c.model.kernel.family == KernelFamily::fbm);
    CHECK(c.model.H == doctest::Approx(0.3));
    CHECK(c.model.kernel.horizon == 1.0);
    CHECK(c.rate_function.solver.n == 16);
    CHECK(c.mc_verify.eps.size() == 3);
    CHECK(c.seed == 1);
    CHECK(c.kernel_check.h_grid.size() == 7);
  }

  TEST_CASE("errors name the field path") {
    CHECK(config_error(R"({"model": {"rho": 1.5}})").find("model.rho") != std::string::npos);
    CHECK(config_error(R"({"model": {"kernel": {"family": "fbm", "H": 1.2}}})").find("model.kernel.H") !=
          std::string::npos);
    CHECK(config_error(R"({"model": {"sigma": {"sigma0": "x"}}})") == "model.sigma.sigma0: expected a number");
    CHECK(config_error(R"({"mc_verify": {"eps": [0.1, "a"]}})") == "mc_verify.eps[1]: expected a number");
    CHECK(config_error(R"({"modle": {}})") == "modle: unknown field");
    CHECK(config_error(R"({"simulate": {"paths": -3}})") == "simulate.paths: expected a non-negative integer");
    CHECK(config_error("{not json").find("not valid JSON") != std::string::npos);
    CHECK(config_error(R"({"smile": {"regime": "large_time"}})").find("regime") != std::string::npos);
  }

  TEST_CASE("overrides") {
    const auto c = parse_config(kBase, {"model.rho=0.25", "seed=99", "model.sigma.family=\"shifted_abs\"",
                                        "model.kernel.family=riemann_liouville"});
    CHECK(c.model.rho == 0.25);
    CHECK(c.seed == 99);
    CHECK(c.rate_function.solver.seed == 99);
    CHECK(c.model.sigma.family == SigmaFamily::shifted_abs);
    CHECK(c.model.kernel.family == KernelFamily::riemann_liouville);
    CHECK(config_error(kBase, {"model.rho"}).find("path=value") != std::string::npos);
    CHECK(config_error(kBase, {"model.kernel=[1]"}).find("scalar") != std::string::npos);
  }

  TEST_CASE("hash follows content") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(parse_config(kBase).canonical == parse_config(kBase).canonical);
    CHECK(parse_config(kBase).canonical != parse_config(kBase, {"seed=2"}).canonical);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("every command writes its CSV and a manifest") {
    const std::vector<std::pair<std::string, std::string>> expected = {
        {"kernel-check", "quantity,value"},
        {"rate-function", "x,I,converged,starts,n,value_at_2n"},
        {"mc-verify", "eps,prob,se,scaled_log,theory_I,slope"},
        {"simulate", "path,t,W,B,Bhat"},
        {"eigen", "k,lambda"}};
    const std::vector<std::string> files = {"kernel_check.csv", "rate_function.csv", "mc_verify.csv", "paths.csv",
                                            "eigen.csv"};
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const auto dir = scratch(expected[i].first);
      auto cfg = parse_config(kBase, {"out=\"" + dir.string() + "\""});
      cfg.kernel_check.grid = 4;
      std::ostringstream log;
      cli::run_command(expected[i].first, cfg, log);
      const std::string csv = slurp(dir / files[i]);
      CHECK(csv.rfind(expected[i].second + "\n", 0) == 0);
      const std::string manifest = slurp(dir / "run.manifest");
      CHECK(manifest.find("\"config_hash\": \"fnv1a64:") != std::string::npos);
      CHECK(manifest.find("\"wall_time_s\"") != std::string::npos);
    }
  }

  TEST_CASE("identical config and seed give identical bytes at any thread count") {
    const auto d1 = scratch("repro1"), d2 = scratch("repro2");
    auto c1 = parse_config(kBase, {"out=\"" + d1.string() + "\""});
    auto c2 = parse_config(kBase, {"out=\"" + d2.string() + "\""});
    c1.threads = 1;
    c2.threads = 5;
    std::ostringstream log;
    for (const char* cmd : {"mc-verify", "simulate"}) {
      cli::run_command(cmd, c1, log);
      cli::run_command(cmd, c2, log);
    }
    CHECK(slurp(d1 / "mc_verify.csv") == slurp(d2 / "mc_verify.csv"));
    CHECK(slurp(d1 / "paths.csv") == slurp(d2 / "paths.csv"));
  }

  TEST_CASE("gate refusal and unknown commands") {
    const auto dir = scratch("gate");
    auto cfg = parse_config(R"({"model": {"kernel": {"family": "fractional_ou", "H": 0.3}},
                                "smalltime_verify": {"t": [0.1, 0.2], "paths": 100}})",
                            {"out=\"" + dir.string() + "\""});
    std::ostringstream log;
    CHECK_THROWS_AS(cli::run_command("smalltime-verify", cfg, log), GateError);
    CHECK_THROWS_AS(cli::run_command("fly", cfg, log), ConfigError);
    CHECK(exit_code(ErrorKind::gate) == 4);
    CHECK(exit_code(ErrorKind::numerical) == 3);
    CHECK(exit_code(ErrorKind::config) == 2);
  }
}
