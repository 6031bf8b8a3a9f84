#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mlhp/runner.hpp"

using namespace mlhp;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

const char* kMinimalM1 = R"(
[measure.1]
interval = -1 1
alpha = -0.5
beta = -0.5
modifier = 1.0
)";

}  // namespace

TEST_CASE("minimal m=1 config fills defaults") {
  RunConfig cfg = parse_config_text(kMinimalM1);
  CHECK(cfg.measures.size() == 1);
  CHECK(cfg.ray_p == std::vector<Real>{1.0});
  CHECK(cfg.k_list.size() == 6);
  CHECK(cfg.grid == 256);
  CHECK(cfg.tol_eq == 1e-12);
  NikishinSystem sys = cfg.build_system();
  CHECK(sys.size() == 1);
}

TEST_CASE("schema errors are aggregated with line references") {
  const char* bad = R"(
[measure.1]
interval = -1 1
alpha = oops
[measure.2]
interval = 0.5 2
beta = -2

[ray]
p = 0.3 0.7
)";
  try {
    parse_config_text(bad, "bad.cfg");
    FAIL("expected schema error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::schema_error);
    std::string what = e.what();
    CHECK(what.find("bad.cfg:4") != std::string::npos);       // alpha = oops
    CHECK(what.find("not consecutive-disjoint") != std::string::npos);
    CHECK(what.find("exceed -1") != std::string::npos);
    CHECK(what.find("ray not nonincreasing") != std::string::npos);
    CHECK(what.find("1 and 2") != std::string::npos);  // names both intervals
  }
}

TEST_CASE("io error for a missing config") {
  CHECK_THROWS_AS(parse_config("/nonexistent/nowhere.cfg"), Error);
}

TEST_CASE("bundled demo configs parse") {
  for (const char* name : {"m1_arcsine.cfg", "m2_cheb.cfg", "m2_legendre.cfg", "m3_chain.cfg"}) {
    RunConfig cfg = parse_config(std::string(MLHP_SOURCE_DIR) + "/configs/" + name);
    CHECK(!cfg.measures.empty());
    NikishinSystem sys = cfg.build_system();
    CHECK(sys.size() == static_cast<int>(cfg.measures.size()));
  }
}

TEST_CASE("unknown command is a usage error") {
  RunConfig cfg = parse_config_text(kMinimalM1);
  cfg.out_dir = (std::filesystem::temp_directory_path() / "mlhp_cli_usage").string();
  CHECK(run_command(cfg, "made-up") == kExitUsage);
}

TEST_CASE("equilibrium command emits artifacts and passes its gates (m=1)") {
  RunConfig cfg = parse_config_text(kMinimalM1);
  cfg.grid = 96;
  cfg.quadrature = 96;
  auto dir = std::filesystem::temp_directory_path() / "mlhp_cli_eq";
  std::filesystem::remove_all(dir);
  cfg.out_dir = dir.string();
  CHECK(run_command(cfg, "equilibrium") == kExitOk);
  CHECK(std::filesystem::exists(dir / "equilibrium_summary.csv"));
  CHECK(std::filesystem::exists(dir / "gates.csv"));
  std::string summary = slurp(dir / "equilibrium_summary.csv");
  // omega = ln 2 for [-1,1]
  CHECK(summary.find("0.69314718055994") != std::string::npos);
}

TEST_CASE("verify runs are byte-identical in CSV bodies") {
  RunConfig cfg = parse_config(std::string(MLHP_SOURCE_DIR) + "/configs/m2_cheb.cfg");
  cfg.grid = 96;
  cfg.quadrature = 96;
  cfg.k_list = {2, 4, 6};
  auto dir1 = std::filesystem::temp_directory_path() / "mlhp_cli_v1";
  auto dir2 = std::filesystem::temp_directory_path() / "mlhp_cli_v2";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  cfg.out_dir = dir1.string();
  int rc1 = run_command(cfg, "verify");
  cfg.out_dir = dir2.string();
  int rc2 = run_command(cfg, "verify");
  CHECK(rc1 == rc2);
  for (const auto& entry : std::filesystem::directory_iterator(dir1)) {
    std::string name = entry.path().filename().string();
    if (name == "run_meta.txt") continue;  // timestamps live here, not in CSVs
    CHECK(slurp(entry.path()) == slurp(dir2 / name));
  }
}
