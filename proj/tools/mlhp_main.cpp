#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "mlhp/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nikishin systems, multi-level Hermite-Pade polynomials and their asymptotics"};
  app.failure_message(CLI::FailureMessage::help);

  std::string command;
  std::string config_path;
  std::string out_dir;
  double tol_eq = -1.0, tol_fp = -1.0;
  int grid = -1, max_degree = -1;
  std::string points;

  app.add_option("command", command,
                 "one of: equilibrium, szego-fixed-point, hp-solve, verify, biorthogonal, all")
      ->required();
  app.add_option("--config", config_path, "configuration file")->required();
  app.add_option("--out", out_dir, "output directory for CSV artifacts");
  app.add_option("--tol-eq", tol_eq, "equilibrium solver tolerance");
  app.add_option("--tol-fp", tol_fp, "Szego fixed-point tolerance");
  app.add_option("--grid", grid, "Chebyshev grid size per interval");
  app.add_option("--max-degree", max_degree, "degree cap for |n|");
  app.add_option("--points", points, "test points, 're,im' pairs separated by ';'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return mlhp::kExitUsage;
  }

  try {
    mlhp::RunConfig cfg = mlhp::parse_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (tol_eq > 0) cfg.tol_eq = tol_eq;
    if (tol_fp > 0) cfg.tol_fp = tol_fp;
    if (grid > 0) cfg.grid = grid;
    if (max_degree > 0) cfg.max_degree = max_degree;
    if (!points.empty()) {
      cfg.test_points.clear();
      std::string spec = points;
      for (char& c : spec)
        if (c == ';') c = ' ';
      std::istringstream is(spec);
      std::string tok;
      while (is >> tok) {
        size_t comma = tok.find(',');
        if (comma == std::string::npos) {
          std::fprintf(stderr, "bad --points entry '%s' (need re,im)\n", tok.c_str());
          return mlhp::kExitUsage;
        }
        cfg.test_points.push_back(
            mlhp::Complex(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1))));
      }
    }
    int code = mlhp::run_command(cfg, command);
    if (code == mlhp::kExitUsage) std::fprintf(stderr, "unknown command '%s'\n", command.c_str());
    return code;
  } catch (const mlhp::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    if (e.code() == mlhp::errc::schema_error || e.code() == mlhp::errc::io_error)
      return mlhp::kExitConfig;
    return mlhp::kExitNumeric;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return mlhp::kExitNumeric;
  }
}
