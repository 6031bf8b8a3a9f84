#pragma once

#include <string>
#include <vector>

#include "mlhp/asymptotics.hpp"

namespace mlhp {

/// One generating measure as read from a config file.
struct MeasureConfig {
  Real a = -1.0, b = 1.0;
  Real alpha = -0.5, beta = -0.5;
  std::vector<Real> modifier = {1.0};  // Chebyshev coefficients on [a,b]
  bool normalized = true;
};

/// Validated run configuration.
struct RunConfig {
  std::vector<MeasureConfig> measures;
  std::vector<Real> ray_p;
  std::vector<int> k_list;
  std::vector<Complex> test_points;  // empty = defaults

  Real tol_eq = 1e-12;
  Real tol_fp = 1e-12;
  int grid = 256;
  int quadrature = 256;
  int max_degree = 24;
  int bio_degree = 8;
  std::string out_dir = ".";

  NikishinSystem build_system() const;
  RaySpec build_ray() const;
  SweepOptions sweep_options() const;
};

/// Parse the key-value config format. Schema errors are aggregated with
/// line references and reported together.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<memory>");

/// Serialize a complex number the way the CLI prints and parses it.
std::string format_complex(Complex z);

}  // namespace mlhp
