#include "mlhp/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mlhp {

NikishinSystem RunConfig::build_system() const {
  std::vector<MeasureSpec> gens;
  for (const MeasureConfig& mc : measures) {
    Interval iv(mc.a, mc.b);
    gens.push_back(MeasureSpec(iv, mc.alpha, mc.beta, ChebSeries(iv, mc.modifier), mc.normalized));
  }
  return NikishinSystem(std::move(gens), quadrature);
}

RaySpec RunConfig::build_ray() const { return RaySpec::create(ray_p); }

SweepOptions RunConfig::sweep_options() const {
  SweepOptions opt;
  opt.test_points = test_points;
  opt.tol_eq = tol_eq;
  opt.tol_fp = tol_fp;
  opt.grid_n = grid;
  opt.hp.degree_cap = max_degree;
  return opt;
}

std::string format_complex(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.17g,%.17g", z.real(), z.imag());
  return buf;
}

namespace {

struct Line {
  int number;
  std::string section;
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ConfigReader {
 public:
  explicit ConfigReader(const std::string& origin) : origin_(origin) {}

  void error(int line, const std::string& what) {
    std::ostringstream os;
    os << origin_ << ":" << line << ": " << what;
    errors_.push_back(os.str());
  }

  bool parse_real(const Line& ln, const std::string& token, Real& out) {
    try {
      size_t used = 0;
      out = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument("trailing");
      return true;
    } catch (...) {
      error(ln.number, "expected a number for '" + ln.key + "', got '" + token + "'");
      return false;
    }
  }

  std::vector<std::string> split(const std::string& value) {
    std::vector<std::string> out;
    std::istringstream is(value);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::string origin_;
  std::vector<std::string> errors_;
};

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  ConfigReader reader(origin);
  std::vector<Line> lines;
  {
    std::istringstream is(text);
    std::string raw;
    int number = 0;
    std::string section;
    while (std::getline(is, raw)) {
      ++number;
      std::string s = trim(raw);
      size_t hash = s.find('#');
      if (hash != std::string::npos) s = trim(s.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') {
          reader.error(number, "unterminated section header");
          continue;
        }
        section = trim(s.substr(1, s.size() - 2));
        continue;
      }
      size_t eq = s.find('=');
      if (eq == std::string::npos) {
        reader.error(number, "expected 'key = value'");
        continue;
      }
      lines.push_back({number, section, trim(s.substr(0, eq)), trim(s.substr(eq + 1))});
    }
  }

  RunConfig cfg;
  std::map<int, MeasureConfig> measures;
  std::map<int, int> measure_lines;

  for (const Line& ln : lines) {
    auto tokens = reader.split(ln.value);
    if (ln.section.rfind("measure.", 0) == 0) {
      int idx = 0;
      std::string tail = ln.section.substr(8);
      try {
        idx = std::stoi(tail);
      } catch (...) {
        reader.error(ln.number, "bad measure section '" + ln.section + "'");
        continue;
      }
      MeasureConfig& mc = measures[idx];
      measure_lines[idx] = ln.number;
      if (ln.key == "interval") {
        if (tokens.size() != 2) {
          reader.error(ln.number, "interval needs two endpoints");
        } else {
          reader.parse_real(ln, tokens[0], mc.a);
          reader.parse_real(ln, tokens[1], mc.b);
        }
      } else if (ln.key == "alpha") {
        if (!tokens.empty()) reader.parse_real(ln, tokens[0], mc.alpha);
      } else if (ln.key == "beta") {
        if (!tokens.empty()) reader.parse_real(ln, tokens[0], mc.beta);
      } else if (ln.key == "modifier") {
        mc.modifier.clear();
        for (const auto& t : tokens) {
          Real v = 0;
          if (reader.parse_real(ln, t, v)) mc.modifier.push_back(v);
        }
        if (mc.modifier.empty()) mc.modifier = {1.0};
      } else if (ln.key == "normalized") {
        mc.normalized = (ln.value == "true" || ln.value == "1" || ln.value == "yes");
      } else {
        reader.error(ln.number, "unknown measure key '" + ln.key + "'");
      }
    } else if (ln.section == "ray") {
      if (ln.key == "p") {
        cfg.ray_p.clear();
        for (const auto& t : tokens) {
          Real v = 0;
          if (reader.parse_real(ln, t, v)) cfg.ray_p.push_back(v);
        }
      } else {
        reader.error(ln.number, "unknown ray key '" + ln.key + "'");
      }
    } else if (ln.section == "sweep") {
      if (ln.key == "k_list") {
        cfg.k_list.clear();
        for (const auto& t : tokens) {
          Real v = 0;
          if (reader.parse_real(ln, t, v)) cfg.k_list.push_back(static_cast<int>(v));
        }
      } else if (ln.key == "test_points") {
        cfg.test_points.clear();
        // pairs "re,im" separated by whitespace or ';'
        std::string cleaned = ln.value;
        for (char& c : cleaned)
          if (c == ';') c = ' ';
        for (const auto& t : reader.split(cleaned)) {
          size_t comma = t.find(',');
          if (comma == std::string::npos) {
            reader.error(ln.number, "test point needs 're,im', got '" + t + "'");
            continue;
          }
          Real re = 0, im = 0;
          bool ok = reader.parse_real(ln, t.substr(0, comma), re) &&
                    reader.parse_real(ln, t.substr(comma + 1), im);
          if (ok) cfg.test_points.push_back(Complex(re, im));
        }
      } else if (ln.key == "bio_degree") {
        Real v = 0;
        if (!tokens.empty() && reader.parse_real(ln, tokens[0], v))
          cfg.bio_degree = static_cast<int>(v);
      } else {
        reader.error(ln.number, "unknown sweep key '" + ln.key + "'");
      }
    } else if (ln.section == "tolerances") {
      Real v = 0;
      if (tokens.empty() || !reader.parse_real(ln, tokens[0], v)) continue;
      if (ln.key == "equilibrium")
        cfg.tol_eq = v;
      else if (ln.key == "fixed_point")
        cfg.tol_fp = v;
      else if (ln.key == "max_degree")
        cfg.max_degree = static_cast<int>(v);
      else
        reader.error(ln.number, "unknown tolerance key '" + ln.key + "'");
    } else if (ln.section == "grids") {
      Real v = 0;
      if (tokens.empty() || !reader.parse_real(ln, tokens[0], v)) continue;
      if (ln.key == "interval_points")
        cfg.grid = static_cast<int>(v);
      else if (ln.key == "quadrature")
        cfg.quadrature = static_cast<int>(v);
      else
        reader.error(ln.number, "unknown grid key '" + ln.key + "'");
    } else if (ln.section == "output") {
      if (ln.key == "directory")
        cfg.out_dir = ln.value;
      else
        reader.error(ln.number, "unknown output key '" + ln.key + "'");
    } else {
      reader.error(ln.number, "unknown section '" + ln.section + "'");
    }
  }

  // assemble measures in index order, checking contiguity
  if (measures.empty()) {
    reader.error(0, "no [measure.N] sections");
  } else {
    int expect = 1;
    for (const auto& [idx, mc] : measures) {
      if (idx != expect)
        reader.error(measure_lines[idx], "measure sections must be numbered 1..m contiguously");
      ++expect;
      cfg.measures.push_back(mc);
    }
  }

  // schema validation (aggregated, not fail-fast)
  for (size_t i = 0; i < cfg.measures.size(); ++i) {
    const MeasureConfig& mc = cfg.measures[i];
    int at = measure_lines.count(static_cast<int>(i) + 1) ? measure_lines[static_cast<int>(i) + 1] : 0;
    if (!(mc.a < mc.b))
      reader.error(at, "measure " + std::to_string(i + 1) + ": interval needs a < b");
    if (!(mc.alpha > -1.0) || !(mc.beta > -1.0))
      reader.error(at, "measure " + std::to_string(i + 1) + ": exponents must exceed -1");
  }
  for (size_t i = 0; i + 1 < cfg.measures.size(); ++i) {
    const MeasureConfig& a = cfg.measures[i];
    const MeasureConfig& b = cfg.measures[i + 1];
    if (a.a < b.b && b.a < a.b) {
      // overlap test for possibly unordered intervals
      if (!(a.b < b.a || b.b < a.a))
        reader.error(0, "intervals " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                            " are not consecutive-disjoint");
    }
  }
  if (cfg.ray_p.empty() && !cfg.measures.empty())
    cfg.ray_p.assign(cfg.measures.size(), 0.0);  // filled below if defaulted
  if (!cfg.measures.empty()) {
    if (cfg.ray_p.size() != cfg.measures.size()) {
      reader.error(0, "ray p must have one entry per measure");
    } else {
      Real sum = 0.0;
      bool defaulted = true;
      for (Real v : cfg.ray_p) {
        sum += v;
        if (v != 0.0) defaulted = false;
      }
      if (defaulted) {
        // no [ray] section: the classical single-direction ray
        cfg.ray_p.assign(cfg.measures.size(), 0.0);
        cfg.ray_p[0] = 1.0;
      } else {
        if (std::abs(sum - 1.0) > 1e-12) reader.error(0, "ray p must sum to 1");
        for (size_t j = 1; j < cfg.ray_p.size(); ++j)
          if (cfg.ray_p[j] > cfg.ray_p[j - 1] + 1e-14) reader.error(0, "ray not nonincreasing");
        if (!(cfg.ray_p[0] > 0.0)) reader.error(0, "ray p_1 must be positive");
      }
    }
  }
  if (cfg.k_list.empty()) cfg.k_list = {2, 4, 6, 8, 10, 12};
  if (!(cfg.tol_eq > 0.0)) reader.error(0, "equilibrium tolerance must be positive");
  if (!(cfg.tol_fp > 0.0)) reader.error(0, "fixed-point tolerance must be positive");
  if (cfg.grid < 16) reader.error(0, "grid too small");
  if (cfg.quadrature < 16) reader.error(0, "quadrature too small");
  if (cfg.max_degree < 1) reader.error(0, "max_degree must be positive");

  if (!reader.errors().empty()) {
    std::string what;
    for (const auto& e : reader.errors()) {
      what += e;
      what += '\n';
    }
    fail(errc::schema_error, what);
  }
  return cfg;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace mlhp
