#include "cutplate/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cutplate/errors.hpp"

namespace cutplate::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad number for '" + key + "': " + text);
  return v;
}

long parse_int(const std::string& key, const std::string& text) {
  long v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("bad integer for '" + key + "': " + text);
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw ConfigError("bad flag for '" + key + "': " + text);
}

BoundaryMode parse_mode(const std::string& text) {
  if (text == "c0") return BoundaryMode::c0_interpolated;
  if (text == "c1") return BoundaryMode::c1_spline;
  throw ConfigError("boundary mode must be c0 or c1, got '" + text + "'");
}

const char* mode_name(BoundaryMode m) { return m == BoundaryMode::c0_interpolated ? "c0" : "c1"; }

void set_key(RunConfig& c, const std::string& key, const std::string& value) {
  StudyConfig& s = c.study;
  if (key == "E") {
    s.material.E = parse_double(key, value);
  } else if (key == "nu") {
    s.material.nu = parse_double(key, value);
  } else if (key == "t") {
    s.material.t = parse_double(key, value);
  } else if (key == "p") {
    s.load = parse_double(key, value);
  } else if (key == "R") {
    s.radius = parse_double(key, value);
  } else if (key == "center") {
    const auto comma = value.find(',');
    if (comma == std::string::npos) throw ConfigError("center must be 'x,y'");
    s.center = {parse_double(key, trim(value.substr(0, comma))),
                parse_double(key, trim(value.substr(comma + 1)))};
  } else if (key == "beta") {
    s.beta = parse_double(key, value);
  } else if (key == "gamma_scale") {
    s.gamma_scale = parse_double(key, value);
  } else if (key == "boundary_mode") {
    s.mode = parse_mode(value);
  } else if (key == "h_start") {
    s.h_start = parse_double(key, value);
  } else if (key == "levels") {
    s.levels = static_cast<int>(parse_int(key, value));
  } else if (key == "quad_degree") {
    s.quad_degree = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    s.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "cond_estimate") {
    s.estimate_condition = parse_bool(key, value);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "emit_plot") {
    c.emit_plot = parse_bool(key, value);
  } else if (key == "samples") {
    c.samples = static_cast<int>(parse_int(key, value));
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void write_csv(const std::filesystem::path& path, const StudyReport& report) {
  auto out = open_out(path);
  out << "level,h,n_dofs,errL2,errH1,errH2b,errEnergy,rateL2,rateH1,rateH2b,rateEnergy,"
         "cond_estimate,solve_seconds\n";
  for (const auto& r : report.levels) {
    out << r.level << ',' << format_number(r.h) << ',' << r.n_dofs << ','
        << format_number(r.errors.l2) << ',' << format_number(r.errors.h1) << ','
        << format_number(r.errors.h2b) << ',' << format_number(r.errors.energy);
    if (r.rates) {
      out << ',' << format_number(r.rates->l2) << ',' << format_number(r.rates->h1) << ','
          << format_number(r.rates->h2b) << ',' << format_number(r.rates->energy);
    } else {
      out << ",,,,";
    }
    out << ',' << (r.condition > 0.0 ? format_number(r.condition) : std::string()) << ','
        << format_number(r.solve_seconds) << '\n';
  }
}

void write_solution(const std::filesystem::path& path, const Discretization& disc,
                    const Eigen::VectorXd& uh, int samples) {
  auto out = open_out(path);
  const Box box = disc.domain.bounding_box();
  out << "# x y u (nan outside the plate)\n";
  for (int j = 0; j < samples; ++j) {
    for (int i = 0; i < samples; ++i) {
      const double fx = samples > 1 ? static_cast<double>(i) / (samples - 1) : 0.5;
      const double fy = samples > 1 ? static_cast<double>(j) / (samples - 1) : 0.5;
      const Vec2 x = box.lo + Vec2(fx * (box.hi.x() - box.lo.x()), fy * (box.hi.y() - box.lo.y()));
      out << format_number(x.x()) << ' ' << format_number(x.y()) << ' '
          << format_number(sample_solution(disc, uh, x)) << '\n';
    }
    out << '\n';
  }
}

void write_plot(const std::filesystem::path& path, const StudyReport& report) {
  auto out = open_out(path);
  const LevelReport& first = report.levels.front();
  const double h0 = first.h;
  out << "# gnuplot script: normalized errors against h\n"
         "set datafile separator ','\n"
         "set logscale xy\n"
         "set key bottom right\n"
         "set xlabel 'h'\n"
         "set ylabel '||u - u_h|| / ||u||'\n"
         "set format y '%.0e'\n"
         "set terminal pngcairo size 800,600\n"
         "set output 'convergence.png'\n";
  // Reference slopes anchored one decade above the coarsest errors.
  out << "r2(x) = " << format_number(10.0 * first.errors.h2b) << " * (x / " << format_number(h0)
      << ")**2\n";
  out << "r3(x) = " << format_number(10.0 * first.errors.h1) << " * (x / " << format_number(h0)
      << ")**3\n";
  out << "r4(x) = " << format_number(10.0 * first.errors.l2) << " * (x / " << format_number(h0)
      << ")**4\n";
  out << "plot 'convergence.csv' every ::1 using 2:4 with linespoints title 'L2', \\\n"
         "     '' every ::1 using 2:5 with linespoints title 'H1', \\\n"
         "     '' every ::1 using 2:6 with linespoints title 'broken H2', \\\n"
         "     '' every ::1 using 2:7 with linespoints title 'energy', \\\n"
         "     r2(x) with lines dashtype 2 title 'h^2', \\\n"
         "     r3(x) with lines dashtype 2 title 'h^3', \\\n"
         "     r4(x) with lines dashtype 2 title 'h^4'\n";
}

void echo_config(std::ostream& log, const RunConfig& c) {
  const StudyConfig& s = c.study;
  log << "E = " << format_number(s.material.E) << '\n'
      << "nu = " << format_number(s.material.nu) << '\n'
      << "t = " << format_number(s.material.t) << '\n'
      << "p = " << format_number(s.load) << '\n'
      << "R = " << format_number(s.radius) << '\n'
      << "center = " << format_number(s.center.x()) << ',' << format_number(s.center.y()) << '\n'
      << "beta = " << format_number(s.beta) << '\n'
      << "gamma_scale = " << format_number(s.gamma_scale) << '\n'
      << "boundary_mode = " << mode_name(s.mode) << '\n'
      << "h_start = " << format_number(s.h_start) << '\n'
      << "levels = " << s.levels << '\n'
      << "quad_degree = " << s.quad_degree << '\n'
      << "seed = " << s.seed << '\n'
      << "cond_estimate = " << (s.estimate_condition ? "true" : "false") << '\n'
      << "output_dir = " << c.output_dir.string() << '\n'
      << "emit_plot = " << (c.emit_plot ? "true" : "false") << '\n'
      << "samples = " << c.samples << '\n'
      << "kappa = " << format_number(s.material.kappa()) << '\n'
      << "gamma = " << format_number(s.params().gamma) << '\n'
      << "threads = " << worker_count() << '\n';
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '"', '\'');
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

void RunConfig::validate() const {
  study.material.validate();
  if (study.levels < 1) throw ConfigError("levels must be at least 1");
  if (!(study.h_start > 0.0)) throw ConfigError("h_start must be positive");
  if (study.h_start * std::ldexp(1.0, -(study.levels - 1)) < 1.0 / 1024.0) {
    throw ConfigError("finest mesh size below 1/1024");
  }
  if (!(study.radius > 0.0)) throw ConfigError("R must be positive");
  if (study.beta < 0.0) throw ConfigError("beta must be non-negative");
  if (study.gamma_scale < 0.0) throw ConfigError("gamma_scale must be non-negative");
  if (study.quad_degree < 4 || study.quad_degree > 30) {
    throw ConfigError("quad_degree must lie in [4, 30]");
  }
  if (samples < 1) throw ConfigError("samples must be positive");
}

void apply_config_file(std::istream& in, RunConfig& config) {
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    }
    set_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

StudyReport run(const RunConfig& config) {
  config.validate();
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw ConfigError("cannot create " + config.output_dir.string() + ": " + ec.message());

  auto log = open_out(config.output_dir / "run.log");
  echo_config(log, config);
  log << '\n';
  log.flush();

  StudyReport report;
  try {
    report = convergence_study(config.study, [&](const LevelReport& r, const Discretization& disc,
                                                 const Eigen::VectorXd& uh) {
      log << "level " << r.level << ": h = " << format_number(r.h) << ", N = " << r.n_dofs
          << ", cells = " << disc.mesh.cells.size() << " (cut " << disc.mesh.count(CellKind::cut)
          << "), stabilized faces = " << disc.mesh.stab_faces.size()
          << ", assembly " << format_number(r.assembly_seconds) << " s, solve "
          << format_number(r.solve_seconds) << " s, residual " << format_number(r.relative_residual)
          << ", center deflection " << format_number(r.center_deflection) << '\n';
      log.flush();
      write_solution(config.output_dir / ("solution_" + std::to_string(r.level) + ".txt"), disc, uh,
                     config.samples);
    });
  } catch (const Error& e) {
    log << "failed: " << to_string(e.code()) << ": " << e.what() << '\n';
    throw;
  }

  if (report.slopes) {
    log << "fitted slopes: L2 " << format_number(report.slopes->l2) << ", H1 "
        << format_number(report.slopes->h1) << ", H2b " << format_number(report.slopes->h2b)
        << ", energy " << format_number(report.slopes->energy) << '\n';
  }
  write_csv(config.output_dir / "convergence.csv", report);
  if (config.emit_plot) write_plot(config.output_dir / "plot.gp", report);
  return report;
}

int main(int argc, char** argv) {
  RunConfig config;
  CLI::App app{"Cut finite element solver for the simply supported Kirchhoff plate"};

  std::string config_path, mode, out_dir;
  double E = 0, nu = 0, t = 0, p = 0, R = 0, beta = 0, gamma_scale = 0, h_start = 0;
  int levels = 0, quad_degree = 0;
  app.add_option("--config", config_path, "key = value file; flags override it");
  app.add_option("--E", E, "Young's modulus");
  app.add_option("--nu", nu, "Poisson ratio");
  app.add_option("--t", t, "plate thickness");
  app.add_option("--p", p, "uniform load");
  app.add_option("--R", R, "plate radius");
  app.add_option("--beta", beta, "ghost-penalty parameter");
  app.add_option("--gamma-scale", gamma_scale, "Nitsche penalty in units of 2 kappa (1 + nu/(1-nu))");
  app.add_option("--boundary-mode", mode, "c0 or c1");
  app.add_option("--h-start", h_start, "coarsest mesh size");
  app.add_option("--levels", levels, "number of dyadic refinements");
  app.add_option("--quad-degree", quad_degree, "area quadrature degree");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--emit-plot", config.emit_plot, "write plot.gp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : 4;
  }

  try {
    const bool emit_plot = config.emit_plot;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file " + config_path);
      apply_config_file(in, config);
    }
    config.emit_plot = config.emit_plot || emit_plot;
    StudyConfig& s = config.study;
    if (app.count("--E")) s.material.E = E;
    if (app.count("--nu")) s.material.nu = nu;
    if (app.count("--t")) s.material.t = t;
    if (app.count("--p")) s.load = p;
    if (app.count("--R")) s.radius = R;
    if (app.count("--beta")) s.beta = beta;
    if (app.count("--gamma-scale")) s.gamma_scale = gamma_scale;
    if (app.count("--boundary-mode")) s.mode = parse_mode(mode);
    if (app.count("--h-start")) s.h_start = h_start;
    if (app.count("--levels")) s.levels = levels;
    if (app.count("--quad-degree")) s.quad_degree = quad_degree;
    if (app.count("--out")) config.output_dir = out_dir;

    const StudyReport report = run(config);
    for (const auto& r : report.levels) {
      std::cout << "h=" << format_number(r.h) << " N=" << r.n_dofs
                << " L2=" << format_number(r.errors.l2) << " H1=" << format_number(r.errors.h1)
                << " H2b=" << format_number(r.errors.h2b)
                << " energy=" << format_number(r.errors.energy) << '\n';
    }
    if (report.slopes) {
      std::cout << "slopes L2=" << format_number(report.slopes->l2)
                << " H1=" << format_number(report.slopes->h1)
                << " H2b=" << format_number(report.slopes->h2b)
                << " energy=" << format_number(report.slopes->energy) << '\n';
    }
    return 0;
  } catch (const Error& e) {
    int status = 1;
    if (dynamic_cast<const GeometryError*>(&e)) status = 2;
    if (dynamic_cast<const SolverError*>(&e)) status = 3;
    if (dynamic_cast<const ConfigError*>(&e)) status = 4;
    std::cerr << "error=" << to_string(e.code()) << " exit=" << status << " message=\""
              << one_line(e.what()) << "\"\n";
    return status;
  } catch (const std::exception& e) {
    std::cerr << "error=Internal exit=1 message=\"" << one_line(e.what()) << "\"\n";
    return 1;
  }
}

}  // namespace cutplate::cli
