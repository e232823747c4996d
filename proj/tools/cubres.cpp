// cubres: command-line front end.
//
//   cubres spectrum         resonance / PT energies by diagonalization
//   cubres methods-compare  Methods I, II, III side by side on a g ladder
//   cubres propagate        autocorrelation trace, optional Crank-Nicolson oracle
//
// Exit codes: 0 ok, 2 usage or invalid input, 3 numerical failure,
// 4 convergence / uncertainty ceiling.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cubres/borel.hpp"
#include "cubres/errors.hpp"
#include "cubres/grid_oracle.hpp"
#include "cubres/io.hpp"
#include "cubres/spectral.hpp"
#include "cubres/strong_coupling.hpp"
#include "cubres/wavepacket.hpp"

using namespace cubres;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr double kDeg = std::numbers::pi / 180.0;

std::string num(double x) { return io::format_number(x); }

// for comment lines
json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

std::string brief(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

struct Run {
  std::string command;
  std::string prefix;
  std::string started = io::utc_timestamp();
  json manifest{};
  std::vector<std::string> outputs{};

  std::string manifest_name() const { return std::filesystem::path(prefix + ".json").filename().string(); }

  std::string emit(const std::string& suffix, io::CsvTable table) {
    table.comments.insert(table.comments.begin(), "manifest: " + manifest_name());
    const std::string path = prefix + suffix;
    std::string text = table.str();
    io::write_atomic(path, text);
    outputs.push_back(path);
    return text;
  }

  void finish(const json& configuration) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["started"] = started;
    m["finished"] = io::utc_timestamp();
    m["configuration"] = configuration;
    for (auto& [k, v] : manifest.items()) m[k] = v;
    m["outputs"] = outputs;
    io::write_atomic(prefix + ".json", m.dump(2) + "\n");
  }
};

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
  std::optional<double> g, beta, theta_deg;
  int n_max = 200;
  int levels = 3;
  std::string out = "spectrum";
};

void cmd_spectrum(const SpectrumArgs& a) {
  OscillatorSpec spec;
  if (a.beta) {
    if (*a.beta < 0.0) throw DomainError("--beta must be nonnegative");
    spec = OscillatorSpec::pt_symmetric(*a.beta, 0.0, a.n_max);
  } else {
    const double g = a.g.value_or(0.0);
    if (g < 0.0) throw DomainError("negative g is the PT case; use --beta");
    spec = OscillatorSpec::real_coupling(g, 0.0, a.n_max);
  }
  spec.theta = a.theta_deg ? *a.theta_deg * kDeg : default_theta(spec.g_root);
  const ResonanceSet set = resonances(spec, a.levels);

  Run run{"spectrum", a.out};
  io::CsvTable t;
  t.comments.push_back(a.beta ? "PT-symmetric coupling g = -beta^2, beta = " + brief(*a.beta)
                              : "real coupling g = " + brief(a.g.value_or(0.0)));
  t.comments.push_back("theta_rad = " + brief(spec.theta) + ", n_max = " + std::to_string(spec.n_max));
  t.columns = {"N", "re_E", "im_E", "gamma", "uncertainty"};
  json levels = json::array();
  for (const auto& lv : set.levels) {
    t.add_row({std::to_string(lv.index), num(lv.energy.real()), num(lv.energy.imag()), num(lv.width),
               num(lv.uncertainty)});
    levels.push_back({{"N", lv.index}, {"uncertainty", lv.uncertainty}});
  }
  const std::string text = run.emit(".csv", t);
  run.manifest["results"] = levels;
  run.finish({{"g", opt(a.g)},
              {"beta", opt(a.beta)},
              {"theta_rad", spec.theta},
              {"n_max", a.n_max},
              {"levels", a.levels},
              {"out", a.out}});
  std::cout << text;
}

// --------------------------------------------------------- methods-compare

struct CompareArgs {
  std::vector<double> g{0.01, 0.025, 0.05, 0.1, 0.2, 0.4, 0.6, 1.0, 2.0, 5.0, 10.0};
  int level = 0;
  int n_max = 200;
  std::optional<double> theta_deg;
  int max_order = 25;
  int k_max = 6;
  double strong_min_g = 0.025;
  std::string out = "methods";
};

void cmd_methods_compare(const CompareArgs& a) {
  if (a.level < 0) throw DomainError("--level must be nonnegative");
  for (double g : a.g)
    if (!(g > 0.0)) throw DomainError("every g in the ladder must be positive");

  const StrongCouplingTable table = fit_table(a.level + 1, default_ladder(), a.k_max);
  const StrongCouplingRow& row = table.row(a.level);

  Run run{"methods-compare", a.out};
  io::CsvTable t;
  t.comments.push_back("level N = " + std::to_string(a.level));
  t.comments.push_back("I: complex-scaled diagonalization; II: Borel-Pade on the C+1 ray; III: strong-coupling series to K = " +
                       std::to_string(a.k_max));
  t.columns = {"g", "method", "re_E", "im_E", "uncertainty", "status"};
  const double nan = std::nan("");
  auto guarded = [&](double g, const char* method, auto&& fn) {
    Complex e{nan, nan};
    double unc = nan;
    std::string status = "ok";
    try {
      std::tie(e, unc) = fn();
    } catch (const DomainError&) {
      status = "domain_error";
    } catch (const ConvergenceError&) {
      status = "not_converged";
    } catch (const NumericalError&) {
      status = "numerical_error";
    }
    if (status == "ok" && std::string(method) == "III" && g < a.strong_min_g) status = "out_of_domain";
    t.add_row({num(g), method, num(e.real()), num(e.imag()), num(unc), status});
  };
  for (double g : a.g) {
    guarded(g, "I", [&] {
      OscillatorSpec s = OscillatorSpec::real_coupling(g, 0.0, a.n_max);
      s.theta = a.theta_deg ? *a.theta_deg * kDeg : default_theta(s.g_root);
      const auto set = resonances(s, a.level + 1);
      const auto& lv = set.levels.back();
      return std::pair{lv.energy, lv.uncertainty};
    });
    guarded(g, "II", [&] {
      ResummationConfig cfg = resonance_config();
      cfg.max_order = a.max_order;
      const auto v = resummed_energy(a.level, g, cfg);
      return std::pair{v.value, v.uncertainty};
    });
    guarded(g, "III", [&] {
      const Complex e = evaluate(a.level, g, table, a.k_max);
      // size of the last retained term
      const double lam = std::pow(g, -0.4);
      const double unc = std::pow(g, 0.2) * std::abs(row.coefficients.back()) * std::pow(lam, a.k_max);
      return std::pair{e, unc};
    });
  }
  const std::string text = run.emit(".csv", t);
  run.manifest["strong_coupling"] = {{"ladder", default_ladder()},
                                     {"k_max", a.k_max},
                                     {"fit_residual", row.residual},
                                     {"condition", row.condition}};
  run.finish({{"g", a.g},
              {"level", a.level},
              {"n_max", a.n_max},
              {"theta_rad", a.theta_deg ? json(*a.theta_deg * kDeg) : json("default per g")},
              {"max_order", a.max_order},
              {"k_max", a.k_max},
              {"strong_min_g", a.strong_min_g},
              {"out", a.out}});
  std::cout << text;
}

// --------------------------------------------------------------- propagate

struct PropagateArgs {
  std::optional<double> g, g_root, theta_deg, theta_rad;
  int n_max = 300;
  int modes = 60;
  double t_max = 25.0;
  double t_step = 0.01;
  double center = 0.0, momentum = 0.0, alpha = 1.0;
  std::string coeffs, delta;
  bool oracle = false;
  double box = 300.0, dq = 0.02, dt = 0.002;
  double quad_lo = -12.0, quad_hi = 12.0, quad_step = 0.005;
  std::string out = "trace";
};

void cmd_propagate(const PropagateArgs& a) {
  PipelineConfig cfg;
  double root = 0.04;
  if (a.g) {
    if (*a.g < 0.0) throw DomainError("propagate needs g >= 0");
    root = std::sqrt(*a.g);
  } else if (a.g_root) {
    root = *a.g_root;
  }
  if (root < 0.0) throw DomainError("--g-root must be nonnegative");
  double theta = 0.03;
  if (a.theta_deg) theta = *a.theta_deg * kDeg;
  if (a.theta_rad) theta = *a.theta_rad;
  cfg.spec = OscillatorSpec::real_coupling(root * root, theta, a.n_max);
  cfg.spec.g_root = Complex{root, 0.0};
  cfg.expand.n_modes = a.modes;
  cfg.grid = QuadratureGrid{a.quad_lo, a.quad_hi, a.quad_step};
  if (!a.coeffs.empty()) {
    std::istringstream is(io::read_file(a.coeffs));
    std::vector<Complex> c;
    std::string line;
    while (std::getline(is, line)) {
      if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
      for (char& ch : line)
        if (ch == ',') ch = ' ';
      std::istringstream ls(line);
      double re, im = 0.0;
      if (!(ls >> re)) continue;
      ls >> im;
      c.emplace_back(re, im);
    }
    if (c.empty()) throw DomainError("coefficient file is empty");
    cfg.packet = PacketState::from_oscillator(Eigen::Map<ComplexVector>(c.data(), static_cast<long>(c.size())));
  } else {
    cfg.packet = PacketState::gaussian(GaussianPacket{a.center, a.momentum, a.alpha, 1.0});
  }
  if (!a.delta.empty()) {
    try {
      cfg.dissipation.delta = io::parse_delta(io::read_file(a.delta));
    } catch (const std::invalid_argument& e) {
      throw DomainError(e.what());
    }
  }
  if (!(a.t_step > 0.0) || !(a.t_max >= 0.0)) throw DomainError("--t-step must be positive and --t-max nonnegative");
  std::vector<double> times;
  const long n_t = std::lround(std::floor(a.t_max / a.t_step + 1e-9));
  for (long i = 0; i <= n_t; ++i) times.push_back(static_cast<double>(i) * a.t_step);

  const Pipeline pipe(cfg);
  const auto trace = pipe.autocorrelation(times);
  const double residual = pipe.residual();
  const double p_unc = 2.0 * residual;  // |dP| <= 2 |d overlap| for |overlap| <= 1

  Run run{"propagate", a.out};
  auto columns = std::vector<std::string>{"t", "P", "P_normalized", "re_overlap", "im_overlap", "modal_norm", "uncertainty"};
  io::CsvTable t;
  t.comments.push_back("spectral pipeline: modes = " + std::to_string(pipe.initial_modes().modes.size()) +
                       ", reconstruction residual = " + brief(residual));
  t.columns = columns;
  for (const auto& p : trace) {
    t.add_row({num(p.t), num(p.p), num(p.p_normalized), num(p.overlap.real()), num(p.overlap.imag()),
               num(p.modal_norm), num(p_unc)});
  }
  run.emit(".csv", t);

  json maxima = json::array();
  for (const auto& m : local_maxima(trace)) maxima.push_back({{"t", m.t}, {"P", m.p}});
  run.manifest["spectral"] = {{"g_root", root},
                              {"theta_rad", theta},
                              {"n_max", a.n_max},
                              {"modes_requested", a.modes},
                              {"modes_used", pipe.initial_modes().modes.size()},
                              {"reconstruction_residual", residual},
                              {"P_uncertainty", p_unc},
                              {"local_maxima", maxima}};

  if (a.oracle) {
    const GridConfig grid{a.box, a.dq, a.dt};
    const CnResult cn = cn_autocorrelation(cfg.packet, times, grid, root);
    io::CsvTable o;
    o.comments.push_back("Crank-Nicolson oracle: L = " + brief(a.box) + ", dq = " + brief(a.dq) + ", dt = " + brief(a.dt));
    o.comments.push_back("modal_norm holds the grid norm; uncertainty 0: the oracle is the reference");
    o.columns = columns;
    for (const auto& p : cn.trace) {
      o.add_row({num(p.t), num(p.p), num(p.p_normalized), num(p.overlap.real()), num(p.overlap.imag()),
                 num(p.modal_norm), num(0.0)});
    }
    run.emit("_oracle.csv", o);
    io::CsvTable d;
    d.columns = {"t", "abs_dP", "uncertainty"};
    double worst = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double dp = std::abs(trace[i].p - cn.trace[i].p);
      worst = std::max(worst, dp);
      d.add_row({num(times[i]), num(dp), num(p_unc)});
    }
    run.emit("_diff.csv", d);
    run.manifest["oracle"] = {{"half_width", a.box},      {"spacing", a.dq},
                              {"time_step", a.dt},        {"max_abs_dP", worst},
                              {"edge_amplitude", cn.edge_amplitude},
                              {"boundary_warning", cn.boundary_warning},
                              {"norm_loss", cn.norm_loss}};
    if (cn.boundary_warning) {
      std::cerr << "warning: amplitude " << cn.edge_amplitude
                << " near the box walls; reflections may contaminate the oracle\n";
    }
    std::cerr << "max |P_spectral - P_oracle| = " << worst << "\n";
  }
  json packet;
  if (a.coeffs.empty()) {
    packet = {{"center", a.center}, {"momentum", a.momentum}, {"alpha", a.alpha}};
  } else {
    packet = {{"coeffs", a.coeffs}};
  }
  run.finish({{"g_root", root},
              {"theta_rad", theta},
              {"n_max", a.n_max},
              {"modes", a.modes},
              {"t_max", a.t_max},
              {"t_step", a.t_step},
              {"packet", packet},
              {"delta", a.delta.empty() ? json(nullptr) : json(a.delta)},
              {"quadrature", {{"lo", a.quad_lo}, {"hi", a.quad_hi}, {"step", a.quad_step}}},
              {"oracle", a.oracle ? json{{"box", a.box}, {"dq", a.dq}, {"dt", a.dt}} : json(nullptr)},
              {"out", a.out}});
  for (const auto& m : local_maxima(trace)) std::cerr << "local max P = " << m.p << " at t = " << m.t << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances, resummation and wave-packet dynamics of the cubic anharmonic oscillator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "key = value file, one [spectrum] / [methods-compare] / [propagate] section per command; flags take precedence");

  SpectrumArgs sa;
  auto* sp = app.add_subcommand("spectrum", "energies from the complex-scaled diagonalization");
  auto* sp_g = sp->add_option("--g", sa.g, "real coupling g >= 0");
  auto* sp_b = sp->add_option("--beta", sa.beta, "PT-symmetric coupling g = -beta^2");
  sp_g->excludes(sp_b);
  sp->add_option("--theta-deg", sa.theta_deg, "rotation angle in degrees (default 27 for real g, 0 for PT)");
  sp->add_option("--nmax", sa.n_max, "highest oscillator index")->capture_default_str();
  sp->add_option("--levels", sa.levels, "number of levels")->capture_default_str();
  sp->add_option("--out", sa.out, "output prefix (writes PREFIX.csv and PREFIX.json)")->capture_default_str();

  CompareArgs ca;
  auto* mc = app.add_subcommand("methods-compare", "Methods I, II and III on a coupling ladder");
  mc->add_option("--g", ca.g, "coupling ladder")->delimiter(',')->capture_default_str();
  mc->add_option("--level", ca.level, "level N")->capture_default_str();
  mc->add_option("--nmax", ca.n_max, "highest oscillator index for Method I")->capture_default_str();
  mc->add_option("--theta-deg", ca.theta_deg, "Method I rotation angle in degrees");
  mc->add_option("--max-order", ca.max_order, "largest Pade index for Method II")->capture_default_str();
  mc->add_option("--k-max", ca.k_max, "strong-coupling order for Method III")->capture_default_str();
  mc->add_option("--strong-min-g", ca.strong_min_g, "Method III flagged out_of_domain below this g")
      ->capture_default_str();
  mc->add_option("--out", ca.out, "output prefix")->capture_default_str();

  PropagateArgs pa;
  auto* pr = app.add_subcommand("propagate", "autocorrelation P(t) of a wave packet");
  auto* pr_g = pr->add_option("--g", pa.g, "coupling g >= 0");
  auto* pr_r = pr->add_option("--g-root", pa.g_root, "sqrt(g) (default 0.04)");
  pr_g->excludes(pr_r);
  auto* pr_td = pr->add_option("--theta-deg", pa.theta_deg, "rotation angle in degrees");
  auto* pr_tr = pr->add_option("--theta-rad", pa.theta_rad, "rotation angle in radians (default 0.03)");
  pr_td->excludes(pr_tr);
  pr->add_option("--nmax", pa.n_max, "highest oscillator index")->capture_default_str();
  pr->add_option("--modes", pa.modes, "largest number of resonance modes")->capture_default_str();
  pr->add_option("--t-max", pa.t_max, "last time")->capture_default_str();
  pr->add_option("--t-step", pa.t_step, "time spacing of the trace")->capture_default_str();
  pr->add_option("--center", pa.center, "Gaussian center")->capture_default_str();
  pr->add_option("--momentum", pa.momentum, "Gaussian momentum")->capture_default_str();
  pr->add_option("--alpha", pa.alpha, "Gaussian exponent alpha in exp(-alpha q^2)")->capture_default_str();
  pr->add_option("--coeffs", pa.coeffs, "file of oscillator coefficients 're im' per line (replaces the Gaussian)")
      ->check(CLI::ExistingFile);
  pr->add_option("--delta", pa.delta, "file of width corrections 'N delta'")->check(CLI::ExistingFile);
  pr->add_flag("--oracle", pa.oracle, "also run the Crank-Nicolson oracle");
  pr->add_option("--box", pa.box, "oracle half width L")->capture_default_str();
  pr->add_option("--dq", pa.dq, "oracle grid spacing")->capture_default_str();
  pr->add_option("--dt", pa.dt, "oracle time step")->capture_default_str();
  pr->add_option("--quad-lo", pa.quad_lo, "overlap grid lower end")->capture_default_str();
  pr->add_option("--quad-hi", pa.quad_hi, "overlap grid upper end")->capture_default_str();
  pr->add_option("--quad-step", pa.quad_step, "overlap grid spacing")->capture_default_str();
  pr->add_option("--out", pa.out, "output prefix")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sp) cmd_spectrum(sa);
    if (*mc) cmd_methods_compare(ca);
    if (*pr) cmd_propagate(pa);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 4;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
