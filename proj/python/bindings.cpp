// Python module cubres._core: thin wrappers over the C++ library.
// Exact rationals cross the boundary as (numerator, denominator) strings;
// the pure-Python layer turns them into fractions.Fraction.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "cubres/borel.hpp"
#include "cubres/errors.hpp"
#include "cubres/grid_oracle.hpp"
#include "cubres/series.hpp"
#include "cubres/spectral.hpp"
#include "cubres/strong_coupling.hpp"
#include "cubres/wavepacket.hpp"

namespace py = pybind11;
using namespace cubres;

namespace {

using RationalPair = std::pair<std::string, std::string>;

RationalPair split(const Rational& q) { return {q.get_num().get_str(), q.get_den().get_str()}; }

OscillatorSpec make_spec(std::optional<double> g, std::optional<double> beta, std::optional<double> theta,
                         int n_max) {
  if (g && beta) throw DomainError("give either g or beta, not both");
  OscillatorSpec spec = beta ? OscillatorSpec::pt_symmetric(*beta, 0.0, n_max)
                             : OscillatorSpec::real_coupling(g.value_or(0.0), 0.0, n_max);
  spec.theta = theta ? *theta : default_theta(spec.g_root);
  return spec;
}

py::dict level_dict(const ResonanceLevel& lv) {
  py::dict d;
  d["N"] = lv.index;
  d["energy"] = lv.energy;
  d["width"] = lv.width;
  d["uncertainty"] = lv.uncertainty;
  d["theta_spread"] = lv.theta_spread;
  return d;
}

py::dict resummed_dict(const ResummedValue& r) {
  py::dict d;
  d["value"] = r.value;
  d["uncertainty"] = r.uncertainty;
  d["orders_used"] = r.orders_used;
  return d;
}

py::dict trace_dict(const std::vector<AutocorrelationPoint>& trace) {
  std::vector<double> t, p, pn, norm;
  std::vector<Complex> ov;
  for (const auto& x : trace) {
    t.push_back(x.t);
    p.push_back(x.p);
    pn.push_back(x.p_normalized);
    ov.push_back(x.overlap);
    norm.push_back(x.modal_norm);
  }
  py::dict d;
  d["t"] = t;
  d["P"] = p;
  d["P_normalized"] = pn;
  d["overlap"] = ov;
  d["norm"] = norm;
  return d;
}

ResummationConfig resum_config(int max_order, const std::string& contour) {
  ResummationConfig cfg;
  cfg.max_order = max_order;
  if (contour == "real_axis") {
    cfg.contour = Contour::real_axis;
  } else if (contour == "c_plus_one") {
    cfg.contour = Contour::c_plus_one;
  } else {
    throw DomainError("contour must be 'real_axis' or 'c_plus_one'");
  }
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Complex-scaled resonances, Borel-Pade resummation and wave-packet dynamics of the cubic oscillator";

  auto base = py::register_exception<Error>(m, "CubresError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<MatchingAmbiguityError>(m, "MatchingAmbiguityError", numerical.ptr());
  py::register_exception<EigenConvergenceError>(m, "EigenConvergenceError", numerical.ptr());
  py::register_exception<BasisOverflowError>(m, "BasisOverflowError", numerical.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  m.def(
      "resonances",
      [](std::optional<double> g, std::optional<double> beta, std::optional<double> theta, int n_max, int levels) {
        const ResonanceSet set = [&] {
          py::gil_scoped_release release;
          return resonances(make_spec(g, beta, theta, n_max), levels);
        }();
        py::list out;
        for (const auto& lv : set.levels) out.append(level_dict(lv));
        return out;
      },
      py::arg("g") = py::none(), py::arg("beta") = py::none(), py::arg("theta") = py::none(),
      py::arg("n_max") = 200, py::arg("levels") = 3,
      "Lowest resonances by complex-scaled diagonalization (theta in radians, default per coupling).");

  m.def("default_theta", [](double g) { return default_theta(Complex{std::sqrt(g), 0.0}); }, py::arg("g"));

  m.def(
      "theta_stability",
      [](double g, std::vector<double> thetas, int levels, int n_max) {
        return theta_stability(OscillatorSpec::real_coupling(g, thetas.at(0), n_max), thetas, levels);
      },
      py::arg("g"), py::arg("thetas"), py::arg("levels") = 1, py::arg("n_max") = 200);

  m.def(
      "b_series",
      [](int k_max) {
        std::vector<std::vector<RationalPair>> out;
        for (const auto& p : b_series(k_max).orders) {
          std::vector<RationalPair> row;
          for (const auto& c : p.c) row.push_back(split(c));
          out.push_back(row);
        }
        return out;
      },
      py::arg("k_max"));

  m.def(
      "rspt_coefficients",
      [](int level, int k_max) {
        std::vector<RationalPair> out;
        for (const auto& c : rspt_coefficients(level, k_max).coefficients) out.push_back(split(c));
        return out;
      },
      py::arg("level"), py::arg("k_max"));

  m.def("instanton_width", &instanton_width, py::arg("g"));
  m.def("instanton_action", [] { return split(InstantonData{}.action); });

  m.def(
      "borel_pade",
      [](std::vector<double> coeffs, Complex g, int max_order, const std::string& contour) {
        return resummed_dict(borel_pade(coeffs, g, resum_config(max_order, contour)));
      },
      py::arg("coeffs"), py::arg("g"), py::arg("max_order") = 25, py::arg("contour") = "real_axis");

  m.def(
      "pt_energy",
      [](int n, double beta, int max_order) { return resummed_dict(pt_energy(n, beta, resum_config(max_order, "real_axis"))); },
      py::arg("n"), py::arg("beta"), py::arg("max_order") = 25);

  m.def(
      "resummed_energy",
      [](int n, double g, int max_order) {
        ResummationConfig cfg = resonance_config();
        cfg.max_order = max_order;
        return resummed_dict(resummed_energy(n, g, cfg));
      },
      py::arg("n"), py::arg("g"), py::arg("max_order") = 25);

  m.def("leading_spectrum", &leading_spectrum, py::arg("theta"), py::arg("n_max") = 240, py::arg("count") = 3);
  m.def("default_ladder", &default_ladder);
  m.def(
      "strong_coupling_table",
      [](int count, std::optional<std::vector<double>> ladder, int k_max) {
        const auto t = fit_table(count, ladder.value_or(default_ladder()), k_max);
        std::vector<std::vector<Complex>> out;
        for (const auto& r : t.rows) out.push_back(r.coefficients);
        return out;
      },
      py::arg("count") = 3, py::arg("ladder") = py::none(), py::arg("k_max") = 6,
      "Fitted L_{N,K}, one list per level N.");

  m.def(
      "autocorrelation",
      [](std::vector<double> times, double g_root, double theta, int n_max, double center, double momentum,
         double alpha) {
        PipelineConfig cfg;
        cfg.spec = OscillatorSpec{Complex{g_root, 0.0}, theta, n_max};
        cfg.packet = PacketState::gaussian(GaussianPacket{center, momentum, alpha, 1.0});
        std::vector<AutocorrelationPoint> trace;
        {
          py::gil_scoped_release release;
          trace = autocorrelation(times, cfg);
        }
        return trace_dict(trace);
      },
      py::arg("times"), py::arg("g_root") = 0.04, py::arg("theta") = 0.03, py::arg("n_max") = 300,
      py::arg("center") = 0.0, py::arg("momentum") = 0.0, py::arg("alpha") = 1.0,
      "P(t) of a Gaussian exp(-alpha (q - center)^2 + i momentum q) from the complex-scaled eigenbasis.");

  m.def(
      "cn_autocorrelation",
      [](std::vector<double> times, double g_root, double half_width, double spacing, double time_step,
         double center, double momentum, double alpha) {
        const auto packet = PacketState::gaussian(GaussianPacket{center, momentum, alpha, 1.0});
        CnResult r;
        {
          py::gil_scoped_release release;
          r = cn_autocorrelation(packet, times, GridConfig{half_width, spacing, time_step}, g_root);
        }
        py::dict d = trace_dict(r.trace);
        d["edge_amplitude"] = r.edge_amplitude;
        d["boundary_warning"] = r.boundary_warning;
        d["norm_loss"] = r.norm_loss;
        return d;
      },
      py::arg("times"), py::arg("g_root") = 0.04, py::arg("half_width") = 300.0, py::arg("spacing") = 0.02,
      py::arg("time_step") = 0.002, py::arg("center") = 0.0, py::arg("momentum") = 0.0, py::arg("alpha") = 1.0,
      "Crank-Nicolson reference P(t) on a Dirichlet box.");
}
