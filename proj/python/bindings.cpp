#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aerostp/analysis.hpp"
#include "aerostp/errors.hpp"
#include "aerostp/model.hpp"
#include "aerostp/montecarlo.hpp"
#include "aerostp/sweep.hpp"

namespace py = pybind11;
using namespace aerostp;

namespace {

py::dict association_dict(const AssociationTable& t) {
  py::dict d;
  for (const auto& [cls, v] : t.entries) d[py::str(to_string(cls))] = v;
  return d;
}

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["stderr"] = e.std_error;
  d["trials"] = e.trials;
  return d;
}

py::list points_list(const SweepResult& r) {
  py::list out;
  for (const auto& p : r.points) {
    py::dict d;
    d["coords"] = p.coords;
    d["analytic_stp"] = p.analytic_stp;
    d["analytic_error"] = p.analytic_error;
    if (p.mc) {
      d["mc"] = estimate_dict(*p.mc);
    } else {
      d["mc"] = py::none();
    }
    d["association"] = p.association ? py::object(association_dict(*p.association)) : py::none();
    d["error"] = p.error;
    out.append(d);
  }
  return out;
}

LinkClass link_class(std::size_t layer, Environment env) { return {layer, env}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Analytic and Monte Carlo success probability of multi-layer aerial networks.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", base.ptr());
  py::register_exception<UnsupportedCaseError>(m, "UnsupportedCaseError", base.ptr());
  py::register_exception<NumericalConsistencyError>(m, "NumericalConsistencyError", base.ptr());
  py::register_exception<UndefinedDistributionError>(m, "UndefinedDistributionError",
                                                     base.ptr());

  py::enum_<Environment>(m, "Environment")
      .value("LOS", Environment::kLos)
      .value("NLOS", Environment::kNlos);
  py::enum_<LosModel>(m, "LosModel")
      .value("ELEVATION", LosModel::kElevation)
      .value("ALWAYS_LOS", LosModel::kAlwaysLos)
      .value("ALWAYS_NLOS", LosModel::kAlwaysNlos);

  py::class_<LayerSpec>(m, "LayerSpec")
      .def(py::init([](double density, double altitude, double power) {
             return LayerSpec{density, altitude, power};
           }),
           py::arg("density"), py::arg("altitude"), py::arg("power") = 1.0)
      .def_readwrite("density", &LayerSpec::density)
      .def_readwrite("altitude", &LayerSpec::altitude)
      .def_readwrite("power", &LayerSpec::power)
      .def("__repr__", [](const LayerSpec& l) {
        return "LayerSpec(density=" + std::to_string(l.density) +
               ", altitude=" + std::to_string(l.altitude) + ", power=" + std::to_string(l.power) +
               ")";
      });

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<>())
      .def_readwrite("a", &ChannelParams::a)
      .def_readwrite("b", &ChannelParams::b)
      .def_readwrite("alpha_los", &ChannelParams::alpha_los)
      .def_readwrite("alpha_nlos", &ChannelParams::alpha_nlos)
      .def_readwrite("m_los", &ChannelParams::m_los)
      .def_readwrite("m_nlos", &ChannelParams::m_nlos)
      .def_readwrite("beta", &ChannelParams::beta)
      .def_readwrite("noise", &ChannelParams::noise)
      .def_readwrite("los_model", &ChannelParams::los_model);

  py::class_<NetworkSpec>(m, "NetworkSpec")
      .def(py::init([](std::vector<LayerSpec> layers, const ChannelParams& channel) {
             NetworkSpec n{std::move(layers), channel};
             validate(n);
             return n;
           }),
           py::arg("layers"), py::arg("channel") = ChannelParams{})
      .def_readwrite("layers", &NetworkSpec::layers)
      .def_readwrite("channel", &NetworkSpec::channel);

  py::class_<LinkClass>(m, "LinkClass")
      .def(py::init(&link_class), py::arg("layer"), py::arg("env"))
      .def_readwrite("layer", &LinkClass::layer)
      .def_readwrite("env", &LinkClass::env)
      .def("__str__", [](const LinkClass& c) { return to_string(c); });

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("trials", &SimConfig::trials)
      .def_readwrite("window_radius", &SimConfig::window_radius)
      .def_readwrite("far_field_radius", &SimConfig::far_field_radius)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("bin_width", &SimConfig::bin_width)
      .def_readwrite("threads", &SimConfig::threads);

  m.def("los_probability", &los_probability, py::arg("layer"), py::arg("channel"), py::arg("x"));
  m.def("env_probability", &env_probability, py::arg("layer"), py::arg("channel"),
        py::arg("env"), py::arg("x"));

  m.def(
      "total_stp",
      [](const NetworkSpec& n) {
        const auto r = total_stp(n);
        return py::make_tuple(r.value, r.error);
      },
      py::arg("network"), "Analytic STP as (value, quadrature error estimate).");
  m.def(
      "association_probability",
      [](const NetworkSpec& n) { return association_dict(association_probability(n)); },
      py::arg("network"));
  m.def(
      "conditional_stp",
      [](const NetworkSpec& n, const LinkClass& c, double y) { return conditional_stp(n, c, y); },
      py::arg("network"), py::arg("cls"), py::arg("y"));
  m.def(
      "nearest_ccdf",
      [](const NetworkSpec& n, const LinkClass& c, double v) { return nearest_ccdf(n, c, v); },
      py::arg("network"), py::arg("cls"), py::arg("v"));
  m.def(
      "mainlink_pdf",
      [](const NetworkSpec& n, const LinkClass& c, double y) { return mainlink_pdf(n, c, y); },
      py::arg("network"), py::arg("cls"), py::arg("y"));
  m.def(
      "density_upper_bound",
      [](const LayerSpec& l, const ChannelParams& c) { return density_upper_bound(l, c); },
      py::arg("layer"), py::arg("channel"));

  m.def(
      "simulate",
      [](const NetworkSpec& n, const SimConfig& cfg) {
        SimSummary s;
        {
          py::gil_scoped_release release;
          s = simulate(n, cfg);
        }
        py::dict d;
        d["stp"] = estimate_dict(estimate_stp(s));
        d["empty_windows"] = s.empty_windows;
        py::dict assoc;
        for (const auto& [cls, e] : estimate_association(n, s)) {
          assoc[py::str(to_string(cls))] = estimate_dict(e);
        }
        d["association"] = assoc;
        return d;
      },
      py::arg("network"), py::arg("config") = SimConfig{});

  m.def(
      "sweep_1d",
      [](const NetworkSpec& n, const std::string& parameter, const std::vector<double>& values,
         bool analytic, bool montecarlo, const SimConfig& sim, unsigned threads) {
        SweepOptions opt;
        opt.engines = {analytic, montecarlo};
        opt.sim = sim;
        opt.threads = threads;
        SweepResult r;
        {
          py::gil_scoped_release release;
          r = sweep_1d(n, GridSpec{parameter, values}, opt);
        }
        return points_list(r);
      },
      py::arg("network"), py::arg("parameter"), py::arg("values"), py::arg("analytic") = true,
      py::arg("montecarlo") = false, py::arg("sim") = SimConfig{}, py::arg("threads") = 1u);

  m.def(
      "optimal_density",
      [](const NetworkSpec& n, std::size_t layer, const std::vector<double>& densities,
         unsigned threads) {
        OptimalDensity od;
        {
          py::gil_scoped_release release;
          od = optimal_density(n, layer, GridSpec{"lambda", densities}, {}, threads);
        }
        py::dict d;
        d["argmax_density"] = od.argmax_density;
        d["max_stp"] = od.max_stp;
        d["bound"] = od.bound;
        d["bound_ge_argmax"] = od.bound_ge_argmax;
        d["boundary_solution"] = od.boundary_solution;
        d["warning"] = od.warning;
        d["stp"] = od.stp;
        return d;
      },
      py::arg("network"), py::arg("layer"), py::arg("densities"), py::arg("threads") = 1u);

  m.def(
      "iso_total_density",
      [](const NetworkSpec& n, double total, const std::vector<double>& fractions,
         unsigned threads) {
        SweepOptions opt;
        opt.threads = threads;
        IsoDensityResult r;
        {
          py::gil_scoped_release release;
          r = iso_total_density(n, total, fractions, opt);
        }
        py::dict d;
        d["argmax_fraction"] = r.argmax_fraction;
        d["max_stp"] = r.max_stp;
        d["points"] = points_list(r.sweep);
        return d;
      },
      py::arg("network"), py::arg("total"), py::arg("fractions"), py::arg("threads") = 1u);

  m.attr("__version__") = engine_version();
}
