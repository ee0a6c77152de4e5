#include "softdd/acceptance.hpp"
#include "softdd/experiment.hpp"
#include "softdd/fidelity.hpp"
#include "softdd/magnus.hpp"
#include "softdd/noise.hpp"
#include "softdd/propagator.hpp"
#include "softdd/shape_coeffs.hpp"
#include "softdd/shape_designer.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace softdd;

namespace {

const ShapeRegistry& registry() { return ShapeRegistry::builtin(); }

PulseShape shape_arg(const std::string& name) { return resolve_shape(name, registry()); }

}  // namespace

PYBIND11_MODULE(_softdd, m) {
  m.doc() = "Soft-pulse dynamical decoupling core";
  m.attr("__version__") = SOFTDD_VERSION;

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::enum_<ShapeKind>(m, "ShapeKind")
      .value("Delta", ShapeKind::Delta)
      .value("Gaussian", ShapeKind::Gaussian)
      .value("Fourier", ShapeKind::Fourier);

  py::class_<PulseShape>(m, "PulseShape")
      .def_static("delta", &PulseShape::delta, py::arg("phi0"), py::arg("tau_p") = 1.0)
      .def_static("gaussian", &PulseShape::gaussian, py::arg("width"), py::arg("phi0"), py::arg("tau_p") = 1.0)
      .def_static("fourier", &PulseShape::fourier, py::arg("cos_coeffs"), py::arg("sin_coeffs") = std::vector<double>{},
                  py::arg("tau_p") = 1.0)
      .def_property_readonly("kind", &PulseShape::kind)
      .def_property_readonly("phi0", &PulseShape::phi0)
      .def_property_readonly("tau_p", &PulseShape::tau_p)
      .def_property_readonly("width", &PulseShape::width)
      .def_property_readonly("name", &PulseShape::name)
      .def_property_readonly("cos_coeffs",
                             [](const PulseShape& s) {
                               return std::vector<double>(s.cos_coeffs().begin(), s.cos_coeffs().end());
                             })
      .def("waveform", [](const PulseShape& s, double t) { return evaluate_waveform(s, t); })
      .def("phase", [](const PulseShape& s, double t) { return phase(s, t); })
      .def("peak_amplitude", [](const PulseShape& s) { return peak_amplitude(s); })
      .def("__repr__", [](const PulseShape& s) {
        return "<PulseShape " + (s.name().empty() ? std::string(to_string(s.kind())) : s.name()) + ">";
      });

  m.def("shape", &shape_arg, py::arg("name"), "Registry shape, designed preset or 'delta:<angle>'.");
  m.def("shape_names", [] { return registry().names(); });

  py::class_<ShapeCoefficients>(m, "ShapeCoefficients")
      .def_readonly("upsilon", &ShapeCoefficients::upsilon)
      .def_readonly("upsilon2", &ShapeCoefficients::upsilon2)
      .def_readonly("alpha", &ShapeCoefficients::alpha)
      .def_readonly("alpha2", &ShapeCoefficients::alpha2)
      .def_readonly("zeta", &ShapeCoefficients::zeta)
      .def_readonly("zeta2", &ShapeCoefficients::zeta2)
      .def_readonly("mu", &ShapeCoefficients::mu)
      .def("as_dict", [](const ShapeCoefficients& c) {
        return py::dict(py::arg("upsilon") = c.upsilon, py::arg("upsilon2") = c.upsilon2,
                        py::arg("alpha") = c.alpha, py::arg("alpha2") = c.alpha2, py::arg("zeta") = c.zeta,
                        py::arg("zeta2") = c.zeta2, py::arg("mu") = c.mu);
      });

  m.def("coefficients", [](const PulseShape& s) { return compute_coefficients(s); }, py::arg("shape"));
  m.def("coefficients", [](const std::string& name) { return compute_coefficients(shape_arg(name)); },
        py::arg("name"));
  m.def("coefficient_table_csv",
        [](const std::vector<std::string>& shapes) { return coefficient_table_csv(shapes); });

  py::class_<RateModel>(m, "RateModel")
      .def(py::init<>())
      .def_static("nmr", &RateModel::nmr, py::arg("gamma"), py::arg("gamma_phi"), py::arg("B") = Vec3::Zero())
      .def_readwrite("gamma_hat", &RateModel::gamma_hat)
      .def_readwrite("B", &RateModel::B)
      .def("generator", [](const RateModel& r) { return build_generator(r); })
      .def("symmetrized_target", [](const RateModel& r) { return symmetrized_target(r); });

  py::class_<Sequence>(m, "Sequence")
      .def(py::init([](const std::string& name, const PulseShape& s) { return make_sequence(name, s); }),
           py::arg("name_or_dsl"), py::arg("shape"))
      .def(py::init([](const std::string& name, const std::string& s) { return make_sequence(name, shape_arg(s)); }),
           py::arg("name_or_dsl"), py::arg("shape"))
      .def_property_readonly("name", &Sequence::name)
      .def_property_readonly("period", &Sequence::period)
      .def_property_readonly("size", &Sequence::size)
      .def("dsl", &Sequence::dsl)
      .def("control_rotation", [](const Sequence& s, double t) { return control_rotation(s, t); });
  m.def("sequence_names", &catalogue_sequence_names);

  py::class_<CumulantResult>(m, "CumulantResult")
      .def_readonly("gamma0", &CumulantResult::gamma0)
      .def_readonly("gamma1", &CumulantResult::gamma1)
      .def_readonly("residual_norm", &CumulantResult::residual_norm)
      .def_readonly("tau", &CumulantResult::tau)
      .def_readonly("period_rotation", &CumulantResult::period_rotation);
  m.def("cumulants", [](const Sequence& s, const RateModel& r) { return cumulants(s, r); }, py::arg("sequence"),
        py::arg("model"));
  m.def("analytic_gamma0",
        [](const std::string& which, const RateModel& r, const ShapeCoefficients& c) {
          return analytic_gamma0(parse_analytic_case(which), r, c);
        },
        py::arg("case"), py::arg("model"), py::arg("coeffs") = ShapeCoefficients{});

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init<>())
      .def_readwrite("B0", &NoiseSpec::B0)
      .def_readwrite("tau_c", &NoiseSpec::tau_c)
      .def_readwrite("dt", &NoiseSpec::dt)
      .def_readwrite("T_total", &NoiseSpec::T_total)
      .def_readwrite("seed", &NoiseSpec::seed);
  py::class_<NoiseRealization>(m, "NoiseRealization")
      .def_readonly("samples", &NoiseRealization::samples)
      .def_readonly("dt", &NoiseRealization::dt)
      .def_readonly("seed", &NoiseRealization::seed);
  m.def("generate_noise", &generate, py::arg("spec"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("index"));

  py::class_<EvolutionRecord>(m, "EvolutionRecord")
      .def_readonly("times", &EvolutionRecord::times)
      .def_readonly("Q", &EvolutionRecord::Q)
      .def_readonly("dt", &EvolutionRecord::dt)
      .def("fidelity", [](const EvolutionRecord& r) { return average_fidelity(r); });
  m.def(
      "propagate",
      [](const Sequence& s, const RateModel& r, const NoiseRealization* noise, int n_periods, double dt) {
        py::gil_scoped_release release;
        return propagate(s, r, noise, n_periods, dt > 0.0 ? dt : auto_step(s));
      },
      py::arg("sequence"), py::arg("model"), py::arg("noise") = nullptr, py::arg("n_periods") = 1,
      py::arg("dt") = 0.0);

  m.def("ideal_fidelity", &ideal_fidelity, py::arg("model"), py::arg("t"));
  m.def("redistribution_fidelity", &redistribution_fidelity, py::arg("t"), py::arg("gamma_phi"), py::arg("upsilon2"));

  py::class_<DesignResult>(m, "DesignResult")
      .def_readonly("shape", &DesignResult::shape)
      .def_readonly("coeffs", &DesignResult::coeffs)
      .def_readonly("residual", &DesignResult::residual)
      .def_readonly("restart", &DesignResult::restart);
  m.def(
      "design",
      [](double phi0, int n_harmonics, int smoothness, const std::string& targets, std::optional<double> bound,
         int restarts, std::uint64_t seed, int jobs) {
        DesignSpec spec;
        spec.phi0 = phi0;
        spec.n_harmonics = n_harmonics;
        spec.smoothness = smoothness;
        spec.targets = parse_targets(targets);
        spec.amplitude_bound = bound;
        spec.restarts = restarts;
        py::gil_scoped_release release;
        return design(spec, seed, jobs);
      },
      py::arg("phi0"), py::arg("n_harmonics"), py::arg("smoothness"), py::arg("targets"),
      py::arg("amplitude_bound") = py::none(), py::arg("restarts") = 16, py::arg("seed") = 1, py::arg("jobs") = 1);

  m.def(
      "run_preset",
      [](const std::string& name, const std::filesystem::path& out, std::optional<int> realizations,
         std::optional<std::uint64_t> seed, int jobs) {
        ExperimentConfig cfg = preset_config(name);
        if (realizations) cfg.spec.realizations = *realizations;
        if (seed) cfg.spec.noise.seed = *seed;
        cfg.spec.jobs = jobs;
        py::gil_scoped_release release;
        const RunSummary r = run(cfg, out);
        return py::make_tuple(r.files, r.failed);
      },
      py::arg("name"), py::arg("out"), py::arg("realizations") = py::none(), py::arg("seed") = py::none(),
      py::arg("jobs") = 0);
  m.def("preset_names", &preset_names);

  m.def(
      "verify",
      [](std::vector<int> only, int jobs) {
        AcceptanceOptions o;
        o.only = std::move(only);
        o.jobs = jobs;
        py::gil_scoped_release release;
        const auto results = run_acceptance(o);
        py::gil_scoped_acquire acquire;
        py::list out;
        for (const auto& r : results) {
          out.append(py::dict(py::arg("id") = r.id, py::arg("name") = r.name, py::arg("passed") = r.passed,
                              py::arg("measured") = r.measured, py::arg("error") = r.error));
        }
        return out;
      },
      py::arg("only") = std::vector<int>{}, py::arg("jobs") = 0);
}
