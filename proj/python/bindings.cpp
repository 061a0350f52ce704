#include <filesystem>
#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "twistring/cli_io.hpp"
#include "twistring/continuation.hpp"
#include "twistring/evolution.hpp"
#include "twistring/stability.hpp"

namespace py = pybind11;
using namespace twistring;

namespace {

LatticeConfig make_config(std::size_t n, double omega, py::object k, double phi, const std::string& convention,
                          const std::string& nonlinearity) {
  LatticeConfig c;
  c.n_sites = n;
  c.omega = omega;
  c.twist = phi;
  if (py::isinstance<py::float_>(k) || py::isinstance<py::int_>(k)) {
    c.couplings = CouplingProfile::uniform(k.cast<double>());
  } else {
    auto list = k.cast<std::vector<double>>();
    if (convention == "site") c.couplings = CouplingProfile::per_edge(std::move(list));
    else if (convention == "bond") c.couplings = CouplingProfile::per_bond(std::move(list));
    else throw InvalidArgument("convention must be 'site' or 'bond'");
  }
  if (nonlinearity == "focusing") c.nonlinearity = Nonlinearity::focusing;
  else if (nonlinearity != "defocusing") throw InvalidArgument("nonlinearity must be 'defocusing' or 'focusing'");
  c.validate();
  return c;
}

std::vector<Complex> field(const StandingWave& sw, const LatticeConfig& cfg) { return to_complex(sw, 0.0, cfg).values; }

}  // namespace

PYBIND11_MODULE(_twistring, m) {
  m.doc() = "Standing waves of the twisted ring lattice";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<LatticeConfig>(m, "LatticeConfig")
      .def(py::init(&make_config), py::arg("n"), py::arg("omega") = 1.0, py::arg("k") = py::float_(0.0),
           py::arg("phi") = 0.0, py::arg("convention") = "site", py::arg("nonlinearity") = "defocusing")
      .def_readonly("n", &LatticeConfig::n_sites)
      .def_readonly("omega", &LatticeConfig::omega)
      .def_readonly("phi", &LatticeConfig::twist)
      .def_property_readonly("k", [](const LatticeConfig& c) { return c.couplings.expand(c.n_sites); });

  py::class_<StandingWave>(m, "StandingWave")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("amplitudes"), py::arg("phases"))
      .def_property_readonly("amplitudes", &StandingWave::amplitudes)
      .def_property_readonly("phases", &StandingWave::phases)
      .def("__len__", &StandingWave::size);

  m.def("residual", [](const StandingWave& sw, const LatticeConfig& c) { return residual(sw, c); });
  m.def("field", &field, "complex c_n at z = 0");

  m.def(
      "solve",
      [](const LatticeConfig& cfg, std::vector<std::size_t> excited) {
        for (auto& s : excited) s -= 1;  // 1-based in Python
        const auto t = trace_from_ac(cfg, excited);
        if (!t.complete) throw Error("continuation stopped: " + t.coupling_leg.note + t.twist_leg.note);
        return t.endpoint;
      },
      py::arg("config"), py::arg("excited") = std::vector<std::size_t>{1},
      "Continue from the anti-continuum limit (sites are 1-based).");

  m.def(
      "dark_node",
      [](const LatticeConfig& cfg) {
        if (!cfg.couplings.is_uniform()) throw InvalidArgument("dark_node needs uniform coupling");
        const double k = cfg.couplings.at(0);
        const Branch b = continue_reduced(reduced_ac_seed(cfg.n_sites, cfg.omega), cfg.omega, 0.0, k);
        if (b.truncated) throw Error(b.note);
        return reconstruct(std::get<ReducedAmplitudes>(b.points.back().solution), cfg);
      },
      py::arg("config"), "Dark-node state at phi = pi/N from the reduced equations.");

  m.def(
      "spectrum",
      [](const StandingWave& sw, const LatticeConfig& cfg, double zero_tol) {
        const Spectrum s = spectrum_of(sw, cfg, zero_tol);
        py::dict d;
        d["eigenvalues"] = s.eigenvalues;
        d["max_real_part"] = s.max_real_part;
        d["kernel"] = s.kernel_algebraic_multiplicity;
        d["classification"] = std::string(to_string(s.classification));
        return d;
      },
      py::arg("wave"), py::arg("config"), py::arg("zero_tol") = 1e-8);

  m.def(
      "evolve",
      [](std::vector<Complex> c0, const LatticeConfig& cfg, double z_max, double dz, std::size_t stride) {
        const Trajectory t = evolve(ComplexState{std::move(c0)}, cfg, z_max, dz, stride);
        std::vector<std::vector<Complex>> states;
        for (const auto& s : t.states) states.push_back(s.values);
        py::dict d;
        d["z"] = t.z_samples;
        d["states"] = states;
        d["power"] = t.power;
        d["hamiltonian"] = t.hamiltonian;
        d["diverged"] = t.diverged;
        return d;
      },
      py::arg("c0"), py::arg("config"), py::arg("z_max"), py::arg("dz") = 1e-3, py::arg("stride") = 0);

  m.def(
      "detect_k0", [](std::size_t n, double omega) { return detect_k0(n, omega).k0; }, py::arg("n"),
      py::arg("omega") = 1.0);

  m.def(
      "read_solution",
      [](const std::filesystem::path& p) {
        const SolutionFile f = read_solution(p);
        return py::make_tuple(f.wave, f.config);
      },
      py::arg("path"));

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "twistring");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run a CLI subcommand in process; returns (exit code, stdout, stderr).");
}
