#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rfmagic/errors.hpp"
#include "rfmagic/floquet.hpp"
#include "rfmagic/magic_solver.hpp"
#include "rfmagic/robustness.hpp"
#include "rfmagic/spin_algebra.hpp"
#include "rfmagic/static_spectrum.hpp"
#include "rfmagic/version.hpp"

namespace py = pybind11;
using namespace rfmagic;

PYBIND11_MODULE(_rfmagic, m) {
  m.doc() = "rf-dressed clock shifts and second-order magic traps";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ClassificationError>(m, "ClassificationError",
                                              PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument",
                                          PyExc_ValueError);

  py::class_<StateLabel>(m, "StateLabel")
      .def(py::init<int, int>(), py::arg("f_tilde"), py::arg("m"))
      .def_readwrite("f_tilde", &StateLabel::f_tilde)
      .def_readwrite("m", &StateLabel::m)
      .def("__eq__", [](const StateLabel& a, const StateLabel& b) { return a == b; })
      .def("__repr__", [](const StateLabel& l) { return to_string(l); });

  py::class_<AtomSpec>(m, "AtomSpec")
      .def(py::init<>())
      .def_static("rubidium87", &AtomSpec::rubidium87)
      .def_readwrite("i_spin", &AtomSpec::i_spin)
      .def_readwrite("j_spin", &AtomSpec::j_spin)
      .def_readwrite("g_j", &AtomSpec::g_j)
      .def_readwrite("g_i", &AtomSpec::g_i)
      .def_readwrite("hfs_frequency", &AtomSpec::hfs_frequency)
      .def_readwrite("clock_lower", &AtomSpec::clock_lower)
      .def_readwrite("clock_upper", &AtomSpec::clock_upper)
      .def("validate", &AtomSpec::validate);

  py::class_<TrapConfig>(m, "TrapConfig")
      .def(py::init([](double b_ioffe, double rf_amplitude, double rf_frequency,
                       double polarization_delta, double gradient) {
             TrapConfig t;
             t.b_ioffe = b_ioffe;
             t.rf_amplitude = rf_amplitude;
             t.rf_frequency = rf_frequency;
             t.polarization_delta = polarization_delta;
             t.gradient = gradient;
             t.validate();
             return t;
           }),
           py::arg("b_ioffe") = TrapConfig{}.b_ioffe,
           py::arg("rf_amplitude") = 0.0, py::arg("rf_frequency") = 2.0e6,
           py::arg("polarization_delta") = -constants::kPi / 4.0,
           py::arg("gradient") = 100.0)
      .def_readwrite("b_ioffe", &TrapConfig::b_ioffe)
      .def_readwrite("gradient", &TrapConfig::gradient)
      .def_readwrite("rf_amplitude", &TrapConfig::rf_amplitude)
      .def_readwrite("rf_frequency", &TrapConfig::rf_frequency)
      .def_readwrite("polarization_delta", &TrapConfig::polarization_delta)
      .def("validity_warnings", &TrapConfig::validity_warnings);

  py::enum_<Method>(m, "Method")
      .value("RWA", Method::Rwa)
      .value("WFFA", Method::Wffa)
      .value("FULL", Method::FullFloquet);

  py::enum_<ClockState>(m, "ClockState")
      .value("LOWER", ClockState::Lower)
      .value("UPPER", ClockState::Upper);

  py::class_<SpinOperators>(m, "SpinOperators")
      .def_readonly("f_total", &SpinOperators::f_total)
      .def_readonly("fx", &SpinOperators::fx)
      .def_readonly("fy", &SpinOperators::fy)
      .def_readonly("fz", &SpinOperators::fz)
      .def_readonly("f_plus", &SpinOperators::f_plus)
      .def_readonly("f_minus", &SpinOperators::f_minus);
  m.def("build_spin_operators", &build_spin_operators, py::arg("f_total"));

  m.def("breit_rabi_energy", &breit_rabi_energy, py::arg("atom"),
        py::arg("f_tilde"), py::arg("m"), py::arg("b0"));
  m.def("lande_g_factor", &lande_g_factor, py::arg("atom"), py::arg("f"));
  m.def("static_clock_shift", &static_clock_shift, py::arg("atom"),
        py::arg("b0"));

  py::class_<StaticMagicField>(m, "StaticMagicField")
      .def_readonly("b_magic", &StaticMagicField::b_magic)
      .def_readonly("curvature", &StaticMagicField::curvature)
      .def_readonly("shift_at_magic", &StaticMagicField::shift_at_magic)
      .def_property_readonly("quadratic_constant",
                             &StaticMagicField::quadratic_constant);
  m.def("find_static_magic_field", &find_static_magic_field, py::arg("atom"));

  py::class_<Quasienergy>(m, "Quasienergy")
      .def_readonly("label", &Quasienergy::label)
      .def_readonly("quasienergy", &Quasienergy::quasienergy)
      .def_readonly("level_shift", &Quasienergy::level_shift)
      .def_readonly("central_weight", &Quasienergy::central_weight);
  py::class_<QuasienergySpectrum>(m, "QuasienergySpectrum")
      .def_readonly("entries", &QuasienergySpectrum::entries)
      .def_readonly("eigenvalues", &QuasienergySpectrum::eigenvalues)
      .def_readonly("central_weights", &QuasienergySpectrum::central_weights)
      .def("at", &QuasienergySpectrum::at, py::arg("label"));

  m.def(
      "manifold_quasienergies",
      [](const AtomSpec& atom, const TrapConfig& trap, double chi, double alpha,
         int manifold, int n_blocks) {
        const auto point = local_field_point(trap, chi, alpha);
        const auto h = build_fourier_hamiltonian(atom, trap, point, manifold);
        return quasienergies(
            assemble_floquet_matrix(h, n_blocks, trap.rf_frequency));
      },
      py::arg("atom"), py::arg("trap"), py::arg("chi"), py::arg("alpha") = 0.0,
      py::arg("manifold") = 1, py::arg("n_blocks") = kDefaultFloquetBlocks);
  m.def(
      "full_model_quasienergies",
      [](const AtomSpec& atom, const TrapConfig& trap, double chi, double alpha,
         int n_blocks) {
        return full_model_quasienergies(
            atom, trap, local_field_point(trap, chi, alpha), n_blocks);
      },
      py::arg("atom"), py::arg("trap"), py::arg("chi"), py::arg("alpha") = 0.0,
      py::arg("n_blocks") = kDefaultFloquetBlocks);

  m.def(
      "dressed_clock_shift",
      [](const AtomSpec& atom, const TrapConfig& trap, double chi, double alpha,
         Method method, int n_blocks) {
        return dressed_clock_shift(atom, trap, chi, alpha, method,
                                   EngineOptions{n_blocks});
      },
      py::arg("atom"), py::arg("trap"), py::arg("chi"), py::arg("alpha") = 0.0,
      py::arg("method") = Method::Wffa,
      py::arg("n_blocks") = kDefaultFloquetBlocks);
  m.def(
      "trap_potential",
      [](const AtomSpec& atom, const TrapConfig& trap, double chi, double alpha,
         Method method, ClockState state) {
        return trap_potential(atom, trap, chi, alpha, method, state);
      },
      py::arg("atom"), py::arg("trap"), py::arg("chi"), py::arg("alpha") = 0.0,
      py::arg("method") = Method::Wffa, py::arg("state") = ClockState::Lower);

  py::class_<FitOptions>(m, "FitOptions")
      .def(py::init<>())
      .def_readwrite("chi_max", &FitOptions::chi_max)
      .def_readwrite("nodes", &FitOptions::nodes)
      .def_readwrite("degree", &FitOptions::degree);

  py::class_<ShiftExpansion>(m, "ShiftExpansion")
      .def_readonly("a0", &ShiftExpansion::a0)
      .def_readonly("a1", &ShiftExpansion::a1)
      .def_readonly("a2", &ShiftExpansion::a2)
      .def_readonly("a3", &ShiftExpansion::a3)
      .def_readonly("coefficients", &ShiftExpansion::coefficients)
      .def_readonly("fit_rms_residual", &ShiftExpansion::fit_rms_residual)
      .def_readonly("chi_max", &ShiftExpansion::chi_max)
      .def_readonly("window_warning", &ShiftExpansion::window_warning)
      .def("evaluate", &ShiftExpansion::evaluate, py::arg("chi"));
  m.def(
      "fit_shift_expansion",
      [](const AtomSpec& atom, const TrapConfig& trap, Method method,
         const FitOptions& fit, double alpha) {
        return fit_shift_expansion(atom, trap, method, fit, alpha);
      },
      py::arg("atom"), py::arg("trap"), py::arg("method") = Method::Wffa,
      py::arg("fit") = FitOptions{}, py::arg("alpha") = 0.0);

  py::class_<MagicPoint>(m, "MagicPoint")
      .def_readonly("rf_frequency", &MagicPoint::rf_frequency)
      .def_readonly("b_ioffe_magic", &MagicPoint::b_ioffe_magic)
      .def_readonly("b_rf_magic", &MagicPoint::b_rf_magic)
      .def_readonly("method", &MagicPoint::method)
      .def_readonly("expansion", &MagicPoint::expansion)
      .def_readonly("newton_iterations", &MagicPoint::newton_iterations)
      .def_readonly("residual", &MagicPoint::residual)
      .def("trap", &MagicPoint::trap, py::arg("gradient") = 100.0,
           py::arg("polarization_delta") = -constants::kPi / 4.0);
  m.def(
      "solve_magic_point",
      [](const AtomSpec& atom, double rf_frequency, Method method,
         std::optional<std::pair<double, double>> guess) {
        py::gil_scoped_release release;
        return solve_magic_point(atom, rf_frequency, method, guess);
      },
      py::arg("atom"), py::arg("rf_frequency"), py::arg("method") = Method::Wffa,
      py::arg("initial_guess") = std::nullopt);
  m.def(
      "magic_scan",
      [](const AtomSpec& atom, const std::vector<double>& frequencies,
         Method method) {
        std::vector<MagicScanRow> rows;
        {
          py::gil_scoped_release release;
          rows = magic_scan(atom, frequencies, method);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["rf_frequency"] = r.rf_frequency;
          d["point"] = r.point ? py::cast(*r.point) : py::none();
          d["error"] = r.error;
          out.append(d);
        }
        return out;
      },
      py::arg("atom"), py::arg("frequencies"), py::arg("method") = Method::Wffa);

  py::class_<AdiabaticityMargin>(m, "AdiabaticityMargin")
      .def_readonly("resonance_frequency", &AdiabaticityMargin::resonance_frequency)
      .def_readonly("detuning", &AdiabaticityMargin::detuning)
      .def_readonly("thermal_scale", &AdiabaticityMargin::thermal_scale)
      .def_readonly("ratio", &AdiabaticityMargin::ratio);
  m.def("adiabaticity_margin", &adiabaticity_margin, py::arg("atom"),
        py::arg("trap"), py::arg("temperature"), py::arg("trap_frequency_xy"));

  py::class_<DeviationBudget>(m, "DeviationBudget")
      .def(py::init<double, double, double>(), py::arg("rel_ioffe") = 0.0,
           py::arg("rel_rf") = 0.0, py::arg("polarization_offset") = 0.0)
      .def_static("atom_chip", &DeviationBudget::atom_chip)
      .def_readwrite("rel_ioffe", &DeviationBudget::rel_ioffe)
      .def_readwrite("rel_rf", &DeviationBudget::rel_rf)
      .def_readwrite("polarization_offset", &DeviationBudget::polarization_offset);

  m.def(
      "rms_shift_deviation",
      [](const AtomSpec& atom, const TrapConfig& trap,
         const DeviationBudget& budget, double chi, double alpha,
         Method method) {
        return rms_shift_deviation(atom, trap, budget, chi, alpha, method);
      },
      py::arg("atom"), py::arg("trap"), py::arg("budget"), py::arg("chi"),
      py::arg("alpha") = 0.0, py::arg("method") = Method::Wffa);

  m.def(
      "shift_profile",
      [](const AtomSpec& atom, const TrapConfig& trap,
         std::optional<DeviationBudget> budget, double u_max, Method method,
         int points, bool log_spacing) {
        ProfileOptions po;
        po.points = points;
        po.log_spacing = log_spacing;
        ShiftProfile p;
        {
          py::gil_scoped_release release;
          p = shift_profile(atom, trap, budget, u_max, method, po);
        }
        py::dict d;
        py::list rows;
        for (const auto& r : p.rows) {
          rows.append(py::make_tuple(r.u_trap, r.chi, r.radius, r.shift,
                                     r.rms_deviation));
        }
        d["rows"] = rows;
        d["columns"] = py::make_tuple("u_trap_Hz", "chi_G2", "radius_um",
                                      "shift_Hz", "rms_deviation_Hz");
        d["truncated"] = p.truncated;
        d["warning"] = p.warning;
        return d;
      },
      py::arg("atom"), py::arg("trap"), py::arg("budget") = std::nullopt,
      py::arg("u_max") = 175e3, py::arg("method") = Method::Wffa,
      py::arg("points") = 41, py::arg("log_spacing") = false);

  m.def(
      "sensitivity_report",
      [](const AtomSpec& atom, const MagicPoint& magic) {
        SensitivityReport r;
        {
          py::gil_scoped_release release;
          r = sensitivity_report(atom, magic);
        }
        py::dict d;
        d["alpha_ioffe"] = r.field.alpha_ioffe;
        d["alpha_rf"] = r.field.alpha_rf;
        d["beta0"] = r.polarization.beta0;
        d["beta"] = r.polarization.beta;
        d["gamma"] = r.polarization.gamma;
        d["higher_harmonic_rms"] = r.polarization.higher_harmonic_rms;
        d["fit_warning"] = r.fit_warning;
        return d;
      },
      py::arg("atom"), py::arg("magic"));
}
