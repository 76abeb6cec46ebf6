#include "cli.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfmagic/errors.hpp"
#include "rfmagic/magic_solver.hpp"
#include "rfmagic/robustness.hpp"
#include "rfmagic/static_spectrum.hpp"
#include "rfmagic/version.hpp"

namespace rfmagic::cli {

namespace {

using nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr double kDeg = constants::kPi / 180.0;

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

ordered_json label_json(const StateLabel& l) {
  return ordered_json::array({l.f_tilde, l.m});
}

StateLabel label_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) {
    throw InvalidArgument(std::string(key) + " must be [F, m]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

ordered_json atom_json(const AtomSpec& a) {
  return {{"i_spin", a.i_spin},
          {"j_spin", a.j_spin},
          {"g_j", a.g_j},
          {"g_i", a.g_i},
          {"hfs_frequency_Hz", a.hfs_frequency},
          {"clock_lower", label_json(a.clock_lower)},
          {"clock_upper", label_json(a.clock_upper)}};
}

ordered_json trap_json(const TrapConfig& t) {
  return {{"b_ioffe_G", t.b_ioffe},
          {"gradient_G_per_cm", t.gradient},
          {"rf_amplitude_G", t.rf_amplitude},
          {"rf_frequency_Hz", t.rf_frequency},
          {"polarization_delta_rad", t.polarization_delta}};
}

ordered_json fit_json(const FitOptions& f) {
  return {{"chi_max_G2", f.chi_max}, {"nodes", f.nodes}, {"degree", f.degree}};
}

ordered_json solver_json(const SolverOptions& s) {
  return {{"fit", fit_json(s.fit)},
          {"n_blocks", s.engine.n_blocks},
          {"a1_tolerance_Hz_per_G2", s.a1_tolerance},
          {"a2_tolerance_Hz_per_G4", s.a2_tolerance},
          {"step_tolerance", s.step_tolerance},
          {"max_iterations", s.max_iterations},
          {"max_halvings", s.max_halvings},
          {"seed_frequency_Hz", s.seed_frequency},
          {"seed_b_ioffe_G", s.seed_point.first},
          {"seed_b_rf_G", s.seed_point.second},
          {"continuation_step_Hz", s.continuation_step}};
}

ordered_json manifest(const std::string& command, ordered_json parameters) {
  return {{"schema_version", kSchemaVersion},
          {"tool", "rfmagic"},
          {"version", kVersion},
          {"command", command},
          {"parameters", std::move(parameters)},
          {"timestamp", timestamp()}};
}

AtomSpec load_atom(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open atom file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("atom file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("atom file must hold an object");
  AtomSpec a;
  for (const auto& [key, value] : j.items()) {
    if (key == "i_spin") {
      a.i_spin = value.get<double>();
    } else if (key == "j_spin") {
      a.j_spin = value.get<double>();
    } else if (key == "g_j") {
      a.g_j = value.get<double>();
    } else if (key == "g_i") {
      a.g_i = value.get<double>();
    } else if (key == "hfs_frequency_Hz") {
      a.hfs_frequency = value.get<double>();
    } else if (key == "clock_lower") {
      a.clock_lower = label_from_json(value, "clock_lower");
    } else if (key == "clock_upper") {
      a.clock_upper = label_from_json(value, "clock_upper");
    } else {
      throw InvalidArgument("atom file: unknown key '" + key + "'");
    }
  }
  a.validate();
  return a;
}

// Atom selection shared by every subcommand.
struct AtomArgs {
  std::string file;
  std::optional<double> g_i, g_j, hfs;

  void add(CLI::App* app) {
    app->add_option("--atom-file", file, "JSON file with atom constants");
    app->add_option("--g-i", g_i, "nuclear g-factor override");
    app->add_option("--g-j", g_j, "electronic g-factor override");
    app->add_option("--hfs", hfs, "hyperfine splitting override, Hz");
  }

  AtomSpec resolve() const {
    AtomSpec a = file.empty() ? AtomSpec::rubidium87() : load_atom(file);
    if (g_i) a.g_i = *g_i;
    if (g_j) a.g_j = *g_j;
    if (hfs) a.hfs_frequency = *hfs;
    a.validate();
    return a;
  }
};

struct SolverArgs {
  std::string method = "wffa";
  int blocks = kDefaultFloquetBlocks;
  double chi_max = FitOptions{}.chi_max;
  int nodes = FitOptions{}.nodes;
  int degree = FitOptions{}.degree;

  void add(CLI::App* app) {
    app->add_option("--method", method, "rwa, wffa or full")
        ->check(CLI::IsMember({"rwa", "wffa", "full"}, CLI::ignore_case));
    app->add_option("--blocks", blocks, "Floquet blocks (odd, >= 3)")
        ->check(CLI::Range(3, 401));
    app->add_option("--chi-max", chi_max, "fit window, G^2")
        ->check(CLI::PositiveNumber);
    app->add_option("--fit-nodes", nodes, "Chebyshev fit nodes");
    app->add_option("--fit-degree", degree, "fit polynomial degree");
  }

  SolverOptions options() const {
    if (blocks % 2 == 0) throw InvalidArgument("--blocks must be odd");
    SolverOptions s;
    s.engine.n_blocks = blocks;
    s.fit = {chi_max, nodes, degree};
    return s;
  }
};

void write_text(const std::string& path, const std::string& text,
                std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << text;
}

// ---------------------------------------------------------------- commands

int static_magic(const AtomArgs& atom_args, std::ostream& out) {
  const AtomSpec atom = atom_args.resolve();
  const StaticMagicField m = find_static_magic_field(atom);
  ordered_json j;
  j["manifest"] = manifest("static-magic", {{"atom", atom_json(atom)}});
  j["b_magic_G"] = m.b_magic;
  j["curvature_Hz_per_G2"] = m.curvature;
  j["quadratic_constant_Hz_per_G2"] = m.quadratic_constant();
  j["shift_at_magic_Hz"] = m.shift_at_magic;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct ScanArgs {
  double start = 0.5e6, stop = 2.2e6, step = 0.1e6;
  std::string out_path, manifest_path;
};

int magic_scan_cmd(const AtomArgs& atom_args, const SolverArgs& solver_args,
                   const ScanArgs& scan, std::ostream& out) {
  const AtomSpec atom = atom_args.resolve();
  const SolverOptions opt = solver_args.options();
  const Method method = parse_method(solver_args.method);
  if (!(scan.step > 0.0) || !(scan.stop >= scan.start) || !(scan.start > 0.0)) {
    throw InvalidArgument(
        "empty frequency range (need 0 < start <= stop and step > 0)");
  }
  std::vector<double> freqs;
  const auto count =
      static_cast<long>(std::floor((scan.stop - scan.start) / scan.step + 1e-9));
  for (long i = 0; i <= count; ++i) freqs.push_back(scan.start + i * scan.step);

  const auto rows = magic_scan(atom, freqs, method, opt);
  std::ostringstream csv;
  csv << "rf_frequency_Hz,b_ioffe_magic_G,b_rf_magic_G,a0_Hz,a1_Hz_per_G2,"
         "a2_Hz_per_G4,a3_Hz_per_G6,fit_rms_Hz,iterations,status\n";
  int failures = 0;
  for (const auto& r : rows) {
    csv << num(r.rf_frequency) << ',';
    if (r.point) {
      const auto& p = *r.point;
      csv << num(p.b_ioffe_magic) << ',' << num(p.b_rf_magic) << ','
          << num(p.expansion.a0) << ',' << num(p.expansion.a1) << ','
          << num(p.expansion.a2) << ',' << num(p.expansion.a3) << ','
          << num(p.expansion.fit_rms_residual) << ',' << p.newton_iterations
          << ",ok\n";
    } else {
      ++failures;
      std::string reason = r.error;
      for (char& c : reason) {
        if (c == ',' || c == '\n') c = ';';
      }
      csv << ",,,,,,,,failed: " << reason << '\n';
    }
  }
  write_text(scan.out_path, csv.str(), out);

  ordered_json params{{"atom", atom_json(atom)},
                      {"method", to_string(method)},
                      {"frequencies_Hz", freqs},
                      {"polarization_delta_rad", opt.polarization_delta},
                      {"solver", solver_json(opt)}};
  std::string mpath = scan.manifest_path;
  if (mpath.empty() && !scan.out_path.empty() && scan.out_path != "-") {
    mpath = scan.out_path + ".manifest.json";
  }
  if (!mpath.empty()) {
    ordered_json m = manifest("magic-scan", std::move(params));
    m["failed_rows"] = failures;
    write_text(mpath, m.dump(2) + "\n", out);
  }
  return failures == static_cast<int>(rows.size()) ? kExitNumerical : kExitOk;
}

struct ProfileArgs {
  std::optional<double> b_ioffe;
  double b_rf = 0.0;
  double freq = 2.0e6;
  double delta = -constants::kPi / 4.0;
  double gradient = 100.0;
  double u_max = 175e3;
  int points = 41;
  bool log_spacing = false;
  bool magic = false;
  bool budget = false;
  std::optional<double> rel_ioffe, rel_rf, eps_deg;
  std::string out_path, manifest_path;
};

int profile_cmd(const AtomArgs& atom_args, const SolverArgs& solver_args,
                const ProfileArgs& args, std::ostream& out) {
  const AtomSpec atom = atom_args.resolve();
  const SolverOptions opt = solver_args.options();
  const Method method = parse_method(solver_args.method);

  TrapConfig trap;
  trap.gradient = args.gradient;
  trap.rf_frequency = args.freq;
  trap.polarization_delta = args.delta;
  ordered_json magic_json = nullptr;
  if (args.magic) {
    SolverOptions o = opt;
    o.polarization_delta = args.delta;
    const MagicPoint p = solve_magic_point(
        atom, args.freq, method,
        args.b_ioffe ? std::optional<std::pair<double, double>>(
                           std::pair{*args.b_ioffe, args.b_rf})
                     : std::nullopt,
        o);
    trap.b_ioffe = p.b_ioffe_magic;
    trap.rf_amplitude = p.b_rf_magic;
    magic_json = {{"b_ioffe_magic_G", p.b_ioffe_magic},
                  {"b_rf_magic_G", p.b_rf_magic},
                  {"newton_iterations", p.newton_iterations}};
  } else {
    trap.b_ioffe = args.b_ioffe ? *args.b_ioffe
                                : find_static_magic_field(atom).b_magic;
    trap.rf_amplitude = args.b_rf;
  }
  trap.validate();

  std::optional<DeviationBudget> budget;
  if (args.budget || args.rel_ioffe || args.rel_rf || args.eps_deg) {
    DeviationBudget b = args.budget ? DeviationBudget::atom_chip()
                                    : DeviationBudget{};
    if (args.rel_ioffe) b.rel_ioffe = *args.rel_ioffe;
    if (args.rel_rf) b.rel_rf = *args.rel_rf;
    if (args.eps_deg) b.polarization_offset = *args.eps_deg * kDeg;
    b.validate();
    budget = b;
  }

  ProfileOptions po;
  po.points = args.points;
  po.log_spacing = args.log_spacing;
  po.engine = opt.engine;
  const ShiftProfile prof =
      shift_profile(atom, trap, budget, args.u_max, method, po);

  std::ostringstream csv;
  csv << "u_trap_Hz,chi_G2,radius_um,shift_Hz,rms_deviation_Hz,status\n";
  for (const auto& r : prof.rows) {
    csv << num(r.u_trap) << ',' << num(r.chi) << ',' << num(r.radius) << ','
        << num(r.shift) << ',' << num(r.rms_deviation) << ",ok\n";
  }
  if (prof.truncated) csv << ",,,,,truncated\n";
  write_text(args.out_path, csv.str(), out);

  ordered_json params{{"atom", atom_json(atom)},
                      {"trap", trap_json(trap)},
                      {"method", to_string(method)},
                      {"n_blocks", opt.engine.n_blocks},
                      {"u_max_Hz", args.u_max},
                      {"points", args.points},
                      {"log_spacing", args.log_spacing},
                      {"magic", magic_json}};
  if (budget) {
    params["budget"] = {{"rel_ioffe", budget->rel_ioffe},
                        {"rel_rf", budget->rel_rf},
                        {"polarization_offset_rad",
                         budget->polarization_offset}};
  } else {
    params["budget"] = nullptr;
  }
  if (args.magic) params["solver"] = solver_json(opt);
  std::string mpath = args.manifest_path;
  if (mpath.empty() && !args.out_path.empty() && args.out_path != "-") {
    mpath = args.out_path + ".manifest.json";
  }
  if (!mpath.empty()) {
    ordered_json m = manifest("profile", std::move(params));
    m["truncated"] = prof.truncated;
    if (prof.truncated) m["warning"] = prof.warning;
    write_text(mpath, m.dump(2) + "\n", out);
  }
  return kExitOk;
}

struct RobustnessArgs {
  double freq = 2.0e6;
  std::optional<double> b_ioffe, b_rf;
  double rel_step = 1e-3;
  double eps_deg = 0.5;
  int alpha_samples = 8;
  std::string out_path;
};

int robustness_cmd(const AtomArgs& atom_args, const SolverArgs& solver_args,
                   const RobustnessArgs& args, std::ostream& out) {
  const AtomSpec atom = atom_args.resolve();
  const SolverOptions opt = solver_args.options();
  const Method method = parse_method(solver_args.method);
  if (args.b_ioffe.has_value() != args.b_rf.has_value()) {
    throw InvalidArgument("--b-ioffe and --b-rf must be given together");
  }
  std::optional<std::pair<double, double>> guess;
  if (args.b_ioffe) guess = std::pair{*args.b_ioffe, *args.b_rf};
  const MagicPoint p = solve_magic_point(atom, args.freq, method, guess, opt);

  SensitivityOptions so;
  so.relative_step = args.rel_step;
  so.epsilon_step = args.eps_deg * kDeg;
  so.alpha_samples = args.alpha_samples;
  so.fit = opt.fit;
  so.engine = opt.engine;
  const SensitivityReport r = sensitivity_report(atom, p, so);

  ordered_json j;
  j["manifest"] = manifest(
      "robustness", {{"atom", atom_json(atom)},
                     {"method", to_string(method)},
                     {"rf_frequency_Hz", args.freq},
                     {"solver", solver_json(opt)},
                     {"relative_step", so.relative_step},
                     {"epsilon_step_rad", so.epsilon_step},
                     {"alpha_samples", so.alpha_samples}});
  j["magic_point"] = {{"rf_frequency_Hz", p.rf_frequency},
                      {"b_ioffe_magic_G", p.b_ioffe_magic},
                      {"b_rf_magic_G", p.b_rf_magic},
                      {"a0_Hz", p.expansion.a0},
                      {"a1_Hz_per_G2", p.expansion.a1},
                      {"a2_Hz_per_G4", p.expansion.a2},
                      {"a3_Hz_per_G6", p.expansion.a3},
                      {"newton_iterations", p.newton_iterations}};
  j["alpha_ioffe"] = {{"units", {"Hz", "Hz/G^2", "Hz/G^4"}},
                      {"values", r.field.alpha_ioffe}};
  j["alpha_rf"] = {{"units", {"Hz", "Hz/G^2", "Hz/G^4"}},
                   {"values", r.field.alpha_rf}};
  j["beta"] = {{"units", {"Hz/G^2/rad", "Hz/G^4/rad"}},
               {"values", r.polarization.beta}};
  j["gamma"] = {{"units", {"Hz/rad^2", "Hz/G^2/rad^2", "Hz/G^4/rad^2"}},
                {"values", r.polarization.gamma}};
  j["beta0_check"] = {{"value_Hz_per_rad", r.polarization.beta0},
                      {"threshold_Hz_per_rad", 1e-3},
                      {"passed", std::abs(r.polarization.beta0) < 1e-3}};
  j["higher_harmonic_rms"] = r.polarization.higher_harmonic_rms;
  j["finite_differences"] = {
      {"relative_field_step", r.field.relative_step},
      {"epsilon_step_rad", r.polarization.epsilon_step},
      {"alpha_samples", r.polarization.alpha_samples},
      {"scheme", "central"}};
  j["fit_warning"] = r.fit_warning;
  write_text(args.out_path, j.dump(2) + "\n", out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"rf-dressed clock shift and second-order magic trap analysis",
               "rfmagic"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  AtomArgs atom_args;
  SolverArgs solver_args;

  auto* static_cmd =
      app.add_subcommand("static-magic", "static magic field of the clock pair");
  atom_args.add(static_cmd);

  ScanArgs scan;
  auto* scan_cmd =
      app.add_subcommand("magic-scan", "second-order magic points vs frequency");
  atom_args.add(scan_cmd);
  solver_args.add(scan_cmd);
  scan_cmd->add_option("--freq-start", scan.start, "first frequency, Hz");
  scan_cmd->add_option("--freq-stop", scan.stop, "last frequency, Hz");
  scan_cmd->add_option("--freq-step", scan.step, "frequency step, Hz");
  scan_cmd->add_option("--out", scan.out_path, "CSV output file (default stdout)");
  scan_cmd->add_option("--manifest", scan.manifest_path,
                       "manifest file (default <out>.manifest.json)");

  ProfileArgs prof;
  auto* prof_cmd =
      app.add_subcommand("profile", "clock shift versus trap potential");
  atom_args.add(prof_cmd);
  solver_args.add(prof_cmd);
  prof_cmd->add_option("--b-ioffe", prof.b_ioffe,
                       "Ioffe field, G (default: static magic field; with "
                       "--magic: Newton start)");
  prof_cmd->add_option("--b-rf", prof.b_rf, "rf amplitude, G");
  prof_cmd->add_option("--freq", prof.freq, "rf frequency, Hz");
  prof_cmd->add_option("--delta", prof.delta, "polarization angle, rad");
  prof_cmd->add_option("--gradient", prof.gradient, "gradient, G/cm");
  prof_cmd->add_option("--u-max", prof.u_max, "largest trap potential, Hz");
  prof_cmd->add_option("--points", prof.points, "number of non-zero rows + 1")
      ->check(CLI::Range(2, 100000));
  prof_cmd->add_flag("--log", prof.log_spacing,
                     "logarithmic spacing over [u_max/100, u_max]");
  prof_cmd->add_flag("--magic", prof.magic,
                     "solve the second-order magic point at --freq first");
  prof_cmd->add_flag("--budget", prof.budget,
                     "atom-chip fluctuation budget (2.5e-4, 5e-4, 0.2 deg)");
  prof_cmd->add_option("--rel-ioffe", prof.rel_ioffe, "RMS dB_I/B_I");
  prof_cmd->add_option("--rel-rf", prof.rel_rf, "RMS dB_rf/B_rf");
  prof_cmd->add_option("--eps-deg", prof.eps_deg, "RMS polarization offset, deg");
  prof_cmd->add_option("--out", prof.out_path, "CSV output file (default stdout)");
  prof_cmd->add_option("--manifest", prof.manifest_path,
                       "manifest file (default <out>.manifest.json)");

  RobustnessArgs rob;
  auto* rob_cmd = app.add_subcommand(
      "robustness", "sensitivity coefficients at a magic point");
  atom_args.add(rob_cmd);
  solver_args.add(rob_cmd);
  rob_cmd->add_option("--freq", rob.freq, "rf frequency, Hz");
  rob_cmd->add_option("--b-ioffe", rob.b_ioffe, "Newton start for B_I, G");
  rob_cmd->add_option("--b-rf", rob.b_rf, "Newton start for B_rf, G");
  rob_cmd->add_option("--rel-step", rob.rel_step, "relative field step");
  rob_cmd->add_option("--eps-deg", rob.eps_deg, "polarization step, deg");
  rob_cmd->add_option("--alpha-samples", rob.alpha_samples,
                      "azimuth samples for the cos(2 alpha) projection");
  rob_cmd->add_option("--out", rob.out_path, "JSON output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*static_cmd) return static_magic(atom_args, out);
    if (*scan_cmd) return magic_scan_cmd(atom_args, solver_args, scan, out);
    if (*prof_cmd) return profile_cmd(atom_args, solver_args, prof, out);
    if (*rob_cmd) return robustness_cmd(atom_args, solver_args, rob, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace rfmagic::cli
