#include "rfmagic/magic_solver.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "rfmagic/errors.hpp"
#include "rfmagic/parallel.hpp"
#include "rfmagic/static_spectrum.hpp"

namespace rfmagic {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Rwa:
      return "rwa";
    case Method::Wffa:
      return "wffa";
    case Method::FullFloquet:
      return "full";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "rwa") return Method::Rwa;
  if (lower == "wffa") return Method::Wffa;
  if (lower == "full") return Method::FullFloquet;
  throw InvalidArgument("unknown method '" + std::string(text) +
                        "' (expected rwa, wffa or full)");
}

namespace {

QuasienergySpectrum manifold_spectrum(const AtomSpec& atom,
                                      const TrapConfig& trap,
                                      const LocalFieldPoint& point,
                                      int manifold, Method method,
                                      const EngineOptions& engine) {
  const FourierHamiltonian h =
      build_fourier_hamiltonian(atom, trap, point, manifold);
  if (method == Method::Rwa) return quasienergies(rotating_wave_matrix(h));
  return quasienergies(
      assemble_floquet_matrix(h, engine.n_blocks, trap.rf_frequency));
}

struct ClockLevels {
  long double lower = 0.0;
  long double upper = 0.0;
};

ClockLevels clock_levels(const AtomSpec& atom, const TrapConfig& trap,
                         double chi, double alpha, Method method,
                         const EngineOptions& engine) {
  const LocalFieldPoint point = local_field_point(trap, chi, alpha);
  const StateLabel& lo = atom.clock_lower;
  const StateLabel& up = atom.clock_upper;
  if (method == Method::FullFloquet) {
    const QuasienergySpectrum s =
        full_model_quasienergies(atom, trap, point, engine.n_blocks);
    return {s.at(lo).level_shift, s.at(up).level_shift};
  }
  const QuasienergySpectrum a =
      manifold_spectrum(atom, trap, point, lo.f_tilde, method, engine);
  if (up.f_tilde == lo.f_tilde) {
    return {a.at(lo).level_shift, a.at(up).level_shift};
  }
  const QuasienergySpectrum b =
      manifold_spectrum(atom, trap, point, up.f_tilde, method, engine);
  return {a.at(lo).level_shift, b.at(up).level_shift};
}

void check_inputs(const AtomSpec& atom, const TrapConfig& trap) {
  atom.validate();
  trap.validate();
}

}  // namespace

namespace {

long double level_shift(const AtomSpec& atom, const TrapConfig& trap,
                        const StateLabel& state, double chi, double alpha,
                        Method method, const EngineOptions& engine) {
  check_inputs(atom, trap);
  validate_state(atom, state.f_tilde, state.m);
  const LocalFieldPoint point = local_field_point(trap, chi, alpha);
  if (method == Method::FullFloquet) {
    return full_model_quasienergies(atom, trap, point, engine.n_blocks)
        .at(state)
        .level_shift;
  }
  return manifold_spectrum(atom, trap, point, state.f_tilde, method, engine)
      .at(state)
      .level_shift;
}

}  // namespace

double dressed_level_shift(const AtomSpec& atom, const TrapConfig& trap,
                           const StateLabel& state, double chi, double alpha,
                           Method method, const EngineOptions& engine) {
  return static_cast<double>(
      level_shift(atom, trap, state, chi, alpha, method, engine));
}

double dressed_clock_shift(const AtomSpec& atom, const TrapConfig& trap,
                           double chi, double alpha, Method method,
                           const EngineOptions& engine) {
  check_inputs(atom, trap);
  const ClockLevels levels =
      clock_levels(atom, trap, chi, alpha, method, engine);
  const long double offset =
      static_cast<long double>(atom.hfs_frequency) *
      ((atom.is_upper(atom.clock_upper.f_tilde) ? 1 : 0) -
       (atom.is_upper(atom.clock_lower.f_tilde) ? 1 : 0) - 1);
  return static_cast<double>(levels.upper - levels.lower + offset);
}

double trap_potential(const AtomSpec& atom, const TrapConfig& trap, double chi,
                      double alpha, Method method, ClockState state,
                      const EngineOptions& engine) {
  const StateLabel& label =
      state == ClockState::Lower ? atom.clock_lower : atom.clock_upper;
  if (chi == 0.0) return 0.0;
  return static_cast<double>(
      level_shift(atom, trap, label, chi, alpha, method, engine) -
      level_shift(atom, trap, label, 0.0, alpha, method, engine));
}

double ShiftExpansion::evaluate(double chi) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
    acc = acc * chi + *it;
  }
  return acc;
}

ShiftExpansion fit_shift_expansion(const AtomSpec& atom, const TrapConfig& trap,
                                   Method method, const FitOptions& fit,
                                   double alpha, const EngineOptions& engine) {
  check_inputs(atom, trap);
  if (!(fit.chi_max > 0.0)) throw InvalidArgument("fit window must be > 0");
  if (fit.degree < 3) throw InvalidArgument("fit degree must be >= 3");
  if (fit.nodes <= fit.degree) {
    throw InvalidArgument("fit needs more nodes than polynomial degree");
  }

  const int n = fit.nodes;
  ShiftExpansion out;
  out.chi_max = fit.chi_max;
  out.nodes.resize(n);
  out.samples.resize(n);
  for (int k = 0; k < n; ++k) {
    out.nodes[k] = 0.5 * fit.chi_max *
                   (1.0 - std::cos(constants::kPi * (k + 0.5) / n));
  }
  parallel_for(n, [&](std::size_t k) {
    out.samples[k] =
        dressed_clock_shift(atom, trap, out.nodes[k], alpha, method, engine);
  });

  // Least squares in t = chi / chi_max keeps the Vandermonde matrix tame.
  Eigen::MatrixXd v(n, fit.degree + 1);
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) {
    const double t = out.nodes[k] / fit.chi_max;
    double p = 1.0;
    for (int j = 0; j <= fit.degree; ++j) {
      v(k, j) = p;
      p *= t;
    }
    y[k] = out.samples[k];
  }
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd residual = v * c - y;
  out.fit_rms_residual = std::sqrt(residual.squaredNorm() / n);
  out.window_warning = out.fit_rms_residual > 1e-2;

  out.coefficients.resize(fit.degree + 1);
  double scale = 1.0;
  for (int j = 0; j <= fit.degree; ++j) {
    out.coefficients[j] = c[j] / scale;
    scale *= fit.chi_max;
  }
  out.a0 = out.coefficients[0];
  out.a1 = out.coefficients[1];
  out.a2 = out.coefficients[2];
  out.a3 = out.coefficients[3];
  return out;
}

TrapConfig MagicPoint::trap(double gradient, double polarization_delta) const {
  TrapConfig t;
  t.b_ioffe = b_ioffe_magic;
  t.gradient = gradient;
  t.rf_amplitude = b_rf_magic;
  t.rf_frequency = rf_frequency;
  t.polarization_delta = polarization_delta;
  return t;
}

namespace {

struct NewtonState {
  Eigen::Vector2d x;  // (B_I, B_rf)
  ShiftExpansion expansion;
  Eigen::Vector2d r;  // (A1, A2)
};

ShiftExpansion expansion_at(const AtomSpec& atom, double frequency,
                            Method method, const Eigen::Vector2d& x,
                            const SolverOptions& opt) {
  TrapConfig t;
  t.b_ioffe = x[0];
  t.rf_amplitude = x[1];
  t.rf_frequency = frequency;
  t.gradient = opt.gradient;
  t.polarization_delta = opt.polarization_delta;
  return fit_shift_expansion(atom, t, method, opt.fit, 0.0, opt.engine);
}

double scaled_norm(const Eigen::Vector2d& r, const SolverOptions& opt) {
  return std::hypot(r[0] / opt.a1_tolerance, r[1] / opt.a2_tolerance);
}

bool within_tolerance(const Eigen::Vector2d& r, const SolverOptions& opt) {
  return std::abs(r[0]) < opt.a1_tolerance && std::abs(r[1]) < opt.a2_tolerance;
}

MagicPoint newton_solve(const AtomSpec& atom, double frequency, Method method,
                        Eigen::Vector2d x0, const SolverOptions& opt) {
  if (!(x0[0] > 0.0) || !(x0[1] >= 0.0)) {
    throw InvalidArgument("initial guess must have B_I > 0 and B_rf >= 0");
  }
  auto evaluate = [&](const Eigen::Vector2d& x) {
    NewtonState s;
    s.x = x;
    s.expansion = expansion_at(atom, frequency, method, x, opt);
    s.r = {s.expansion.a1, s.expansion.a2};
    return s;
  };

  NewtonState cur = evaluate(x0);
  int iterations = 0;
  bool converged = false;
  while (iterations < opt.max_iterations) {
    ++iterations;
    const Eigen::Vector2d h(opt.jacobian_step_ioffe * cur.x[0],
                            cur.x[1] > 0.0 ? opt.jacobian_step_rf * cur.x[1]
                                           : 1e-6);
    Eigen::Matrix2d jac;
    std::array<Eigen::Vector2d, 4> stencil;
    parallel_for(4, [&](std::size_t i) {
      Eigen::Vector2d x = cur.x;
      const int axis = static_cast<int>(i / 2);
      x[axis] += (i % 2 == 0 ? 1.0 : -1.0) * h[axis];
      const ShiftExpansion e = expansion_at(atom, frequency, method, x, opt);
      stencil[i] = {e.a1, e.a2};
    });
    jac.col(0) = (stencil[0] - stencil[1]) / (2.0 * h[0]);
    jac.col(1) = (stencil[2] - stencil[3]) / (2.0 * h[1]);
    const Eigen::Vector2d delta = jac.fullPivLu().solve(-cur.r);
    if (!delta.allFinite()) throw NumericalError("singular magic Jacobian");

    const double base = scaled_norm(cur.r, opt);
    double lambda = 1.0;
    bool accepted = false;
    NewtonState trial;
    for (int halving = 0; halving <= opt.max_halvings; ++halving) {
      const Eigen::Vector2d x = cur.x + lambda * delta;
      if (x[0] > 0.0 && x[1] >= 0.0) {
        try {
          trial = evaluate(x);
          if (scaled_norm(trial.r, opt) < base) {
            accepted = true;
            break;
          }
        } catch (const ClassificationError&) {
        }
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // No further decrease: the residual has reached its numerical floor.
      converged = within_tolerance(cur.r, opt);
      break;
    }
    const double rel_step =
        std::max(std::abs(lambda * delta[0]) / trial.x[0],
                 trial.x[1] > 0.0 ? std::abs(lambda * delta[1]) / trial.x[1]
                                  : std::abs(lambda * delta[1]));
    cur = std::move(trial);
    if (within_tolerance(cur.r, opt) && rel_step < opt.step_tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged && within_tolerance(cur.r, opt)) converged = true;
  if (!converged) {
    throw NumericalError(
        "magic-point Newton iteration did not converge at " +
        std::to_string(frequency) + " Hz (A1 = " + std::to_string(cur.r[0]) +
        " Hz/G^2, A2 = " + std::to_string(cur.r[1]) + " Hz/G^4)");
  }

  MagicPoint p;
  p.rf_frequency = frequency;
  p.b_ioffe_magic = cur.x[0];
  p.b_rf_magic = cur.x[1];
  p.method = method;
  p.expansion = std::move(cur.expansion);
  p.newton_iterations = iterations;
  p.residual = {cur.r[0], cur.r[1]};
  return p;
}

void check_frequency(double f) {
  if (!(f > 0.0) || !std::isfinite(f)) {
    throw InvalidArgument("rf frequency must be positive");
  }
}

// Solve at `target` by continuation from a solved point, with a secant
// predictor when two previous points are available.
MagicPoint continue_to(const AtomSpec& atom, double target, Method method,
                       std::vector<MagicPoint> path,
                       const SolverOptions& opt) {
  while (true) {
    const MagicPoint& last = path.back();
    const double gap = target - last.rf_frequency;
    const bool final_step = std::abs(gap) <= opt.continuation_step * (1 + 1e-9);
    const double f =
        final_step ? target
                   : last.rf_frequency + std::copysign(opt.continuation_step, gap);
    Eigen::Vector2d guess(last.b_ioffe_magic, last.b_rf_magic);
    if (path.size() >= 2) {
      const MagicPoint& prev = path[path.size() - 2];
      const double span = last.rf_frequency - prev.rf_frequency;
      if (span != 0.0 && std::abs(f - last.rf_frequency) <= 1.5 * std::abs(span)) {
        const double w = (f - last.rf_frequency) / span;
        Eigen::Vector2d predicted(
            last.b_ioffe_magic + w * (last.b_ioffe_magic - prev.b_ioffe_magic),
            last.b_rf_magic + w * (last.b_rf_magic - prev.b_rf_magic));
        if (predicted[0] > 0.0 && predicted[1] >= 0.0) guess = predicted;
      }
    }
    MagicPoint next;
    try {
      next = newton_solve(atom, f, method, guess, opt);
    } catch (const NumericalError&) {
      next = newton_solve(
          atom, f, method,
          Eigen::Vector2d(last.b_ioffe_magic, last.b_rf_magic), opt);
    }
    path.push_back(std::move(next));
    if (final_step) return path.back();
  }
}

}  // namespace

MagicPoint solve_magic_point(const AtomSpec& atom, double rf_frequency,
                             Method method,
                             std::optional<std::pair<double, double>> guess,
                             const SolverOptions& options) {
  atom.validate();
  check_frequency(rf_frequency);
  if (guess) {
    return newton_solve(atom, rf_frequency, method,
                        Eigen::Vector2d(guess->first, guess->second), options);
  }
  const Eigen::Vector2d seed(options.seed_point.first,
                             options.seed_point.second);
  if (std::abs(rf_frequency - options.seed_frequency) <=
      options.continuation_step) {
    return newton_solve(atom, rf_frequency, method, seed, options);
  }
  std::vector<MagicPoint> path{
      newton_solve(atom, options.seed_frequency, method, seed, options)};
  return continue_to(atom, rf_frequency, method, std::move(path), options);
}

std::vector<MagicScanRow> magic_scan(const AtomSpec& atom,
                                     std::span<const double> frequencies,
                                     Method method,
                                     const SolverOptions& options) {
  atom.validate();
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    check_frequency(frequencies[i]);
    if (i > 0 && !(frequencies[i] > frequencies[i - 1])) {
      throw InvalidArgument("scan frequencies must be strictly ascending");
    }
  }
  std::vector<MagicScanRow> rows(frequencies.size());
  if (rows.empty()) return rows;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].rf_frequency = frequencies[i];
  }

  std::size_t start = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::abs(frequencies[i] - options.seed_frequency) <
        std::abs(frequencies[start] - options.seed_frequency)) {
      start = i;
    }
  }

  std::vector<MagicPoint> anchor;
  try {
    rows[start].point =
        solve_magic_point(atom, frequencies[start], method, std::nullopt, options);
    anchor.push_back(*rows[start].point);
  } catch (const std::exception& e) {
    rows[start].error = e.what();
  }

  auto sweep = [&](int step) {
    std::vector<MagicPoint> path = anchor;
    for (auto i = static_cast<long>(start) + step;
         i >= 0 && i < static_cast<long>(rows.size()); i += step) {
      if (path.empty()) {
        rows[i].error = "no converged neighbour to continue from";
        continue;
      }
      try {
        rows[i].point =
            continue_to(atom, frequencies[i], method, path, options);
        path.push_back(*rows[i].point);
        if (path.size() > 2) path.erase(path.begin());
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  sweep(+1);
  sweep(-1);
  return rows;
}

AdiabaticityMargin adiabaticity_margin(const AtomSpec& atom,
                                       const TrapConfig& trap,
                                       double temperature,
                                       double trap_frequency_xy) {
  check_inputs(atom, trap);
  if (!(temperature >= 0.0)) throw InvalidArgument("temperature must be >= 0");
  if (!(trap_frequency_xy > 0.0)) {
    throw InvalidArgument("trap frequency must be positive");
  }
  const StaticMagicField magic = find_static_magic_field(atom);
  const double g = lande_g_factor(atom, atom.clock_lower.f_tilde);
  AdiabaticityMargin out;
  out.resonance_frequency =
      constants::kBohrMagnetonHzPerGauss * std::abs(g) * magic.b_magic;
  out.detuning = out.resonance_frequency - trap.rf_frequency;
  const double two_pi = 2.0 * constants::kPi;
  const double thermal_sq = 3.0 * constants::kBoltzmann * temperature *
                            two_pi * trap_frequency_xy / constants::kHbar;
  out.thermal_scale = std::sqrt(thermal_sq) / two_pi;
  const double det = two_pi * out.detuning;
  out.ratio = thermal_sq > 0.0 ? det * det / thermal_sq
                               : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace rfmagic
