#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfmagic/atom.hpp"
#include "rfmagic/dressed_hamiltonian.hpp"
#include "rfmagic/floquet.hpp"

namespace rfmagic {

// Spectral engine used to evaluate dressed levels.
//   Rwa         eigenvalues of the rotating-frame H^(0)
//   Wffa        Floquet analysis of the rotating-frame harmonics H^(0..2)
//   FullFloquet Floquet analysis of the untransformed 8-level Hamiltonian
enum class Method { Rwa, Wffa, FullFloquet };

std::string_view to_string(Method method);
// Accepts "rwa", "wffa", "full" (case-insensitive). Throws InvalidArgument.
Method parse_method(std::string_view text);

enum class ClockState { Lower, Upper };

struct EngineOptions {
  int n_blocks = kDefaultFloquetBlocks;
};

// Lab-frame dressed level of `state` at (chi, alpha), relative to the
// zero-field energy of its hyperfine manifold, Hz.
double dressed_level_shift(const AtomSpec& atom, const TrapConfig& trap,
                           const StateLabel& state, double chi, double alpha,
                           Method method, const EngineOptions& engine = {});

// V_ad(upper clock) - V_ad(lower clock) - h nu_hfs at (chi, alpha), Hz.
double dressed_clock_shift(const AtomSpec& atom, const TrapConfig& trap,
                           double chi, double alpha, Method method,
                           const EngineOptions& engine = {});

// U_trap = V_ad(chi) - V_ad(0) for one clock state, Hz.
double trap_potential(const AtomSpec& atom, const TrapConfig& trap, double chi,
                      double alpha, Method method,
                      ClockState state = ClockState::Lower,
                      const EngineOptions& engine = {});

struct FitOptions {
  double chi_max = 0.05;  // G^2
  int nodes = 16;
  int degree = 6;
};

// dE(chi) = A0 + A1 chi + A2 chi^2 + A3 chi^3 + ...
struct ShiftExpansion {
  double a0 = 0.0;  // Hz
  double a1 = 0.0;  // Hz/G^2
  double a2 = 0.0;  // Hz/G^4
  double a3 = 0.0;  // Hz/G^6
  std::vector<double> coefficients;  // all fitted coefficients, a0 first
  double fit_rms_residual = 0.0;     // Hz
  double chi_max = 0.0;              // G^2
  std::vector<double> nodes;         // chi samples, G^2
  std::vector<double> samples;       // dE at the nodes, Hz
  bool window_warning = false;       // rms residual above 1e-2 Hz

  double evaluate(double chi) const;
};

ShiftExpansion fit_shift_expansion(const AtomSpec& atom, const TrapConfig& trap,
                                   Method method, const FitOptions& fit = {},
                                   double alpha = 0.0,
                                   const EngineOptions& engine = {});

struct SolverOptions {
  FitOptions fit;
  EngineOptions engine;
  double polarization_delta = -constants::kPi / 4.0;
  double gradient = 100.0;  // G/cm, carried into the returned trap
  double a1_tolerance = 0.05;  // Hz/G^2
  double a2_tolerance = 0.5;   // Hz/G^4
  // Newton also keeps iterating until the relative step falls below this.
  double step_tolerance = 1e-7;
  int max_iterations = 30;
  int max_halvings = 6;
  double jacobian_step_ioffe = 1e-4;  // relative
  double jacobian_step_rf = 1e-3;     // relative
  // Continuation seed used when no initial guess is supplied.
  double seed_frequency = 2.2e6;
  std::pair<double, double> seed_point{3.195, 0.000816};
  double continuation_step = 0.1e6;  // Hz
};

struct MagicPoint {
  double rf_frequency = 0.0;   // Hz
  double b_ioffe_magic = 0.0;  // G
  double b_rf_magic = 0.0;     // G
  Method method = Method::Wffa;
  ShiftExpansion expansion;
  int newton_iterations = 0;
  std::pair<double, double> residual{0.0, 0.0};  // (A1 Hz/G^2, A2 Hz/G^4)

  TrapConfig trap(double gradient = 100.0,
                  double polarization_delta = -constants::kPi / 4.0) const;
};

// Damped Newton iteration on (B_I, B_rf) -> (A1, A2). Without a guess the
// solve is continued in frequency from the seed point. Throws
// NumericalError on non-convergence and ClassificationError when the
// Jacobian stencil hits a resonance.
MagicPoint solve_magic_point(
    const AtomSpec& atom, double rf_frequency, Method method,
    std::optional<std::pair<double, double>> initial_guess = std::nullopt,
    const SolverOptions& options = {});

struct MagicScanRow {
  double rf_frequency = 0.0;
  std::optional<MagicPoint> point;
  std::string error;
};

// Homotopy-continued magic points over ascending frequencies, starting from
// the frequency closest to the seed. Failures are recorded per row.
std::vector<MagicScanRow> magic_scan(const AtomSpec& atom,
                                     std::span<const double> frequencies,
                                     Method method,
                                     const SolverOptions& options = {});

struct AdiabaticityMargin {
  double resonance_frequency = 0.0;  // mu_B |g_F| B_magic / h, Hz
  double detuning = 0.0;             // resonance_frequency - rf_frequency, Hz
  double thermal_scale = 0.0;  // sqrt(3 k_B T w_xy / hbar) / 2pi, Hz
  double ratio = 0.0;          // (2 pi detuning)^2 / (3 k_B T w_xy / hbar)
};

// temperature in K, trap_frequency_xy as an ordinary frequency (Hz).
AdiabaticityMargin adiabaticity_margin(const AtomSpec& atom,
                                       const TrapConfig& trap,
                                       double temperature,
                                       double trap_frequency_xy);

}  // namespace rfmagic
