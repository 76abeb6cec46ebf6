#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rfmagic/magic_solver.hpp"

namespace rfmagic {

// Linear response of A0, A1, A2 to relative deviations of the Ioffe and rf
// amplitudes: A_i -> A_i + alpha_ioffe[i] dB_I/B_I + alpha_rf[i] dB_rf/B_rf.
struct FieldSensitivities {
  std::array<double, 3> alpha_ioffe{};  // Hz, Hz/G^2, Hz/G^4
  std::array<double, 3> alpha_rf{};
  double relative_step = 0.0;
  bool fit_warning = false;  // some fit exceeded its residual threshold
};

// Response to a small ellipticity eps of the rf polarization
// (delta = -pi/4 + eps): A_i -> A_i + beta_i cos(2 alpha) eps + gamma_i eps^2.
struct PolarizationSensitivities {
  double beta0 = 0.0;                  // Hz/rad, vanishes by symmetry
  std::array<double, 2> beta{};        // Hz/G^2/rad, Hz/G^4/rad
  std::array<double, 3> gamma{};       // Hz/rad^2, Hz/G^2/rad^2, Hz/G^4/rad^2
  // RMS over alpha of the odd-in-eps response of A_i left after removing
  // the cos(2 alpha) term, in the units of beta_i.
  std::array<double, 3> higher_harmonic_rms{};
  double epsilon_step = 0.0;  // rad
  int alpha_samples = 0;
  bool fit_warning = false;
};

struct SensitivityOptions {
  double relative_step = 1e-3;
  double epsilon_step = 0.5 * constants::kPi / 180.0;
  int alpha_samples = 8;
  FitOptions fit;
  EngineOptions engine;
};

FieldSensitivities field_sensitivities(const AtomSpec& atom,
                                       const MagicPoint& magic,
                                       const SensitivityOptions& options = {});

PolarizationSensitivities polarization_sensitivities(
    const AtomSpec& atom, const MagicPoint& magic,
    const SensitivityOptions& options = {});

struct SensitivityReport {
  MagicPoint magic;
  FieldSensitivities field;
  PolarizationSensitivities polarization;
  bool fit_warning = false;
};

SensitivityReport sensitivity_report(const AtomSpec& atom,
                                     const MagicPoint& magic,
                                     const SensitivityOptions& options = {});

// RMS magnitudes of the field and polarization fluctuations.
struct DeviationBudget {
  double rel_ioffe = 0.0;            // dB_I / B_I
  double rel_rf = 0.0;               // dB_rf / B_rf
  double polarization_offset = 0.0;  // eps, rad

  void validate() const;
  static DeviationBudget atom_chip() {
    return {2.5e-4, 5e-4, 0.2 * constants::kPi / 180.0};
  }
};

// dE_rms = sqrt((d dE/dB_I dB_I)^2 + (d dE/dB_rf dB_rf)^2 + (d dE/d eps eps)^2)
// at (chi, alpha), with central-difference derivatives of dE(chi) itself.
double rms_shift_deviation(const AtomSpec& atom, const TrapConfig& trap,
                           const DeviationBudget& budget, double chi,
                           double alpha, Method method,
                           const EngineOptions& engine = {});

struct ProfileRow {
  double u_trap = 0.0;         // Hz
  double chi = 0.0;            // G^2
  double radius = 0.0;         // um
  double shift = 0.0;          // dE - dE(0), Hz
  double rms_deviation = 0.0;  // Hz
};

struct ProfileOptions {
  int points = 41;  // including the U_trap = 0 row
  // Geometric spacing of the nonzero rows over [u_max / 100, u_max].
  bool log_spacing = false;
  double alpha = 0.0;
  EngineOptions engine;
};

struct ShiftProfile {
  std::vector<ProfileRow> rows;
  bool truncated = false;
  std::string warning;
};

// Shift versus trap depth U_trap of the lower clock state, for U_trap from
// 0 to u_max (Hz). Rows beyond a classification failure are dropped and the
// profile is marked truncated.
ShiftProfile shift_profile(const AtomSpec& atom, const TrapConfig& trap,
                           const std::optional<DeviationBudget>& budget,
                           double u_max, Method method,
                           const ProfileOptions& options = {});

// chi at which trap_potential reaches u_trap (Hz).
double chi_for_potential(const AtomSpec& atom, const TrapConfig& trap,
                         double u_trap, Method method,
                         const ProfileOptions& options = {});

}  // namespace rfmagic
