#pragma once

#include "rfmagic/atom.hpp"

namespace rfmagic {

// Throws InvalidArgument unless (f_tilde, m) is a state of the ground
// manifold.
void validate_state(const AtomSpec& atom, int f_tilde, int m);

// Zero-field energy of a hyperfine manifold, Hz. The two manifolds sit at
// +I/(2I+1) and -(I+1)/(2I+1) times the hyperfine splitting.
double zero_field_energy(const AtomSpec& atom, int f_tilde);

// Breit-Rabi energy of |F~, m> at field magnitude b0 (G), Hz.
double breit_rabi_energy(const AtomSpec& atom, int f_tilde, int m, double b0);

// breit_rabi_energy minus zero_field_energy, evaluated without the
// cancellation of the GHz-scale terms.
double breit_rabi_shift(const AtomSpec& atom, int f_tilde, int m, double b0);

// breit_rabi_shift evaluated in long double.
long double breit_rabi_shift_extended(const AtomSpec& atom, int f_tilde, int m,
                                      double b0);

double lande_g_factor(const AtomSpec& atom, int f);

// Upper minus lower clock-state energy minus the hyperfine splitting, Hz.
double static_clock_shift(const AtomSpec& atom, double b0);

struct StaticMagicField {
  double b_magic = 0.0;         // G
  double curvature = 0.0;       // d^2(dE)/dB0^2, Hz/G^2
  double shift_at_magic = 0.0;  // Hz

  // C in dE(B_magic + d) - dE(B_magic) = C d^2.
  double quadratic_constant() const { return 0.5 * curvature; }
};

// Locates the stationary point of static_clock_shift on (0, 10) G.
// Throws NumericalError when the first derivative does not change sign on
// that interval.
StaticMagicField find_static_magic_field(const AtomSpec& atom);

}  // namespace rfmagic
