#include "rfmagic/static_spectrum.hpp"

#include <cmath>
#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "rfmagic/errors.hpp"
#include "rfmagic/types.hpp"

namespace rfmagic {

namespace {

// sqrt(1 + u) - 1 without cancellation.
template <typename T>
T sqrt1p_m1(T u) {
  return u / (std::sqrt(T(1) + u) + T(1));
}

// Shift relative to the zero-field level; accepts negative fields so that
// central differences work at B0 = 0.
template <typename T = double>
T shift_unchecked(const AtomSpec& atom, int f_tilde, int m, double b0) {
  const T mu = constants::kBohrMagnetonHzPerGauss;
  const T nu = atom.hfs_frequency;
  const T x = (T(atom.g_j) - T(atom.g_i)) * mu * T(b0) / nu;
  const T branch = atom.is_upper(f_tilde) ? 1 : -1;
  const T u = T(4 * m) * x / (T(2) * T(atom.i_spin) + T(1)) + x * x;
  return T(atom.g_i) * mu * T(m) * T(b0) + branch * nu / T(2) * sqrt1p_m1(u);
}

double clock_shift_unchecked(const AtomSpec& atom, double b0) {
  const StateLabel& u = atom.clock_upper;
  const StateLabel& l = atom.clock_lower;
  const double offset =
      atom.hfs_frequency *
      ((atom.is_upper(u.f_tilde) ? 1.0 : 0.0) -
       (atom.is_upper(l.f_tilde) ? 1.0 : 0.0) - 1.0);
  return shift_unchecked(atom, u.f_tilde, u.m, b0) -
         shift_unchecked(atom, l.f_tilde, l.m, b0) + offset;
}

}  // namespace

void validate_state(const AtomSpec& atom, int f_tilde, int m) {
  if (f_tilde != atom.lower_f() && f_tilde != atom.upper_f()) {
    throw InvalidArgument("F~ = " + std::to_string(f_tilde) +
                          " is not a ground-state manifold");
  }
  if (std::abs(m) > f_tilde) {
    throw InvalidArgument("|m| = " + std::to_string(std::abs(m)) +
                          " exceeds F~ = " + std::to_string(f_tilde));
  }
}

double zero_field_energy(const AtomSpec& atom, int f_tilde) {
  validate_state(atom, f_tilde, 0);
  const double nu = atom.hfs_frequency;
  const double base = -nu / (2.0 * (2.0 * atom.i_spin + 1.0));
  return base + (atom.is_upper(f_tilde) ? 0.5 : -0.5) * nu;
}

double breit_rabi_shift(const AtomSpec& atom, int f_tilde, int m, double b0) {
  validate_state(atom, f_tilde, m);
  if (!(b0 >= 0.0)) throw InvalidArgument("field magnitude must be >= 0");
  return shift_unchecked(atom, f_tilde, m, b0);
}

long double breit_rabi_shift_extended(const AtomSpec& atom, int f_tilde, int m,
                                      double b0) {
  validate_state(atom, f_tilde, m);
  if (!(b0 >= 0.0)) throw InvalidArgument("field magnitude must be >= 0");
  return shift_unchecked<long double>(atom, f_tilde, m, b0);
}

double breit_rabi_energy(const AtomSpec& atom, int f_tilde, int m, double b0) {
  return zero_field_energy(atom, f_tilde) +
         breit_rabi_shift(atom, f_tilde, m, b0);
}

double lande_g_factor(const AtomSpec& atom, int f) {
  validate_state(atom, f, 0);
  const double ff = f * (f + 1.0);
  const double ii = atom.i_spin * (atom.i_spin + 1.0);
  const double jj = atom.j_spin * (atom.j_spin + 1.0);
  return atom.g_j * (ff - ii + jj) / (2.0 * ff) +
         atom.g_i * (ff + ii - jj) / (2.0 * ff);
}

double static_clock_shift(const AtomSpec& atom, double b0) {
  atom.validate();
  if (!(b0 >= 0.0)) throw InvalidArgument("field magnitude must be >= 0");
  return clock_shift_unchecked(atom, b0);
}

StaticMagicField find_static_magic_field(const AtomSpec& atom) {
  atom.validate();
  constexpr double lo = 0.0;
  constexpr double hi = 10.0;
  constexpr double h1 = 1e-4;
  constexpr double h2 = 1e-3;
  auto f = [&](double b) { return clock_shift_unchecked(atom, b); };
  auto d1 = [&](double b) { return (f(b + h1) - f(b - h1)) / (2.0 * h1); };

  if (!(d1(lo) <= 0.0 && d1(hi) > 0.0)) {
    throw NumericalError(
        "clock shift has no stationary minimum bracketed in [0, 10] G");
  }

  std::uintmax_t max_iter = 200;
  auto [b, value] = boost::math::tools::brent_find_minima(
      f, lo, hi, std::numeric_limits<double>::digits / 2, max_iter);
  (void)value;

  for (int it = 0; it < 20; ++it) {
    const double curv = (f(b + h2) - 2.0 * f(b) + f(b - h2)) / (h2 * h2);
    if (!(curv > 0.0)) break;
    const double step = d1(b) / curv;
    b = std::max(lo, b - step);
    if (std::abs(step) < 1e-10) break;
  }

  StaticMagicField out;
  out.b_magic = b;
  out.curvature = (f(b + h2) - 2.0 * f(b) + f(b - h2)) / (h2 * h2);
  out.shift_at_magic = f(b);
  return out;
}

}  // namespace rfmagic
