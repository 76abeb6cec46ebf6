#pragma once

#include <string>

namespace rfmagic {

// A dressed level |F~, m>: F~ is the asymptotic (zero-field) hyperfine
// quantum number, m the projection on the local field direction.
struct StateLabel {
  int f_tilde = 0;
  int m = 0;

  friend bool operator==(const StateLabel&, const StateLabel&) = default;
};

std::string to_string(const StateLabel& label);

// Ground-state constants of a J=1/2 alkali atom. Defaults are 87Rb.
// Energies are ordinary frequencies (E/h, Hz), fields in Gauss.
struct AtomSpec {
  double i_spin = 1.5;
  double j_spin = 0.5;
  double g_j = 2.00233113;
  double g_i = -0.0009951414;
  double hfs_frequency = 6.834682610904e9;
  StateLabel clock_lower{1, -1};
  StateLabel clock_upper{2, 1};

  static AtomSpec rubidium87() { return {}; }

  // Throws InvalidArgument unless J = 1/2, 2I is odd, the hyperfine
  // splitting is positive and both clock labels exist.
  void validate() const;

  int lower_f() const;  // I - J
  int upper_f() const;  // I + J
  bool is_upper(int f_tilde) const { return f_tilde == upper_f(); }
  int manifold_dim(int f_tilde) const { return 2 * f_tilde + 1; }
};

// Sense of rotation of the rotating frame for a manifold: +1 for the lower
// manifold (F~ = I - J), -1 for the upper one. This single sign decides
// which manifold a given circular polarization dresses.
int rotation_sign(const AtomSpec& atom, int f_tilde);

}  // namespace rfmagic
