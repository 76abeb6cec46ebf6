#pragma once

#include <complex>
#include <string>
#include <vector>

#include "rfmagic/atom.hpp"
#include "rfmagic/types.hpp"

namespace rfmagic {

// One dressed Ioffe-Pritchard configuration. The static field is
// e_z B_I + G (e_x x - e_y y); the rf field is
// (B_rf / 2) [(e_x cos(delta) - i e_y sin(delta)) exp(i w t) + c.c.].
// delta = 0 is linear polarization, delta = -pi/4 left-handed circular.
struct TrapConfig {
  double b_ioffe = 3.228917;   // G
  double gradient = 100.0;     // G/cm, only used to convert chi to radius
  double rf_amplitude = 0.0;   // G
  double rf_frequency = 2.0e6;  // Hz
  double polarization_delta = -constants::kPi / 4.0;  // rad

  void validate() const;

  // Human-readable notes when the weak-field assumptions
  // (B_rf << B_I, mu_B g_J B_I << h nu_hfs) hold by less than a factor 20.
  std::vector<std::string> validity_warnings(const AtomSpec& atom) const;
};

// Local static field at transverse field component sqrt(chi) and azimuth
// alpha: B0 = e_z B_I + sqrt(chi) (e_x cos(alpha) + e_y sin(alpha)).
struct LocalFieldPoint {
  double chi = 0.0;           // G^2
  double alpha = 0.0;         // rad
  double b0_magnitude = 0.0;  // G
  double theta = 0.0;         // rad, angle between trap axis and B0
};

LocalFieldPoint local_field_point(const TrapConfig& trap, double chi,
                                  double alpha);

// Radial distance (um) at which the transverse field reaches sqrt(chi).
double radius_from_chi(const TrapConfig& trap, double chi);

// Complex rf amplitudes in the local frame (z' along B0, x' in the plane of
// e_z and B0): B_rf(t) = exp(i w t)/2 [e_x' bx - i e_y' by + e_z' bz] + c.c.
struct RfLocalComponents {
  std::complex<double> bx_prime;
  std::complex<double> by_prime;
  std::complex<double> bz_prime;
};

RfLocalComponents rf_local_components(const TrapConfig& trap,
                                      const LocalFieldPoint& point);

// Rotating-frame Hamiltonian of one hyperfine manifold,
// H(t) = sum_{n=-2}^{2} H^(n) exp(i n w t), with H^(-n) = H^(n)^dagger.
// Matrices are in ascending m (-F~ ... F~). h0 is stored relative to the
// manifold's zero-field energy (reference_energy) so that the diagonal stays
// at the MHz scale. h0_diagonal repeats the diagonal of h0 in long double;
// the Floquet assembly takes the diagonal from there.
struct FourierHamiltonian {
  int manifold = 0;
  int rotation_sign = 0;  // +1 lower manifold, -1 upper manifold
  double rf_frequency = 0.0;
  double reference_energy = 0.0;  // Hz
  MatrixXcd h0;
  VectorXld h0_diagonal;
  MatrixXcd h_plus1;
  MatrixXcd h_plus2;

  int dim() const { return static_cast<int>(h0.rows()); }
  int m_at(int index) const { return index - manifold; }
  int index_of(int m) const { return m + manifold; }

  MatrixXcd h0_absolute() const;
  MatrixXcld h0_extended() const;  // h0 with the long double diagonal
  MatrixXcd h_minus1() const { return h_plus1.adjoint(); }
  MatrixXcd h_minus2() const { return h_plus2.adjoint(); }
};

// Throws InvalidArgument for a manifold other than I - J or I + J.
FourierHamiltonian build_fourier_hamiltonian(const AtomSpec& atom,
                                             const TrapConfig& trap,
                                             const LocalFieldPoint& point,
                                             int manifold);

}  // namespace rfmagic
