#include "rfmagic/dressed_hamiltonian.hpp"

#include <cmath>

#include "rfmagic/errors.hpp"
#include "rfmagic/spin_algebra.hpp"
#include "rfmagic/static_spectrum.hpp"

namespace rfmagic {

void TrapConfig::validate() const {
  if (!(b_ioffe > 0.0) || !std::isfinite(b_ioffe)) {
    throw InvalidArgument("Ioffe field must be positive");
  }
  if (!(gradient > 0.0) || !std::isfinite(gradient)) {
    throw InvalidArgument("gradient must be positive");
  }
  if (!(rf_amplitude >= 0.0) || !std::isfinite(rf_amplitude)) {
    throw InvalidArgument("rf amplitude must be >= 0");
  }
  if (!(rf_frequency > 0.0) || !std::isfinite(rf_frequency)) {
    throw InvalidArgument("rf frequency must be positive");
  }
  if (!std::isfinite(polarization_delta)) {
    throw InvalidArgument("polarization angle must be finite");
  }
}

std::vector<std::string> TrapConfig::validity_warnings(
    const AtomSpec& atom) const {
  constexpr double margin = 20.0;
  std::vector<std::string> out;
  if (rf_amplitude * margin > b_ioffe) {
    out.emplace_back("rf amplitude is not small compared to the Ioffe field");
  }
  if (constants::kBohrMagnetonHzPerGauss * atom.g_j * b_ioffe * margin >
      atom.hfs_frequency) {
    out.emplace_back(
        "Zeeman energy is not small compared to the hyperfine splitting");
  }
  return out;
}

LocalFieldPoint local_field_point(const TrapConfig& trap, double chi,
                                  double alpha) {
  if (!(chi >= 0.0)) throw InvalidArgument("chi must be >= 0");
  LocalFieldPoint p;
  p.chi = chi;
  p.alpha = alpha;
  p.b0_magnitude = std::sqrt(trap.b_ioffe * trap.b_ioffe + chi);
  p.theta = std::atan2(std::sqrt(chi), trap.b_ioffe);
  return p;
}

double radius_from_chi(const TrapConfig& trap, double chi) {
  if (!(chi >= 0.0)) throw InvalidArgument("chi must be >= 0");
  return std::sqrt(chi) / trap.gradient * 1e4;
}

RfLocalComponents rf_local_components(const TrapConfig& trap,
                                      const LocalFieldPoint& point) {
  const double b = trap.rf_amplitude;
  const double ca = std::cos(point.alpha), sa = std::sin(point.alpha);
  const double ct = std::cos(point.theta), st = std::sin(point.theta);
  const double cd = std::cos(trap.polarization_delta);
  const double sd = std::sin(trap.polarization_delta);
  RfLocalComponents c;
  c.bx_prime = b * Complex(ca * ct * cd, -sa * ct * sd);
  c.by_prime = b * Complex(ca * sd, -sa * cd);
  c.bz_prime = b * Complex(ca * st * cd, -sa * st * sd);
  return c;
}

MatrixXcd FourierHamiltonian::h0_absolute() const {
  return h0 + reference_energy * MatrixXcd::Identity(dim(), dim());
}

MatrixXcld FourierHamiltonian::h0_extended() const {
  MatrixXcld m = h0.cast<ComplexLD>();
  if (h0_diagonal.size() == dim()) m.diagonal() = h0_diagonal.cast<ComplexLD>();
  return m;
}

FourierHamiltonian build_fourier_hamiltonian(const AtomSpec& atom,
                                             const TrapConfig& trap,
                                             const LocalFieldPoint& point,
                                             int manifold) {
  const int s = rotation_sign(atom, manifold);
  const SpinOperators f = to_ascending_m(build_spin_operators(manifold));
  const int dim = f.dim();
  const double g = lande_g_factor(atom, manifold) *
                   constants::kBohrMagnetonHzPerGauss;
  const double nu = trap.rf_frequency;
  const RfLocalComponents rf = rf_local_components(trap, point);

  FourierHamiltonian h;
  h.manifold = manifold;
  h.rotation_sign = s;
  h.rf_frequency = nu;
  h.reference_energy = zero_field_energy(atom, manifold);
  h.h0 = MatrixXcd::Zero(dim, dim);
  h.h0_diagonal.resize(dim);
  for (int i = 0; i < dim; ++i) {
    const int m = i - manifold;
    h.h0_diagonal[i] =
        breit_rabi_shift_extended(atom, manifold, m, point.b0_magnitude) +
        static_cast<long double>(s * m) * nu;
    h.h0(i, i) = static_cast<double>(h.h0_diagonal[i]);
  }

  // The co-rotating circular component couples inside H^(0); the
  // counter-rotating one ends up at twice the rf frequency.
  const Complex co = s > 0 ? rf.bx_prime - rf.by_prime
                           : rf.bx_prime + rf.by_prime;
  const Complex counter = s > 0 ? rf.bx_prime + rf.by_prime
                                : rf.bx_prime - rf.by_prime;
  const MatrixXcd& raise = s > 0 ? f.f_plus : f.f_minus;
  const MatrixXcd& lower = s > 0 ? f.f_minus : f.f_plus;
  h.h0 += (g / 4.0) * (co * raise + std::conj(co) * lower);
  h.h_plus1 = (g / 2.0) * rf.bz_prime * f.fz;
  h.h_plus2 = (g / 4.0) * counter * lower;
  return h;
}

}  // namespace rfmagic
