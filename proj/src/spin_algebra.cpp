#include "rfmagic/spin_algebra.hpp"

#include <cmath>

#include "rfmagic/errors.hpp"

namespace rfmagic {

SpinOperators build_spin_operators(double f_total) {
  const double twice = 2.0 * f_total;
  if (!(f_total >= 0.0) || std::abs(twice - std::round(twice)) > 1e-12) {
    throw InvalidArgument("spin must be a non-negative half-integer");
  }
  const int dim = static_cast<int>(std::lround(twice)) + 1;
  SpinOperators ops;
  ops.f_total = f_total;
  ops.fz = MatrixXcd::Zero(dim, dim);
  ops.f_plus = MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double m = f_total - i;
    ops.fz(i, i) = m;
    // <m+1|F+|m> sits one row above column m.
    if (i > 0) {
      ops.f_plus(i - 1, i) = std::sqrt(f_total * (f_total + 1.0) - m * (m + 1.0));
    }
  }
  ops.f_minus = ops.f_plus.adjoint();
  ops.fx = 0.5 * (ops.f_plus + ops.f_minus);
  ops.fy = Complex(0.0, -0.5) * (ops.f_plus - ops.f_minus);
  return ops;
}

SpinOperators to_ascending_m(const SpinOperators& ops) {
  const int dim = ops.dim();
  Eigen::PermutationMatrix<Eigen::Dynamic> flip(dim);
  for (int i = 0; i < dim; ++i) flip.indices()[i] = dim - 1 - i;
  auto reorder = [&](const MatrixXcd& m) -> MatrixXcd {
    return flip * m * flip.transpose();
  };
  SpinOperators out;
  out.f_total = ops.f_total;
  out.fx = reorder(ops.fx);
  out.fy = reorder(ops.fy);
  out.fz = reorder(ops.fz);
  out.f_plus = reorder(ops.f_plus);
  out.f_minus = reorder(ops.f_minus);
  return out;
}

MatrixXcd ProductBasisHamiltonian::static_hamiltonian(
    const Eigen::Vector3d& field) const {
  return h_hfs + field.x() * h_zeeman_x + field.y() * h_zeeman_y +
         field.z() * h_zeeman_z;
}

ProductBasisHamiltonian build_product_hamiltonian(const AtomSpec& atom) {
  atom.validate();
  const SpinOperators j = to_ascending_m(build_spin_operators(atom.j_spin));
  const SpinOperators n = to_ascending_m(build_spin_operators(atom.i_spin));
  const int dj = j.dim();
  const int di = n.dim();

  auto kron = [](const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
      }
    }
    return out;
  };
  const MatrixXcd ej = MatrixXcd::Identity(dj, dj);
  const MatrixXcd ei = MatrixXcd::Identity(di, di);

  const MatrixXcd jx = kron(j.fx, ei), jy = kron(j.fy, ei), jz = kron(j.fz, ei);
  const MatrixXcd ix = kron(ej, n.fx), iy = kron(ej, n.fy), iz = kron(ej, n.fz);

  // A J.I with A = nu_hfs / (I + 1/2) splits F = I +/- 1/2 by nu_hfs.
  const double a_hfs = atom.hfs_frequency / (atom.i_spin + 0.5);
  const double mu = constants::kBohrMagnetonHzPerGauss;

  ProductBasisHamiltonian h;
  h.dim = dj * di;
  h.h_hfs = a_hfs * (jx * ix + jy * iy + jz * iz);
  h.h_zeeman_x = mu * (atom.g_j * jx + atom.g_i * ix);
  h.h_zeeman_y = mu * (atom.g_j * jy + atom.g_i * iy);
  h.h_zeeman_z = mu * (atom.g_j * jz + atom.g_i * iz);
  return h;
}

}  // namespace rfmagic
