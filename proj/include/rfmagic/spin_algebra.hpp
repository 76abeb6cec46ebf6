#pragma once

#include <Eigen/Dense>

#include "rfmagic/atom.hpp"
#include "rfmagic/types.hpp"

namespace rfmagic {

// Angular-momentum matrices in units of hbar. Rows and columns are ordered
// m = F, F-1, ..., -F.
struct SpinOperators {
  double f_total = 0.0;
  MatrixXcd fx, fy, fz, f_plus, f_minus;

  int dim() const { return static_cast<int>(fz.rows()); }
};

SpinOperators build_spin_operators(double f_total);

// Same operators with rows and columns in ascending m (-F ... F), the order
// used by the coupled basis |F, m>.
SpinOperators to_ascending_m(const SpinOperators& ops);

// Ground-state Hamiltonian in the product basis |m_J, m_I>, ordered
// lexicographically with ascending m_J, then ascending m_I.
struct ProductBasisHamiltonian {
  int dim = 0;
  MatrixXcd h_hfs;      // Hz
  MatrixXcd h_zeeman_x;  // Hz/G
  MatrixXcd h_zeeman_y;
  MatrixXcd h_zeeman_z;

  // h_hfs + B . h_zeeman for a static field vector in Gauss.
  MatrixXcd static_hamiltonian(const Eigen::Vector3d& field) const;
};

ProductBasisHamiltonian build_product_hamiltonian(const AtomSpec& atom);

}  // namespace rfmagic
