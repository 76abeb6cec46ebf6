#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace rfmagic {

using Complex = std::complex<double>;
using ComplexLD = std::complex<long double>;

using MatrixXcd = Eigen::MatrixXcd;
using MatrixXcld = Eigen::Matrix<ComplexLD, Eigen::Dynamic, Eigen::Dynamic>;
using VectorXcld = Eigen::Matrix<ComplexLD, Eigen::Dynamic, 1>;
using VectorXld = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

namespace constants {

inline constexpr double kPi = std::numbers::pi;

// Bohr magneton over Planck constant, Hz/G (CODATA 2018).
inline constexpr double kBohrMagnetonHzPerGauss = 1.39962449361e6;

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kHbar = 1.054571817e-34;    // J s

}  // namespace constants

}  // namespace rfmagic
