#include "rfmagic/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rfmagic/errors.hpp"
#include "rfmagic/spin_algebra.hpp"
#include "rfmagic/static_spectrum.hpp"

namespace rfmagic {

namespace {

FloquetMatrix assemble(const std::vector<MatrixXcld>& harmonics, int n_blocks,
                       double rf_frequency) {
  if (harmonics.empty()) throw InvalidArgument("no Fourier components");
  const Eigen::Index d = harmonics.front().rows();
  for (const auto& h : harmonics) {
    if (h.rows() != d || h.cols() != d) {
      throw InvalidArgument("Fourier components differ in dimension");
    }
  }
  const int half = (n_blocks - 1) / 2;

  FloquetMatrix f;
  f.manifold_dim = static_cast<int>(d);
  f.n_blocks = n_blocks;
  f.rf_frequency = rf_frequency;
  f.matrix = MatrixXcld::Zero(d * n_blocks, d * n_blocks);
  f.block_photon_index.resize(n_blocks);
  std::iota(f.block_photon_index.begin(), f.block_photon_index.end(), -half);

  const auto order = static_cast<int>(harmonics.size()) - 1;
  for (int k = 0; k < n_blocks; ++k) {
    for (int l = 0; l < n_blocks; ++l) {
      const int n = k - l;
      if (std::abs(n) > order) continue;
      auto block = f.matrix.block(k * d, l * d, d, d);
      if (n >= 0) {
        block = harmonics[n];
      } else {
        block = harmonics[-n].adjoint();
      }
    }
    const long double shift =
        static_cast<long double>(f.block_photon_index[k]) * rf_frequency;
    for (Eigen::Index i = 0; i < d; ++i) {
      f.matrix(k * d + i, k * d + i) += shift;
    }
  }
  return f;
}

void attach_manifold_labels(FloquetMatrix& f,
                            const FourierHamiltonian& components) {
  const int d = components.dim();
  f.reference_energy = components.reference_energy;
  f.label_basis = MatrixXcd::Identity(d, d);
  f.labels.clear();
  f.level_offsets.clear();
  for (int i = 0; i < d; ++i) {
    const int m = components.m_at(i);
    f.labels.push_back({components.manifold, m});
    f.level_offsets.push_back(static_cast<long double>(components.rotation_sign) *
                              components.rf_frequency * m);
  }
}

std::vector<MatrixXcld> manifold_harmonics(const FourierHamiltonian& c) {
  return {c.h0_extended(), c.h_plus1.cast<ComplexLD>(),
          c.h_plus2.cast<ComplexLD>()};
}

// Real symmetric matrices (on-axis azimuth, linear or circular drive) take
// the faster real solver.
void eigen_decompose(const MatrixXcld& m, Eigen::VectorXd& values,
                     MatrixXcd& vectors) {
  if (m.imag().cwiseAbs().maxCoeff() == 0.0L) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        m.real().cast<double>());
    if (solver.info() != Eigen::Success) {
      throw NumericalError("Floquet eigendecomposition failed");
    }
    values = solver.eigenvalues();
    vectors = solver.eigenvectors().cast<Complex>();
    return;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(m.cast<Complex>());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Floquet eigendecomposition failed");
  }
  values = solver.eigenvalues();
  vectors = solver.eigenvectors();
}

}  // namespace

FloquetMatrix assemble_floquet_blocks(const std::vector<MatrixXcld>& harmonics,
                                      int n_blocks, double rf_frequency) {
  if (n_blocks < 3 || n_blocks % 2 == 0) {
    throw InvalidArgument("number of Floquet blocks must be odd and >= 3, got " +
                          std::to_string(n_blocks));
  }
  if (!(rf_frequency > 0.0)) throw InvalidArgument("rf frequency must be > 0");
  return assemble(harmonics, n_blocks, rf_frequency);
}

FloquetMatrix assemble_floquet_matrix(const FourierHamiltonian& components,
                                      int n_blocks, double rf_frequency) {
  FloquetMatrix f = assemble_floquet_blocks(manifold_harmonics(components),
                                            n_blocks, rf_frequency);
  attach_manifold_labels(f, components);
  return f;
}

FloquetMatrix rotating_wave_matrix(const FourierHamiltonian& components) {
  FloquetMatrix f = assemble({components.h0_extended()}, 1,
                             components.rf_frequency);
  attach_manifold_labels(f, components);
  return f;
}

const Quasienergy& QuasienergySpectrum::at(const StateLabel& label) const {
  for (const auto& e : entries) {
    if (e.label == label) return e;
  }
  throw InvalidArgument("state " + to_string(label) + " not in spectrum");
}

QuasienergySpectrum analyze_floquet(const FloquetMatrix& f) {
  const int d = f.manifold_dim;
  const int n_labels = static_cast<int>(f.labels.size());
  if (n_labels != d || f.label_basis.rows() != d || f.label_basis.cols() != d ||
      static_cast<int>(f.level_offsets.size()) != d) {
    throw InvalidArgument("Floquet matrix carries no classification basis");
  }

  Eigen::VectorXd values;
  MatrixXcd vectors;
  eigen_decompose(f.matrix, values, vectors);
  const Eigen::Index n = values.size();
  const Eigen::Index row0 = static_cast<Eigen::Index>(f.central_block()) * d;

  QuasienergySpectrum out;
  out.eigenvalues.resize(n);
  out.central_weights.resize(n);
  std::vector<Eigen::Index> owner(d, -1);
  int duplicates = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues[j] = values[j] + f.reference_energy;
    const auto central = vectors.col(j).segment(row0, d);
    const double weight = central.squaredNorm();
    out.central_weights[j] = weight;
    if (weight <= 0.5) continue;
    Eigen::Index best = 0;
    (f.label_basis.adjoint() * central).cwiseAbs2().maxCoeff(&best);
    if (owner[best] >= 0) {
      ++duplicates;
    } else {
      owner[best] = j;
    }
  }

  const int found = static_cast<int>(
      std::count_if(owner.begin(), owner.end(), [](auto j) { return j >= 0; }));
  if (found < d || duplicates > 0) {
    out.classified = false;
    double top_min = 1.0;
    std::vector<double> sorted = out.central_weights;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    if (static_cast<Eigen::Index>(d) <= n) top_min = sorted[d - 1];
    out.diagnostic = std::to_string(found) + " of " + std::to_string(d) +
                     " states attributed to the central block (smallest of the " +
                     std::to_string(d) + " largest central weights: " +
                     std::to_string(top_min) + ")";
    if (duplicates > 0) out.diagnostic += ", repeated label";
  } else {
    out.classified = true;
  }

  for (int i = 0; i < d; ++i) {
    if (owner[i] < 0) continue;
    const Eigen::Index j = owner[i];
    const VectorXcld v = vectors.col(j).cast<ComplexLD>();
    const long double rq =
        (v.adjoint() * (f.matrix * v))(0, 0).real() / v.squaredNorm();
    Quasienergy q;
    q.label = f.labels[i];
    q.quasienergy = static_cast<double>(rq + f.reference_energy);
    q.level_shift = rq - f.level_offsets[i];
    q.central_weight = out.central_weights[j];
    out.entries.push_back(q);
  }
  return out;
}

QuasienergySpectrum quasienergies(const FloquetMatrix& f) {
  QuasienergySpectrum s = analyze_floquet(f);
  if (!s.classified) {
    throw ClassificationError("quasienergy classification failed: " +
                              s.diagnostic);
  }
  return s;
}

FloquetMatrix build_full_model_matrix(const AtomSpec& atom,
                                      const TrapConfig& trap,
                                      const LocalFieldPoint& point,
                                      int n_blocks) {
  trap.validate();
  const ProductBasisHamiltonian h = build_product_hamiltonian(atom);
  const double root_chi = std::sqrt(point.chi);
  const Eigen::Vector3d field(root_chi * std::cos(point.alpha),
                              root_chi * std::sin(point.alpha), trap.b_ioffe);
  const MatrixXcd h_static = h.static_hamiltonian(field);

  // Accumulate H^(0) in long double; the hyperfine part dominates by
  // three orders of magnitude.
  MatrixXcld h0 = h.h_hfs.cast<ComplexLD>();
  h0 += static_cast<long double>(field.x()) * h.h_zeeman_x.cast<ComplexLD>();
  h0 += static_cast<long double>(field.y()) * h.h_zeeman_y.cast<ComplexLD>();
  h0 += static_cast<long double>(field.z()) * h.h_zeeman_z.cast<ComplexLD>();
  const double cd = std::cos(trap.polarization_delta);
  const double sd = std::sin(trap.polarization_delta);
  const MatrixXcd h1 = (0.5 * trap.rf_amplitude) *
                       (cd * h.h_zeeman_x - Complex(0.0, sd) * h.h_zeeman_y);

  FloquetMatrix f = assemble_floquet_blocks({h0, h1.cast<ComplexLD>()},
                                            n_blocks, trap.rf_frequency);

  // Static eigenstates in ascending energy carry the Breit-Rabi labels in
  // the same energy order.
  Eigen::SelfAdjointEigenSolver<MatrixXcd> stat(h_static);
  if (stat.info() != Eigen::Success) {
    throw NumericalError("static eigendecomposition failed");
  }
  std::vector<StateLabel> labels;
  std::vector<double> energies;
  for (int fm : {atom.lower_f(), atom.upper_f()}) {
    for (int m = -fm; m <= fm; ++m) {
      labels.push_back({fm, m});
      energies.push_back(breit_rabi_energy(atom, fm, m, point.b0_magnitude));
    }
  }
  std::vector<int> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return energies[a] < energies[b]; });

  const int d = h.dim;
  f.label_basis = MatrixXcd::Zero(d, d);
  f.labels = labels;
  f.level_offsets.resize(d);
  for (int rank = 0; rank < d; ++rank) {
    const int idx = order[rank];
    f.label_basis.col(idx) = stat.eigenvectors().col(rank);
  }
  for (int i = 0; i < d; ++i) {
    f.level_offsets[i] = zero_field_energy(atom, labels[i].f_tilde);
  }
  f.reference_energy = 0.0;
  return f;
}

QuasienergySpectrum full_model_quasienergies(const AtomSpec& atom,
                                             const TrapConfig& trap,
                                             const LocalFieldPoint& point,
                                             int n_blocks) {
  return quasienergies(build_full_model_matrix(atom, trap, point, n_blocks));
}

}  // namespace rfmagic
