#pragma once

#include <string>
#include <vector>

#include "rfmagic/atom.hpp"
#include "rfmagic/dressed_hamiltonian.hpp"
#include "rfmagic/types.hpp"

namespace rfmagic {

inline constexpr int kDefaultFloquetBlocks = 21;

// Truncated Floquet block matrix. Block (k, l) holds H^(k-l) + k nu delta_kl
// for photon indices k, l in -(n_blocks-1)/2 ... (n_blocks-1)/2.
//
// The matrix is kept in long double and relative to reference_energy: the
// full 8-level model carries GHz-scale hyperfine terms whose rounding would
// otherwise leak into sub-mHz level shifts.
struct FloquetMatrix {
  int manifold_dim = 0;
  int n_blocks = 0;
  double rf_frequency = 0.0;
  double reference_energy = 0.0;
  MatrixXcld matrix;
  std::vector<int> block_photon_index;

  // Classification basis for the central block: column j of label_basis is
  // the unperturbed state carrying labels[j]. level_offsets[j] is removed
  // from a labeled (relative) quasienergy to obtain the lab-frame level
  // shift with respect to the zero-field energy of the state's manifold.
  std::vector<StateLabel> labels;
  MatrixXcd label_basis;
  std::vector<long double> level_offsets;

  int dim() const { return static_cast<int>(matrix.rows()); }
  int central_block() const { return (n_blocks - 1) / 2; }
};

// Assembles the block matrix of one manifold from its Fourier components.
// n_blocks must be odd and at least 3.
FloquetMatrix assemble_floquet_matrix(const FourierHamiltonian& components,
                                      int n_blocks, double rf_frequency);

// Same block layout from arbitrary harmonics: harmonics[n] is H^(n) for
// n >= 0, negative harmonics are the adjoints. Labels are left empty.
FloquetMatrix assemble_floquet_blocks(const std::vector<MatrixXcld>& harmonics,
                                      int n_blocks, double rf_frequency);

// The rotating-wave limit: only H^(0), no photon blocks.
FloquetMatrix rotating_wave_matrix(const FourierHamiltonian& components);

struct Quasienergy {
  StateLabel label;
  double quasienergy = 0.0;     // Hz, in the frame the matrix is written in
  // Hz, lab-frame level minus zero-field energy. Clock shifts are
  // differences of these MHz-scale values, hence the extended precision.
  long double level_shift = 0.0;
  double central_weight = 0.0;  // squared norm in the photon-index-0 block
};

struct QuasienergySpectrum {
  std::vector<Quasienergy> entries;  // one per label, in label order
  std::vector<double> eigenvalues;   // all eigenvalues, ascending, Hz
  std::vector<double> central_weights;
  bool classified = false;
  std::string diagnostic;

  // Throws InvalidArgument if the label is not present.
  const Quasienergy& at(const StateLabel& label) const;
};

// Full eigendecomposition and central-block classification. Never throws on
// classification failure; check `classified`.
QuasienergySpectrum analyze_floquet(const FloquetMatrix& matrix);

// As analyze_floquet, but throws ClassificationError unless every label is
// carried by exactly one eigenvector with central weight above 1/2.
QuasienergySpectrum quasienergies(const FloquetMatrix& matrix);

// Floquet matrix of the untransformed 8-level Hamiltonian: H^(0) is the
// static hyperfine + Zeeman part, H^(1) the rf Zeeman coupling, and no
// higher harmonics. Labels are the Breit-Rabi states of the static part.
FloquetMatrix build_full_model_matrix(const AtomSpec& atom,
                                      const TrapConfig& trap,
                                      const LocalFieldPoint& point,
                                      int n_blocks = kDefaultFloquetBlocks);

QuasienergySpectrum full_model_quasienergies(
    const AtomSpec& atom, const TrapConfig& trap, const LocalFieldPoint& point,
    int n_blocks = kDefaultFloquetBlocks);

}  // namespace rfmagic
