#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rfmagic/dressed_hamiltonian.hpp"
#include "rfmagic/errors.hpp"
#include "rfmagic/floquet.hpp"
#include "rfmagic/magic_solver.hpp"
#include "rfmagic/spin_algebra.hpp"
#include "rfmagic/static_spectrum.hpp"

using namespace rfmagic;
using constants::kPi;

namespace {

TrapConfig trap_with(double b_i, double b_rf, double nu,
                     double delta = -kPi / 4) {
  TrapConfig t;
  t.b_ioffe = b_i;
  t.rf_amplitude = b_rf;
  t.rf_frequency = nu;
  t.polarization_delta = delta;
  return t;
}

double static_shift(int f, int m, double b0) {
  return static_cast<double>(oracle::breit_rabi(f, m, b0) -
                             oracle::breit_rabi(f, m, 0.0L));
}

}  // namespace

TEST_CASE("block layout") {
  const AtomSpec atom;
  const TrapConfig t = trap_with(3.2, 0.05, 2.0e6);
  const LocalFieldPoint p = local_field_point(t, 0.1, 0.3);
  const FourierHamiltonian h2 = build_fourier_hamiltonian(atom, t, p, 2);
  const FourierHamiltonian h1 = build_fourier_hamiltonian(atom, t, p, 1);
  CHECK(assemble_floquet_matrix(h2, 21, t.rf_frequency).dim() == 105);
  CHECK(assemble_floquet_matrix(h1, 21, t.rf_frequency).dim() == 63);
  CHECK(assemble_floquet_matrix(h1, 21, t.rf_frequency).central_block() == 10);
  CHECK(rotating_wave_matrix(h2).dim() == 5);
  for (int n : {-1, 0, 1, 2, 4, 20}) {
    CHECK_THROWS_AS(assemble_floquet_matrix(h1, n, t.rf_frequency),
                    InvalidArgument);
  }
  CHECK_THROWS_AS(assemble_floquet_matrix(h1, 5, 0.0), InvalidArgument);
  const FloquetMatrix f = assemble_floquet_matrix(h1, 5, t.rf_frequency);
  CHECK(f.block_photon_index == std::vector<int>{-2, -1, 0, 1, 2});
  CHECK((f.matrix - f.matrix.adjoint()).norm() < 1e-6L);
}

TEST_CASE("hand-assembled three-block matrix") {
  const AtomSpec atom;
  const TrapConfig t = trap_with(3.0, 0.1, 1.5e6, -kPi / 4 + 0.3);
  const LocalFieldPoint p = local_field_point(t, 0.4, 0.8);
  const FourierHamiltonian h = build_fourier_hamiltonian(atom, t, p, 1);
  const FloquetMatrix f = assemble_floquet_matrix(h, 3, t.rf_frequency);
  REQUIRE(f.dim() == 9);

  MatrixXcd expected = MatrixXcd::Zero(9, 9);
  const double nu = t.rf_frequency;
  // Photon index -1, 0, +1 along the diagonal.
  for (int k = 0; k < 3; ++k) {
    expected.block(3 * k, 3 * k, 3, 3) = h.h0;
    expected.block(3 * k, 3 * k, 3, 3).diagonal().array() += (k - 1) * nu;
  }
  expected.block(3, 0, 3, 3) = h.h_plus1;
  expected.block(6, 3, 3, 3) = h.h_plus1;
  expected.block(0, 3, 3, 3) = h.h_plus1.adjoint();
  expected.block(3, 6, 3, 3) = h.h_plus1.adjoint();
  expected.block(6, 0, 3, 3) = h.h_plus2;
  expected.block(0, 6, 3, 3) = h.h_plus2.adjoint();
  CHECK((f.matrix.cast<Complex>() - expected).norm() < 1e-9);
}

TEST_CASE("without rf the quasienergies are the Breit-Rabi levels") {
  const AtomSpec atom;
  for (double nu : {0.5e6, 2.0e6}) {
    const TrapConfig t = trap_with(3.1, 0.0, nu);
    for (double chi : {0.0, 0.3}) {
      const LocalFieldPoint p = local_field_point(t, chi, 1.0);
      for (int f : {1, 2}) {
        const FourierHamiltonian h = build_fourier_hamiltonian(atom, t, p, f);
        for (const auto& fm : {assemble_floquet_matrix(h, 21, nu),
                               rotating_wave_matrix(h)}) {
          const QuasienergySpectrum s = quasienergies(fm);
          REQUIRE(s.entries.size() == static_cast<std::size_t>(2 * f + 1));
          for (const auto& q : s.entries) {
            CHECK(q.central_weight == doctest::Approx(1.0));
            CHECK(std::abs(q.level_shift -
                           static_shift(f, q.label.m, p.b0_magnitude)) < 1e-6);
          }
        }
      }
      const QuasienergySpectrum full = full_model_quasienergies(atom, t, p);
      REQUIRE(full.entries.size() == 8);
      for (const auto& q : full.entries) {
        CHECK(std::abs(q.level_shift - static_shift(q.label.f_tilde, q.label.m,
                                                    p.b0_magnitude)) < 1e-4);
      }
    }
  }
}

TEST_CASE("quasienergies repeat with the photon energy") {
  const AtomSpec atom;
  const TrapConfig t = trap_with(3.2, 0.05, 1.8e6, 0.2);
  const LocalFieldPoint p = local_field_point(t, 0.2, 0.5);
  const FourierHamiltonian h = build_fourier_hamiltonian(atom, t, p, 1);
  const QuasienergySpectrum s =
      quasienergies(assemble_floquet_matrix(h, 21, t.rf_frequency));
  for (const auto& q : s.entries) {
    for (int k : {-2, -1, 1, 2}) {
      const double target = q.quasienergy + k * t.rf_frequency;
      double best = 1e30;
      for (double e : s.eigenvalues) best = std::min(best, std::abs(e - target));
      CHECK(best < 1e-3);
    }
  }
}

TEST_CASE("upper manifold is not dressed in the rotating-wave limit") {
  const AtomSpec atom;
  const TrapConfig bare = trap_with(3.2, 0.0, 2.2e6);
  const auto ref = quasienergies(rotating_wave_matrix(build_fourier_hamiltonian(
      atom, bare, local_field_point(bare, 0.0, 0.0), 2)));
  for (double b_rf : {1e-3, 0.05, 0.1}) {
    const TrapConfig t = trap_with(3.2, b_rf, 2.2e6);
    const auto s = quasienergies(rotating_wave_matrix(
        build_fourier_hamiltonian(atom, t, local_field_point(t, 0.0, 0.0), 2)));
    for (int m = -2; m <= 2; ++m) {
      CHECK(std::abs(s.at({2, m}).level_shift - ref.at({2, m}).level_shift) <
            1e-6);
    }
  }
}

TEST_CASE("truncation convergence") {
  const AtomSpec atom;
  for (double nu : {0.5e6, 2.0e6}) {
    const TrapConfig t = trap_with(3.2, 0.1, nu);
    const LocalFieldPoint p = local_field_point(t, 0.05, 0.0);
    for (int f : {1, 2}) {
      const FourierHamiltonian h = build_fourier_hamiltonian(atom, t, p, f);
      const auto a = quasienergies(assemble_floquet_matrix(h, 21, nu));
      const auto b = quasienergies(assemble_floquet_matrix(h, 31, nu));
      for (const auto& q : a.entries) {
        CHECK(std::abs(q.level_shift - b.at(q.label).level_shift) < 1e-3);
      }
    }
    const auto a = full_model_quasienergies(atom, t, p, 21);
    const auto b = full_model_quasienergies(atom, t, p, 31);
    for (const auto& q : a.entries) {
      CHECK(std::abs(q.level_shift - b.at(q.label).level_shift) < 1e-3);
    }
  }
}

TEST_CASE("weak dressing: Floquet and rotating-wave clock shifts agree") {
  const AtomSpec atom;
  for (double nu : {2.0e6, 2.2e6, 3.0e6}) {
    for (double b_rf : {2e-4, 5e-4, 1e-3}) {
      const TrapConfig t = trap_with(3.2289, b_rf, nu);
      for (double chi : {0.0, 0.02, 0.05}) {
        const double w = dressed_clock_shift(atom, t, chi, 0.0, Method::Wffa);
        const double r = dressed_clock_shift(atom, t, chi, 0.0, Method::Rwa);
        CHECK(std::abs(w - r) <= 1.0);
      }
    }
  }
}

TEST_CASE("rotating-frame Floquet agrees with the untransformed model") {
  const AtomSpec atom;
  const TrapConfig t = trap_with(3.2289, 8.16e-4, 2.2e6);
  const double w0 = dressed_clock_shift(atom, t, 0.0, 0.0, Method::Wffa);
  const double f0 = dressed_clock_shift(atom, t, 0.0, 0.0, Method::FullFloquet);
  for (int i = 0; i <= 10; ++i) {
    const double chi = 0.1 * i;
    for (double alpha : {0.0, 0.9}) {
      const double w = dressed_clock_shift(atom, t, chi, alpha, Method::Wffa);
      const double f =
          dressed_clock_shift(atom, t, chi, alpha, Method::FullFloquet);
      CHECK(std::abs((w - w0) - (f - f0)) <= 0.5);
    }
  }
}

TEST_CASE("two-photon resonance defeats the classification") {
  const AtomSpec atom;
  const double nu = 0.9e6;
  const double g1 =
      std::abs(lande_g_factor(atom, 1)) * constants::kBohrMagnetonHzPerGauss;
  std::vector<double> failures;
  int n = 0;
  for (double b_i = 2.50; b_i <= 2.60 + 1e-12; b_i += 5e-5, ++n) {
    const TrapConfig t = trap_with(b_i, 0.2, nu);
    const LocalFieldPoint p = local_field_point(t, 0.04, 0.0);
    const FourierHamiltonian h = build_fourier_hamiltonian(atom, t, p, 1);
    const QuasienergySpectrum s =
        analyze_floquet(assemble_floquet_matrix(h, 21, nu));
    if (!s.classified) {
      CHECK_FALSE(s.diagnostic.empty());
      CHECK_THROWS_AS(quasienergies(assemble_floquet_matrix(h, 21, nu)),
                      ClassificationError);
      failures.push_back(p.b0_magnitude);
    }
  }
  CHECK(n > 1000);
  REQUIRE_FALSE(failures.empty());
  for (double b0 : failures) {
    CHECK(g1 * b0 == doctest::Approx(2 * nu).epsilon(0.02));
  }
}

TEST_CASE("synthetic repeated label") {
  MatrixXcld h0 = MatrixXcld::Zero(2, 2);
  h0(0, 0) = -1.0e5L;
  h0(1, 1) = 1.0e5L;
  FloquetMatrix f = assemble_floquet_blocks({h0}, 3, 1.0e6);
  CHECK_THROWS_AS(analyze_floquet(f), InvalidArgument);

  f.labels = {{1, 0}, {1, 1}};
  f.level_offsets = {0.0L, 0.0L};
  f.label_basis = MatrixXcd::Identity(2, 2);
  const QuasienergySpectrum ok = quasienergies(f);
  CHECK(ok.at({1, 0}).level_shift == doctest::Approx(-1.0e5));
  CHECK(ok.at({1, 1}).level_shift == doctest::Approx(1.0e5));

  // Both basis columns point at the same state.
  f.label_basis.col(1) = f.label_basis.col(0);
  const QuasienergySpectrum bad = analyze_floquet(f);
  CHECK_FALSE(bad.classified);
  CHECK(bad.diagnostic.find("repeated") != std::string::npos);
  CHECK_THROWS_AS(quasienergies(f), ClassificationError);
  CHECK_THROWS_AS(bad.at({2, 0}), InvalidArgument);
}
