// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rfmagic/dressed_hamiltonian.hpp"
#include "rfmagic/errors.hpp"
#include "rfmagic/floquet.hpp"
#include "rfmagic/magic_solver.hpp"
#include "rfmagic/robustness.hpp"
#include "rfmagic/static_spectrum.hpp"

using namespace rfmagic;
using constants::kPi;

namespace {

// Tolerances.
constexpr double kTolBMagic = 1e-5;         // G
constexpr double kTolStaticShift = 0.05;    // Hz
constexpr double kTolCurvature = 1.0;       // Hz/G^2
constexpr double kStaticRuntime = 1.0;      // s
constexpr double kTolA2 = 0.1;              // Hz/G^4
constexpr double kTolA3 = 0.05;             // Hz/G^6
constexpr double kTolA0 = 0.1;              // Hz
constexpr double kExpansionRuntime = 30.0;  // s
constexpr double kTableDigits = 1.0;        // last printed digit units
constexpr double kScanRuntime = 600.0;      // s
constexpr double kTolOracleSlope = 0.1;     // Hz/G^2
constexpr double kTolOracleCurv = 3.0;      // Hz/G^4
constexpr double kTolSelectF2 = 1e-6;       // Hz
constexpr double kTolAlphaRel = 1e-9;
constexpr double kTolSlope = 0.05;
constexpr double kTolBeta0 = 1e-3;          // Hz/rad
constexpr double kTolResonance = 0.01e6;    // Hz
constexpr double kTolThermal = 1e3;         // Hz
constexpr double kBudgetFactor = 8.0;
constexpr double kBareFactor = 50.0;
constexpr double kTolBlocks = 1e-3;         // Hz
constexpr double kTolRichardson = 0.05;

struct TableRow {
  double mhz;
  const char* rwa_bi;
  const char* rwa_brf;
  const char* wffa_bi;
  const char* wffa_brf;
};

constexpr TableRow kTable[] = {
    {0.5, "2.530", "0.0813", "2.614", "0.1053"},
    {0.6, "2.556", "0.0758", "2.629", "0.0931"},
    {0.7, "2.585", "0.0704", "2.646", "0.0828"},
    {0.8, "2.615", "0.0648", "2.665", "0.0739"},
    {0.9, "2.647", "0.0593", "2.678", "0.0661"},
    {1.0, "2.681", "0.0539", "2.712", "0.0585"},
    {1.1, "2.717", "0.0484", "2.745", "0.0517"},
    {1.2, "2.755", "0.0430", "2.777", "0.0453"},
    {1.3, "2.794", "0.0377", "2.810", "0.0393"},
    {1.4, "2.834", "0.0326", "2.846", "0.0336"},
    {1.5, "2.876", "0.0275", "2.885", "0.0282"},
    {1.6, "2.920", "0.0227", "2.925", "0.0231"},
    {1.7, "2.964", "0.0181", "2.967", "0.0183"},
    {1.8, "3.009", "0.0137", "3.011", "0.0138"},
    {1.9, "3.055", "0.00971", "3.056", "0.00976"},
    {2.0, "3.102", "0.00613", "3.102", "0.00615"},
    {2.1, "3.149", "0.00310", "3.149", "0.00310"},
    {2.2, "3.195", "0.000816", "3.195", "0.000816"},
};
constexpr std::size_t kRows = std::size(kTable);

// Value and last-digit unit of a printed decimal.
struct Printed {
  double value;
  double unit;
};

Printed printed(const char* text) {
  const std::string s(text);
  const auto dot = s.find('.');
  const int decimals =
      dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
  return {std::stod(s), std::pow(10.0, -decimals)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

int failures = 0;

void report(int id, bool pass, const std::string& text) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", text.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double loglog_slope(const std::vector<ProfileRow>& rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
  for (const auto& r : rows) {
    const double lx = std::log(r.u_trap), ly = std::log(std::abs(r.shift));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    n += 1;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Rows of a log-spaced profile with 0 < U <= u_max / 10.
std::vector<ProfileRow> lower_decade(const ShiftProfile& p, double u_max) {
  std::vector<ProfileRow> out;
  for (const auto& r : p.rows) {
    if (r.u_trap > 0.0 && r.u_trap <= u_max / 10 * (1 + 1e-9)) out.push_back(r);
  }
  return out;
}

TrapConfig bare_magic_trap(const AtomSpec& atom) {
  TrapConfig t;
  t.b_ioffe = find_static_magic_field(atom).b_magic;
  t.rf_amplitude = 0.0;
  return t;
}

}  // namespace

int main() {
  const AtomSpec atom;

  // 1
  {
    const auto t0 = std::chrono::steady_clock::now();
    const StaticMagicField m = find_static_magic_field(atom);
    const double dt = seconds_since(t0);
    const bool ok = std::abs(m.b_magic - 3.228917) <= kTolBMagic &&
                    std::abs(m.shift_at_magic - (-4497.37)) <= kTolStaticShift &&
                    std::abs(m.curvature - 863.0) <= kTolCurvature &&
                    dt < kStaticRuntime;
    report(1, ok,
           fmt("B_magic = %.7f G (3.228917 +/- %g), dE = %.4f Hz (-4497.37 +/- "
               "%g), curvature = %.3f Hz/G^2 (863 +/- %g), %.3f s",
               m.b_magic, kTolBMagic, m.shift_at_magic, kTolStaticShift,
               m.curvature, kTolCurvature, dt));
  }

  // 2
  {
    const auto t0 = std::chrono::steady_clock::now();
    const ShiftExpansion e =
        fit_shift_expansion(atom, bare_magic_trap(atom), Method::Wffa);
    const double dt = seconds_since(t0);
    const bool ok = std::abs(e.a2 - 10.34) <= kTolA2 &&
                    std::abs(e.a3 - (-0.49)) <= kTolA3 &&
                    std::abs(e.a0 - (-4497.4)) <= kTolA0 && dt < kExpansionRuntime;
    report(2, ok,
           fmt("A0 = %.4f Hz, A2 = %.4f Hz/G^4, A3 = %.4f Hz/G^6, %.2f s", e.a0,
               e.a2, e.a3, dt));
  }

  // 3
  std::vector<double> freqs;
  for (const auto& r : kTable) freqs.push_back(r.mhz * 1e6);
  const auto t_scan = std::chrono::steady_clock::now();
  const auto rwa = magic_scan(atom, freqs, Method::Rwa);
  const auto wffa = magic_scan(atom, freqs, Method::Wffa);
  const double scan_time = seconds_since(t_scan);
  {
    int matched = 0;
    std::string misses;
    auto check = [&](const std::vector<MagicScanRow>& rows, std::size_t i,
                     const char* name, const char* bi, const char* brf) {
      if (!rows[i].point) {
        misses += fmt(" [%s %.1f MHz failed: %s]", name, kTable[i].mhz,
                      rows[i].error.c_str());
        return;
      }
      const Printed pb = printed(bi), pr = printed(brf);
      const double db = (rows[i].point->b_ioffe_magic - pb.value) / pb.unit;
      const double dr = (rows[i].point->b_rf_magic - pr.value) / pr.unit;
      if (std::abs(db) <= kTableDigits * (1 + 1e-9) &&
          std::abs(dr) <= kTableDigits * (1 + 1e-9)) {
        ++matched;
      } else {
        misses += fmt(" [%s %.1f MHz: B_I %.5f vs %s (%+.2f digits), B_rf %.6f "
                      "vs %s (%+.2f digits)]",
                      name, kTable[i].mhz, rows[i].point->b_ioffe_magic, bi, db,
                      rows[i].point->b_rf_magic, brf, dr);
      }
    };
    for (std::size_t i = 0; i < kRows; ++i) {
      check(rwa, i, "RWA", kTable[i].rwa_bi, kTable[i].rwa_brf);
      check(wffa, i, "WFFA", kTable[i].wffa_bi, kTable[i].wffa_brf);
    }
    const bool ok = matched == 2 * static_cast<int>(kRows) && scan_time < kScanRuntime;
    report(3, ok,
           fmt("%d of %zu pairs within %g last-digit unit, scan %.1f s", matched,
               2 * kRows, kTableDigits, scan_time) +
               misses);
  }

  // 4
  {
    double worst_slope = 0.0, worst_curv = 0.0;
    int evaluated = 0;
    bool all = true;
    for (std::size_t i = 0; i < kRows; ++i) {
      if (!wffa[i].point) {
        all = false;
        continue;
      }
      const ShiftExpansion e =
          fit_shift_expansion(atom, wffa[i].point->trap(), Method::FullFloquet);
      worst_slope = std::max(worst_slope, std::abs(e.a1));
      worst_curv = std::max(worst_curv, std::abs(2.0 * e.a2));
      ++evaluated;
    }
    const bool ok = all && worst_slope <= kTolOracleSlope && worst_curv <= kTolOracleCurv;
    report(4, ok,
           fmt("8-level oracle at %d magic points: max |dE/dchi| = %.4f Hz/G^2 "
               "(<= %g), max |d2E/dchi2| = %.4f Hz/G^4 (<= %g)",
               evaluated, worst_slope, kTolOracleSlope, worst_curv, kTolOracleCurv));
  }

  // 5
  {
    double worst_f2 = 0.0, worst_alpha = 0.0;
    for (double nu : {1.0e6, 2.0e6}) {
      for (double b_i : {2.7, 3.0, 3.3}) {
        // Rf amplitude independence of the upper manifold on the trap axis.
        TrapConfig bare;
        bare.b_ioffe = b_i;
        bare.rf_amplitude = 0.0;
        bare.rf_frequency = nu;
        const auto ref = quasienergies(rotating_wave_matrix(
            build_fourier_hamiltonian(atom, bare, local_field_point(bare, 0.0, 0.0), 2)));
        for (double b_rf : {0.001, 0.05, 0.1}) {
          TrapConfig t = bare;
          t.rf_amplitude = b_rf;
          const auto s = quasienergies(rotating_wave_matrix(
              build_fourier_hamiltonian(atom, t, local_field_point(t, 0.0, 0.0), 2)));
          for (const auto& q : s.entries) {
            worst_f2 = std::max(worst_f2, static_cast<double>(std::abs(
                                              q.level_shift - ref.at(q.label).level_shift)));
          }
        }
      }
      // Azimuthal invariance of the full spectrum, on and off axis.
      TrapConfig t;
      t.b_ioffe = 3.0;
      t.rf_amplitude = 0.05;
      t.rf_frequency = nu;
      for (double chi : {0.0, 0.05, 0.5}) {
        for (int f : {1, 2}) {
          const auto h0 =
              build_fourier_hamiltonian(atom, t, local_field_point(t, chi, 0.0), f);
          const auto r0 = analyze_floquet(assemble_floquet_matrix(h0, 21, nu));
          for (double alpha : {0.4, 1.3, 2.9}) {
            const auto h =
                build_fourier_hamiltonian(atom, t, local_field_point(t, chi, alpha), f);
            const auto r = analyze_floquet(assemble_floquet_matrix(h, 21, nu));
            for (std::size_t k = 0; k < r.eigenvalues.size(); ++k) {
              worst_alpha =
                  std::max(worst_alpha, std::abs(r.eigenvalues[k] - r0.eigenvalues[k]) /
                                            std::abs(r0.eigenvalues[k]));
            }
          }
        }
      }
    }
    report(5, worst_f2 <= kTolSelectF2 && worst_alpha <= kTolAlphaRel,
           fmt("max on-axis F=2 change with B_rf = %.3g Hz (<= %g), max relative "
               "alpha dependence = %.3g (<= %g)",
               worst_f2, kTolSelectF2, worst_alpha, kTolAlphaRel));
  }

  // 6
  {
    const double u_max = 20e3;
    ProfileOptions opt;
    opt.points = 21;
    opt.log_spacing = true;
    const double bare = loglog_slope(lower_decade(
        shift_profile(atom, bare_magic_trap(atom), std::nullopt, u_max, Method::Wffa,
                      opt),
        u_max));
    const std::size_t i20 = 15;  // 2.0 MHz
    double dressed = std::nan("");
    if (wffa[i20].point) {
      dressed = loglog_slope(lower_decade(
          shift_profile(atom, wffa[i20].point->trap(), std::nullopt, u_max,
                        Method::Wffa, opt),
          u_max));
    }
    const bool ok = std::abs(bare - 2.0) <= kTolSlope && std::abs(dressed - 3.0) <= kTolSlope;
    report(6, ok,
           fmt("log-log slope over U_trap in [200, 2000] Hz: undressed %.4f (2 +/- "
               "%g), dressed at 2.0 MHz %.4f (3 +/- %g)",
               bare, kTolSlope, dressed, kTolSlope));
  }

  // 7
  {
    std::string text;
    bool ok = true;
    for (std::size_t i : {std::size_t{5}, std::size_t{10}, std::size_t{15}}) {
      if (!wffa[i].point) {
        ok = false;
        text += fmt("%.1f MHz: no magic point; ", kTable[i].mhz);
        continue;
      }
      const auto p = polarization_sensitivities(atom, *wffa[i].point);
      ok = ok && std::abs(p.beta0) <= kTolBeta0;
      text += fmt("%.1f MHz: beta0 = %.2e Hz/rad; ", kTable[i].mhz, p.beta0);
    }
    report(7, ok, text + fmt("(|beta0| <= %g)", kTolBeta0));
  }

  // 8
  {
    TrapConfig t;
    t.rf_frequency = 2.2e6;
    const AdiabaticityMargin m = adiabaticity_margin(atom, t, 1e-6, 2e3);
    const bool ok = std::abs(m.resonance_frequency - 2.26e6) <= kTolResonance &&
                    std::abs(m.thermal_scale - 11e3) <= kTolThermal;
    report(8, ok,
           fmt("resonance %.4f MHz (2.26 +/- 0.01), thermal scale %.3f kHz (11 +/- "
               "1), ratio at 2.2 MHz = %.1f",
               m.resonance_frequency / 1e6, m.thermal_scale / 1e3, m.ratio));
  }

  // 9
  {
    const double u = 20e3;
    const DeviationBudget budget = DeviationBudget::atom_chip();
    ProfileOptions opt;
    opt.points = 2;
    const auto bare_row =
        shift_profile(atom, bare_magic_trap(atom), budget, u, Method::Wffa, opt)
            .rows.back();
    const double bare_plain = std::abs(bare_row.shift);
    const double bare_budget = bare_plain + bare_row.rms_deviation;
    double best_plain = 1e300, best_budget = 1e300, f_plain = 0, f_budget = 0;
    std::string rows;
    for (std::size_t i = 0; i < kRows; ++i) {
      if (!wffa[i].point) continue;
      const bool in_band = i >= 13;  // 1.8 ... 2.2 MHz
      const auto r = shift_profile(atom, wffa[i].point->trap(),
                                   in_band ? std::optional(budget) : std::nullopt,
                                   u, Method::Wffa, opt)
                         .rows.back();
      const double plain = std::abs(r.shift);
      if (plain < best_plain) {
        best_plain = plain;
        f_plain = kTable[i].mhz;
      }
      if (!in_band) continue;
      const double with = plain + r.rms_deviation;
      rows += fmt(" %.1f MHz: %.4f + %.4f Hz;", kTable[i].mhz, plain, r.rms_deviation);
      if (with < best_budget) {
        best_budget = with;
        f_budget = kTable[i].mhz;
      }
    }
    const double r_budget = bare_budget / best_budget;
    const double r_plain = bare_plain / best_plain;
    report(9, r_budget >= kBudgetFactor && r_plain >= kBareFactor,
           fmt("at U_trap = 20 kHz undressed |dE| = %.4f Hz, dE_rms = %.4f Hz; "
               "with budget best %.1f MHz ratio %.2f (>= %g); without budget best "
               "%.1f MHz ratio %.1f (>= %g);",
               bare_plain, bare_row.rms_deviation, f_budget, r_budget,
               kBudgetFactor, f_plain, r_plain, kBareFactor) +
               rows);
  }

  // 10
  {
    double worst_blocks = 0.0;
    bool all = true;
    for (std::size_t i = 0; i < kRows; ++i) {
      if (!wffa[i].point) {
        all = false;
        continue;
      }
      const TrapConfig t = wffa[i].point->trap();
      for (double chi : {0.0, 0.05}) {
        const LocalFieldPoint p = local_field_point(t, chi, 0.0);
        for (int f : {1, 2}) {
          const FourierHamiltonian h = build_fourier_hamiltonian(atom, t, p, f);
          const auto a = quasienergies(assemble_floquet_matrix(h, 21, t.rf_frequency));
          const auto b = quasienergies(assemble_floquet_matrix(h, 31, t.rf_frequency));
          for (const auto& q : a.entries) {
            worst_blocks = std::max(worst_blocks, static_cast<double>(std::abs(
                                                      q.level_shift - b.at(q.label).level_shift)));
          }
        }
      }
    }

    double worst_rich = 0.0;
    std::string worst_name = "none";
    for (std::size_t i : {std::size_t{10}, std::size_t{15}}) {
      if (!wffa[i].point) {
        all = false;
        continue;
      }
      SensitivityOptions coarse, fine;
      fine.relative_step = coarse.relative_step / 2;
      fine.epsilon_step = coarse.epsilon_step / 2;
      const auto a = sensitivity_report(atom, *wffa[i].point, coarse);
      const auto b = sensitivity_report(atom, *wffa[i].point, fine);
      auto compare = [&](const char* name, double x, double y) {
        const double rel = std::abs(x - y) / std::abs(x);
        if (rel > worst_rich) {
          worst_rich = rel;
          worst_name = fmt("%s at %.1f MHz (%.6g vs %.6g)", name, kTable[i].mhz, x, y);
        }
      };
      for (int k = 0; k < 3; ++k) {
        compare(fmt("alpha_ioffe[%d]", k).c_str(), a.field.alpha_ioffe[k],
                b.field.alpha_ioffe[k]);
        compare(fmt("alpha_rf[%d]", k).c_str(), a.field.alpha_rf[k], b.field.alpha_rf[k]);
        compare(fmt("gamma[%d]", k).c_str(), a.polarization.gamma[k],
                b.polarization.gamma[k]);
      }
      for (int k = 0; k < 2; ++k) {
        compare(fmt("beta[%d]", k + 1).c_str(), a.polarization.beta[k],
                b.polarization.beta[k]);
      }
    }
    report(10, all && worst_blocks <= kTolBlocks && worst_rich < kTolRichardson,
           fmt("21 vs 31 blocks max change %.3g Hz (<= %g); step halving max "
               "relative change %.3g (< %g), %s",
               worst_blocks, kTolBlocks, worst_rich, kTolRichardson,
               worst_name.c_str()));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
