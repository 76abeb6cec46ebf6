#include "rfmagic/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "rfmagic/errors.hpp"
#include "rfmagic/parallel.hpp"

namespace rfmagic {

namespace {

std::array<double, 3> leading(const ShiftExpansion& e) {
  return {e.a0, e.a1, e.a2};
}

}  // namespace

FieldSensitivities field_sensitivities(const AtomSpec& atom,
                                       const MagicPoint& magic,
                                       const SensitivityOptions& options) {
  const double h = options.relative_step;
  if (!(h > 0.0 && h < 0.5)) throw InvalidArgument("relative step out of range");
  const TrapConfig base = magic.trap();

  // Stencil: B_I (1 + h), B_I (1 - h), B_rf (1 + h), B_rf (1 - h).
  const bool dressed = base.rf_amplitude > 0.0;
  const std::size_t n = dressed ? 4 : 2;
  std::vector<ShiftExpansion> fits(n);
  parallel_for(n, [&](std::size_t i) {
    TrapConfig t = base;
    const double factor = 1.0 + (i % 2 == 0 ? h : -h);
    if (i < 2) {
      t.b_ioffe *= factor;
    } else {
      t.rf_amplitude *= factor;
    }
    fits[i] = fit_shift_expansion(atom, t, magic.method, options.fit, 0.0,
                                  options.engine);
  });

  FieldSensitivities out;
  out.relative_step = h;
  for (const auto& f : fits) out.fit_warning = out.fit_warning || f.window_warning;
  const auto ip = leading(fits[0]), im = leading(fits[1]);
  for (int i = 0; i < 3; ++i) out.alpha_ioffe[i] = (ip[i] - im[i]) / (2.0 * h);
  if (dressed) {
    const auto rp = leading(fits[2]), rm = leading(fits[3]);
    for (int i = 0; i < 3; ++i) out.alpha_rf[i] = (rp[i] - rm[i]) / (2.0 * h);
  }
  return out;
}

PolarizationSensitivities polarization_sensitivities(
    const AtomSpec& atom, const MagicPoint& magic,
    const SensitivityOptions& options) {
  const double eps = options.epsilon_step;
  const int k_alpha = options.alpha_samples;
  if (!(eps > 0.0)) throw InvalidArgument("polarization step must be > 0");
  if (k_alpha < 4) throw InvalidArgument("need at least 4 alpha samples");
  const TrapConfig base = magic.trap();

  // Index 2k: +eps at alpha_k, 2k+1: -eps at alpha_k, last: eps = 0.
  const std::size_t n = 2 * static_cast<std::size_t>(k_alpha) + 1;
  std::vector<ShiftExpansion> fits(n);
  parallel_for(n, [&](std::size_t i) {
    TrapConfig t = base;
    double alpha = 0.0;
    if (i + 1 < n) {
      alpha = constants::kPi * static_cast<double>(i / 2) / k_alpha;
      t.polarization_delta += (i % 2 == 0 ? eps : -eps);
    }
    fits[i] = fit_shift_expansion(atom, t, magic.method, options.fit, alpha,
                                  options.engine);
  });

  PolarizationSensitivities out;
  out.epsilon_step = eps;
  out.alpha_samples = k_alpha;
  for (const auto& f : fits) out.fit_warning = out.fit_warning || f.window_warning;
  const auto a_zero = leading(fits.back());

  std::array<double, 3> beta{}, gamma{};
  std::vector<std::array<double, 3>> odd(k_alpha);
  for (int k = 0; k < k_alpha; ++k) {
    const double c2 = std::cos(2.0 * constants::kPi * k / k_alpha);
    const auto plus = leading(fits[2 * k]);
    const auto minus = leading(fits[2 * k + 1]);
    for (int i = 0; i < 3; ++i) {
      odd[k][i] = (plus[i] - minus[i]) / (2.0 * eps);
      beta[i] += 2.0 / k_alpha * odd[k][i] * c2;
      gamma[i] += (plus[i] + minus[i] - 2.0 * a_zero[i]) / (2.0 * eps * eps) /
                  k_alpha;
    }
  }
  for (int i = 0; i < 3; ++i) {
    double acc = 0.0;
    for (int k = 0; k < k_alpha; ++k) {
      const double c2 = std::cos(2.0 * constants::kPi * k / k_alpha);
      const double rest = odd[k][i] - beta[i] * c2;
      acc += rest * rest;
    }
    out.higher_harmonic_rms[i] = std::sqrt(acc / k_alpha);
  }
  out.beta0 = beta[0];
  out.beta = {beta[1], beta[2]};
  out.gamma = gamma;
  return out;
}

SensitivityReport sensitivity_report(const AtomSpec& atom,
                                     const MagicPoint& magic,
                                     const SensitivityOptions& options) {
  SensitivityReport r;
  r.magic = magic;
  r.field = field_sensitivities(atom, magic, options);
  r.polarization = polarization_sensitivities(atom, magic, options);
  r.fit_warning = magic.expansion.window_warning || r.field.fit_warning ||
                  r.polarization.fit_warning;
  return r;
}

void DeviationBudget::validate() const {
  if (!(rel_ioffe >= 0.0) || !(rel_rf >= 0.0) || !(polarization_offset >= 0.0)) {
    throw InvalidArgument("deviation budget entries must be >= 0");
  }
}

double rms_shift_deviation(const AtomSpec& atom, const TrapConfig& trap,
                           const DeviationBudget& budget, double chi,
                           double alpha, Method method,
                           const EngineOptions& engine) {
  budget.validate();
  constexpr double h = 1e-3;
  constexpr double eps = 0.5 * constants::kPi / 180.0;

  auto shift = [&](const TrapConfig& t) {
    return dressed_clock_shift(atom, t, chi, alpha, method, engine);
  };
  auto central = [&](auto&& perturb, double step) {
    TrapConfig up = trap, down = trap;
    perturb(up, step);
    perturb(down, -step);
    return (shift(up) - shift(down)) / (2.0 * step);
  };

  double total = 0.0;
  if (budget.rel_ioffe > 0.0) {
    const double d = central(
        [](TrapConfig& t, double s) { t.b_ioffe *= 1.0 + s; }, h);
    total += std::pow(d * budget.rel_ioffe, 2);
  }
  if (budget.rel_rf > 0.0 && trap.rf_amplitude > 0.0) {
    const double d = central(
        [](TrapConfig& t, double s) { t.rf_amplitude *= 1.0 + s; }, h);
    total += std::pow(d * budget.rel_rf, 2);
  }
  if (budget.polarization_offset > 0.0) {
    const double d = central(
        [](TrapConfig& t, double s) { t.polarization_delta += s; }, eps);
    total += std::pow(d * budget.polarization_offset, 2);
  }
  return std::sqrt(total);
}

double chi_for_potential(const AtomSpec& atom, const TrapConfig& trap,
                         double u_trap, Method method,
                         const ProfileOptions& options) {
  if (!(u_trap >= 0.0)) throw InvalidArgument("trap potential must be >= 0");
  if (u_trap == 0.0) return 0.0;
  auto residual = [&](double chi) {
    return trap_potential(atom, trap, chi, options.alpha, method,
                          ClockState::Lower, options.engine) -
           u_trap;
  };
  double hi = 0.01;
  double f_hi = residual(hi);
  while (f_hi <= 0.0) {
    hi *= 2.0;
    if (hi > 1e3) {
      throw NumericalError("trap potential does not reach " +
                           std::to_string(u_trap) + " Hz");
    }
    f_hi = residual(hi);
  }
  std::uintmax_t max_iter = 100;
  const auto [a, b] = boost::math::tools::toms748_solve(
      residual, 0.0, hi, -u_trap, f_hi,
      boost::math::tools::eps_tolerance<double>(48), max_iter);
  return 0.5 * (a + b);
}

ShiftProfile shift_profile(const AtomSpec& atom, const TrapConfig& trap,
                           const std::optional<DeviationBudget>& budget,
                           double u_max, Method method,
                           const ProfileOptions& options) {
  atom.validate();
  trap.validate();
  if (budget) budget->validate();
  if (!(u_max >= 0.0)) throw InvalidArgument("u_max must be >= 0");
  if (options.points < 2) throw InvalidArgument("profile needs >= 2 points");

  std::vector<double> targets{0.0};
  if (u_max > 0.0) {
    const int n = options.points - 1;
    for (int j = 1; j <= n; ++j) {
      if (options.log_spacing) {
        const double t = n > 1 ? static_cast<double>(j - 1) / (n - 1) : 1.0;
        targets.push_back(u_max * std::pow(100.0, t - 1.0));
      } else {
        targets.push_back(u_max * static_cast<double>(j) / n);
      }
    }
  }

  ShiftProfile out;
  const double shift0 =
      dressed_clock_shift(atom, trap, 0.0, options.alpha, method, options.engine);
  for (double u : targets) {
    ProfileRow row;
    try {
      row.u_trap = u;
      row.chi = chi_for_potential(atom, trap, u, method, options);
      row.radius = radius_from_chi(trap, row.chi);
      row.shift = dressed_clock_shift(atom, trap, row.chi, options.alpha,
                                      method, options.engine) -
                  shift0;
      if (budget) {
        row.rms_deviation = rms_shift_deviation(
            atom, trap, *budget, row.chi, options.alpha, method, options.engine);
      }
    } catch (const ClassificationError& e) {
      out.truncated = true;
      out.warning = "profile truncated at U_trap = " + std::to_string(u) +
                    " Hz: " + e.what();
      break;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace rfmagic
