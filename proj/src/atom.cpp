#include "rfmagic/atom.hpp"

#include <cmath>

#include "rfmagic/errors.hpp"

namespace rfmagic {

std::string to_string(const StateLabel& label) {
  return "|F~=" + std::to_string(label.f_tilde) + ", m=" +
         std::to_string(label.m) + ">";
}

namespace {

bool is_half_integer(double x) {
  const double twice = 2.0 * x;
  return x >= 0.0 && std::abs(twice - std::round(twice)) < 1e-12;
}

void check_label(const AtomSpec& atom, const StateLabel& label,
                 const char* which) {
  if ((label.f_tilde != atom.lower_f() && label.f_tilde != atom.upper_f()) ||
      std::abs(label.m) > label.f_tilde) {
    throw InvalidArgument(std::string(which) + " clock state " +
                          to_string(label) + " is not a ground state");
  }
}

}  // namespace

void AtomSpec::validate() const {
  if (std::abs(j_spin - 0.5) > 1e-12) {
    throw InvalidArgument("only J = 1/2 atoms are supported");
  }
  if (!is_half_integer(i_spin) || i_spin < 0.5 ||
      std::lround(2.0 * i_spin) % 2 == 0) {
    throw InvalidArgument("nuclear spin must be a positive half-odd integer");
  }
  if (!(hfs_frequency > 0.0) || !std::isfinite(hfs_frequency)) {
    throw InvalidArgument("hyperfine splitting must be positive");
  }
  if (!std::isfinite(g_j) || !std::isfinite(g_i)) {
    throw InvalidArgument("g-factors must be finite");
  }
  check_label(*this, clock_lower, "lower");
  check_label(*this, clock_upper, "upper");
}

int AtomSpec::lower_f() const {
  return static_cast<int>(std::lround(i_spin - j_spin));
}

int AtomSpec::upper_f() const {
  return static_cast<int>(std::lround(i_spin + j_spin));
}

int rotation_sign(const AtomSpec& atom, int f_tilde) {
  if (f_tilde == atom.lower_f()) return +1;
  if (f_tilde == atom.upper_f()) return -1;
  throw InvalidArgument("no hyperfine manifold with F~ = " +
                        std::to_string(f_tilde));
}

}  // namespace rfmagic
