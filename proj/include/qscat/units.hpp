#ifndef QSCAT_UNITS_HPP
#define QSCAT_UNITS_HPP

namespace qscat {

/// Everything internal runs with hbar = m = 1 and user-chosen length units.
/// Given hbar and the particle mass in the user's unit system (with the
/// same length unit), energies scale by m/hbar^2 on the way in and times
/// by m/hbar on the way out; lengths and wavenumbers pass through.
struct Units {
  double hbar = 1.0;
  double mass = 1.0;

  double energy_in(double e) const { return e * mass / (hbar * hbar); }
  double time_in(double t) const { return t * hbar / mass; }
  double time_out(double t) const { return t * mass / hbar; }
};

}  // namespace qscat

#endif
