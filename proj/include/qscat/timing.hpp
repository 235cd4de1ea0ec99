#ifndef QSCAT_TIMING_HPP
#define QSCAT_TIMING_HPP

#include <optional>
#include <string>
#include <vector>

#include "qscat/channels.hpp"
#include "qscat/common.hpp"

namespace qscat {

/// Arrival-time differences of the conventional wave-packet analysis:
/// incident CM passing a - L1 versus the transmitted CM passing b + L2
/// (transmission) or the reflected CM returning to a - L1 (reflection).
/// Both retain a term proportional to the start distance a whenever the
/// channel mean momentum differs from k0, which is why they fail as
/// intrinsic times for narrow packets.
struct SwpaTimes {
  double dt_tr;
  double dt_ref;
};

SwpaTimes swpa_times(const Scenario& scenario, const ScatterCoeffs& coeffs,
                     double L1, double L2);

/// Channel delay times relative to ideal passage: free flight for
/// transmission, hard-wall reflection about the barrier midpoint for
/// reflection. tau_ref_minus is the left-side reflection delay (J' - F'),
/// tau_ref_plus the right-side one (J' + F'); they coincide only for
/// symmetric barriers. spatial_* are the corresponding length delays.
struct DelayTimes {
  double tau_tr;
  double tau_ref_minus;
  double tau_ref_plus;
  double spatial_tr;   // <J'>_tr - d
  double spatial_ref;  // <J' -+ F'>_ref - d, sign fixed by the scenario side
};

DelayTimes delay_times(const Scenario& scenario, const ScatterCoeffs& coeffs);

struct CompletedFlags {
  bool incident;     // k0 exceeds the incident spectral deviation
  bool transmitted;  // channel mean |k| exceeds its spectral deviation
  bool reflected;

  bool all() const { return incident && transmitted && reflected; }
};

/// Start/end instants of the scattering event (left-side case): t_start is
/// the smaller root of the incident CM-vs-halfwidth crossing; each t_end^(n)
/// is the larger root of the channel CM clearing its own halfwidth. When a
/// channel cannot outrun its spreading the crossing never happens: the flag
/// drops and the corresponding t_end is NaN.
struct ScatteringTime {
  double t_start = 0.0;
  double t_end_tr = 0.0;
  double t_end_ref = 0.0;
  double t_end = 0.0;
  double tau_scatt = 0.0;
  CompletedFlags completed{};
};

ScatteringTime scattering_time(const Scenario& scenario,
                               const ScatterCoeffs& coeffs);

/// Smaller root of (a - k0 t)^2 = sigma_in + dk2_in t^2, in the rationalized
/// form that stays finite as k0^2 -> dk2_in (hbar = m = 1).
double onset_time(double a, double k0, double sigma_in, double dk2_in);

/// Larger root of (k t - bbar)^2 = sigma - 2 chi t + dk2 t^2; NaN when the
/// packet spreads faster than it travels and never clears its width.
double clearing_time(double k, double dk2, double bbar, double sigma,
                     double chi);

/// Narrow-packet scattering lengths and the limiting scattering time
/// (m/hbar k0) max(l1, l2). Meaningful when the spectral width corrections
/// are small; `narrow_ok` reports the check against `narrow_threshold` on
/// <(dk)^2>/k0^2.
struct ScatteringLength {
  double l1;
  double l2;
  double tau_scatt_narrow;
  bool narrow_ok;
  std::string warning;  // set when narrow_ok is false
};

ScatteringLength scattering_length(const Scenario& scenario,
                                   const ScatterCoeffs& coeffs,
                                   double narrow_threshold = 1e-2);

/// Everything above for one scenario, as emitted by the CLI.
struct TimeReport {
  double swpa_tr, swpa_ref, L1, L2;
  double delay_tr, delay_ref_minus, delay_ref_plus;
  double spatial_delay_tr, spatial_delay_ref;
  std::optional<ScatteringTime> scattering;  // left-side scenarios only
  std::optional<ScatteringLength> lengths;
  std::vector<std::string> warnings;
};

TimeReport full_time_report(const Scenario& scenario,
                            const ScatterCoeffs& coeffs, double L1, double L2,
                            double narrow_threshold = 1e-2);

}  // namespace qscat

#endif
