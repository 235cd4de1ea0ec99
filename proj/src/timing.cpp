#include "qscat/timing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qscat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ChannelStats {
  MomentSet in, tr, ref;
  double jp_tr;   // <J'>_tr
  double jp_ref;  // <J'>_ref
  double fp_ref;  // <F'>_ref
};

// Channel averages of the phase-time derivatives share one weight per
// channel: T M^2 (transmission) and R M^2 (reflection). The in and out
// states of a channel carry the same weight, so these averages serve both.
ChannelStats channel_stats(const Scenario& scenario,
                           const ScatterCoeffs& coeffs) {
  const ChannelPair out = out_asymptotes(scenario, coeffs);
  ChannelStats st;
  st.in = moments(scenario.amplitude);
  st.tr = moments(out.tr);
  st.ref = moments(out.ref);

  const std::vector<double>& ks = *coeffs.kgrid;
  const std::size_t n = ks.size();
  std::vector<double> wt(n), wr(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double m2 = std::norm(scenario.amplitude.amp[i]);
    wt[i] = coeffs.T[i] * m2;
    wr[i] = coeffs.R[i] * m2;
  }
  const double nt = trapz(ks, wt);
  const double nr = trapz(ks, wr);
  // Ratios of smooth functions against any positive weight stay well
  // conditioned, so only an identically vanishing channel is refused; a
  // transparent barrier then still yields the empty-channel limits.
  if (nt <= 0.0 || nr <= 0.0)
    throw numeric_error("channel averages: channel weight is identically zero");
  for (std::size_t i = 0; i < n; ++i) tmp[i] = wt[i] * coeffs.Jprime[i];
  st.jp_tr = trapz(ks, tmp) / nt;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = wr[i] * coeffs.Jprime[i];
  st.jp_ref = trapz(ks, tmp) / nr;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = wr[i] * coeffs.Fprime[i];
  st.fp_ref = trapz(ks, tmp) / nr;
  return st;
}

}  // namespace

SwpaTimes swpa_times(const Scenario& scenario, const ScatterCoeffs& coeffs,
                     double L1, double L2) {
  if (scenario.side != Side::left)
    throw input_error(
        "swpa_times: arrival-time differences are defined for the left-side "
        "geometry");
  const double l0 = scenario.l0;
  const double a = coeffs.geom.a;
  if (!(L1 >= 5.0 * l0) || !(a - L1 >= 5.0 * l0) || !(L2 >= 5.0 * l0))
    throw input_error("swpa_times: need L1, a - L1 and L2 each at least 5 l0");

  const ChannelStats st = channel_stats(scenario, coeffs);
  const double k0 = st.in.k_mag_mean;
  const double k_tr = st.tr.k_mag_mean;
  const double k_ref = st.ref.k_mag_mean;
  const double jp_mf = st.jp_ref - st.fp_ref;  // <J' - F'>_ref

  // The a-proportional terms are the troublesome ones: they survive
  // whenever the channel filters the momentum distribution.
  SwpaTimes t;
  t.dt_tr = (st.jp_tr + L2) / k_tr + L1 / k0 + a * (1.0 / k_tr - 1.0 / k0);
  t.dt_ref = (jp_mf + L1) / k_ref + L1 / k0 + a * (1.0 / k_ref - 1.0 / k0);
  return t;
}

DelayTimes delay_times(const Scenario& scenario, const ScatterCoeffs& coeffs) {
  const ChannelStats st = channel_stats(scenario, coeffs);
  const double d = coeffs.geom.d;

  DelayTimes dt;
  dt.tau_tr = (st.jp_tr - d) / st.tr.k_mag_mean;
  dt.tau_ref_minus = (st.jp_ref - st.fp_ref - d) / st.ref.k_mag_mean;
  dt.tau_ref_plus = (st.jp_ref + st.fp_ref - d) / st.ref.k_mag_mean;
  dt.spatial_tr = st.jp_tr - d;
  dt.spatial_ref = scenario.side == Side::left
                       ? st.jp_ref - st.fp_ref - d
                       : st.jp_ref + st.fp_ref - d;
  return dt;
}

double onset_time(double a, double k0, double sigma_in, double dk2_in) {
  return (a * a - sigma_in) /
         (a * k0 +
          std::sqrt(sigma_in * k0 * k0 + (a * a - sigma_in) * dk2_in));
}

double clearing_time(double k, double dk2, double bbar, double sigma,
                     double chi) {
  const double denom = k * k - dk2;
  const double radicand = sigma * k * k + chi * chi -
                          2.0 * k * bbar * chi + (bbar * bbar - sigma) * dk2;
  if (denom <= 0.0 || radicand < 0.0) return kNaN;
  return (bbar * k - chi + std::sqrt(radicand)) / denom;
}

ScatteringTime scattering_time(const Scenario& scenario,
                               const ScatterCoeffs& coeffs) {
  if (scenario.side != Side::left)
    throw input_error(
        "scattering_time: derived for the left-side case only; mirror the "
        "setup to time a right-side source");

  const ChannelStats st = channel_stats(scenario, coeffs);
  const double a = coeffs.geom.a;
  const double k0 = st.in.k_mag_mean;

  ScatteringTime r;
  r.completed.incident = k0 > std::sqrt(st.in.dk2);
  r.completed.transmitted = st.tr.k_mag_mean > std::sqrt(st.tr.dk2);
  r.completed.reflected = st.ref.k_mag_mean > std::sqrt(st.ref.dk2);

  r.t_start = onset_time(a, k0, st.in.sigma, st.in.dk2);

  const double bbar_tr = st.jp_tr + a;
  const double bbar_ref = st.jp_ref - st.fp_ref + a;
  r.t_end_tr = clearing_time(st.tr.k_mag_mean, st.tr.dk2, bbar_tr,
                             st.tr.sigma, st.tr.chi);
  r.t_end_ref = clearing_time(st.ref.k_mag_mean, st.ref.dk2, bbar_ref,
                              st.ref.sigma, st.ref.chi);
  r.t_end = (std::isnan(r.t_end_tr) || std::isnan(r.t_end_ref))
                ? kNaN
                : std::max(r.t_end_tr, r.t_end_ref);
  r.tau_scatt = r.t_end - r.t_start;
  return r;
}

ScatteringLength scattering_length(const Scenario& scenario,
                                   const ScatterCoeffs& coeffs,
                                   double narrow_threshold) {
  const ChannelStats st = channel_stats(scenario, coeffs);
  if (st.tr.sigma < 0.0 || st.ref.sigma < 0.0)
    throw numeric_error("scattering_length: negative variance coefficient");

  const double fp_sign = scenario.side == Side::left ? -1.0 : 1.0;
  ScatteringLength r;
  r.l1 = scenario.l0 + st.jp_tr + std::sqrt(st.tr.sigma);
  r.l2 = scenario.l0 + st.jp_ref + fp_sign * st.fp_ref + std::sqrt(st.ref.sigma);
  r.tau_scatt_narrow = std::max(r.l1, r.l2) / st.in.k_mag_mean;
  const double spread = st.in.dk2 / (st.in.k_mag_mean * st.in.k_mag_mean);
  r.narrow_ok = spread <= narrow_threshold;
  if (!r.narrow_ok)
    r.warning = "packet is not narrow: <(dk)^2>/k0^2 = " +
                std::to_string(spread) + " exceeds " +
                std::to_string(narrow_threshold);
  return r;
}

TimeReport full_time_report(const Scenario& scenario,
                            const ScatterCoeffs& coeffs, double L1, double L2,
                            double narrow_threshold) {
  TimeReport rep{};
  rep.L1 = L1;
  rep.L2 = L2;
  rep.warnings = scenario.warnings;

  const DelayTimes dt = delay_times(scenario, coeffs);
  rep.delay_tr = dt.tau_tr;
  rep.delay_ref_minus = dt.tau_ref_minus;
  rep.delay_ref_plus = dt.tau_ref_plus;
  rep.spatial_delay_tr = dt.spatial_tr;
  rep.spatial_delay_ref = dt.spatial_ref;

  if (scenario.side == Side::left) {
    const SwpaTimes st = swpa_times(scenario, coeffs, L1, L2);
    rep.swpa_tr = st.dt_tr;
    rep.swpa_ref = st.dt_ref;
    if (L1 < 10.0 * scenario.l0 || coeffs.geom.a - L1 < 10.0 * scenario.l0 ||
        L2 < 10.0 * scenario.l0)
      rep.warnings.push_back(
          "swpa geometry below 10 l0 clearance; arrival times are rough");
    rep.scattering = scattering_time(scenario, coeffs);
  } else {
    rep.swpa_tr = kNaN;
    rep.swpa_ref = kNaN;
    rep.warnings.push_back(
        "right-side case: arrival-time differences and scattering time are "
        "left-side constructions and are omitted");
  }

  const ScatteringLength sl =
      scattering_length(scenario, coeffs, narrow_threshold);
  if (sl.narrow_ok)
    rep.lengths = sl;
  else
    rep.warnings.push_back(sl.warning +
                           "; scattering lengths omitted from the report");
  return rep;
}

}  // namespace qscat
