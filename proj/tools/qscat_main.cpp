// Command-line front end: tabulate scattering coefficients, report the
// characteristic times of a scattering scenario, and validate the k-space
// description against the split-step propagator.
#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "qscat/barrier.hpp"
#include "qscat/channels.hpp"
#include "qscat/propagator.hpp"
#include "qscat/timing.hpp"
#include "qscat/transfer.hpp"
#include "qscat/units.hpp"

using json = nlohmann::ordered_json;
using namespace qscat;

namespace {

// Shortest round-trip decimal form.
std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Barrier load_barrier(const std::string& path, const Units& units,
                     std::optional<double> a_override) {
  Barrier br = Barrier::load(path);
  std::vector<Segment> segs = br.segments();
  for (Segment& s : segs) s.height = units.energy_in(s.height);
  return Barrier(a_override.value_or(br.a()), std::move(segs));
}

struct CommonArgs {
  std::string barrier_file;
  Units units;
  std::optional<double> a_override;
  std::size_t n = 2048;
};

void add_units(CLI::App* cmd, Units& u) {
  cmd->add_option("--hbar", u.hbar, "hbar in user units (default 1)");
  cmd->add_option("--mass", u.mass, "particle mass in user units (default 1)");
}

int cmd_coeffs(const CommonArgs& args, double kmin, double kmax,
               const std::string& out_path) {
  const Barrier br =
      load_barrier(args.barrier_file, args.units, args.a_override);
  const ScatterCoeffs sc = scatter_coeffs(br, make_kgrid(kmin, kmax, args.n));

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw input_error("cannot open output file '" + out_path + "'");
    out = &file;
  }
  *out << "k,T,R,J,F,Jprime,Fprime\n";
  for (std::size_t i = 0; i < sc.size(); ++i)
    *out << fmt((*sc.kgrid)[i]) << ',' << fmt(sc.T[i]) << ',' << fmt(sc.R[i])
         << ',' << fmt(sc.J[i]) << ',' << fmt(sc.F[i]) << ','
         << fmt(sc.Jprime[i]) << ',' << fmt(sc.Fprime[i]) << '\n';
  return 0;
}

json completed_json(const CompletedFlags& f) {
  return json{{"incident", f.incident},
              {"transmitted", f.transmitted},
              {"reflected", f.reflected}};
}

int cmd_times(const CommonArgs& args, const std::string& side_name, double k0,
              double l0, double L1, double L2, std::optional<double> x_r,
              double narrow_threshold) {
  const Barrier br =
      load_barrier(args.barrier_file, args.units, args.a_override);
  const Side side = side_name == "right" ? Side::right : Side::left;
  if (side == Side::right && !x_r)
    throw input_error("times: right-side scenario needs --xr");

  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(k0, l0, args.n));
  const Scenario scn = make_scenario(side, k0, l0, sc, x_r.value_or(0.0));
  const TimeReport rep = full_time_report(scn, sc, L1, L2, narrow_threshold);

  const auto t_out = [&](double t) { return args.units.time_out(t); };
  json j;
  j["side"] = side_name;
  j["swpa_tr"] = t_out(rep.swpa_tr);
  j["swpa_ref"] = t_out(rep.swpa_ref);
  j["L1"] = rep.L1;
  j["L2"] = rep.L2;
  j["delay_tr"] = t_out(rep.delay_tr);
  j["delay_ref_minus"] = t_out(rep.delay_ref_minus);
  j["delay_ref_plus"] = t_out(rep.delay_ref_plus);
  j["spatial_delay_tr"] = rep.spatial_delay_tr;
  j["spatial_delay_ref"] = rep.spatial_delay_ref;
  if (rep.scattering) {
    j["t_start"] = t_out(rep.scattering->t_start);
    j["t_end_tr"] = t_out(rep.scattering->t_end_tr);
    j["t_end_ref"] = t_out(rep.scattering->t_end_ref);
    j["t_end"] = t_out(rep.scattering->t_end);
    j["tau_scatt"] = t_out(rep.scattering->tau_scatt);
    j["completed"] = completed_json(rep.scattering->completed);
  }
  if (rep.lengths) {
    j["scat_length_tr"] = rep.lengths->l1;
    j["scat_length_ref"] = rep.lengths->l2;
    j["tau_scatt_narrow"] = t_out(rep.lengths->tau_scatt_narrow);
  }
  j["warnings"] = rep.warnings;
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct LineFit {
  double slope, intercept;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return {(n * sxy - sx * sy) / den, (sy * sxx - sx * sxy) / den};
}

double rel_dev(double got, double want, double floor = 1e-300) {
  return std::abs(got - want) / std::max(floor, std::abs(want));
}

int cmd_validate(const CommonArgs& args, double k0, double l0, double t_final,
                 double dt, std::optional<double> xmin,
                 std::optional<double> xmax, std::optional<std::size_t> points,
                 double tol, double min_overlap) {
  const Barrier br =
      load_barrier(args.barrier_file, args.units, args.a_override);
  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(k0, l0, args.n));
  const Scenario scn = make_scenario(Side::left, k0, l0, sc);
  const ChannelPair out = out_asymptotes(scn, sc);
  const MomentSet mtr = moments(out.tr);
  const MomentSet mref = moments(out.ref);
  const double Tbar = mtr.norm;

  PropagateOptions opt = suggest_options(br, scn, args.units.time_in(t_final),
                                         args.units.time_in(dt));
  if (xmin) opt.x_min = *xmin;
  if (xmax) opt.x_max = *xmax;
  if (points) opt.n_points = *points;
  opt.sample_stride =
      std::max<std::size_t>(1, static_cast<std::size_t>(0.25 / opt.dt));
  const PropagationResult res = propagate(br, scn, opt);

  // Late-time window: last quarter of the run, after the channel packets
  // have cleared the barrier region. A channel carrying no probability
  // has no CM trajectory to compare, so each side collects its own rows.
  const bool have_tr = mtr.norm > 1e-9;
  const bool have_ref = mref.norm > 1e-9;
  std::vector<double> ts_r, cmr, varr, ts_l, cml;
  for (const TraceSample& s : res.trace) {
    if (s.t < 0.75 * opt.t_final) continue;
    if (!std::isnan(s.cm_right)) {
      ts_r.push_back(s.t);
      cmr.push_back(s.cm_right);
      varr.push_back(s.var_right);
    }
    if (!std::isnan(s.cm_left)) {
      ts_l.push_back(s.t);
      cml.push_back(s.cm_left);
    }
  }
  if ((have_tr && ts_r.size() < 8) || (have_ref && ts_l.size() < 8))
    throw numeric_error("validate: too few late-time samples; raise t_final");

  const LineFit ftr = have_tr ? fit_line(ts_r, cmr) : LineFit{0.0, 0.0};
  const LineFit fref = have_ref ? fit_line(ts_l, cml) : LineFit{0.0, 0.0};
  const TraceSample& last = res.trace.back();
  // Intercepts can legitimately sit near zero (free particle), so their
  // deviations are measured against at least a fraction of packet width.
  const double icept_floor = 0.05 * l0;

  // Transmitted CM: slope <k>_tr, intercept d - <J'>_tr. Reflected CM:
  // slope -<-k>_ref, intercept 2a + <J' - F'>_ref. Both are the (x0, v)
  // pairs the moment set already carries.
  double var_resid = 0.0;
  for (std::size_t i = 0; i < ts_r.size(); ++i)
    var_resid = std::max(var_resid, rel_dev(varr[i], mtr.x_variance(ts_r[i])));

  const auto psi_asym =
      synthesize({&out.tr, &out.ref}, res.final_state.t, res.final_state.grid);
  const double ovl =
      overlap(psi_asym, res.final_state.psi, res.final_state.grid.dx);

  json j;
  j["scenario"] = {{"k0", k0},         {"l0", l0},
                   {"a", sc.geom.a},   {"d", sc.geom.d},
                   {"t_final", t_final}, {"dt", dt}};
  j["grid"] = {{"x_min", res.final_state.grid.x_min},
               {"x_max", res.final_state.grid.x_max()},
               {"n_points", res.final_state.grid.n},
               {"snap_error", res.snap_error}};
  j["norm_drift"] = res.norm_drift_max;
  j["boundary_leak"] = res.boundary_leak_max;
  j["T_bar"] = {{"analytic", Tbar},
                {"oracle", last.norm_right},
                {"rel_dev", rel_dev(last.norm_right, Tbar, 1e-6)}};
  if (have_tr) {
    j["cm_transmitted"] = {
        {"slope_analytic", mtr.v},
        {"slope_fit", ftr.slope},
        {"slope_rel_dev", rel_dev(ftr.slope, mtr.v)},
        {"intercept_analytic", mtr.x0},
        {"intercept_fit", ftr.intercept},
        {"intercept_rel_dev", rel_dev(ftr.intercept, mtr.x0, icept_floor)}};
    j["variance_transmitted"] = {{"sigma", mtr.sigma},
                                 {"chi", mtr.chi},
                                 {"dk2", mtr.dk2},
                                 {"max_rel_resid", var_resid}};
  } else {
    j["cm_transmitted"] = "empty channel";
  }
  if (have_ref) {
    j["cm_reflected"] = {
        {"slope_analytic", mref.v},
        {"slope_fit", fref.slope},
        {"slope_rel_dev", rel_dev(fref.slope, mref.v)},
        {"intercept_analytic", mref.x0},
        {"intercept_fit", fref.intercept},
        {"intercept_rel_dev", rel_dev(fref.intercept, mref.x0, icept_floor)}};
  } else {
    j["cm_reflected"] = "empty channel";
  }
  j["overlap_final"] = ovl;

  bool pass = rel_dev(last.norm_right, Tbar, 1e-6) < tol && ovl >= min_overlap;
  if (have_tr)
    pass = pass && rel_dev(ftr.slope, mtr.v) < tol &&
           rel_dev(ftr.intercept, mtr.x0, icept_floor) < tol &&
           var_resid < tol;
  if (have_ref)
    pass = pass && rel_dev(fref.slope, mref.v) < tol &&
           rel_dev(fref.intercept, mref.x0, icept_floor) < tol;
  j["pass"] = pass;
  std::cout << j.dump(2) << "\n";
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-dimensional scattering: transfer matrices, channel "
               "asymptotes, characteristic times, split-step validation"};
  app.require_subcommand(1);

  CommonArgs ca;
  double kmin = 0.1, kmax = 5.0;
  std::string out_path;
  auto* coeffs = app.add_subcommand(
      "coeffs", "Tabulate T, R, J, F and derivatives as CSV");
  coeffs->add_option("barrier", ca.barrier_file, "barrier spec file")
      ->required();
  coeffs->add_option("--kmin", kmin, "lowest wavenumber (> 0)");
  coeffs->add_option("--kmax", kmax, "highest wavenumber");
  coeffs->add_option("-n,--n", ca.n, "grid points (default 2048)");
  coeffs->add_option("-o,--output", out_path, "CSV path (default stdout)");
  coeffs->add_option("--a", ca.a_override, "override the barrier position a");
  add_units(coeffs, ca.units);

  std::string side = "left";
  double k0 = 1.0, l0 = 10.0, L1 = 0.0, L2 = 0.0;
  std::optional<double> xr;
  double narrow_threshold = 1e-2;
  auto* times = app.add_subcommand(
      "times", "Characteristic times of one scenario as JSON");
  times->add_option("barrier", ca.barrier_file, "barrier spec file")
      ->required();
  times->add_option("--side", side, "left or right")
      ->check(CLI::IsMember({"left", "right"}));
  times->add_option("--k0", k0, "mean wavenumber")->required();
  times->add_option("--l0", l0, "packet half-width")->required();
  times->add_option("--L1", L1, "incident marker distance from a");
  times->add_option("--L2", L2, "transmitted marker distance from b");
  times->add_option("--xr", xr, "right-side source position");
  times->add_option("--a", ca.a_override, "override the barrier position a");
  times->add_option("-n,--n", ca.n, "k-grid points (default 2048)");
  times->add_option("--narrow-threshold", narrow_threshold,
                    "spectral-width bound for the length report");
  add_units(times, ca.units);

  double t_final = 100.0, dt = 0.01, tol = 1e-3, min_overlap = 0.999;
  std::optional<double> xmin, xmax;
  std::optional<std::size_t> points;
  auto* validate = app.add_subcommand(
      "validate", "Compare the k-space description with a split-step run");
  validate->add_option("barrier", ca.barrier_file, "barrier spec file")
      ->required();
  validate->add_option("--k0", k0, "mean wavenumber")->required();
  validate->add_option("--l0", l0, "packet half-width")->required();
  validate->add_option("--t-final", t_final, "run length")->required();
  validate->add_option("--dt", dt, "time step")->required();
  validate->add_option("--xmin", xmin, "domain lower edge (default sized)");
  validate->add_option("--xmax", xmax, "domain upper edge (default sized)");
  validate->add_option("--points", points, "spatial points (default sized)");
  validate->add_option("--a", ca.a_override, "override the barrier position a");
  validate->add_option("-n,--n", ca.n, "k-grid points (default 2048)");
  validate->add_option("--tol", tol, "relative tolerance (default 1e-3)");
  validate->add_option("--min-overlap", min_overlap,
                       "required final overlap (default 0.999)");
  add_units(validate, ca.units);

  CLI11_PARSE(app, argc, argv);

  try {
    if (coeffs->parsed()) return cmd_coeffs(ca, kmin, kmax, out_path);
    if (times->parsed()) {
      if (L1 == 0.0) L1 = 5.0 * l0;
      if (L2 == 0.0) L2 = 5.0 * l0;
      return cmd_times(ca, side, k0, l0, L1, L2, xr, narrow_threshold);
    }
    if (validate->parsed())
      return cmd_validate(ca, k0, l0, t_final, dt, xmin, xmax, points, tol,
                          min_overlap);
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
