#include <doctest.h>

#include <cmath>

#include "qscat/propagator.hpp"
#include "qscat/timing.hpp"

using namespace qscat;

namespace {

double averaged_T(const Scenario& scn, const ScatterCoeffs& sc) {
  std::vector<double> w(sc.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    w[i] = sc.T[i] * std::norm(scn.amplitude.amp[i]);
  return trapz(*sc.kgrid, w);
}

}  // namespace

TEST_CASE("free packet rides at hbar k0 / m and ends up on the right") {
  const Barrier br(60.0, {{1.0, 0.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(2.0, 5.0, 1024));
  const Scenario scn = make_scenario(Side::left, 2.0, 5.0, sc);

  PropagateOptions opt = suggest_options(br, scn, 60.0, 0.05);
  opt.sample_stride = 40;
  const PropagationResult res = propagate(br, scn, opt);

  CHECK(res.norm_drift_max < 1e-8);
  const TraceSample& last = res.trace.back();
  CHECK(last.norm_right == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(last.cm_right == doctest::Approx(2.0 * 60.0).epsilon(1e-4));

  // Asymptote synthesis of the full out state overlaps the solution.
  const ChannelPair out = out_asymptotes(scn, sc);
  const auto psi_asym =
      synthesize({&out.tr, &out.ref}, res.final_state.t, res.final_state.grid);
  CHECK(overlap(psi_asym, res.final_state.psi, res.final_state.grid.dx) >
        0.999999);
}

TEST_CASE("tunneling run reproduces the averaged transmission") {
  const Barrier br(40.0, {{1.0, 2.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(1.5, 4.0, 1024));
  const Scenario scn = make_scenario(Side::left, 1.5, 4.0, sc);

  PropagateOptions opt = suggest_options(br, scn, 60.0, 0.02);
  opt.sample_stride = 100;
  const PropagationResult res = propagate(br, scn, opt);

  const double Tbar = averaged_T(scn, sc);
  const TraceSample& last = res.trace.back();
  CHECK(last.norm_right == doctest::Approx(Tbar).epsilon(1e-3));
  CHECK(last.norm_left == doctest::Approx(1.0 - Tbar).epsilon(1e-3));
  CHECK(res.norm_drift_max < 1e-8);

  const ChannelPair out = out_asymptotes(scn, sc);
  const auto psi_asym =
      synthesize({&out.tr, &out.ref}, res.final_state.t, res.final_state.grid);
  CHECK(overlap(psi_asym, res.final_state.psi, res.final_state.grid.dx) >
        0.999);
}

TEST_CASE("split-step observables converge at second order in dt") {
  const Barrier br(40.0, {{1.0, 2.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(1.5, 4.0, 512));
  const Scenario scn = make_scenario(Side::left, 1.5, 4.0, sc);

  PropagateOptions opt = suggest_options(br, scn, 50.0, 0.0025);
  opt.sample_stride = 1u << 30;  // endpoints only
  opt.leak_limit = 1e-4;  // coarse-dt probes radiate harder from the jumps
  const PropagationResult ref = propagate(br, scn, opt);
  const double cm_ref = ref.trace.back().cm_right;

  // Halving dt should cut the transmitted-CM deviation by about four;
  // single halvings are noisy for a potential with jumps, so assert the
  // regression slope over a dt ladder instead.
  std::vector<double> dts{0.16, 0.08, 0.04, 0.02}, errs;
  for (double dt : dts) {
    PropagateOptions o = opt;
    o.dt = dt;
    errs.push_back(
        std::abs(propagate(br, scn, o).trace.back().cm_right - cm_ref));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    const double x = std::log(dts[i]), y = std::log(errs[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(dts.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope > 1.6);
  CHECK(slope < 3.2);
}

TEST_CASE("a domain that clips the packet is rejected") {
  const Barrier br(40.0, {{1.0, 2.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(1.5, 4.0, 512));
  const Scenario scn = make_scenario(Side::left, 1.5, 4.0, sc);
  PropagateOptions opt;
  opt.t_final = 60.0;
  opt.dt = 0.02;
  opt.x_min = -30.0;
  opt.x_max = 80.0;  // transmitted packet runs into the right edge
  opt.n_points = 1024;
  CHECK_THROWS_AS(propagate(br, scn, opt), numeric_error);
}

TEST_CASE("scattering interval brackets the barrier occupancy peak") {
  const double k0 = 5.0, l0 = 2.0, a = 40.0;
  const Barrier br(a, {{1.0, 2.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, default_kgrid(k0, l0, 1024));
  const Scenario scn = make_scenario(Side::left, k0, l0, sc);
  const ScatteringTime st = scattering_time(scn, sc);
  REQUIRE(st.completed.all());

  PropagateOptions opt = suggest_options(br, scn, 2.0 * st.t_end, 0.005);
  opt.window_pad = l0;
  opt.sample_stride = 20;
  const PropagationResult res = propagate(br, scn, opt);

  double peak = 0.0, at_start = 0.0, at_end = 0.0;
  for (const TraceSample& smp : res.trace) {
    peak = std::max(peak, smp.norm_window);
    if (smp.t <= st.t_start) at_start = smp.norm_window;
    if (smp.t <= st.t_end) at_end = smp.norm_window;
  }
  CHECK(peak > 0.5);
  CHECK(at_start < peak);
  CHECK(at_end < peak);
}
