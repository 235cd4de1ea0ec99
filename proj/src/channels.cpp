#include "qscat/channels.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace qscat {

Mat2 Mat2::identity() {
  Mat2 r;
  r(0, 0) = r(1, 1) = 1.0;
  return r;
}

Mat2 Mat2::operator*(const Mat2& o) const {
  Mat2 r;
  r(0, 0) = (*this)(0, 0) * o(0, 0) + (*this)(0, 1) * o(1, 0);
  r(0, 1) = (*this)(0, 0) * o(0, 1) + (*this)(0, 1) * o(1, 1);
  r(1, 0) = (*this)(1, 0) * o(0, 0) + (*this)(1, 1) * o(1, 0);
  r(1, 1) = (*this)(1, 0) * o(0, 1) + (*this)(1, 1) * o(1, 1);
  return r;
}

Mat2 Mat2::operator+(const Mat2& o) const {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = m[i] + o.m[i];
  return r;
}

Mat2 Mat2::scaled(complexd z) const {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.m[i] = m[i] * z;
  return r;
}

Mat2 Mat2::adjoint() const {
  Mat2 r;
  r(0, 0) = std::conj((*this)(0, 0));
  r(0, 1) = std::conj((*this)(1, 0));
  r(1, 0) = std::conj((*this)(0, 1));
  r(1, 1) = std::conj((*this)(1, 1));
  return r;
}

double Mat2::max_abs_diff(const Mat2& o) const {
  double r = 0.0;
  for (int i = 0; i < 4; ++i) r = std::max(r, std::abs(m[i] - o.m[i]));
  return r;
}

double Mat2::unitarity_defect() const {
  return (adjoint() * *this).max_abs_diff(identity());
}

std::array<complexd, 2> Mat2::apply(const std::array<complexd, 2>& v) const {
  return {(*this)(0, 0) * v[0] + (*this)(0, 1) * v[1],
          (*this)(1, 0) * v[0] + (*this)(1, 1) * v[1]};
}

Mat2 SMatrix::at(std::size_t i) const {
  Mat2 r;
  r(0, 0) = s11[i];
  r(0, 1) = s12[i];
  r(1, 0) = s21[i];
  r(1, 1) = s22[i];
  return r;
}

SMatrix assemble_smatrix(const ScatterCoeffs& coeffs) {
  const std::vector<double>& ks = *coeffs.kgrid;
  const std::size_t n = ks.size();
  SMatrix sm;
  sm.kgrid = coeffs.kgrid;
  sm.geom = coeffs.geom;
  sm.s11.resize(n);
  sm.s12.resize(n);
  sm.s21.resize(n);
  sm.s22.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = ks[i];
    const double rootT = std::sqrt(coeffs.T[i]);
    const double rootR = std::sqrt(coeffs.R[i]);
    const double J = coeffs.J[i];
    const double F = coeffs.F[i];
    sm.s11[i] = rootT * std::polar(1.0, J - k * coeffs.geom.d);
    sm.s12[i] =
        rootR * std::polar(1.0, J + F - 0.5 * pi - 2.0 * k * coeffs.geom.b);
    sm.s21[i] =
        rootR * std::polar(1.0, J - F - 0.5 * pi + 2.0 * k * coeffs.geom.a);
    sm.s22[i] = sm.s11[i];
  }
  return sm;
}

ChannelDecomposition decompose(const SMatrix& smatrix,
                               const ScatterCoeffs& coeffs) {
  if (!same_grid(smatrix.kgrid, coeffs.kgrid))
    throw input_error("decompose: S matrix and coefficients use different grids");
  const std::vector<double>& ks = *coeffs.kgrid;
  const std::size_t n = ks.size();

  ChannelDecomposition cd;
  cd.kgrid = coeffs.kgrid;
  cd.geom = coeffs.geom;
  cd.P_tr.resize(n);
  cd.P_ref.resize(n);
  cd.S_tr.resize(n);
  cd.S_ref.resize(n);
  cd.S0_tr.resize(n);
  cd.S0_ref.resize(n);
  cd.Delta_tr.resize(n);
  cd.Delta_ref.resize(n);

  double worst = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double k = ks[i];
    const double J = coeffs.J[i];
    const double F = coeffs.F[i];
    const double phase_free = J - k * coeffs.geom.d;

    cd.P_tr[i] = std::sqrt(coeffs.T[i]);
    cd.P_ref[i] = std::sqrt(coeffs.R[i]);

    cd.S0_tr[i] = Mat2::identity();
    Mat2 wall;  // ideal hard-wall reflection about the barrier midpoint
    wall(0, 1) = -std::polar(1.0, -k * coeffs.geom.s);
    wall(1, 0) = -std::polar(1.0, k * coeffs.geom.s);
    cd.S0_ref[i] = wall;

    cd.Delta_tr[i] = Mat2::identity().scaled(std::polar(1.0, phase_free));
    Mat2 dref;
    dref(0, 0) = std::polar(1.0, F);
    dref(1, 1) = std::polar(1.0, -F);
    cd.Delta_ref[i] = dref.scaled(std::polar(1.0, phase_free + 0.5 * pi));

    cd.S_tr[i] = cd.Delta_tr[i] * cd.S0_tr[i];
    cd.S_ref[i] = cd.Delta_ref[i] * cd.S0_ref[i];

    const double res =
        (cd.Pi_tr(i) + cd.Pi_ref(i)).max_abs_diff(smatrix.at(i));
    if (res > worst) {
      worst = res;
      worst_i = i;
    }
  }
  if (worst > 1e-8)
    throw numeric_error(
        "decompose: channel sum fails to reproduce S (residual " +
        std::to_string(worst) + " at k = " + std::to_string(ks[worst_i]) + ")");
  return cd;
}

Scenario make_scenario(Side side, double k0, double l0,
                       const ScatterCoeffs& coeffs, double x_r) {
  Scenario scn;
  scn.side = side;
  scn.k0 = k0;
  scn.l0 = l0;
  scn.x_r = x_r;

  const double clearance =
      side == Side::left ? coeffs.geom.a : x_r - coeffs.geom.b;
  const char* what = side == Side::left ? "a" : "x_r - b";
  if (side == Side::right && !(x_r > coeffs.geom.b))
    throw input_error("make_scenario: right-side source must sit at x_r > b");
  if (!(l0 > 0.0)) throw input_error("make_scenario: l0 must be > 0");
  if (clearance < 10.0 * l0)
    throw input_error(std::string("make_scenario: source too close: need ") +
                      what + " >= 10 l0");
  if (clearance > 10.0 * l0 && clearance < 20.0 * l0)
    scn.warnings.push_back(std::string("source clearance ") + what + " = " +
                           std::to_string(clearance / l0) +
                           " l0 is below 20 l0; asymptotic formulas degrade");

  scn.amplitude = gaussian_packet(k0, l0, coeffs.kgrid);
  if (side == Side::right) {
    // Mirror packet emitted at x_r: stored on the positive grid with the
    // physical wavenumber -k, amplitude A(k) e^{i k x_r}.
    scn.amplitude.side = Side::right;
    scn.amplitude.direction = -1;
    scn.amplitude.gauss->center = x_r;
    scn.amplitude.phase.coef_lin = x_r;
    const std::vector<double>& ks = *coeffs.kgrid;
    for (std::size_t i = 0; i < ks.size(); ++i)
      scn.amplitude.amp[i] *= std::polar(1.0, ks[i] * x_r);
  }
  return scn;
}

namespace {

std::shared_ptr<const ScatterCoeffs> share(const ScatterCoeffs& coeffs) {
  return std::make_shared<const ScatterCoeffs>(coeffs);
}

void require_same_grid(const Scenario& scenario, const ScatterCoeffs& coeffs,
                       const char* op) {
  if (!same_grid(scenario.amplitude.kgrid, coeffs.kgrid))
    throw input_error(std::string(op) +
                      ": scenario amplitude and coefficients use different "
                      "k grids");
}

}  // namespace

ChannelPair out_asymptotes(const Scenario& scenario,
                           const ScatterCoeffs& coeffs) {
  require_same_grid(scenario, coeffs, "out_asymptotes");
  const std::vector<double>& ks = *coeffs.kgrid;
  const std::size_t n = ks.size();
  const SpectralPacket& in = scenario.amplitude;
  auto tbl = share(coeffs);

  ChannelPair out;
  out.tr = in;
  out.ref = in;
  out.tr.role = PacketRole::out_tr;
  out.ref.role = PacketRole::out_ref;
  out.tr.weight = ChannelWeight::sqrt_T;
  out.ref.weight = ChannelWeight::sqrt_R;
  out.tr.tables = tbl;
  out.ref.tables = tbl;

  const double a = coeffs.geom.a;
  const double b = coeffs.geom.b;
  const double d = coeffs.geom.d;
  if (scenario.side == Side::left) {
    // Transmitted: sqrt(T) A e^{i(J - kd)}, still right-moving.
    // Reflected: left-moving; on the stored (positive) grid the amplitude
    // is sqrt(R) A e^{i(2ka + J - F - pi/2)}.
    out.tr.direction = +1;
    out.tr.phase = {1.0, 0.0, -d, 0.0, true};
    out.ref.direction = -1;
    out.ref.phase = {1.0, -1.0, 2.0 * a, -0.5 * pi, true};
    for (std::size_t i = 0; i < n; ++i) {
      const double k = ks[i];
      out.tr.amp[i] = std::sqrt(coeffs.T[i]) * in.amp[i] *
                      std::polar(1.0, coeffs.J[i] - k * d);
      out.ref.amp[i] =
          std::sqrt(coeffs.R[i]) * in.amp[i] *
          std::polar(1.0, 2.0 * k * a + coeffs.J[i] - coeffs.F[i] - 0.5 * pi);
    }
  } else {
    // Right-side case: transmitted moves left, reflected returns right.
    out.tr.direction = -1;
    out.tr.phase = {1.0, 0.0, scenario.x_r - d, 0.0, true};
    out.ref.direction = +1;
    out.ref.phase = {1.0, 1.0, scenario.x_r - 2.0 * b, -0.5 * pi, true};
    for (std::size_t i = 0; i < n; ++i) {
      const double k = ks[i];
      out.tr.amp[i] = std::sqrt(coeffs.T[i]) * in.amp[i] *
                      std::polar(1.0, coeffs.J[i] - k * d);
      out.ref.amp[i] =
          std::sqrt(coeffs.R[i]) * in.amp[i] *
          std::polar(1.0, coeffs.J[i] + coeffs.F[i] - 0.5 * pi - 2.0 * k * b);
    }
  }
  return out;
}

ChannelPair in_asymptotes(const Scenario& scenario,
                          const ScatterCoeffs& coeffs) {
  require_same_grid(scenario, coeffs, "in_asymptotes");
  const std::size_t n = coeffs.size();
  const SpectralPacket& in = scenario.amplitude;
  auto tbl = share(coeffs);

  ChannelPair ch;
  ch.tr = in;
  ch.ref = in;
  ch.tr.role = PacketRole::in_tr;
  ch.ref.role = PacketRole::in_ref;
  ch.tr.weight = ChannelWeight::sqrt_T;
  ch.ref.weight = ChannelWeight::sqrt_R;
  ch.tr.tables = tbl;
  ch.ref.tables = tbl;
  // Both subensembles start from the source: phase (and hence mean
  // position) of the incident packet, channel-filtered magnitude.
  for (std::size_t i = 0; i < n; ++i) {
    ch.tr.amp[i] = std::sqrt(coeffs.T[i]) * in.amp[i];
    ch.ref.amp[i] = std::sqrt(coeffs.R[i]) * in.amp[i];
  }
  return ch;
}

ReverseMotion reverse_motion(const SpectralPacket& out_tr,
                             const SpectralPacket& out_ref,
                             const ScatterCoeffs& coeffs) {
  if (out_tr.side != Side::left || out_ref.side != Side::left)
    throw input_error("reverse_motion: defined for the left-side case");
  if (out_tr.role != PacketRole::out_tr || out_ref.role != PacketRole::out_ref)
    throw input_error("reverse_motion: expects the (out_tr, out_ref) pair");
  if (!same_grid(out_tr.kgrid, coeffs.kgrid))
    throw input_error("reverse_motion: grid mismatch");

  const std::vector<double>& ks = *coeffs.kgrid;
  const std::size_t n = ks.size();
  const double d = coeffs.geom.d;
  const double s = coeffs.geom.s;

  ReverseMotion rm;
  rm.g1 = out_tr;
  rm.g1.role = PacketRole::reverse_g1;
  rm.g1.direction = +1;
  rm.g1.weight = ChannelWeight::unit;
  rm.g1.phase = {};
  rm.g1.phase.closed_form = false;
  rm.g1.gauss.reset();
  rm.g2 = rm.g1;
  rm.g2.role = PacketRole::reverse_g2;

  std::vector<double> cross2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = ks[i];
    const double T = coeffs.T[i];
    const double R = coeffs.R[i];
    // Incident amplitude recovered from the transmitted out-asymptote.
    const complexd A =
        out_tr.amp[i] * std::polar(1.0, -(coeffs.J[i] - k * d)) / std::sqrt(T);
    const complexd A_neg = out_tr.eval_envelope(-k);
    // exp[-i(pi/2 + F(-k) + ks)] with F(-k) = pi - F(k).
    const complexd cross = std::sqrt(R * T) * A_neg *
                           std::polar(1.0, coeffs.F[i] - k * s + 0.5 * pi);
    rm.g1.amp[i] = T * A - cross;
    rm.g2.amp[i] = R * A + cross;
    cross2[i] = std::norm(cross);
  }
  rm.cross_term_norm = trapz(ks, cross2);

  rm.combined = rm.g1;
  rm.combined.role = PacketRole::in_total;
  rm.combined.phase = PhaseMeta{};
  rm.combined.gauss = out_tr.gauss;
  if (rm.combined.gauss) rm.combined.gauss->center = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    rm.combined.amp[i] = rm.g1.amp[i] + rm.g2.amp[i];
  return rm;
}

GwpShifts gwp_momentum_shifts(const Scenario& scenario,
                              const ScatterCoeffs& coeffs) {
  require_same_grid(scenario, coeffs, "gwp_momentum_shifts");
  const SpectralPacket& in = scenario.amplitude;
  if (!in.gauss)
    throw input_error(
        "gwp_momentum_shifts: scenario amplitude must be a Gaussian packet");
  const std::vector<double>& ks = *coeffs.kgrid;
  const std::size_t n = ks.size();

  std::vector<double> m2(n), tT(n), tTp(n);
  for (std::size_t i = 0; i < n; ++i) {
    m2[i] = std::norm(in.amp[i]);
    tT[i] = m2[i] * coeffs.T[i];
    tTp[i] = m2[i] * coeffs.Tprime[i];
  }
  const double nrm = trapz(ks, m2);
  const double Tbar = trapz(ks, tT) / nrm;
  const double Rbar = 1.0 - Tbar;
  const double Tp_mean = trapz(ks, tTp) / nrm;
  if (Tbar < 1e-12 || Rbar < 1e-12)
    throw numeric_error("gwp_momentum_shifts: a channel is empty (Tbar or "
                        "Rbar below 1e-12)");

  const double l0 = in.gauss->l0;
  GwpShifts sh;
  sh.dk_tr = Tp_mean / (4.0 * l0 * l0 * Tbar);
  sh.dk_ref = -Tp_mean / (4.0 * l0 * l0 * Rbar);

  const ChannelPair out = out_asymptotes(scenario, coeffs);
  const double k0 = moments(scenario.amplitude).k_mag_mean;
  sh.dk_tr_direct = moments(out.tr).k_mag_mean - k0;
  sh.dk_ref_direct = moments(out.ref).k_mag_mean - k0;
  return sh;
}

}  // namespace qscat
