#include "qscat/packets.hpp"

#include <algorithm>
#include <cmath>

namespace qscat {

namespace {
// Treat only an identically vanishing weight as empty: conditional
// expectations are ratios and stay meaningful for any positive norm.
constexpr double kEmptyNorm = 1e-250;
constexpr double kRFloor = 1e-14;
}  // namespace

const char* to_string(PacketRole role) {
  switch (role) {
    case PacketRole::in_total: return "in_total";
    case PacketRole::in_tr: return "in_tr";
    case PacketRole::in_ref: return "in_ref";
    case PacketRole::out_tr: return "out_tr";
    case PacketRole::out_ref: return "out_ref";
    case PacketRole::reverse_g1: return "reverse_g1";
    case PacketRole::reverse_g2: return "reverse_g2";
  }
  return "?";
}

double GaussianShape::magnitude(double k) const {
  const double c = std::pow(2.0 * l0 * l0 / pi, 0.25);
  const double dk = k - k0;
  return c * std::exp(-l0 * l0 * dk * dk);
}

complexd GaussianShape::value(double k) const {
  return magnitude(k) * std::polar(1.0, k * center);
}

std::vector<complexd> SpectralPacket::amplitude_at(double t) const {
  std::vector<complexd> out(amp.size());
  const std::vector<double>& ks = *kgrid;
  for (std::size_t i = 0; i < amp.size(); ++i)
    out[i] = amp[i] * std::polar(1.0, -0.5 * ks[i] * ks[i] * t);
  return out;
}

complexd SpectralPacket::eval_envelope(double k) const {
  if (gauss) return gauss->value(k);
  const std::vector<double>& ks = *kgrid;
  if (k < ks.front() || k > ks.back()) return {0.0, 0.0};
  const auto it = std::lower_bound(ks.begin(), ks.end(), k);
  const std::size_t j = it == ks.begin()
                            ? 1
                            : static_cast<std::size_t>(it - ks.begin());
  const double w = (k - ks[j - 1]) / (ks[j] - ks[j - 1]);
  return amp[j - 1] * (1.0 - w) + amp[j] * w;
}

SpectralPacket gaussian_packet(double k0, double l0, KGrid kgrid) {
  if (!(k0 > 0.0)) throw input_error("gaussian_packet: k0 must be > 0");
  if (!(l0 > 0.0)) throw input_error("gaussian_packet: l0 must be > 0");
  if (!kgrid || kgrid->size() < 8)
    throw input_error("gaussian_packet: missing or degenerate k grid");
  const double six_sigma = 3.0 / l0;  // spectral sigma = 1/(2 l0)
  if (kgrid->front() > k0 - six_sigma || kgrid->back() < k0 + six_sigma)
    throw input_error(
        "gaussian_packet: k grid covers less than six spectral deviations "
        "around k0");

  SpectralPacket p;
  p.kgrid = std::move(kgrid);
  p.role = PacketRole::in_total;
  p.side = Side::left;
  p.direction = +1;
  p.weight = ChannelWeight::unit;
  p.gauss = GaussianShape{k0, l0, 0.0};
  p.amp.resize(p.kgrid->size());
  for (std::size_t i = 0; i < p.amp.size(); ++i)
    p.amp[i] = complexd(p.gauss->magnitude((*p.kgrid)[i]), 0.0);
  return p;
}

double packet_norm(const SpectralPacket& p) {
  const std::vector<double>& ks = *p.kgrid;
  std::vector<double> m2(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) m2[i] = std::norm(p.amp[i]);
  return trapz(ks, m2);
}

double k_moment(const SpectralPacket& p, int n) {
  if (n < 0) throw input_error("k_moment: order must be non-negative");
  const std::vector<double>& ks = *p.kgrid;
  std::vector<double> m2(ks.size()), num(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    m2[i] = std::norm(p.amp[i]);
    num[i] = m2[i] * std::pow(ks[i], n);
  }
  const double nrm = trapz(ks, m2);
  if (nrm < kEmptyNorm)
    throw numeric_error("k_moment: empty channel (norm below 1e-15)");
  double sgn = 1.0;
  if (p.direction < 0 && (n % 2) == 1) sgn = -1.0;
  return sgn * trapz(ks, num) / nrm;
}

namespace {

// d|amp|/dk built from the analytic envelope derivative plus the tabulated
// channel-weight derivative; (M')^2 is the finite form of M^2 (ln' M)^2, so
// zeros of M never produce a 0/0.
std::vector<double> magnitude_derivative(const SpectralPacket& p) {
  const std::vector<double>& ks = *p.kgrid;
  const GaussianShape& g = *p.gauss;
  std::vector<double> mp(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double G = g.magnitude(ks[i]);
    const double Gp = -2.0 * g.l0 * g.l0 * (ks[i] - g.k0) * G;
    double w = 1.0, wp = 0.0;
    if (p.weight == ChannelWeight::sqrt_T) {
      w = std::sqrt(p.tables->T[i]);
      wp = 0.5 * p.tables->Tprime[i] / w;
    } else if (p.weight == ChannelWeight::sqrt_R) {
      const double R = p.tables->R[i];
      w = std::sqrt(R);
      wp = R < kRFloor ? 0.0 : -0.5 * p.tables->Tprime[i] / w;
    }
    mp[i] = wp * G + w * Gp;
  }
  return mp;
}

}  // namespace

MomentSet moments(const SpectralPacket& p) {
  if (!p.phase.closed_form)
    throw numeric_error(std::string("moments: packet role ") +
                        to_string(p.role) +
                        " has no closed-form phase structure");
  if ((p.phase.coef_J != 0.0 || p.phase.coef_F != 0.0) && !p.tables)
    throw numeric_error("moments: packet references J/F tables it lacks");

  const std::vector<double>& ks = *p.kgrid;
  const std::size_t n = ks.size();
  std::vector<double> m2(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) m2[i] = std::norm(p.amp[i]);

  MomentSet ms;
  ms.norm = trapz(ks, m2);
  if (ms.norm < kEmptyNorm)
    throw numeric_error(std::string("moments: empty channel (role ") +
                        to_string(p.role) + ", norm below 1e-15)");

  for (std::size_t i = 0; i < n; ++i) tmp[i] = m2[i] * ks[i];
  ms.k_mag_mean = trapz(ks, tmp) / ms.norm;
  ms.k_mean = p.direction * ms.k_mag_mean;
  for (std::size_t i = 0; i < n; ++i) tmp[i] = m2[i] * ks[i] * ks[i];
  ms.k2_mean = trapz(ks, tmp) / ms.norm;
  for (std::size_t i = 0; i < n; ++i) {
    const double dk = ks[i] - ms.k_mag_mean;
    tmp[i] = m2[i] * dk * dk;
  }
  ms.dk2 = trapz(ks, tmp) / ms.norm;

  // Phase-derivative statistics: u = d(xi)/dk at t = 0.
  std::vector<double> u(n, p.phase.coef_lin);
  if (p.tables) {
    for (std::size_t i = 0; i < n; ++i)
      u[i] += p.phase.coef_J * p.tables->Jprime[i] +
              p.phase.coef_F * p.tables->Fprime[i];
  }
  for (std::size_t i = 0; i < n; ++i) tmp[i] = m2[i] * u[i];
  const double u_mean = trapz(ks, tmp) / ms.norm;
  double var_u = 0.0, cov_uk = 0.0;
  {
    std::vector<double> t2(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double du = u[i] - u_mean;
      const double dk = ks[i] - ms.k_mag_mean;
      tmp[i] = m2[i] * du * du;
      t2[i] = m2[i] * du * dk;
    }
    var_u = trapz(ks, tmp) / ms.norm;
    cov_uk = trapz(ks, t2) / ms.norm;
  }

  ms.x0 = -p.direction * u_mean;
  ms.v = p.direction * ms.k_mag_mean;  // hbar <k>/m with hbar = m = 1
  ms.chi = cov_uk;

  if (!p.gauss)
    throw numeric_error(
        "moments: variance needs an analytic envelope (Gaussian packets)");
  const std::vector<double> mp = magnitude_derivative(p);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = mp[i] * mp[i];
  ms.sigma = trapz(ks, tmp) / ms.norm + var_u;
  return ms;
}

double x_mean(const SpectralPacket& p, double t) {
  return moments(p).x_mean(t);
}

double x_variance(const SpectralPacket& p, double t) {
  return moments(p).x_variance(t);
}

VarianceCoeffs variance_coeffs(const SpectralPacket& p) {
  const MomentSet ms = moments(p);
  return {ms.sigma, ms.chi, ms.dk2};
}

}  // namespace qscat
