#ifndef QSCAT_PACKETS_HPP
#define QSCAT_PACKETS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "qscat/common.hpp"
#include "qscat/grid.hpp"
#include "qscat/transfer.hpp"

namespace qscat {

enum class PacketRole {
  in_total,
  in_tr,
  in_ref,
  out_tr,
  out_ref,
  reverse_g1,
  reverse_g2,
};

enum class Side { left, right };

const char* to_string(PacketRole role);

/// Channel factor multiplying the spectral envelope: 1, sqrt(T) or sqrt(R).
/// Knowing which one lets position variances differentiate the magnitude
/// analytically instead of finite-differencing the stored amplitude.
enum class ChannelWeight { unit, sqrt_T, sqrt_R };

/// Gaussian spectral envelope c * exp(-l0^2 (k - k0)^2) * e^{i k center},
/// with c chosen so the k-integral of the squared modulus is one.
struct GaussianShape {
  double k0;
  double l0;
  double center = 0.0;  // mean position at t = 0

  double magnitude(double k) const;
  complexd value(double k) const;
};

/// Analytically known phase structure of a stored amplitude:
///   xi(k) = coef_J * J(k) + coef_F * F(k) + coef_lin * k + offset
/// so d(xi)/dk comes from the tabulated Jprime/Fprime, never from
/// numerically differentiating the amplitude itself. Time evolution adds
/// the phase -E(k) t (hbar = m = 1) on demand; it is never baked in.
struct PhaseMeta {
  double coef_J = 0.0;
  double coef_F = 0.0;
  double coef_lin = 0.0;
  double offset = 0.0;
  bool closed_form = true;  // false: no single xi(k) (reverse-motion packets)
};

/// A wave packet in the wavenumber representation. The amplitude is stored
/// on the shared positive k-grid; `direction` is the sign of the physical
/// wavenumber each grid point represents, so left-moving packets reuse the
/// same grid through the parity rules (T even, J odd, F(-k) = pi - F(k)).
struct SpectralPacket {
  KGrid kgrid;
  std::vector<complexd> amp;  // t = 0 amplitude
  PacketRole role = PacketRole::in_total;
  Side side = Side::left;
  int direction = +1;  // physical k = direction * grid k
  PhaseMeta phase;
  ChannelWeight weight = ChannelWeight::unit;
  std::shared_ptr<const ScatterCoeffs> tables;  // J', F', T' when referenced
  std::optional<GaussianShape> gauss;           // set for Gaussian envelopes

  /// Amplitude with the time phase applied.
  std::vector<complexd> amplitude_at(double t) const;

  /// Envelope amplitude at arbitrary physical wavenumber (Gaussian closed
  /// form when available, else linear interpolation on the stored grid,
  /// zero outside). Used where formulas reference the amplitude at -k.
  complexd eval_envelope(double k) const;
};

/// Normalized Gaussian packet (role in_total, left side): mean wavenumber
/// k0, spatial half-width l0 at t = 0, spectral deviation 1/(2 l0).
/// Requires the grid to extend at least six spectral deviations on each
/// side of k0 so that the quadrature sees the whole packet.
SpectralPacket gaussian_packet(double k0, double l0, KGrid kgrid);

/// Squared-norm by trapezoid quadrature; conserved along free evolution.
double packet_norm(const SpectralPacket& p);

/// Physical <k^n> (conditional expectation: divided by the packet norm).
double k_moment(const SpectralPacket& p, int n);

/// Every asymptotic moment of one packet. <x>(t) = x0 + v t and
/// <(dx)^2>(t) = sigma - 2 t chi + t^2 dk2 (hbar = m = 1); chi follows the
/// convention that makes this expansion hold with dk2 >= 0 for either
/// travel direction.
struct MomentSet {
  double norm = 0.0;
  double k_mean = 0.0;      // physical, signed
  double k_mag_mean = 0.0;  // mean of |k|: <k>_tr or <-k>_ref style averages
  double k2_mean = 0.0;
  double dk2 = 0.0;  // <(delta k)^2>
  double x0 = 0.0;
  double v = 0.0;
  double sigma = 0.0;
  double chi = 0.0;

  double x_mean(double t) const { return x0 + v * t; }
  double x_variance(double t) const {
    return sigma - 2.0 * t * chi + t * t * dk2;
  }
};

/// Compute the full moment set. Requires a closed-form phase (everything
/// except reverse-motion packets) and a non-empty channel.
MomentSet moments(const SpectralPacket& p);

double x_mean(const SpectralPacket& p, double t);
double x_variance(const SpectralPacket& p, double t);

struct VarianceCoeffs {
  double sigma, chi, dk2;
};
VarianceCoeffs variance_coeffs(const SpectralPacket& p);

}  // namespace qscat

#endif
