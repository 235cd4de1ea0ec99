#ifndef QSCAT_TRANSFER_HPP
#define QSCAT_TRANSFER_HPP

#include <vector>

#include "qscat/barrier.hpp"
#include "qscat/common.hpp"
#include "qscat/grid.hpp"

namespace qscat {

/// The 2x2 transfer matrix [[q, p], [p*, q*]] relating the plane-wave
/// coefficient vector (A+_in, A-_out) on the left of the barrier to
/// (A+_out, A-_in) on the right. Flux conservation: |q|^2 - |p|^2 = 1,
/// and the transmission probability is T = 1/|q|^2.
struct TransferMatrix {
  complexd q;
  complexd p;

  double flux_defect() const;  // |q|^2 - |p|^2 - 1
};

/// Exact transfer matrix of a piecewise-constant barrier at wavenumber
/// k > 0 (hbar = m = 1). Per-segment steps use the real fundamental
/// solution (cos/sinh pair); the E == V case is the analytic kappa -> 0
/// limit of the same step, so no energy is special-cased away.
///
/// Pure function of immutable inputs; safe to call concurrently.
TransferMatrix transfer_matrix(const Barrier& barrier, double k);

struct BarrierGeometry {
  double a, b, d, s, x_midp;
};

/// Tabulated scattering functions of one barrier on a k-grid (k > 0 only).
///
/// q = T^{-1/2} exp[-i(J - kd)] and p = (R/T)^{1/2} exp[i(pi/2 + F - ks)]
/// define the phases J and F; both are unwrapped to be continuous along
/// the grid. T is even in k, J odd, F(-k) = pi - F(k); the *_at_minus
/// accessors implement those rules so only k > 0 is ever stored.
struct ScatterCoeffs {
  KGrid kgrid;
  BarrierGeometry geom;
  std::vector<double> T, R, J, F;
  std::vector<double> Jprime, Fprime, Tprime;  // d/dk, finite differences
  /// False where R is numerically zero and arg(p) carries no information;
  /// F is bridged by interpolation there and excluded from continuity
  /// diagnostics.
  std::vector<char> F_defined;

  double T_at_minus(std::size_t i) const { return T[i]; }
  double J_at_minus(std::size_t i) const { return -J[i]; }
  double F_at_minus(std::size_t i) const { return pi - F[i]; }

  std::size_t size() const { return T.size(); }
};

/// Tabulate T, R, J, F and their k-derivatives over the grid.
///
/// Unwrapping is nearest-branch continuation anchored at the smallest
/// grid k (principal value; for a transparent barrier this is the free
/// branch J = kd). The grid must be fine enough that the residual phases
/// J - kd and F step by less than pi between neighbours; a larger step is
/// diagnosed as an error naming the interval, except across zeros of the
/// reflection amplitude where the phase genuinely flips by pi.
ScatterCoeffs scatter_coeffs(const Barrier& barrier, KGrid kgrid);

}  // namespace qscat

#endif
