#ifndef QSCAT_GRID_HPP
#define QSCAT_GRID_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qscat/common.hpp"

namespace qscat {

/// Shared wavenumber grid: strictly increasing, all k > 0. Packets and
/// coefficient tables hold references to one common grid so that every
/// quadrature uses identical abscissae and weights.
using KGrid = std::shared_ptr<const std::vector<double>>;

KGrid make_kgrid(double kmin, double kmax, std::size_t n);

/// Uniform grid of n points spanning [k0 - 6/l0, k0 + 6/l0], clipped to k > 0.
/// Covers twelve spectral standard deviations of a Gaussian packet of
/// half-width l0 when no clipping occurs.
KGrid default_kgrid(double k0, double l0, std::size_t n = 2048);

inline bool same_grid(const KGrid& a, const KGrid& b) {
  return a == b || (a && b && *a == *b);
}

/// Trapezoid quadrature on a (possibly non-uniform) grid.
double trapz(std::span<const double> x, std::span<const double> y);

/// Three-point finite-difference derivative, second order on interior
/// points (non-uniform aware), second-order one-sided at the ends.
std::vector<double> derivative_3pt(std::span<const double> x,
                                   std::span<const double> y);

}  // namespace qscat

#endif
