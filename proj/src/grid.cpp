#include "qscat/grid.hpp"

#include <algorithm>
#include <cmath>

namespace qscat {

KGrid make_kgrid(double kmin, double kmax, std::size_t n) {
  if (!(kmin > 0.0)) throw input_error("k grid must satisfy kmin > 0");
  if (!(kmax > kmin)) throw input_error("k grid must satisfy kmax > kmin");
  if (n < 8) throw input_error("k grid needs at least 8 points");
  auto g = std::make_shared<std::vector<double>>(n);
  const double h = (kmax - kmin) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    (*g)[i] = kmin + h * static_cast<double>(i);
  g->back() = kmax;
  return g;
}

KGrid default_kgrid(double k0, double l0, std::size_t n) {
  if (!(k0 > 0.0) || !(l0 > 0.0))
    throw input_error("default_kgrid: k0 and l0 must be positive");
  const double span = 6.0 / l0;
  double kmin = k0 - span;
  const double kmax = k0 + span;
  if (kmin <= 0.0) kmin = kmax / static_cast<double>(4 * n);  // clip to k > 0
  return make_kgrid(kmin, kmax, n);
}

double trapz(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
  return acc;
}

std::vector<double> derivative_3pt(std::span<const double> x,
                                   std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<double> dy(n, 0.0);
  if (n < 3) return dy;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = x[i] - x[i - 1];
    const double h2 = x[i + 1] - x[i];
    dy[i] = -h2 / (h1 * (h1 + h2)) * y[i - 1] +
            (h2 - h1) / (h1 * h2) * y[i] +
            h1 / (h2 * (h1 + h2)) * y[i + 1];
  }
  {
    const double h1 = x[1] - x[0];
    const double h2 = x[2] - x[1];
    dy[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] +
            (h1 + h2) / (h1 * h2) * y[1] - h1 / (h2 * (h1 + h2)) * y[2];
  }
  {
    const double h1 = x[n - 2] - x[n - 3];
    const double h2 = x[n - 1] - x[n - 2];
    dy[n - 1] = h2 / (h1 * (h1 + h2)) * y[n - 3] -
                (h1 + h2) / (h1 * h2) * y[n - 2] +
                (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * y[n - 1];
  }
  return dy;
}

}  // namespace qscat
