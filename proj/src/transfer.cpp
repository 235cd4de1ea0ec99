#include "qscat/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qscat {

double TransferMatrix::flux_defect() const {
  return std::norm(q) - std::norm(p) - 1.0;
}

namespace {

// Fundamental solution propagating (psi, psi') across one segment of
// width w with local kappa^2 = k^2 - 2V:
//   [[ cos(kappa w), sin(kappa w)/kappa ],
//    [ -kappa^2 * sin(kappa w)/kappa, cos(kappa w) ]]
// kappa^2 < 0 turns the entries into cosh/sinh; |kappa^2| w^2 -> 0 is the
// linear-potential-free limit, evaluated by series so E == V is exact.
struct StepMat {
  double c, s, e;  // matrix [[c, s], [e*s, c]] with e = -kappa^2
};

StepMat segment_step(double ksq, double w) {
  StepMat m{};
  m.e = -ksq;
  const double z = ksq * w * w;
  if (std::abs(z) < 1e-8) {
    // cos = 1 - z/2 + z^2/24, sin(kw)/k = w (1 - z/6 + z^2/120)
    m.c = 1.0 - z / 2.0 + z * z / 24.0;
    m.s = w * (1.0 - z / 6.0 + z * z / 120.0);
  } else if (ksq > 0.0) {
    const double kap = std::sqrt(ksq);
    m.c = std::cos(kap * w);
    m.s = std::sin(kap * w) / kap;
  } else {
    const double gam = std::sqrt(-ksq);
    m.c = std::cosh(gam * w);
    m.s = std::sinh(gam * w) / gam;
  }
  return m;
}

struct Mat2d {
  double m11, m12, m21, m22;
};

Mat2d multiply(const StepMat& a, const Mat2d& b) {
  // [[c, s], [e*s, c]] * b
  return {a.c * b.m11 + a.s * b.m21, a.c * b.m12 + a.s * b.m22,
          a.e * a.s * b.m11 + a.c * b.m21, a.e * a.s * b.m12 + a.c * b.m22};
}

}  // namespace

TransferMatrix transfer_matrix(const Barrier& barrier, double k) {
  if (!(k > 0.0)) throw input_error("transfer_matrix: k must be > 0");
  const double ksq = k * k;

  // Propagate (psi, psi') from a to b through all segments.
  Mat2d m{1.0, 0.0, 0.0, 1.0};
  for (const Segment& seg : barrier.segments())
    m = multiply(segment_step(ksq - 2.0 * seg.height, seg.width), m);

  // Invert via the adjugate: the determinant is exactly 1 (constant
  // Wronskian; cos^2 + sin^2 per factor). Evaluating it numerically from
  // the product entries would cancel catastrophically for opaque barriers.
  const Mat2d mi{m.m22, -m.m12, -m.m21, m.m11};

  // Match plane waves on both sides:
  //   q = e^{ikd}/2 [ mi11 + mi22 + i (k mi12 - mi21/k) ]
  //   p = e^{-iks}/2 [ mi11 - mi22 - i (k mi12 + mi21/k) ]
  const double d = barrier.width();
  const double s = barrier.edge_sum();
  const complexd q = 0.5 * std::polar(1.0, k * d) *
                     complexd(mi.m11 + mi.m22, k * mi.m12 - mi.m21 / k);
  const complexd p = 0.5 * std::polar(1.0, -k * s) *
                     complexd(mi.m11 - mi.m22, -(k * mi.m12 + mi.m21 / k));
  return {q, p};
}

namespace {

constexpr double kRFloor = 1e-14;      // below this R, arg(p) is noise
constexpr double kResonanceR = 1e-3;   // R this small near a pi-step marks a
                                       // genuine branch flip through |p| = 0
constexpr double kMaxStep = 0.95 * pi;

double wrap_to_pi(double x) {
  x = std::fmod(x, 2.0 * pi);
  if (x > pi) x -= 2.0 * pi;
  if (x <= -pi) x += 2.0 * pi;
  return x;
}

}  // namespace

ScatterCoeffs scatter_coeffs(const Barrier& barrier, KGrid kgrid) {
  if (!kgrid || kgrid->size() < 3)
    throw input_error("scatter_coeffs: need a grid with at least 3 points");
  const std::vector<double>& ks = *kgrid;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 0.0))
      throw input_error("scatter_coeffs: grid k must be > 0");
    if (i > 0 && !(ks[i] > ks[i - 1]))
      throw input_error("scatter_coeffs: grid must be strictly increasing");
  }

  const std::size_t n = ks.size();
  ScatterCoeffs sc;
  sc.kgrid = kgrid;
  sc.geom = {barrier.a(), barrier.b(), barrier.width(), barrier.edge_sum(),
             barrier.midpoint()};
  sc.T.resize(n);
  sc.R.resize(n);
  sc.J.resize(n);
  sc.F.resize(n);
  sc.F_defined.assign(n, 0);

  std::vector<double> theta_q(n);  // arg q = -(J - kd), slow in k
  std::vector<double> phi_f(n);    // arg[p e^{i(ks - pi/2)}] = F mod 2pi
  for (std::size_t i = 0; i < n; ++i) {
    const TransferMatrix tm = transfer_matrix(barrier, ks[i]);
    sc.T[i] = std::min(1.0 / std::norm(tm.q), 1.0);
    sc.R[i] = 1.0 - sc.T[i];
    theta_q[i] = std::arg(tm.q);
    if (sc.R[i] >= kRFloor) {
      sc.F_defined[i] = 1;
      phi_f[i] =
          std::arg(tm.p * std::polar(1.0, ks[i] * sc.geom.s - 0.5 * pi));
    }
  }

  // J: unwrap arg(q), anchored to the principal value at the smallest k.
  double acc = theta_q[0];
  sc.J[0] = ks[0] * sc.geom.d - acc;
  for (std::size_t i = 1; i < n; ++i) {
    const double step = wrap_to_pi(theta_q[i] - theta_q[i - 1]);
    if (std::abs(step) > kMaxStep)
      throw numeric_error(
          "scatter_coeffs: transmission phase steps by more than pi over [" +
          std::to_string(ks[i - 1]) + ", " + std::to_string(ks[i]) +
          "]; refine the k grid");
    acc += step;
    sc.J[i] = ks[i] * sc.geom.d - acc;
  }

  // F: unwrap over the points where it is defined. A near-pi step is
  // accepted when R is locally small (reflection amplitude crossing zero);
  // otherwise the grid cannot resolve the phase and we refuse to guess.
  std::size_t prev = n;
  double facc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!sc.F_defined[i]) continue;
    if (prev == n) {
      facc = phi_f[i];
    } else {
      const double step = wrap_to_pi(phi_f[i] - phi_f[prev]);
      if (std::abs(step) > kMaxStep &&
          std::min(sc.R[i], sc.R[prev]) > kResonanceR)
        throw numeric_error(
            "scatter_coeffs: reflection phase steps by more than pi over [" +
            std::to_string(ks[prev]) + ", " + std::to_string(ks[i]) +
            "]; refine the k grid");
      facc += step;
    }
    sc.F[i] = facc;
    prev = i;
  }

  // Bridge undefined F values; they carry zero weight (R ~ 0) everywhere
  // F is used, but derivative stencils still want finite numbers.
  if (prev == n) {
    std::fill(sc.F.begin(), sc.F.end(), 0.0);
  } else {
    std::size_t left = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (sc.F_defined[i]) {
        left = i;
        continue;
      }
      std::size_t right = i + 1;
      while (right < n && !sc.F_defined[right]) ++right;
      if (left == n)
        sc.F[i] = sc.F[right < n ? right : prev];
      else if (right == n)
        sc.F[i] = sc.F[left];
      else
        sc.F[i] = sc.F[left] + (sc.F[right] - sc.F[left]) *
                                   (ks[i] - ks[left]) / (ks[right] - ks[left]);
    }
  }

  sc.Jprime = derivative_3pt(ks, sc.J);
  sc.Fprime = derivative_3pt(ks, sc.F);
  sc.Tprime = derivative_3pt(ks, sc.T);
  return sc;
}

}  // namespace qscat
