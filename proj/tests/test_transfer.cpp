#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qscat/transfer.hpp"

using namespace qscat;

namespace {

Barrier random_barrier(std::mt19937& rng) {
  std::uniform_int_distribution<int> nseg(1, 5);
  std::uniform_real_distribution<double> w(0.2, 1.5);
  std::uniform_real_distribution<double> h(-3.0, 5.0);
  std::uniform_real_distribution<double> pos(0.5, 3.0);
  std::vector<Segment> segs;
  const int n = nseg(rng);
  for (int i = 0; i < n; ++i) segs.push_back({w(rng), h(rng)});
  return Barrier(pos(rng), std::move(segs));
}

}  // namespace

TEST_CASE("zero barrier has the identity transfer matrix") {
  const Barrier br(1.0, {{1.0, 0.0}});
  for (double k : {0.3, 1.0, 2.7, 8.0}) {
    const TransferMatrix tm = transfer_matrix(br, k);
    CHECK(std::abs(tm.q - 1.0) < 1e-13);
    CHECK(std::abs(tm.p) < 1e-13);
  }
}

TEST_CASE("k <= 0 is rejected") {
  const Barrier br(1.0, {{1.0, 2.0}});
  CHECK_THROWS_AS(transfer_matrix(br, 0.0), input_error);
  CHECK_THROWS_AS(transfer_matrix(br, -1.0), input_error);
}

TEST_CASE("flux conservation for random barriers") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> kd(0.05, 8.0);
  for (int trial = 0; trial < 50; ++trial) {
    const Barrier br = random_barrier(rng);
    const TransferMatrix tm = transfer_matrix(br, kd(rng));
    // The defect is a difference of numbers of size |q|^2, so measure it
    // against that scale; deeply opaque draws make |q|^2 huge.
    const double scale = std::max(1.0, std::norm(tm.q));
    CHECK(std::abs(tm.flux_defect()) / scale < 1e-12);
    if (scale < 1e3) CHECK(std::abs(tm.flux_defect()) < 1e-10);
  }
}

TEST_CASE("rectangular barrier matches the analytic transmission") {
  const Barrier br(1.0, {{1.0, 2.0}});
  // E = 1 (k = sqrt(2)): T = 1/cosh^2(sqrt(2)), evaluated independently.
  const double k1 = std::sqrt(2.0);
  const double expected = 1.0 / std::pow(std::cosh(std::sqrt(2.0)), 2);
  CHECK(oracles::rect_barrier_T(2.0, 1.0, k1) ==
        doctest::Approx(expected).epsilon(1e-12));
  const TransferMatrix tm = transfer_matrix(br, k1);
  CHECK(1.0 / std::norm(tm.q) == doctest::Approx(expected).epsilon(1e-10));

  // Sweep across sub- and over-barrier energies.
  for (int i = 0; i <= 400; ++i) {
    const double k = 0.3 + 3.5 * i / 400.0;
    const double T = 1.0 / std::norm(transfer_matrix(br, k).q);
    CHECK(T == doctest::Approx(oracles::rect_barrier_T(2.0, 1.0, k))
                   .epsilon(1e-10));
  }
}

TEST_CASE("E equal to the segment height is a regular point") {
  const double V0 = 2.0;
  const Barrier br(1.0, {{1.0, V0}});
  const double k = std::sqrt(2.0 * V0);  // E = V0 exactly
  const double T = 1.0 / std::norm(transfer_matrix(br, k).q);
  // kappa -> 0 limit of the analytic formula: T = 1/(1 + V0 d^2 / 2).
  CHECK(T == doctest::Approx(1.0 / (1.0 + V0 / 2.0)).epsilon(1e-12));
  // And continuity: values just off the degenerate energy agree closely.
  const double Tm = 1.0 / std::norm(transfer_matrix(br, k - 1e-8).q);
  const double Tp = 1.0 / std::norm(transfer_matrix(br, k + 1e-8).q);
  CHECK(std::abs(Tm - T) < 1e-7);
  CHECK(std::abs(Tp - T) < 1e-7);
}

TEST_CASE("two-segment barriers agree with the shooting integration") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> w(0.3, 1.2);
  std::uniform_real_distribution<double> h(-2.0, 4.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Barrier br(1.0, {{w(rng), h(rng)}, {w(rng), h(rng)}});
    for (double k : {0.8, 1.7, 2.9}) {
      const double T = 1.0 / std::norm(transfer_matrix(br, k).q);
      CHECK(T == doctest::Approx(oracles::shooting_T(br, k)).epsilon(1e-6));
    }
  }
}

TEST_CASE("splitting a segment in two changes nothing") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  std::uniform_real_distribution<double> kd(0.3, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Barrier br = random_barrier(rng);
    auto segs = br.segments();
    const std::size_t j = trial % segs.size();
    const double f = frac(rng);
    std::vector<Segment> split(segs.begin(), segs.begin() + j);
    split.push_back({segs[j].width * f, segs[j].height});
    split.push_back({segs[j].width * (1.0 - f), segs[j].height});
    split.insert(split.end(), segs.begin() + j + 1, segs.end());
    const Barrier br2(br.a(), std::move(split));

    const double k = kd(rng);
    const TransferMatrix t1 = transfer_matrix(br, k);
    const TransferMatrix t2 = transfer_matrix(br2, k);
    // cosh/sinh of large arguments carry relative error ~ arg * eps, so
    // the guarantee degrades gracefully with opacity.
    const double tol = std::abs(t1.q) < 32.0 ? 1e-12 : 1e-10;
    CHECK(std::abs(t1.q - t2.q) < tol * std::abs(t1.q));
    CHECK(std::abs(t1.p - t2.p) < tol * std::max(1.0, std::abs(t1.p)));
  }
}

TEST_CASE("merged equal-height segments reproduce one segment") {
  const Barrier one(1.0, {{1.0, 2.0}});
  const Barrier two(1.0, {{0.5, 2.0}, {0.5, 2.0}});
  for (double k : {0.5, 1.4, 3.0}) {
    const double T1 = 1.0 / std::norm(transfer_matrix(one, k).q);
    const double T2 = 1.0 / std::norm(transfer_matrix(two, k).q);
    CHECK(T1 == doctest::Approx(T2).epsilon(1e-12));
  }
}

TEST_CASE("scatter_coeffs on the zero barrier") {
  const Barrier br(1.0, {{1.0, 0.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, make_kgrid(0.5, 3.0, 256));
  for (std::size_t i = 0; i < sc.size(); ++i) {
    CHECK(sc.T[i] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(sc.R[i] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(sc.J[i] ==
          doctest::Approx((*sc.kgrid)[i] * sc.geom.d).epsilon(1e-12));
  }
}

TEST_CASE("T + R = 1 on the grid and parity accessors") {
  const Barrier br(1.0, {{0.7, 1.5}, {0.6, -0.5}});
  const ScatterCoeffs sc = scatter_coeffs(br, make_kgrid(0.2, 4.0, 512));
  for (std::size_t i = 0; i < sc.size(); i += 17) {
    CHECK(sc.T[i] + sc.R[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sc.T_at_minus(i) == sc.T[i]);
    CHECK(sc.J_at_minus(i) == -sc.J[i]);
    CHECK(sc.F_at_minus(i) == pi - sc.F[i]);
  }
}

TEST_CASE("symmetric barrier has flat F") {
  const Barrier br(1.0, {{1.0, 2.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, make_kgrid(0.4, 1.8, 1024));
  for (std::size_t i = 0; i < sc.size(); ++i)
    CHECK(std::abs(sc.Fprime[i]) < 1e-6);
}

TEST_CASE("J and F are continuous along the grid") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 8; ++trial) {
    const Barrier br = random_barrier(rng);
    const ScatterCoeffs sc = scatter_coeffs(br, make_kgrid(0.2, 6.0, 2048));
    for (std::size_t i = 1; i < sc.size(); ++i) {
      CHECK(std::abs(sc.J[i] - sc.J[i - 1]) < pi);
      if (sc.F_defined[i] && sc.F_defined[i - 1] &&
          std::min(sc.R[i], sc.R[i - 1]) > 1e-3)
        CHECK(std::abs(sc.F[i] - sc.F[i - 1]) < pi);
    }
  }
}

TEST_CASE("transmission resonance crossing is handled") {
  // d = 2 puts an over-barrier resonance near k = 2.54; the reflection
  // amplitude passes through zero there and its phase flips by pi.
  const Barrier br(1.0, {{2.0, 2.0}});
  const ScatterCoeffs sc = scatter_coeffs(br, make_kgrid(2.0, 3.0, 1024));
  double Tmax = 0.0;
  for (double t : sc.T) Tmax = std::max(Tmax, t);
  CHECK(Tmax > 1.0 - 1e-6);
}

TEST_CASE("a grid too coarse for the phases is diagnosed") {
  // Opaque barrier: the transmission phase tracks -(J - kd) with slope
  // close to d, so a grid step of ~3 in k pushes the raw phase step into
  // the ambiguous band just under pi.
  const Barrier br(1.0, {{1.0, 5000.0}});
  try {
    scatter_coeffs(br, make_kgrid(1.0, 25.8, 9));
    FAIL("expected numeric_error");
  } catch (const numeric_error& e) {
    CHECK(std::string(e.what()).find("refine the k grid") !=
          std::string::npos);
  }
}

TEST_CASE("grid validation") {
  const Barrier br(1.0, {{1.0, 2.0}});
  auto bad = std::make_shared<std::vector<double>>(
      std::vector<double>{-1.0, 0.5, 1.0});
  CHECK_THROWS_AS(scatter_coeffs(br, bad), input_error);
  auto nonmono = std::make_shared<std::vector<double>>(
      std::vector<double>{0.5, 0.4, 1.0});
  CHECK_THROWS_AS(scatter_coeffs(br, nonmono), input_error);
}
