#ifndef QSCAT_BARRIER_HPP
#define QSCAT_BARRIER_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "qscat/common.hpp"

namespace qscat {

struct Segment {
  double width;   // > 0, length units
  double height;  // energy units (hbar = m = 1), may be negative (well)
};

/// Piecewise-constant potential confined to [a, a + d], a > 0, with V = 0
/// outside. The left edge a, width d and derived positions b = a + d,
/// s = a + b, x_midp = (a + b)/2 recur in every phase convention downstream.
class Barrier {
 public:
  Barrier(double a, std::vector<Segment> segments);

  double a() const { return a_; }
  double b() const { return a_ + d_; }
  double width() const { return d_; }                 // d
  double edge_sum() const { return 2.0 * a_ + d_; }   // s = a + b
  double midpoint() const { return a_ + 0.5 * d_; }   // x_midp

  const std::vector<Segment>& segments() const { return segments_; }

  /// V(x); jump points take the value of the segment to their right.
  double potential(double x) const;

  /// Average of V over [x - w/2, x + w/2]; the discretization a spatial
  /// grid should use, since it preserves the integral of V across jumps.
  double potential_cell_average(double x, double w) const;

  /// Text format: header line "a <value>", then one "<width> <height>"
  /// line per segment. Blank lines and '#' comments ignored.
  static Barrier parse(std::istream& in);
  static Barrier load(const std::string& path);
  void save(std::ostream& out) const;

 private:
  double a_;
  double d_;
  std::vector<Segment> segments_;
};

Barrier build_barrier(double a, std::vector<Segment> segments);

}  // namespace qscat

#endif
