#include "qscat/barrier.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

namespace qscat {

Barrier::Barrier(double a, std::vector<Segment> segments)
    : a_(a), d_(0.0), segments_(std::move(segments)) {
  if (!(a > 0.0)) throw input_error("barrier: left boundary a must be > 0");
  if (segments_.empty()) throw input_error("barrier: needs at least one segment");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& seg = segments_[i];
    if (!(seg.width > 0.0) || !std::isfinite(seg.width))
      throw input_error("barrier: segment " + std::to_string(i + 1) +
                        " has non-positive width");
    if (!std::isfinite(seg.height))
      throw input_error("barrier: segment " + std::to_string(i + 1) +
                        " has non-finite height");
    d_ += seg.width;
  }
}

double Barrier::potential(double x) const {
  if (x < a_ || x >= a_ + d_) return 0.0;
  double edge = a_;
  for (const Segment& seg : segments_) {
    edge += seg.width;
    if (x < edge) return seg.height;
  }
  return segments_.back().height;  // x == b up to roundoff
}

double Barrier::potential_cell_average(double x, double w) const {
  const double lo = x - 0.5 * w;
  const double hi = x + 0.5 * w;
  double acc = 0.0;
  double left = a_;
  for (const Segment& seg : segments_) {
    const double right = left + seg.width;
    const double olo = std::max(lo, left);
    const double ohi = std::min(hi, right);
    if (ohi > olo) acc += seg.height * (ohi - olo);
    left = right;
  }
  return acc / w;
}

Barrier build_barrier(double a, std::vector<Segment> segments) {
  return Barrier(a, std::move(segments));
}

namespace {

double parse_real(const std::string& tok, int line_no, const char* what) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw input_error("barrier file line " + std::to_string(line_no) +
                      ": cannot parse " + std::string(what) + " '" + tok + "'");
  return v;
}

}  // namespace

Barrier Barrier::parse(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool have_a = false;
  double a = 0.0;
  std::vector<Segment> segs;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string t1, t2, extra;
    if (!(ls >> t1)) continue;  // blank
    if (!have_a) {
      if (t1 != "a")
        throw input_error("barrier file line " + std::to_string(line_no) +
                          ": expected header 'a <value>'");
      if (!(ls >> t2) || (ls >> extra))
        throw input_error("barrier file line " + std::to_string(line_no) +
                          ": header must be exactly 'a <value>'");
      a = parse_real(t2, line_no, "a");
      have_a = true;
      continue;
    }
    if (!(ls >> t2) || (ls >> extra))
      throw input_error("barrier file line " + std::to_string(line_no) +
                        ": expected '<width> <height>'");
    segs.push_back({parse_real(t1, line_no, "width"),
                    parse_real(t2, line_no, "height")});
  }
  if (!have_a) throw input_error("barrier file: missing 'a <value>' header");
  if (segs.empty()) throw input_error("barrier file: no segments");
  return Barrier(a, std::move(segs));
}

Barrier Barrier::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open barrier file '" + path + "'");
  return parse(in);
}

void Barrier::save(std::ostream& out) const {
  out.precision(17);
  out << "a " << a_ << "\n";
  for (const Segment& seg : segments_)
    out << seg.width << " " << seg.height << "\n";
}

}  // namespace qscat
