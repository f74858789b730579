#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "brp/rational.hpp"

namespace brp {

// Piecewise-linear path given by breakpoint times and points. Signatures and
// 1-variations depend only on the point sequence; times matter to the ODE
// drivers. Concatenation is increment-based: the second path is translated to
// continue from the first path's endpoint.
template <class S>
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath(std::vector<S> times, std::vector<std::vector<S>> points)
      : times_(std::move(times)), points_(std::move(points)) {
    if (times_.empty() || times_.size() != points_.size())
      throw std::invalid_argument("path: times/points size mismatch");
    for (std::size_t i = 1; i < times_.size(); ++i)
      if (!(times_[i - 1] < times_[i])) throw std::invalid_argument("path: times not increasing");
    for (const auto& p : points_)
      if (p.size() != points_[0].size()) throw std::invalid_argument("path: ragged points");
  }

  // points visited at times 0, 1, ..., m
  static PiecewiseLinearPath from_points(std::vector<std::vector<S>> points) {
    std::vector<S> times;
    for (std::size_t i = 0; i < points.size(); ++i) times.push_back(S(static_cast<int>(i)));
    return PiecewiseLinearPath(std::move(times), std::move(points));
  }

  static PiecewiseLinearPath constant(std::vector<S> point, S t0 = S(0), S t1 = S(1)) {
    std::vector<S> times{t0, t1};
    std::vector<std::vector<S>> pts{point, point};
    return PiecewiseLinearPath(std::move(times), std::move(pts));
  }

  int dim() const { return static_cast<int>(points_[0].size()); }
  std::size_t segment_count() const { return times_.size() - 1; }
  const std::vector<S>& times() const { return times_; }
  const std::vector<std::vector<S>>& points() const { return points_; }
  const S& t0() const { return times_.front(); }
  const S& t1() const { return times_.back(); }
  const std::vector<S>& start() const { return points_.front(); }
  const std::vector<S>& end() const { return points_.back(); }

  std::vector<S> segment_increment(std::size_t i) const {
    std::vector<S> d(points_[0].size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = points_[i + 1][j] - points_[i][j];
    return d;
  }

  std::vector<S> value_at(const S& t) const {
    if (t <= times_.front()) return points_.front();
    if (t >= times_.back()) return points_.back();
    std::size_t i = 1;
    while (times_[i] < t) ++i;
    // t in (times_[i-1], times_[i]]
    S w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
    std::vector<S> out(points_[0].size());
    for (std::size_t j = 0; j < out.size(); ++j)
      out[j] = points_[i - 1][j] + w * (points_[i][j] - points_[i - 1][j]);
    return out;
  }

  PiecewiseLinearPath reversed() const {
    std::vector<S> times;
    std::vector<std::vector<S>> pts;
    const S a = times_.front(), b = times_.back();
    for (std::size_t i = times_.size(); i-- > 0;) {
      times.push_back(a + (b - times_[i]));
      pts.push_back(points_[i]);
    }
    return PiecewiseLinearPath(std::move(times), std::move(pts));
  }

  PiecewiseLinearPath concat(const PiecewiseLinearPath& o) const {
    if (o.dim() != dim()) throw std::invalid_argument("concat: dimension mismatch");
    std::vector<S> times = times_;
    std::vector<std::vector<S>> pts = points_;
    const S shift_t = times_.back() - o.times_.front();
    for (std::size_t i = 1; i < o.points_.size(); ++i) {
      times.push_back(o.times_[i] + shift_t);
      std::vector<S> p(points_[0].size());
      for (std::size_t j = 0; j < p.size(); ++j)
        p[j] = points_.back()[j] + (o.points_[i][j] - o.points_[0][j]);
      pts.push_back(std::move(p));
    }
    return PiecewiseLinearPath(std::move(times), std::move(pts));
  }

  // sub-path between breakpoint indices, keeping original times
  PiecewiseLinearPath subpath(std::size_t i0, std::size_t i1) const {
    if (i0 >= i1 || i1 >= times_.size()) throw std::invalid_argument("subpath: bad indices");
    std::vector<S> times(times_.begin() + i0, times_.begin() + i1 + 1);
    std::vector<std::vector<S>> pts(points_.begin() + i0, points_.begin() + i1 + 1);
    return PiecewiseLinearPath(std::move(times), std::move(pts));
  }

  S one_variation(int j) const {
    S acc(0);
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
      acc += abs_val(points_[i + 1][j] - points_[i][j]);
    return acc;
  }

  // l1 over components, the norm used for path-difference bounds
  S one_variation_total() const {
    S acc(0);
    for (int j = 0; j < dim(); ++j) acc += one_variation(j);
    return acc;
  }

  // per-component scaling about the start point
  PiecewiseLinearPath scale_components(const std::vector<S>& s) const {
    if (static_cast<int>(s.size()) != dim())
      throw std::invalid_argument("scale_components: size mismatch");
    std::vector<std::vector<S>> pts = points_;
    for (auto& p : pts)
      for (std::size_t j = 0; j < p.size(); ++j)
        p[j] = points_[0][j] + s[j] * (p[j] - points_[0][j]);
    return PiecewiseLinearPath(times_, std::move(pts));
  }

  // difference of increments, as a path started at the origin
  PiecewiseLinearPath difference(const PiecewiseLinearPath& o) const {
    if (o.dim() != dim() || o.times_.size() != times_.size())
      throw std::invalid_argument("difference: incompatible paths");
    std::vector<std::vector<S>> pts;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      std::vector<S> p(points_[0].size());
      for (std::size_t j = 0; j < p.size(); ++j)
        p[j] = (points_[i][j] - points_[0][j]) - (o.points_[i][j] - o.points_[0][j]);
      pts.push_back(std::move(p));
    }
    return PiecewiseLinearPath(times_, std::move(pts));
  }

 private:
  std::vector<S> times_;
  std::vector<std::vector<S>> points_;
};

template <class S>
PiecewiseLinearPath<double> path_to_double(const PiecewiseLinearPath<S>& x) {
  std::vector<double> times;
  std::vector<std::vector<double>> pts;
  for (const auto& t : x.times()) times.push_back(to_double(t));
  for (const auto& p : x.points()) {
    std::vector<double> q;
    for (const auto& v : p) q.push_back(to_double(v));
    pts.push_back(std::move(q));
  }
  return PiecewiseLinearPath<double>(std::move(times), std::move(pts));
}

}  // namespace brp
