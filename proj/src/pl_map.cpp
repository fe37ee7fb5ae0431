#include "nds/pl_map.hpp"

#include <algorithm>

#include "nds/errors.hpp"

namespace nds {

PLMap::PLMap(std::vector<Rational> breakpoints, std::vector<Rational> values)
    : xs_(std::move(breakpoints)), ys_(std::move(values)) {
  if (xs_.size() < 2) throw ConstructionError("PL map needs at least two breakpoints");
  if (xs_.size() != ys_.size()) throw ConstructionError("PL map breakpoint/value count mismatch");
  if (xs_.front() != 0 || xs_.back() != 1) {
    throw ConstructionError("PL map breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i - 1] < xs_[i])) throw ConstructionError("PL map breakpoints must strictly increase");
  }
  for (const auto& y : ys_) {
    if (y < 0 || y > 1) throw ConstructionError("PL map value outside [0,1]: " + y.str());
  }
}

PLMap PLMap::identity() { return PLMap({0, 1}, {0, 1}); }

PLMap PLMap::tent() { return PLMap({0, Rational(1, 2), 1}, {0, 1, 0}); }

std::size_t PLMap::piece_index(const Rational& x) const {
  if (x < 0 || x > 1) throw DomainError("PL map evaluated outside [0,1]: " + x.str());
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  if (i == 0) return 0;
  return std::min(i - 1, pieces() - 1);
}

Rational PLMap::operator()(const Rational& x) const {
  const std::size_t i = piece_index(x);
  if (x == xs_[i]) return ys_[i];
  if (x == xs_[i + 1]) return ys_[i + 1];
  return ys_[i] + (ys_[i + 1] - ys_[i]) * (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
}

Rational PLMap::slope(std::size_t piece) const {
  return (ys_[piece + 1] - ys_[piece]) / (xs_[piece + 1] - xs_[piece]);
}

bool PLMap::has_plateau() const {
  for (std::size_t i = 0; i < pieces(); ++i) {
    if (ys_[i] == ys_[i + 1]) return true;
  }
  return false;
}

bool PLMap::is_surjective() const {
  const auto [lo, hi] = std::minmax_element(ys_.begin(), ys_.end());
  return *lo == 0 && *hi == 1;
}

bool PLMap::is_homeomorphism() const {
  bool increasing = true;
  bool decreasing = true;
  for (std::size_t i = 0; i < pieces(); ++i) {
    if (!(ys_[i] < ys_[i + 1])) increasing = false;
    if (!(ys_[i] > ys_[i + 1])) decreasing = false;
  }
  if (increasing) return ys_.front() == 0 && ys_.back() == 1;
  if (decreasing) return ys_.front() == 1 && ys_.back() == 0;
  return false;
}

PLMap PLMap::simplified() const {
  std::vector<Rational> xs{xs_.front()};
  std::vector<Rational> ys{ys_.front()};
  for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
    // Keep x_i unless (x_{kept}, x_i, x_{i+1}) are collinear.
    const Rational left = (ys_[i] - ys.back()) / (xs_[i] - xs.back());
    const Rational right = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
    if (left != right) {
      xs.push_back(xs_[i]);
      ys.push_back(ys_[i]);
    }
  }
  xs.push_back(xs_.back());
  ys.push_back(ys_.back());
  return PLMap(std::move(xs), std::move(ys));
}

PLMap PLMap::inverse() const {
  if (!is_homeomorphism()) throw PreconditionError("only a PL homeomorphism has a PL inverse");
  std::vector<Rational> xs = ys_;
  std::vector<Rational> ys = xs_;
  if (xs.front() > xs.back()) {
    std::reverse(xs.begin(), xs.end());
    std::reverse(ys.begin(), ys.end());
  }
  return PLMap(std::move(xs), std::move(ys));
}

PLMap compose(const PLMap& g, const PLMap& f) {
  const auto& fx = f.breakpoints();
  const auto& fy = f.values();
  const auto& gx = g.breakpoints();
  std::vector<Rational> xs;
  std::vector<Rational> ys;
  xs.reserve(fx.size() + gx.size());
  ys.reserve(fx.size() + gx.size());
  std::vector<Rational> inner;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    xs.push_back(fx[i]);
    ys.push_back(g(fy[i]));
    const Rational& y0 = fy[i];
    const Rational& y1 = fy[i + 1];
    if (y0 == y1) continue;
    const Rational& lo = min(y0, y1);
    const Rational& hi = max(y0, y1);
    // Interior breakpoints of g crossed by this piece of f.
    auto first = std::upper_bound(gx.begin(), gx.end(), lo);
    auto last = std::lower_bound(gx.begin(), gx.end(), hi);
    inner.clear();
    for (auto it = first; it < last; ++it) inner.push_back(*it);
    if (y1 < y0) std::reverse(inner.begin(), inner.end());
    const Rational scale = (fx[i + 1] - fx[i]) / (y1 - y0);
    for (const auto& c : inner) {
      xs.push_back(fx[i] + (c - y0) * scale);
      ys.push_back(g(c));
    }
  }
  xs.push_back(fx.back());
  ys.push_back(g(fy.back()));
  return PLMap(std::move(xs), std::move(ys)).simplified();
}

std::optional<PLMap> power(const PLMap& f, int k, std::size_t budget) {
  if (k < 0) throw DomainError("negative power");
  PLMap result = PLMap::identity();
  PLMap base = f;
  bool first = true;
  while (k > 0) {
    if (k & 1) {
      result = first ? base : compose(base, result);
      first = false;
      if (result.breakpoints().size() > budget) return std::nullopt;
    }
    k >>= 1;
    if (k > 0) {
      base = compose(base, base);
      if (base.breakpoints().size() > budget) return std::nullopt;
    }
  }
  return result;
}

namespace {

std::vector<Rational> merged_breakpoints(const PLMap& f, const PLMap& g) {
  std::vector<Rational> xs;
  xs.reserve(f.breakpoints().size() + g.breakpoints().size());
  std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(),
             g.breakpoints().end(), std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace

Rational sup_distance(const PLMap& f, const PLMap& g) {
  Rational best = 0;
  for (const auto& x : merged_breakpoints(f, g)) {
    Rational d = (f(x) - g(x)).abs();
    if (best < d) best = std::move(d);
  }
  return best;
}

bool equivalent(const PLMap& f, const PLMap& g) { return sup_distance(f, g).is_zero(); }

FixedPointSet fixed_points(const PLMap& f) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  std::vector<Rational> points;
  std::vector<RationalInterval> intervals;
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    const Rational g0 = ys[i] - xs[i];
    const Rational g1 = ys[i + 1] - xs[i + 1];
    if (g0.is_zero() && g1.is_zero()) {
      if (!intervals.empty() && intervals.back().hi == xs[i]) {
        intervals.back().hi = xs[i + 1];
      } else {
        intervals.emplace_back(xs[i], xs[i + 1]);
      }
      continue;
    }
    if (g0.sign() * g1.sign() > 0) continue;
    points.push_back(xs[i] + g0 * (xs[i + 1] - xs[i]) / (g0 - g1));
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::erase_if(points, [&](const Rational& p) {
    return std::any_of(intervals.begin(), intervals.end(),
                       [&](const RationalInterval& iv) { return iv.contains(p); });
  });
  return {std::move(points), std::move(intervals)};
}

IntervalUnion preimage(const PLMap& f, const IntervalUnion& set) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  std::vector<RationalInterval> out;
  for (const auto& target : set.parts()) {
    for (std::size_t i = 0; i < f.pieces(); ++i) {
      const Rational& y0 = ys[i];
      const Rational& y1 = ys[i + 1];
      if (y0 == y1) {
        if (target.contains(y0)) out.emplace_back(xs[i], xs[i + 1]);
        continue;
      }
      const Rational& lo = min(y0, y1);
      const Rational& hi = max(y0, y1);
      if (target.hi < lo || hi < target.lo) continue;
      const Rational a = max(lo, target.lo);
      const Rational b = min(hi, target.hi);
      const Rational scale = (xs[i + 1] - xs[i]) / (y1 - y0);
      Rational xa = xs[i] + (a - y0) * scale;
      Rational xb = xs[i] + (b - y0) * scale;
      if (xb < xa) std::swap(xa, xb);
      out.emplace_back(std::move(xa), std::move(xb));
    }
  }
  return IntervalUnion(std::move(out));
}

IntervalUnion preimage(const PLMap& f, const Rational& y) {
  return preimage(f, IntervalUnion::single(RationalInterval(y, y)));
}

IntervalUnion preimage_tree(const PLMap& f, const IntervalUnion& set, int depth) {
  if (depth < 0) throw DomainError("negative preimage depth");
  IntervalUnion level = set;
  for (int j = 0; j < depth; ++j) level = preimage(f, level);
  return level;
}

IntervalUnion preimage_tree(const PLMap& f, const Rational& y, int depth) {
  return preimage_tree(f, IntervalUnion::single(RationalInterval(y, y)), depth);
}

RationalInterval image_of_interval(const PLMap& f, const RationalInterval& u) {
  if (u.lo < 0 || u.hi > 1) throw DomainError("interval not inside [0,1]: " + u.str());
  Rational lo = f(u.lo);
  Rational hi = lo;
  auto consider = [&](const Rational& y) {
    if (y < lo) lo = y;
    if (hi < y) hi = y;
  };
  consider(f(u.hi));
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  auto first = std::upper_bound(xs.begin(), xs.end(), u.lo);
  auto last = std::lower_bound(xs.begin(), xs.end(), u.hi);
  for (auto it = first; it < last; ++it) consider(ys[static_cast<std::size_t>(it - xs.begin())]);
  return RationalInterval(std::move(lo), std::move(hi));
}

IntervalUnion image_of_union(const PLMap& f, const IntervalUnion& u) {
  std::vector<RationalInterval> out;
  out.reserve(u.size());
  for (const auto& iv : u.parts()) out.push_back(image_of_interval(f, iv));
  return IntervalUnion(std::move(out));
}

SlopeProfile slope_profile(const PLMap& f) {
  SlopeProfile p;
  const auto& xs = f.breakpoints();
  for (std::size_t i = 0; i < f.pieces(); ++i) {
    Rational s = f.slope(i);
    if (s.is_zero()) p.has_plateau = true;
    const Rational a = s.abs();
    if (i == 0 || a < p.min_abs_slope) p.min_abs_slope = a;
    p.pieces.emplace_back(RationalInterval(xs[i], xs[i + 1]), std::move(s));
  }
  const Rational first = p.pieces.front().second.abs();
  p.constant_abs_slope = std::all_of(p.pieces.begin(), p.pieces.end(),
                                     [&](const auto& piece) { return piece.second.abs() == first; });
  return p;
}

Rational modulus_of_continuity(const PLMap& h, const Rational& delta) {
  if (!h.is_homeomorphism()) throw PreconditionError("modulus requires a PL homeomorphism");
  if (delta <= 0) throw DomainError("modulus needs delta > 0");
  if (delta >= 1) return 1;
  const Rational span = Rational(1) - delta;
  std::vector<Rational> candidates{0, span};
  for (const auto& b : h.breakpoints()) {
    if (b <= span) candidates.push_back(b);
    if (b - delta >= 0) candidates.push_back(b - delta);
  }
  Rational best = 0;
  for (const auto& x : candidates) {
    Rational w = (h(x + delta) - h(x)).abs();
    if (best < w) best = std::move(w);
  }
  return best;
}

}  // namespace nds
