#include "nds/lazy_pl_map.hpp"

#include <algorithm>

#include "nds/errors.hpp"

namespace nds {

namespace {

// Blocks checked explicitly at construction beyond the declared structure.
constexpr int kCheckedBlocks = 6;

void validate_segment(const PLSegment& s, const std::string& what) {
  if (s.xs.size() < 2 || s.xs.size() != s.ys.size()) {
    throw ConstructionError(what + ": segment needs matching breakpoints and values");
  }
  for (std::size_t i = 1; i < s.xs.size(); ++i) {
    if (!(s.xs[i - 1] < s.xs[i])) {
      throw ConstructionError(what + ": breakpoints overlap or are out of order near " + s.xs[i].str());
    }
  }
  for (const auto& y : s.ys) {
    if (y < 0 || y > 1) throw ConstructionError(what + ": value outside [0,1]: " + y.str());
  }
}

std::vector<Rational> merged(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  std::vector<Rational> out;
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rational segment_sup_distance(const PLSegment& f, const PLSegment& g) {
  Rational best = 0;
  for (const auto& x : merged(f.xs, g.xs)) {
    Rational d = (f(x) - g(x)).abs();
    if (best < d) best = std::move(d);
  }
  return best;
}

// Length of {x in [lo, hi] : f(x) = g(x)}; f, g linear between merged breakpoints.
Rational segment_agreement(const PLSegment& f, const PLSegment& g, const Rational& lo,
                           const Rational& hi) {
  if (!(lo < hi)) return 0;
  std::vector<Rational> xs{lo};
  for (const auto& x : merged(f.xs, g.xs)) {
    if (lo < x && x < hi) xs.push_back(x);
  }
  xs.push_back(hi);
  Rational total = 0;
  bool prev_equal = f(xs[0]) == g(xs[0]);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const bool equal = f(xs[i]) == g(xs[i]);
    if (prev_equal && equal) total += xs[i] - xs[i - 1];
    prev_equal = equal;
  }
  return total;
}

void include_range(const PLSegment& s, Rational& lo, Rational& hi, const Rational& a,
                   const Rational& b) {
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    if (a < s.xs[i] && s.xs[i] < b) {
      if (s.ys[i] < lo) lo = s.ys[i];
      if (hi < s.ys[i]) hi = s.ys[i];
    }
  }
}

}  // namespace

Rational PLSegment::operator()(const Rational& x) const {
  if (x < xs.front() || x > xs.back()) throw DomainError("segment evaluated outside its range");
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = static_cast<std::size_t>(it - xs.begin());
  i = (i == 0) ? 0 : std::min(i - 1, xs.size() - 2);
  if (x == xs[i]) return ys[i];
  if (x == xs[i + 1]) return ys[i + 1];
  return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i]);
}

Rational PieceSequence::start(int n) const {
  return anchor - scale * Rational::pow(ratio, static_cast<unsigned long>(n - first_index));
}

int PieceSequence::locate(const Rational& x) const {
  const Rational d = anchor - x;
  if (d <= 0 || d > scale) throw DomainError("point outside block sequence: " + x.str());
  int n = first_index;
  Rational threshold = scale * ratio;
  while (d <= threshold) {
    threshold *= ratio;
    ++n;
  }
  return n;
}

PLSegment PieceSequence::contract(const PLSegment& s) const {
  PLSegment out;
  out.xs.reserve(s.xs.size());
  out.ys.reserve(s.ys.size());
  for (const auto& x : s.xs) out.xs.push_back(anchor - ratio * (anchor - x));
  for (const auto& y : s.ys) out.ys.push_back(anchor_value - value_ratio * (anchor_value - y));
  return out;
}

LazyPLMap::LazyPLMap(std::string name, std::vector<PLSegment> fixed,
                     std::vector<PieceSequence> sequences)
    : name_(std::move(name)), fixed_(std::move(fixed)), sequences_(std::move(sequences)) {
  struct Range {
    Rational lo, hi, value_lo, value_hi;
  };
  std::vector<Range> ranges;
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    validate_segment(fixed_[i], name_ + " fixed segment " + std::to_string(i));
    ranges.push_back({fixed_[i].lo(), fixed_[i].hi(), fixed_[i].ys.front(), fixed_[i].ys.back()});
  }
  for (std::size_t s = 0; s < sequences_.size(); ++s) {
    const auto& seq = sequences_[s];
    const std::string what = name_ + " sequence " + std::to_string(s);
    if (!(0 < seq.ratio && seq.ratio < 1) || !(0 < seq.value_ratio && seq.value_ratio < 1)) {
      throw ConstructionError(what + ": contraction ratios must lie in (0,1)");
    }
    if (seq.scale <= 0 || !seq.block) throw ConstructionError(what + ": invalid geometry");
    if (seq.anchor_value < 0 || seq.anchor_value > 1) {
      throw ConstructionError(what + ": anchor value outside [0,1]");
    }
    const int last_checked = std::max(seq.first_index, seq.self_similar_from) + kCheckedBlocks;
    PLSegment prev;
    for (int n = seq.first_index; n <= last_checked; ++n) {
      PLSegment b = seq.block(n);
      validate_segment(b, what + " block " + std::to_string(n));
      if (b.lo() != seq.start(n) || b.hi() != seq.start(n + 1)) {
        throw ConstructionError(what + " block " + std::to_string(n) +
                                " does not cover [start(n), start(n+1)]");
      }
      if (n > seq.first_index) {
        if (prev.ys.back() != b.ys.front()) {
          throw ConstructionError(what + ": discontinuity entering block " + std::to_string(n));
        }
        if (n - 1 >= seq.self_similar_from && seq.contract(prev) != b) {
          throw ConstructionError(what + ": block " + std::to_string(n) +
                                  " is not the contraction of its predecessor");
        }
      }
      prev = std::move(b);
    }
    ranges.push_back({seq.start(seq.first_index), seq.anchor, seq.block(seq.first_index).ys.front(),
                      seq.anchor_value});
  }
  std::sort(ranges.begin(), ranges.end(), [](const Range& a, const Range& b) { return a.lo < b.lo; });
  if (ranges.empty() || ranges.front().lo != 0 || ranges.back().hi != 1) {
    throw ConstructionError(name_ + ": pieces do not cover [0,1]");
  }
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (ranges[i].lo != ranges[i - 1].hi) {
      throw ConstructionError(name_ + ": gap or overlap at " + ranges[i].lo.str());
    }
    if (ranges[i].value_lo != ranges[i - 1].value_hi) {
      throw ConstructionError(name_ + ": discontinuity at " + ranges[i].lo.str());
    }
  }
}

LazyPLMap::Location LazyPLMap::locate(const Rational& x) const {
  if (x < 0 || x > 1) throw DomainError("lazy PL map evaluated outside [0,1]: " + x.str());
  for (std::size_t s = 0; s < sequences_.size(); ++s) {
    if (x == sequences_[s].anchor) return {Location::Kind::Anchor, s, 0};
  }
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    if (fixed_[i].lo() <= x && x <= fixed_[i].hi()) return {Location::Kind::Fixed, i, 0};
  }
  for (std::size_t s = 0; s < sequences_.size(); ++s) {
    const auto& seq = sequences_[s];
    if (seq.start(seq.first_index) <= x && x < seq.anchor) {
      return {Location::Kind::Block, s, seq.locate(x)};
    }
  }
  throw ConstructionError(name_ + ": no piece contains " + x.str());
}

PLSegment LazyPLMap::piece_at(const Rational& x) const {
  const Location loc = locate(x);
  switch (loc.kind) {
    case Location::Kind::Fixed: return fixed_[loc.owner];
    case Location::Kind::Block: return sequences_[loc.owner].block(loc.index);
    case Location::Kind::Anchor: break;
  }
  return PLSegment{{x}, {sequences_[loc.owner].anchor_value}};
}

Rational LazyPLMap::operator()(const Rational& x) const {
  const Location loc = locate(x);
  switch (loc.kind) {
    case Location::Kind::Fixed: return fixed_[loc.owner](x);
    case Location::Kind::Block: return sequences_[loc.owner].block(loc.index)(x);
    case Location::Kind::Anchor: break;
  }
  return sequences_[loc.owner].anchor_value;
}

bool LazyPLMap::same_skeleton(const LazyPLMap& other) const {
  if (fixed_.size() != other.fixed_.size() || sequences_.size() != other.sequences_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < fixed_.size(); ++i) {
    if (fixed_[i].lo() != other.fixed_[i].lo() || fixed_[i].hi() != other.fixed_[i].hi()) return false;
  }
  for (std::size_t s = 0; s < sequences_.size(); ++s) {
    const auto& a = sequences_[s];
    const auto& b = other.sequences_[s];
    if (a.anchor != b.anchor || a.first_index != b.first_index || a.scale != b.scale ||
        a.ratio != b.ratio || a.value_ratio != b.value_ratio) {
      return false;
    }
  }
  return true;
}

RationalInterval image_of_interval(const LazyPLMap& f, const RationalInterval& u) {
  if (u.lo < 0 || u.hi > 1) throw DomainError("interval not inside [0,1]: " + u.str());
  Rational lo = f(u.lo);
  Rational hi = lo;
  {
    const Rational y = f(u.hi);
    if (y < lo) lo = y;
    if (hi < y) hi = y;
  }
  for (const auto& seg : f.fixed()) {
    if (seg.hi() < u.lo || u.hi < seg.lo()) continue;
    include_range(seg, lo, hi, u.lo, u.hi);
  }
  for (const auto& seq : f.sequences()) {
    const Rational s0 = seq.start(seq.first_index);
    const Rational c = max(u.lo, s0);
    const Rational d = min(u.hi, seq.anchor);
    if (!(c < d)) continue;
    const int n_first = seq.locate(c);
    if (d < seq.anchor) {
      const int n_last = seq.locate(d);
      for (int n = n_first; n <= n_last; ++n) include_range(seq.block(n), lo, hi, u.lo, u.hi);
      continue;
    }
    // U reaches the anchor: explicit blocks, then the self-similar tail.
    if (seq.anchor_value < lo) lo = seq.anchor_value;
    if (hi < seq.anchor_value) hi = seq.anchor_value;
    const int tail = std::max(n_first + 1, seq.self_similar_from);
    for (int n = n_first; n < tail; ++n) include_range(seq.block(n), lo, hi, u.lo, u.hi);
    const PLSegment b = seq.block(tail);
    const auto [ymin, ymax] = std::minmax_element(b.ys.begin(), b.ys.end());
    if (*ymin < lo) lo = *ymin;
    if (hi < *ymax) hi = *ymax;
  }
  return RationalInterval(std::move(lo), std::move(hi));
}

Rational block_sup_distance(const LazyPLMap& f, const LazyPLMap& g, std::size_t sequence, int index) {
  return segment_sup_distance(f.sequences().at(sequence).block(index),
                              g.sequences().at(sequence).block(index));
}

Rational sup_distance(const LazyPLMap& f, const LazyPLMap& g) {
  if (!f.same_skeleton(g)) throw UsageError("lazy maps with different skeletons");
  Rational best = 0;
  auto consider = [&](Rational d) {
    if (best < d) best = std::move(d);
  };
  for (std::size_t i = 0; i < f.fixed().size(); ++i) {
    consider(segment_sup_distance(f.fixed()[i], g.fixed()[i]));
  }
  for (std::size_t s = 0; s < f.sequences().size(); ++s) {
    const auto& fs = f.sequences()[s];
    const auto& gs = g.sequences()[s];
    consider((fs.anchor_value - gs.anchor_value).abs());
    // Past `tail` both maps contract towards their anchors with the same ratio,
    // so block differences are convex combinations of the block-`tail` one and
    // the anchor difference.
    const int tail = std::max({fs.first_index, fs.self_similar_from, gs.self_similar_from});
    for (int n = fs.first_index; n <= tail; ++n) consider(block_sup_distance(f, g, s, n));
  }
  return best;
}

Rational agreement_measure(const LazyPLMap& f, const LazyPLMap& g, const RationalInterval& region) {
  if (!f.same_skeleton(g)) throw UsageError("lazy maps with different skeletons");
  Rational total = 0;
  for (std::size_t i = 0; i < f.fixed().size(); ++i) {
    const auto& fs = f.fixed()[i];
    total += segment_agreement(fs, g.fixed()[i], max(fs.lo(), region.lo), min(fs.hi(), region.hi));
  }
  for (std::size_t s = 0; s < f.sequences().size(); ++s) {
    const auto& fs = f.sequences()[s];
    const auto& gs = g.sequences()[s];
    const Rational c = max(region.lo, fs.start(fs.first_index));
    const Rational d = min(region.hi, fs.anchor);
    if (!(c < d)) continue;
    const int n_first = fs.locate(c);
    auto block_part = [&](int n) {
      const PLSegment fb = fs.block(n);
      const PLSegment gb = gs.block(n);
      return segment_agreement(fb, gb, max(fb.lo(), c), min(fb.hi(), d));
    };
    if (d < fs.anchor) {
      const int n_last = fs.locate(d);
      for (int n = n_first; n <= n_last; ++n) total += block_part(n);
      continue;
    }
    if (fs.anchor_value != gs.anchor_value) {
      throw UnsupportedOperation("agreement across an anchor with different pinned values");
    }
    const int tail = std::max({n_first + 1, fs.self_similar_from, gs.self_similar_from});
    for (int n = n_first; n < tail; ++n) total += block_part(n);
    // Agreement sets of tail blocks are contractions of block `tail`'s.
    total += block_part(tail) / (Rational(1) - fs.ratio);
  }
  return total;
}

Rational min_abs_slope(const LazyPLMap& f) {
  std::optional<Rational> best;
  auto scan = [&](const PLSegment& s) {
    for (std::size_t i = 0; i + 1 < s.xs.size(); ++i) {
      Rational a = ((s.ys[i + 1] - s.ys[i]) / (s.xs[i + 1] - s.xs[i])).abs();
      if (!best || a < *best) best = std::move(a);
    }
  };
  for (const auto& seg : f.fixed()) scan(seg);
  for (const auto& seq : f.sequences()) {
    const int tail = std::max(seq.first_index, seq.self_similar_from);
    for (int n = seq.first_index; n <= tail; ++n) scan(seq.block(n));
    // Tail slopes scale by value_ratio / ratio per block.
    if (seq.value_ratio < seq.ratio) best = Rational(0);
  }
  return best.value_or(Rational(0));
}

}  // namespace nds
