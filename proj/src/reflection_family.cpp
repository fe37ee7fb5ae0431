#include "nds/reflection_family.hpp"

#include <memory>
#include <string>

#include "nds/errors.hpp"

namespace nds {

namespace {

Rational four_pow(int e) { return Rational::pow2(2L * e); }

// Left bump on [a, c) = [(4^{n+1}-4)/2^{2n+3}, (4^{n+1}-2)/2^{2n+3}).
struct LeftFormulas {
  Rational a, b, c;
  Rational rise_at(const Rational& x) const { return 2 * x; }
  Rational fall_at(const Rational& x, int n) const {
    return -2 * x + (four_pow(n + 1) - 3) / Rational::pow2(2L * n + 1);
  }
  Rational dip_down_at(const Rational& x, int n) const {
    return -2 * x + (four_pow(n + 1) - 4) / Rational::pow2(2L * n + 1);
  }
  Rational dip_up_at(const Rational& x, int n) const { return 2 * x - Rational::pow2(-(2L * n + 1)); }
};

LeftFormulas left_formulas(int n) {
  const Rational den = Rational::pow2(2L * n + 3);
  return {(four_pow(n + 1) - 4) / den, (four_pow(n + 1) - 3) / den, (four_pow(n + 1) - 2) / den};
}

// Right bump on [(4^{n+1}-5)/4^{n+1}, (4^{n+1}-3)/4^{n+1}), peak 1/2^{2n-1} at 1 - 1/4^n.
struct RightFormulas {
  Rational a, b, c;
  Rational rise_at(const Rational& x, int n) const {
    return 2 * x - (Rational::pow2(2L * n - 1) - 1) / Rational::pow2(2L * n - 2);
  }
  Rational fall_at(const Rational& x) const { return 2 - 2 * x; }
};

RightFormulas right_formulas(int n) {
  const Rational den = four_pow(n + 1);
  return {(four_pow(n + 1) - 5) / den, (four_pow(n + 1) - 4) / den, (four_pow(n + 1) - 3) / den};
}

void require_joined(const Rational& left, const Rational& right, const char* what, int n) {
  if (left != right) {
    throw ConstructionError(std::string(what) + " pieces disagree at their common endpoint for n = " +
                            std::to_string(n));
  }
}

// Block n: the two formula pieces, then the connecting segment up to block n+1.
PLSegment left_block(int n, bool reflected) {
  const LeftFormulas cur = left_formulas(n);
  const LeftFormulas next = left_formulas(n + 1);
  if (!(cur.a < cur.b && cur.b < cur.c && cur.c <= next.a)) {
    throw ConstructionError("left bump pieces overlap for n = " + std::to_string(n));
  }
  PLSegment s;
  s.xs = {cur.a, cur.b, cur.c, next.a};
  if (reflected) {
    require_joined(cur.dip_down_at(cur.b, n), cur.dip_up_at(cur.b, n), "reflected bump", n);
    s.ys = {cur.dip_down_at(cur.a, n), cur.dip_down_at(cur.b, n), cur.dip_up_at(cur.c, n)};
  } else {
    require_joined(cur.rise_at(cur.b), cur.fall_at(cur.b, n), "bump", n);
    s.ys = {cur.rise_at(cur.a), cur.rise_at(cur.b), cur.fall_at(cur.c, n)};
  }
  // Both variants enter the next block at 2 a_{n+1}.
  s.ys.push_back(next.rise_at(next.a));
  return s;
}

PLSegment right_block(int n) {
  const RightFormulas cur = right_formulas(n);
  const RightFormulas next = right_formulas(n + 1);
  if (!(cur.a < cur.b && cur.b < cur.c && cur.c <= next.a)) {
    throw ConstructionError("right bump pieces overlap for n = " + std::to_string(n));
  }
  require_joined(cur.rise_at(cur.b, n), cur.fall_at(cur.b), "right bump", n);
  PLSegment s;
  s.xs = {cur.a, cur.b, cur.c, next.a};
  s.ys = {cur.rise_at(cur.a, n), cur.rise_at(cur.b, n), cur.fall_at(cur.c), next.rise_at(next.a, n + 1)};
  return s;
}

LazyPLMapPtr build(std::optional<int> reflect_from) {
  const Rational half(1, 2);
  PieceSequence left;
  left.anchor = half;
  left.anchor_value = 1;
  left.first_index = 1;
  left.scale = half - left_formulas(1).a;
  left.ratio = Rational(1, 4);
  left.value_ratio = Rational(1, 4);
  left.self_similar_from = reflect_from.value_or(1);
  left.block = [reflect_from](int n) { return left_block(n, reflect_from && n >= *reflect_from); };

  PieceSequence right;
  right.anchor = 1;
  right.anchor_value = 0;
  right.first_index = 1;
  right.scale = Rational(1) - right_formulas(1).a;
  right.ratio = Rational(1, 4);
  right.value_ratio = Rational(1, 4);
  right.self_similar_from = 1;
  right.block = [](int n) { return right_block(n); };

  // Linear joins from the pinned values f(0) = 0 and f(1/2) = 1 to the first blocks.
  const PLSegment first_left = left.block(1);
  const PLSegment first_right = right.block(1);
  PLSegment head{{0, first_left.lo()}, {0, first_left.ys.front()}};
  PLSegment middle{{half, first_right.lo()}, {1, first_right.ys.front()}};

  std::string name = reflect_from ? "reflection_fiber_" + std::to_string(*reflect_from)
                                  : std::string("reflection_limit");
  return std::make_shared<const LazyPLMap>(std::move(name), std::vector<PLSegment>{head, middle},
                                           std::vector<PieceSequence>{left, right});
}

}  // namespace

LazyPLMapPtr reflection_limit_map() { return build(std::nullopt); }

LazyPLMapPtr reflection_fiber_map(int m) {
  if (m < 1) throw DomainError("reflection family index must be >= 1");
  return build(m);
}

ReflectionPiece reflection_piece(int n) {
  if (n < 1) throw DomainError("reflection piece index must be >= 1");
  const LeftFormulas f = left_formulas(n);
  return {f.a, f.b, f.c};
}

}  // namespace nds
