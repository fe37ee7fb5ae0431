#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nds/rational.hpp"

namespace nds {

enum class Space { Interval, Circle, Cantor };

std::string_view to_string(Space s);
Space parse_space(std::string_view s);

/// Point of I = [0, 1].
struct IntervalPoint {
  Rational value;

  IntervalPoint() = default;
  explicit IntervalPoint(Rational v);
  friend bool operator==(const IntervalPoint&, const IntervalPoint&) = default;
};

/// Point of the circle of circumference 1, stored as a fraction in [0, 1).
struct CirclePoint {
  Rational fraction;

  CirclePoint() = default;
  explicit CirclePoint(const Rational& v) : fraction(v.frac()) {}
  friend bool operator==(const CirclePoint&, const CirclePoint&) = default;
};

/// Truncated point x_1 x_2 ... x_L of {0,1}^N, L <= 64. Symbol x_i is stored in
/// bit i-1, so the adding machine is integer +1 on the packed value.
class CantorWord {
 public:
  static constexpr int kMaxLength = 64;
  static constexpr int kDefaultLength = 32;

  CantorWord() = default;
  CantorWord(std::uint64_t packed, int length);
  /// "111000" reads x_1 = 1, x_2 = 1, ...
  static CantorWord parse(std::string_view symbols);

  int length() const { return length_; }
  std::uint64_t packed() const { return bits_; }
  /// Symbol x_i, 1-based.
  int symbol(int i) const;
  std::string str() const;

  friend bool operator==(const CantorWord&, const CantorWord&) = default;

 private:
  std::uint64_t bits_ = 0;
  int length_ = kDefaultLength;
};

using Point = std::variant<IntervalPoint, CirclePoint, CantorWord>;

Space space_of(const Point& p);
std::string to_string(const Point& p);

/// Closed interval [lo, hi] of rationals. Degenerate (lo == hi) intervals
/// represent points.
struct RationalInterval {
  Rational lo;
  Rational hi;

  RationalInterval() = default;
  RationalInterval(Rational a, Rational b);

  bool degenerate() const { return lo == hi; }
  Rational length() const { return hi - lo; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool contains(const RationalInterval& o) const { return lo <= o.lo && o.hi <= hi; }
  std::string str() const;

  friend bool operator==(const RationalInterval&, const RationalInterval&) = default;
};

/// Validates 0 <= lo <= hi <= 1.
RationalInterval unit_subinterval(Rational lo, Rational hi);

/// Does the image of the open set with closure `a` meet the open set with
/// closure `b`? Nondegenerate closures need overlapping interiors; a
/// degenerate `a` (image of a plateau) must lie strictly inside `b`.
bool open_sets_meet(const RationalInterval& image, const RationalInterval& open_target);

/// Finite union of closed intervals, kept sorted with overlapping or touching
/// members merged.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<RationalInterval> parts);
  static IntervalUnion single(const RationalInterval& iv) { return IntervalUnion({iv}); }

  void add(const RationalInterval& iv);
  const std::vector<RationalInterval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  std::size_t size() const { return parts_.size(); }

  /// Isolated points (degenerate members).
  std::vector<Rational> points() const;
  /// Nondegenerate members.
  std::vector<RationalInterval> intervals() const;
  Rational measure() const;
  bool contains(const Rational& x) const;
  /// Every member lies inside some member of `outer`.
  bool subset_of(const IntervalUnion& outer) const;
  std::string str() const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  void normalize();
  std::vector<RationalInterval> parts_;
};

Rational interval_metric(const Rational& x, const Rational& y);
/// min(|x - y|, 1 - |x - y|) on fractions taken mod 1.
Rational circle_metric(const Rational& x, const Rational& y);
/// 1/n for the first differing symbol n, 0 for equal words.
Rational cantor_metric(const CantorWord& x, const CantorWord& y);
/// Index of the first differing symbol (1-based), 0 when equal.
int first_difference(const CantorWord& x, const CantorWord& y);

/// Exact metric on the space both points belong to; UsageError on a mismatch.
Rational metric(const Point& x, const Point& y);

/// Strict ball membership: metric(center, x) < radius.
bool ball_contains(const Point& center, const Rational& radius, const Point& x);

/// Deterministic finite net: every point of the space is strictly within eps
/// of a net point. `cantor_length` fixes the word length for the Cantor space.
std::vector<Point> epsilon_net(Space space, const Rational& eps,
                               int cantor_length = CantorWord::kDefaultLength);

/// Basic open sets of the eps-grid on the interval: (i/m, (i+1)/m), m = ceil(1/eps),
/// returned by closure.
std::vector<RationalInterval> interval_grid(const Rational& eps);

/// ceil(1/eps) for 0 < eps <= 1.
long grid_size(const Rational& eps);

}  // namespace nds
