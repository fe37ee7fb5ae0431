#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nds/phase_spaces.hpp"
#include "nds/rational.hpp"

namespace nds {

/// Continuous piecewise-linear self-map of [0, 1], interpolating `values` at
/// strictly increasing `breakpoints` that start at 0 and end at 1.
class PLMap {
 public:
  PLMap(std::vector<Rational> breakpoints, std::vector<Rational> values);

  static PLMap identity();
  /// T(x) = 1 - |1 - 2x|.
  static PLMap tent();

  const std::vector<Rational>& breakpoints() const { return xs_; }
  const std::vector<Rational>& values() const { return ys_; }
  std::size_t pieces() const { return xs_.size() - 1; }

  Rational operator()(const Rational& x) const;
  /// Index of the piece [x_i, x_{i+1}] containing x (rightmost-closed at 1).
  std::size_t piece_index(const Rational& x) const;
  Rational slope(std::size_t piece) const;

  bool has_plateau() const;
  bool is_surjective() const;
  /// Strictly monotone with h({0,1}) = {0,1}.
  bool is_homeomorphism() const;
  /// Same map with collinear interior breakpoints removed.
  PLMap simplified() const;
  /// Inverse of a homeomorphism; PreconditionError otherwise.
  PLMap inverse() const;

  friend bool operator==(const PLMap&, const PLMap&) = default;

 private:
  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
};

/// Exact g o f; breakpoints are those of f plus f-preimages of g's breakpoints.
PLMap compose(const PLMap& g, const PLMap& f);
/// f^k by repeated squaring; nullopt once an intermediate exceeds `budget` breakpoints.
std::optional<PLMap> power(const PLMap& f, int k, std::size_t budget);

/// sup_x |f(x) - g(x)|, attained on the union of breakpoints.
Rational sup_distance(const PLMap& f, const PLMap& g);
/// Same maps as functions.
bool equivalent(const PLMap& f, const PLMap& g);

struct FixedPointSet {
  std::vector<Rational> points;             // isolated fixed points
  std::vector<RationalInterval> intervals;  // pieces lying on the diagonal
  friend bool operator==(const FixedPointSet&, const FixedPointSet&) = default;
};
FixedPointSet fixed_points(const PLMap& f);

/// f^{-1}(y): degenerate members are points, others come from plateaus at y.
IntervalUnion preimage(const PLMap& f, const Rational& y);
/// f^{-1}(S) for a finite union of closed intervals.
IntervalUnion preimage(const PLMap& f, const IntervalUnion& set);
/// f^{-depth}(y) by breadth-first expansion.
IntervalUnion preimage_tree(const PLMap& f, const Rational& y, int depth);
IntervalUnion preimage_tree(const PLMap& f, const IntervalUnion& set, int depth);

/// f(U) for a closed interval U (a single interval by continuity).
RationalInterval image_of_interval(const PLMap& f, const RationalInterval& u);
IntervalUnion image_of_union(const PLMap& f, const IntervalUnion& u);

struct SlopeProfile {
  std::vector<std::pair<RationalInterval, Rational>> pieces;
  Rational min_abs_slope;
  bool constant_abs_slope = false;
  bool has_plateau = false;
};
SlopeProfile slope_profile(const PLMap& f);

/// sup over |x - y| < delta of |h(x) - h(y)| for an increasing or decreasing
/// homeomorphism h; exact since the window difference is PL.
Rational modulus_of_continuity(const PLMap& h, const Rational& delta);

}  // namespace nds
