#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nds/phase_spaces.hpp"
#include "nds/rational.hpp"

namespace nds {

/// A continuous PL graph over [xs.front(), xs.back()].
struct PLSegment {
  std::vector<Rational> xs;
  std::vector<Rational> ys;

  Rational operator()(const Rational& x) const;
  Rational lo() const { return xs.front(); }
  Rational hi() const { return xs.back(); }
  friend bool operator==(const PLSegment&, const PLSegment&) = default;
};

/// Infinitely many blocks accumulating at `anchor` from the left. Block n
/// (n >= first_index) covers [start(n), start(n+1)] with
/// start(n) = anchor - scale * ratio^(n - first_index).
struct PieceSequence {
  Rational anchor;
  Rational anchor_value;
  int first_index = 1;
  Rational scale;
  Rational ratio;        // x-contraction between consecutive blocks, 0 < ratio < 1
  Rational value_ratio;  // y-contraction towards anchor_value
  std::function<PLSegment(int)> block;
  /// From this index on, block(n+1) is block(n) contracted towards
  /// (anchor, anchor_value) by (ratio, value_ratio).
  int self_similar_from = 1;

  Rational start(int n) const;
  /// Block index containing x, for start(first_index) <= x < anchor.
  int locate(const Rational& x) const;
  /// Image of a block under the self-similar contraction.
  PLSegment contract(const PLSegment& s) const;
};

/// Piecewise-linear map of [0, 1] with finitely many explicit segments plus
/// finitely many infinite block sequences. Pieces accumulate only at the
/// sequence anchors, whose values are pinned.
class LazyPLMap {
 public:
  struct Location {
    enum class Kind { Fixed, Block, Anchor } kind;
    std::size_t owner;  // fixed segment or sequence
    int index = 0;      // block index for Kind::Block
  };

  /// Validates that segments and sequences tile [0, 1] continuously and that
  /// the declared self-similarity holds on the first blocks; ConstructionError otherwise.
  LazyPLMap(std::string name, std::vector<PLSegment> fixed, std::vector<PieceSequence> sequences);

  const std::string& name() const { return name_; }
  const std::vector<PLSegment>& fixed() const { return fixed_; }
  const std::vector<PieceSequence>& sequences() const { return sequences_; }

  Location locate(const Rational& x) const;
  Rational operator()(const Rational& x) const;
  /// The explicit PL graph of the piece containing x (anchors yield a one-point segment).
  PLSegment piece_at(const Rational& x) const;

  /// Same tiling (fixed segment ranges, sequence geometry) as `other`.
  bool same_skeleton(const LazyPLMap& other) const;

 private:
  std::string name_;
  std::vector<PLSegment> fixed_;
  std::vector<PieceSequence> sequences_;
};

using LazyPLMapPtr = std::shared_ptr<const LazyPLMap>;

/// f(U) for a closed interval U, exact. Tails reaching an anchor use the
/// self-similar contraction: their image is the hull of the first tail block's
/// range and the anchor value.
RationalInterval image_of_interval(const LazyPLMap& f, const RationalInterval& u);

/// sup_x |f - g| for maps sharing a skeleton.
Rational sup_distance(const LazyPLMap& f, const LazyPLMap& g);
/// sup of |f - g| over one block of one sequence.
Rational block_sup_distance(const LazyPLMap& f, const LazyPLMap& g, std::size_t sequence, int index);

/// Exact length of {x in region : f(x) = g(x)} for maps sharing a skeleton.
/// Self-similar tails contribute a closed geometric sum.
Rational agreement_measure(const LazyPLMap& f, const LazyPLMap& g, const RationalInterval& region);

/// Minimum |slope| over all pieces (tails via self-similarity).
Rational min_abs_slope(const LazyPLMap& f);

}  // namespace nds
