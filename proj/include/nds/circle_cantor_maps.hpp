#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nds/phase_spaces.hpp"

namespace nds {

enum class Exactness { Rational, IrrationalApprox };

/// Rotation of the circle by `fraction` of its circumference. Irrational
/// angles are carried as a high-precision rational convergent tagged
/// IrrationalApprox; exactness claims are never made for them.
struct RotationMap {
  Rational fraction;  // in [0, 1)
  Exactness exactness = Exactness::Rational;
  std::string label;  // named irrational, empty for rational rotations

  RotationMap() = default;
  explicit RotationMap(const Rational& f, Exactness e = Exactness::Rational, std::string name = {});

  static RotationMap identity() { return RotationMap(Rational(0)); }
  /// Named irrational ("golden", "silver") approximated by its first continued
  /// fraction convergent with denominator above 10^40.
  static RotationMap irrational(const std::string& name);

  CirclePoint operator()(const CirclePoint& x) const { return CirclePoint(x.fraction + fraction); }
  bool exact() const { return exactness == Exactness::Rational; }
  /// Period of every point for an exact rotation (denominator of the fraction).
  mpz_class period() const { return fraction.denominator(); }

  friend bool operator==(const RotationMap&, const RotationMap&) = default;
};

/// Rotation by a + b with the weaker exactness tag.
RotationMap then(const RotationMap& first, const RotationMap& second);
/// Rotation by k * fraction.
RotationMap rotation_power(const RotationMap& r, long k);

/// Continued fraction convergents p_j/q_j of a named irrational, j = 0..count-1.
std::vector<Rational> convergents(const std::string& name, int count);
/// First convergent whose denominator exceeds `min_denominator`.
Rational irrational_surrogate(const std::string& name, const mpz_class& min_denominator);
bool is_named_irrational(const std::string& name);

/// Circle analogue of fixed_points: nonzero rotations have none.
bool rotation_has_fixed_points(const RotationMap& r);

/// Odometer on L-symbol words: x + 100... with carry to the right. With
/// `first_n` set it acts on the first n symbols only, leaving the rest.
struct AddingMachineMap {
  int word_length = CantorWord::kDefaultLength;
  std::optional<int> first_n;  // nullopt: full map

  AddingMachineMap() = default;
  AddingMachineMap(int length, std::optional<int> truncation);

  struct Step {
    CantorWord word;
    bool saturated = false;  // carry ran past symbol L and was dropped
  };
  Step step(const CantorWord& x) const;
  CantorWord operator()(const CantorWord& x) const { return step(x).word; }
  /// Symbols the map acts on.
  int active_length() const { return first_n ? std::min(*first_n, word_length) : word_length; }

  friend bool operator==(const AddingMachineMap&, const AddingMachineMap&) = default;
};

}  // namespace nds
