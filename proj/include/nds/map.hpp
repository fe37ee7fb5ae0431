#pragma once

#include <string>
#include <variant>

#include "nds/circle_cantor_maps.hpp"
#include "nds/lazy_pl_map.hpp"
#include "nds/pl_map.hpp"

namespace nds {

/// Any concrete self-map of one of the three phase spaces.
using Map = std::variant<PLMap, LazyPLMapPtr, RotationMap, AddingMachineMap>;

Space space_of(const Map& f);
/// Exact image of x; UsageError if x lives in another space.
Point evaluate(const Map& f, const Point& x);
/// Short human-readable description ("pl(3 pieces)", "rotation(1/8)", ...).
std::string describe(const Map& f);
/// Surjectivity where decidable (PL via range; rotations and odometers always).
bool is_surjective(const Map& f);
/// Interval maps given by exact finite data (PLMap) or lazily (LazyPLMap).
bool is_interval_map(const Map& f);
/// Rational value of an interval map at x.
Rational evaluate_interval(const Map& f, const Rational& x);
/// Image of a closed interval under an interval map.
RationalInterval image_of_interval(const Map& f, const RationalInterval& u);

}  // namespace nds
