#include "nds/map.hpp"

#include "nds/errors.hpp"

namespace nds {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const Rational& interval_value(const Point& x) {
  if (const auto* p = std::get_if<IntervalPoint>(&x)) return p->value;
  throw UsageError("interval map applied to a " + std::string(to_string(space_of(x))) + " point");
}

}  // namespace

Space space_of(const Map& f) {
  return std::visit(overloaded{[](const PLMap&) { return Space::Interval; },
                               [](const LazyPLMapPtr&) { return Space::Interval; },
                               [](const RotationMap&) { return Space::Circle; },
                               [](const AddingMachineMap&) { return Space::Cantor; }},
                    f);
}

Point evaluate(const Map& f, const Point& x) {
  return std::visit(
      overloaded{
          [&](const PLMap& m) -> Point { return IntervalPoint(m(interval_value(x))); },
          [&](const LazyPLMapPtr& m) -> Point { return IntervalPoint((*m)(interval_value(x))); },
          [&](const RotationMap& m) -> Point {
            if (const auto* p = std::get_if<CirclePoint>(&x)) return m(*p);
            throw UsageError("rotation applied to a non-circle point");
          },
          [&](const AddingMachineMap& m) -> Point {
            if (const auto* p = std::get_if<CantorWord>(&x)) return m(*p);
            throw UsageError("adding machine applied to a non-Cantor point");
          }},
      f);
}

std::string describe(const Map& f) {
  return std::visit(
      overloaded{[](const PLMap& m) { return "pl(" + std::to_string(m.pieces()) + " pieces)"; },
                 [](const LazyPLMapPtr& m) { return "lazy_pl(" + m->name() + ")"; },
                 [](const RotationMap& m) {
                   return "rotation(" + (m.exact() ? m.fraction.str() : m.label + "~") + ")";
                 },
                 [](const AddingMachineMap& m) {
                   return "adding_machine(" +
                          (m.first_n ? "first_" + std::to_string(*m.first_n) : std::string("full")) +
                          ", L=" + std::to_string(m.word_length) + ")";
                 }},
      f);
}

bool is_surjective(const Map& f) {
  if (const auto* m = std::get_if<PLMap>(&f)) return m->is_surjective();
  if (const auto* m = std::get_if<LazyPLMapPtr>(&f)) {
    const auto r = image_of_interval(**m, RationalInterval(0, 1));
    return r.lo == 0 && r.hi == 1;
  }
  return true;
}

bool is_interval_map(const Map& f) {
  return std::holds_alternative<PLMap>(f) || std::holds_alternative<LazyPLMapPtr>(f);
}

Rational evaluate_interval(const Map& f, const Rational& x) {
  if (const auto* m = std::get_if<PLMap>(&f)) return (*m)(x);
  if (const auto* m = std::get_if<LazyPLMapPtr>(&f)) return (**m)(x);
  throw UsageError("not an interval map: " + describe(f));
}

RationalInterval image_of_interval(const Map& f, const RationalInterval& u) {
  if (const auto* m = std::get_if<PLMap>(&f)) return image_of_interval(*m, u);
  if (const auto* m = std::get_if<LazyPLMapPtr>(&f)) return image_of_interval(**m, u);
  throw UsageError("not an interval map: " + describe(f));
}

}  // namespace nds
