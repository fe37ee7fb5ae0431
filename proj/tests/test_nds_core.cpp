#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nds/errors.hpp"
#include "nds/serialization.hpp"
#include "nds/system.hpp"

using namespace nds;

namespace {
Rational r(long p, long q = 1) { return Rational(p, q); }
NDSystem dyadic() { return NDSystem({}, std::make_shared<RotationDyadicFamily>()); }
}  // namespace

TEST_CASE("window compositions of dyadic rotations") {
  const NDSystem sys = dyadic();
  for (int n = 1; n <= 8; ++n) {
    Rational sum = 0;
    for (int j = n; j <= 2 * n - 1; ++j) sum += Rational::pow2(-j);
    const auto w = window_compose(sys, n, n);
    CHECK(std::get<RotationMap>(w.map).fraction == sum.frac());
    CHECK(std::get<RotationMap>(fiber_power(sys, n, n).map).fraction == (Rational(n) * Rational::pow2(-n)).frac());
  }
  CHECK(std::get<RotationMap>(window_compose(sys, 3, 0).map).fraction == 0);
  CHECK(std::get<RotationMap>(fiber_power(sys, 4, 1).map) == std::get<RotationMap>(sys.at(4)));
}

TEST_CASE("constant tent family") {
  const NDSystem sys = NDSystem::constant(PLMap::tent());
  const auto w = window_compose(sys, 1, 2);
  const PLMap tt = compose(PLMap::tent(), PLMap::tent());
  CHECK(std::get<PLMap>(w.map) == tt);
  CHECK(std::get<PLMap>(window_compose(sys, 5, 0).map) == PLMap::identity());
  CHECK(std::get<PLMap>(fiber_power(sys, 2, 3).map) == compose(PLMap::tent(), tt));
}

TEST_CASE("adding machine fiber powers") {
  const NDSystem sys({}, std::make_shared<AddingMachineFamily>(8));
  const auto p = fiber_power(sys, 3, 8);
  for (std::uint64_t w = 0; w < 256; w += 7) {
    const CantorWord x(w, 8);
    CHECK(std::get<CantorWord>(evaluate(p.map, x).point) == x);
  }
  const auto once = fiber_power(sys, 3, 1);
  const CantorWord x = CantorWord::parse("11101010");
  CHECK(std::get<CantorWord>(evaluate(once.map, x).point) == AddingMachineMap(8, 3)(x));
}

TEST_CASE("orbits") {
  const NDSystem ident = NDSystem::constant(PLMap::identity());
  const auto o = orbit(ident, IntervalPoint(r(1, 3)), 5, OrbitKind::Autonomous);
  for (const auto& [n, p] : o.entries) CHECK(std::get<IntervalPoint>(p).value == r(1, 3));
  const NDSystem sys = dyadic();
  const auto fib = orbit(sys, CirclePoint(0), 6, OrbitKind::DiagonalFiber);
  CHECK(std::get<CirclePoint>(fib.entries[2].second).fraction == r(3, 8));
  const auto diag = orbit(sys, CirclePoint(0), 8, OrbitKind::DiagonalNds);
  CHECK(std::get<CirclePoint>(diag.entries[1].second).fraction == r(3, 8));
  for (const auto& [n, p] : diag.entries) {
    const Rational expected = Rational::pow2(-(n - 1)) * (1 - Rational::pow2(-n));
    CHECK(std::get<CirclePoint>(p).fraction == expected.frac());
  }
  CHECK(orbit(sys, CirclePoint(0), 4, OrbitKind::Orbit).entries[1].second == Point(CirclePoint(r(3, 4))));
}

TEST_CASE("inverse window sets") {
  const NDSystem tent = NDSystem::constant(PLMap::tent());
  CHECK(inverse_window_set(tent, 1, IntervalUnion::single({r(1, 2), 1})) ==
        IntervalUnion::single({r(1, 4), r(3, 4)}));
  CHECK(inverse_window_set(tent, 3, IntervalUnion::single({0, 1})) == IntervalUnion::single({0, 1}));
  const NDSystem ident = NDSystem::constant(PLMap::identity());
  const auto v = IntervalUnion::single({r(1, 5), r(2, 7)});
  CHECK(inverse_window_set(ident, 4, v) == v);
  CHECK_THROWS_AS(inverse_window_set(dyadic(), 1, v), UnsupportedOperation);
}

TEST_CASE("system serialization round trip") {
  const NDSystem sys({PLMap::identity()}, std::make_shared<BumpPerturbationFamily>(
                                              PLMap::tent(), r(1, 5), r(1, 20), r(1, 10), r(1, 2)));
  const Json j = to_json(sys);
  CHECK(to_json(system_from_json(j, "system")) == j);
  Json bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(system_from_json(bad, "system"), ConfigError);
}

TEST_CASE("surjectivity warnings") {
  const PLMap plateau({0, r(1, 2), 1}, {0, r(1, 2), r(1, 2)});
  const NDSystem sys(Space::Interval, {plateau}, PLMap::tent());
  CHECK(sys.warnings().size() == 1);
}
