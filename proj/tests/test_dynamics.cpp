#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nds/dynamics.hpp"
#include "nds/errors.hpp"
#include "nds/reflection_family.hpp"

using namespace nds;

namespace {
Rational r(long p, long q = 1) { return Rational(p, q); }

// f([0,1/2]) = [1/2,1], f([1/2,1]) = [0,1/2]; f^2 is a tent on each half.
PLMap swap_halves() { return PLMap({r(0), r(1, 2), r(3, 4), r(1)}, {r(1), r(1, 2), r(0), r(1, 2)}); }

PLMap bumped(const Rational& h) { return bump_perturbation(PLMap::tent(), r(19, 20), r(1, 40), h); }

RationalInterval power_image(const PLMap& f, int n, const RationalInterval& u) {
  return image_of_interval(*power(f, n, 1 << 20), u);
}
}  // namespace

TEST_CASE("tent is transitive on the 1/8 grid") {
  const auto rep = test_transitivity(PLMap::tent(), r(1, 8), 16);
  CHECK(rep.transitive_on_grid);
  CHECK(rep.grid.size() == 8);
  for (std::size_t u = 0; u < 8; ++u) {
    for (std::size_t v = 0; v < 8; ++v) {
      const int n = rep.pair_table[u][v];
      REQUIRE(n >= 1);
      CHECK(n <= 6);
      // Oracle: images through the exact power map.
      CHECK(open_sets_meet(power_image(PLMap::tent(), n, rep.grid[u]), rep.grid[v]));
      for (int j = 1; j < n; ++j) CHECK_FALSE(open_sets_meet(power_image(PLMap::tent(), j, rep.grid[u]), rep.grid[v]));
      CHECK(pair_reverifies(PLMap::tent(), rep.grid[u], rep.grid[v], n));
    }
  }
  SUBCASE("serial reference agrees") {
    CHECK(to_json(test_transitivity(PLMap::tent(), r(1, 8), 16, Exec::Serial)) == to_json(rep));
  }
}

TEST_CASE("transitivity failures and rotations") {
  const auto id = test_transitivity(PLMap::identity(), r(1, 4), 10);
  CHECK_FALSE(id.transitive_on_grid);
  REQUIRE(id.failing_pair.has_value());
  CHECK(*id.failing_pair == std::make_pair(std::size_t{0}, std::size_t{1}));
  for (std::size_t u = 0; u < 4; ++u) CHECK(id.pair_table[u][u] == 1);

  const auto rat = test_transitivity(RotationMap(r(1, 4)), r(1, 8), 32);
  CHECK_FALSE(rat.transitive_on_grid);
  CHECK(rat.failing_pair.has_value());
  const auto irr = test_transitivity(RotationMap::irrational("golden"), r(1, 8), 64);
  CHECK(irr.transitive_on_grid);
  CHECK_FALSE(irr.failing_pair.has_value());
  CHECK(pair_reverifies(RotationMap::irrational("golden"), irr.grid[0], irr.grid[3], irr.pair_table[0][3]));

  const auto g4 = test_transitivity(Map(reflection_limit_map()), r(1, 16), 40);
  CHECK(g4.transitive_on_grid);
  CHECK_THROWS_AS(test_transitivity(Map(AddingMachineMap(8, std::nullopt)), r(1, 4), 4), UnsupportedOperation);
  CHECK(pair_table_csv(id).find("-1") != std::string::npos);
}

TEST_CASE("sensitivity") {
  std::vector<Point> probes;
  for (int j = 0; j <= 16; ++j) probes.emplace_back(IntervalPoint(r(j, 16)));
  const Rational pe(1, 64);
  const auto rep = test_sensitivity(PLMap::tent(), r(1, 4), pe, 12, probes);
  CHECK(rep.failures.empty());
  REQUIRE(rep.witnesses.size() == probes.size());
  for (const auto& w : rep.witnesses) {
    CHECK(w.n <= std::log2(64.0) + 2);
    CHECK(witness_reverifies(PLMap::tent(), rep, w));
  }
  CHECK(test_sensitivity(PLMap::identity(), r(1, 4), pe, 12, probes).witnesses.empty());
  const std::vector<Point> circle{CirclePoint(0), CirclePoint(r(1, 3))};
  const auto rot = test_sensitivity(RotationMap(r(1, 7)), r(1, 64), r(1, 64), 50, circle);
  CHECK(rot.witnesses.empty());
  CHECK(rot.failures.size() == 2);
  const std::vector<Point> words{CantorWord(5, 12)};
  CHECK(test_sensitivity(AddingMachineMap(12, std::nullopt), r(1, 4), r(1, 4), 20, words).witnesses.empty());
  CHECK_THROWS_AS(test_sensitivity(PLMap::tent(), r(1, 8), r(1, 4), 4, probes), DomainError);
  CHECK_THROWS_AS(test_sensitivity(PLMap::tent(), r(1, 4), r(1, 8), 4, circle), UsageError);
}

TEST_CASE("invariant intervals") {
  const auto tent = find_invariant_interval(PLMap::tent(), RationalInterval(r(1, 4), r(1, 2)), 20);
  CHECK(tent.status == InvariantStatus::Stabilized);
  CHECK(tent.interval == RationalInterval(0, 1));
  CHECK(tent.cycle.empty());

  const PLMap f = swap_halves();
  const PLMap f2 = compose(f, f);
  const auto half = find_invariant_interval(f2, RationalInterval(r(1, 8), r(1, 4)), 20);
  CHECK(half.status == InvariantStatus::Stabilized);
  CHECK(RationalInterval(0, r(1, 2)).contains(half.interval));
  CHECK(image_of_interval(f2, half.interval) == half.interval);

  const auto cyc = find_invariant_interval(f, RationalInterval(r(1, 8), r(1, 4)), 20);
  REQUIRE(cyc.cycle.size() == 2);
  CHECK(cyc.cycle[0] == RationalInterval(0, r(1, 2)));
  CHECK(cyc.cycle[1] == RationalInterval(r(1, 2), 1));

  const RationalInterval seed(r(1, 5), r(2, 5));
  const auto id = find_invariant_interval(PLMap::identity(), seed, 5);
  CHECK(id.interval == seed);
  CHECK(id.rounds == 0);

  // x -> x/2 + 1/4 contracts to 1/2 without ever reaching it from [0, 1/8].
  const PLMap contraction({r(0), r(1)}, {r(1, 4), r(3, 4)});
  const auto inc = find_invariant_interval(contraction, RationalInterval(0, r(1, 8)), 3);
  CHECK(inc.status == InvariantStatus::Inconclusive);
  const auto inc2 = find_invariant_interval(contraction, RationalInterval(r(1, 2), r(1, 2)), 3);
  CHECK(inc2.interval == RationalInterval(r(1, 2), r(1, 2)));
}

TEST_CASE("fixed points and preimage trees") {
  const auto same = check_fix_inclusion(PLMap::tent(), PLMap::tent(), 4);
  CHECK(same.holds);
  CHECK(same.fix.points == std::vector<Rational>{r(0), r(2, 3)});

  const auto away = check_fix_inclusion(PLMap::tent(), bumped(r(1, 100)), 3);
  CHECK(away.holds);
  CHECK(away.depth_checked == 3);

  // A bump through the level-2 point 1/6 creates new level-3 preimages.
  const auto through = check_fix_inclusion(PLMap::tent(), bumped(r(1, 10)), 3);
  CHECK_FALSE(through.holds);
  CHECK(through.discrepancy_level == 3);
  CHECK(through.only_in_f.empty());
  CHECK_FALSE(through.only_in_fn.empty());

  const PLMap moved({r(0), r(1, 2), r(1)}, {r(1, 10), r(1), r(0)});
  const auto lost = check_fix_inclusion(PLMap::tent(), moved, 2);
  CHECK_FALSE(lost.fix_preserved);
  CHECK(lost.not_fixed == std::vector<Rational>{r(0)});

  CHECK_THROWS_AS(check_fix_inclusion(PLMap::tent(), RotationMap(r(1, 3)), 2), UsageError);
}

TEST_CASE("prefix agreement") {
  const auto constant = check_prefix_agreement(NDSystem::constant(PLMap::tent()), r(2, 3), 3, 8);
  CHECK(constant.points.size() == 8);  // 2/3, 1/3, 1/6, 5/6, 1/12, 5/12, 7/12, 11/12
  for (const auto& p : constant.points) CHECK(p.n0 == 1);

  std::vector<Map> prefix;
  for (int j = 0; j < 4; ++j) prefix.emplace_back(bump_perturbation(PLMap::tent(), r(1, 4), r(1, 8), r(1, 8)));
  const NDSystem tail(Space::Interval, prefix, PLMap::tent());
  const auto t = check_prefix_agreement(tail, r(0), 3, 12);
  bool some_moved = false;
  for (const auto& p : t.points) {
    REQUIRE(p.n0.has_value());
    CHECK(*p.n0 <= 5);
    some_moved = some_moved || *p.n0 == 5;
  }
  CHECK(some_moved);

  CHECK_THROWS_AS(check_prefix_agreement(NDSystem::constant(PLMap::tent()), r(1, 2), 2, 4), PreconditionError);

  // Reflection family: 8/13 is fixed on the unmodified decreasing piece.
  const NDSystem g4({}, std::make_shared<ReflectionFamily>());
  const Map f = reflection_limit_map();
  CHECK(evaluate_interval(f, r(8, 13)) == r(8, 13));
  const auto pa = check_prefix_agreement(g4, r(8, 13), 2, 8);
  CHECK(pa.points.size() >= 3);
  for (const auto& p : pa.points) {
    CHECK(evaluate_interval(f, evaluate_interval(f, p.x)) == r(8, 13));
    int expected = 1;
    for (int j = 1; j <= 8; ++j) {
      const auto piece = reflection_piece(j);
      if (piece.start < p.x && p.x < piece.end) expected = j + 1;
    }
    CHECK(p.n0 == expected);
  }
}

TEST_CASE("agreement measure") {
  const RationalInterval unit(0, 1);
  CHECK(agreement_measure(PLMap::tent(), PLMap::tent(), RationalInterval(r(1, 5), r(3, 5))) == r(2, 5));
  CHECK(agreement_measure(PLMap::tent(), PLMap::identity(), unit) == 0);
  const PLMap b = bumped(r(1, 100));
  CHECK(agreement_measure(PLMap::tent(), b, unit) == r(19, 20));
  CHECK(agreement_measure(PLMap::tent(), b, unit) == agreement_measure(b, PLMap::tent(), unit));
  CHECK(agreement_measure(PLMap::tent(), b, RationalInterval(0, r(1, 2))) +
            agreement_measure(PLMap::tent(), b, RationalInterval(r(1, 2), 1)) ==
        r(19, 20));
  for (int m = 1; m <= 4; ++m) {
    Rational removed = 0;
    for (int n = m; n <= 60; ++n) removed += Rational::pow2(-(2 * n + 2));  // 2/2^{2n+3}
    const Rational closed = Rational(1) - Rational(1, 3) * Rational::pow2(-2 * m);
    CHECK(closed < Rational(1) - removed);
    CHECK(Rational(1) - removed - closed < Rational::pow2(-120));
    CHECK(agreement_measure(Map(reflection_limit_map()), Map(reflection_fiber_map(m)), unit) == closed);
  }
  CHECK_THROWS_AS(agreement_measure(PLMap::tent(), Map(reflection_limit_map()), unit), UsageError);
}

TEST_CASE("eventual equality") {
  std::vector<Map> prefix;
  for (int j = 1; j <= 3; ++j) prefix.emplace_back(bumped(Rational(1, 10 * j)));
  const NDSystem tail(Space::Interval, prefix, PLMap::tent());
  SweepOptions o;
  o.N_max = 10;
  o.K_max = 64;
  const auto e = check_eventual_equality(tail, r(1, 8), o);
  CHECK(e.status == EventualStatus::EventualEquality);
  CHECK(e.n0 == 4);

  const NDSystem persistent({}, std::make_shared<BumpPerturbationFamily>(PLMap::tent(), r(19, 20), r(1, 40),
                                                                        r(1, 10), r(1, 2)));
  const auto p = check_eventual_equality(persistent, r(1, 8), o);
  CHECK(p.status == EventualStatus::ConsistentViolation);
  REQUIRE(p.ccstar.has_value());
  CHECK(witness_reproduces(persistent, *p.ccstar));

  const auto refused = check_eventual_equality(NDSystem({}, std::make_shared<ReflectionFamily>()), r(1, 8), o);
  CHECK(refused.status == EventualStatus::PreconditionUnmet);
  const PLMap uneven({r(0), r(1, 3), r(1)}, {r(0), r(1), r(0)});
  CHECK(check_eventual_equality(NDSystem::constant(uneven), r(1, 8), o).status == EventualStatus::PreconditionUnmet);
}

TEST_CASE("conjugation") {
  const PLMap h({r(0), r(1, 2), r(1)}, {r(0), r(1, 4), r(1)});
  const NDSystem tent = NDSystem::constant(PLMap::tent());
  const NDSystem same = conjugate_system(tent, PLMap::identity());
  CHECK(std::get<PLMap>(same.limit()) == PLMap::tent());

  const NDSystem c = conjugate_system(tent, h);
  const PLMap& g = std::get<PLMap>(c.limit());
  CHECK_FALSE(slope_profile(g).constant_abs_slope);
  CHECK(equivalent(compose(g, h), compose(h, PLMap::tent())));
  CHECK(test_transitivity(g, r(1, 8), 32).transitive_on_grid == test_transitivity(PLMap::tent(), r(1, 8), 32).transitive_on_grid);

  // CC* transport: distances shrink at most through the modulus of h.
  const NDSystem fam({}, std::make_shared<BumpPerturbationFamily>(PLMap::tent(), r(1, 4), r(1, 8), r(1, 16), r(1, 2)));
  const NDSystem cfam = conjugate_system(fam, h);
  SweepOptions o;
  o.N_max = 4;
  o.K_max = 3;
  const auto a = check_CCstar(fam, r(1, 2), o);
  const auto b = check_CCstar(cfam, r(1, 2), o);
  for (int n = 1; n <= 4; ++n) {
    CHECK(b.trace[n - 1].value <= modulus_of_continuity(h, a.trace[n - 1].value + Rational(1, 1000000)));
  }
  const PLMap flat({r(0), r(1, 2), r(1)}, {r(0), r(0), r(1)});
  CHECK_THROWS_AS(conjugate_system(tent, flat), PreconditionError);
}

TEST_CASE("equivalence instances") {
  const NDSystem g1({}, std::make_shared<RotationDyadicFamily>());
  const auto a = check_equivalence_instance(g1, r(1, 20), 32, 64);
  CHECK(a.status == EquivalenceStatus::Consistent);
  CHECK_FALSE(a.window_hitting);
  CHECK_FALSE(a.dense_orbit);
  CHECK_FALSE(a.limit_transitive);

  const NDSystem g2({}, std::make_shared<RotationConvergentFamily>("golden", 2));
  const auto b = check_equivalence_instance(g2, r(1, 20), 32, 64);
  CHECK(b.status == EquivalenceStatus::Consistent);
  CHECK(b.window_hitting);
  CHECK(b.dense_orbit);
  CHECK(b.limit_transitive);

  const auto c = check_equivalence_instance(NDSystem::constant(RotationMap::identity()), r(1, 20), 16, 16);
  CHECK(c.status == EquivalenceStatus::Consistent);
  CHECK_FALSE(c.dense_orbit);
}
