#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nds/conditions.hpp"
#include "nds/errors.hpp"
#include "nds/reflection_family.hpp"

using namespace nds;

namespace {
Rational r(long p, long q = 1) { return Rational(p, q); }
NDSystem dyadic(int offset = 0) { return NDSystem({}, std::make_shared<RotationDyadicFamily>(offset)); }
Rational circ(const Rational& t) {
  const Rational f = t.frac();
  return min(f, Rational(1) - f);
}
SweepOptions opts(int N, int K) {
  SweepOptions o;
  o.N_max = N;
  o.K_max = K;
  return o;
}
NDSystem bumped_tent(const Rational& amplitude, const Rational& ratio) {
  return NDSystem({}, std::make_shared<BumpPerturbationFamily>(PLMap::tent(), r(1, 8), r(1, 16), amplitude, ratio));
}
}  // namespace

TEST_CASE("rotation traces for L and L*") {
  const NDSystem sys = dyadic();
  const auto l = check_L(sys, r(1, 8), opts(16, 1));
  const auto ls = check_Lstar(sys, r(1, 8), opts(16, 1));
  REQUIRE(l.trace.size() == 16);
  for (int n = 1; n <= 16; ++n) {
    Rational sum = 0;
    for (int j = n; j <= 2 * n - 1; ++j) sum += Rational(1, 1L << j);
    const Rational q(n, 1L << n);
    CHECK(l.trace[n - 1].value == circ(sum));
    CHECK(ls.trace[n - 1].value == min(q, Rational(1) - q));
    if (n >= 2) CHECK(l.trace[n - 1].value < q);
  }
  CHECK(ls.trace[2].value == r(3, 8));
  CHECK(l.verdict == Verdict::ExactProof);
  CHECK(ls.verdict == Verdict::ExactProof);
  CHECK(ls.formula_match == true);
  CHECK(ls.certificate.has_value());
}

TEST_CASE("rotation CC holds and CC* fails") {
  const NDSystem sys = dyadic();
  const auto cc = check_CC(sys, r(1, 100), opts(8, 16));
  for (int n = 2; n <= 8; ++n) {
    Rational sum = 0;
    for (int j = n; j <= n + 15; ++j) sum += Rational::pow2(-j);
    CHECK(cc.trace[n - 1].value == sum);
    CHECK(cc.trace[n - 1].value < Rational::pow2(-(n - 1)));
  }
  CHECK(cc.trace[0].value == r(1, 2));
  CHECK(cc.verdict == Verdict::ExactProof);
  CHECK(cc.n0 == 8);  // 1/2^7 = 1/128 < 1/100 <= 1/64

  const auto cs = check_CCstar(sys, r(1, 100), opts(8, 4096));
  CHECK(cs.verdict == Verdict::FailsWithWitness);
  for (int n = 1; n <= 8; ++n) {
    CHECK(cs.trace[n - 1].value == r(1, 2));
    CHECK(cs.trace[n - 1].k == (1 << (n - 1)));
  }
  REQUIRE(cs.witness.has_value());
  CHECK(cs.witness->k == 128);
  CHECK(cs.witness->distance == r(1, 2));
  CHECK(witness_reproduces(sys, cs));

  const auto far = check_CCstar(sys, r(1, 100), opts(40, 64));
  REQUIRE(far.witness.has_value());
  CHECK(far.witness->k == (1L << 39));
  CHECK(witness_reproduces(sys, far));
}

TEST_CASE("adding machine conditions") {
  const NDSystem sys({}, std::make_shared<AddingMachineFamily>(16));
  const auto cs = check_CCstar(sys, r(1, 10), opts(20, 64));
  for (int n = 1; n <= 20; ++n) {
    const Rational bound(1, n + 1);
    CHECK(cs.trace[n - 1].value <= bound);
    if (n < 16) CHECK(cs.trace[n - 1].value == bound);
  }
  CHECK(cs.verdict == Verdict::ExactProof);
  CHECK(cs.n0 == 10);
  CHECK(check_CC(sys, r(1, 100), opts(4, 8)).n0 == 100);
  CHECK(check_CCstar(sys, r(1, 6), opts(4, 8)).n0 == 6);
  const auto ls = check_Lstar(sys, r(1, 4), opts(12, 1));
  CHECK(ls.verdict == Verdict::ExactProof);
  CHECK(ls.basis == "sampled-words");
}

TEST_CASE("constant families have zero traces") {
  const NDSystem sys = NDSystem::constant(PLMap::tent());
  for (const auto& rep : {check_CC(sys, r(1, 8), opts(6, 8)), check_CCstar(sys, r(1, 8), opts(6, 8)),
                          check_L(sys, r(1, 8), opts(6, 1)), check_Lstar(sys, r(1, 8), opts(6, 1))}) {
    for (const auto& t : rep.trace) CHECK(t.value == 0);
    CHECK(rep.verdict == Verdict::ExactProof);
  }
  CHECK(check_CC(sys, r(1, 1000), opts(6, 8)).n0 == 1);
  const NDSystem ident = NDSystem::constant(RotationMap::identity());
  const auto d = check_DOstar(ident, CirclePoint(r(1, 3)), r(1, 8), opts(10, 1));
  CHECK(d.verdict == Verdict::FailsWithWitness);
  for (const auto& c : d.coverage) CHECK(c.fraction == d.coverage.front().fraction);
  CHECK(d.coverage.front().fraction < r(1, 2));
}

TEST_CASE("reflection family CC*") {
  const NDSystem sys({}, std::make_shared<ReflectionFamily>());
  const auto cs = check_CCstar(sys, r(1, 100), opts(4, 16));
  for (int n = 1; n <= 4; ++n) CHECK(cs.trace[n - 1].value == Rational::pow2(-(2 * n + 1)));
  CHECK(cs.verdict == Verdict::ExactProof);
  CHECK(cs.n0 == 3);
  CHECK(cs.formula_match == true);
  CHECK(cs.trace[0].k == 1);
}

TEST_CASE("DO* coverage on rotations") {
  const NDSystem sys = dyadic();
  const auto d = check_DOstar(sys, CirclePoint(0), r(1, 16), opts(12, 1));
  CHECK(d.verdict == Verdict::FailsWithWitness);
  CHECK(d.coverage.back().fraction < 1);
  for (std::size_t i = 1; i < d.coverage.size(); ++i) CHECK(d.coverage[i - 1].fraction <= d.coverage[i].fraction);
  REQUIRE(d.witness.has_value());
  const Rational wx = std::get<CirclePoint>(*d.witness->x).fraction;
  CHECK(r(1, 2) < wx);
  CHECK(witness_reproduces(sys, d));

  const NDSystem g2({}, std::make_shared<RotationConvergentFamily>("golden", 2));
  const auto c = check_DOstar(g2, CirclePoint(0), r(1, 20), opts(40, 1));
  CHECK(c.verdict == Verdict::HoldsOnTruncation);
  REQUIRE(c.n0.has_value());
  CHECK(c.coverage[*c.n0 - 1].fraction == 1);
  CHECK(c.coverage[*c.n0 - 2].fraction < 1);
}

TEST_CASE("persistent perturbations fail CC* on the truncation") {
  const NDSystem sys = bumped_tent(r(1, 8), r(1, 2));
  const auto cs = check_CCstar(sys, r(1, 8), opts(6, 64));
  CHECK(cs.basis != "");
  if (cs.verdict == Verdict::FailsWithWitness) CHECK(witness_reproduces(sys, cs));
  const auto big = check_CCstar(sys, r(1, 8), opts(8, 64));
  if (cs.verdict == Verdict::FailsWithWitness) CHECK(big.verdict == Verdict::FailsWithWitness);
  CHECK(!cs.certificate.has_value());
}

TEST_CASE("serial and parallel sweeps agree") {
  const NDSystem sys = bumped_tent(r(1, 16), r(1, 2));
  SweepOptions a = opts(5, 32), b = opts(5, 32);
  a.exec = Exec::Serial;
  b.exec = Exec::Parallel;
  CHECK(to_json(check_CC(sys, r(1, 64), a)) == to_json(check_CC(sys, r(1, 64), b)));
  const NDSystem am({}, std::make_shared<AddingMachineFamily>(20));
  CHECK(to_json(check_CC(am, r(1, 64), a)) == to_json(check_CC(am, r(1, 64), b)));
}

TEST_CASE("report serialization") {
  const NDSystem sys = dyadic();
  for (const auto& rep : {check_CCstar(sys, r(1, 8), opts(6, 64)), check_Lstar(sys, r(1, 8), opts(6, 1)),
                          check_DOstar(sys, CirclePoint(r(1, 3)), r(1, 8), opts(6, 1))}) {
    const Json j = to_json(rep);
    CHECK(to_json(condition_report_from_json(j)) == j);
  }
  const NDSystem am({}, std::make_shared<AddingMachineFamily>(12));
  const Json j = to_json(check_DO(am, CantorWord(0, 12), r(1, 3), opts(8, 1)));
  CHECK(to_json(condition_report_from_json(j)) == j);
  Json bad = j;
  bad["extra"] = 1;
  CHECK_THROWS_AS(condition_report_from_json(bad), ConfigError);
  CHECK(to_json(check_L(sys, r(1, 8), opts(3, 1)))["trace"][2]["value"] == "7/32");
}

TEST_CASE("argument errors") {
  const NDSystem sys = dyadic();
  CHECK_THROWS_AS(check_CC(sys, r(0), opts(4, 4)), DomainError);
  CHECK_THROWS_AS(check_CCstar(sys, r(-1, 2), opts(4, 4)), DomainError);
  CHECK_THROWS_AS(check_DO(sys, CirclePoint(0), r(0), opts(4, 1)), DomainError);
  CHECK_THROWS_AS(check_L(sys, r(1, 8), opts(0, 1)), DomainError);
  CHECK_THROWS_AS(check_DO(sys, IntervalPoint(r(1, 2)), r(1, 8), opts(4, 1)), UsageError);
}

TEST_CASE("rotation orbit sup") {
  const auto [d, k] = rotation_orbit_sup(r(3, 8));
  CHECK(d == r(1, 2));
  CHECK((Rational(k) * r(3, 8)).frac() == r(1, 2));
  const auto [d2, k2] = rotation_orbit_sup(r(2, 5));
  CHECK(d2 == r(2, 5));
  CHECK(circ(Rational(k2) * r(2, 5)) == r(2, 5));
  CHECK(rotation_orbit_sup(r(0)).first == 0);
}

TEST_CASE("enlarging K_max never turns a failure into a pass") {
  const NDSystem bump({}, std::make_shared<BumpPerturbationFamily>(PLMap::tent(), r(1, 4), r(1, 16), r(1, 16), r(1, 2)));
  for (const NDSystem& sys : {dyadic(), bump}) {
    bool failed = false;
    for (int K : {1, 2, 4, 16, 64}) {
      const auto rep = check_CCstar(sys, r(1, 8), opts(6, K));
      if (failed) CHECK(rep.verdict == Verdict::FailsWithWitness);
      failed = failed || rep.verdict == Verdict::FailsWithWitness;
      for (std::size_t n = 0; n < rep.trace.size(); ++n) CHECK(rep.trace[n].value <= Rational(1));
    }
    CHECK(failed);
  }
}

TEST_CASE("enlarging N_max keeps verdicts for monotone traces") {
  // Adding machine traces 1/(n+1) decrease in n; dyadic CC* traces stay at 1/2.
  const NDSystem odometer({}, std::make_shared<AddingMachineFamily>(32));
  for (int N = 1; N <= 12; ++N) {
    CHECK(check_CCstar(dyadic(), r(1, 8), opts(N, 4096)).verdict == Verdict::FailsWithWitness);
    // The closed form proves n0 = 5 whatever the truncation.
    const auto rep = check_CCstar(odometer, r(1, 5), opts(N, 64));
    CHECK(rep.verdict == Verdict::ExactProof);
    CHECK(rep.n0 == 5);
  }
}
