#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nds/errors.hpp"
#include "nds/phase_spaces.hpp"

using namespace nds;

TEST_CASE("rational parsing and formatting") {
  CHECK(Rational::parse("6/8").str() == "3/4");
  CHECK(Rational::parse("-2").str() == "-2/1");
  CHECK(Rational(0).str() == "0/1");
  CHECK_THROWS_AS(Rational::parse("0.5"), UsageError);
  CHECK_THROWS_AS(Rational::parse("1/0"), DomainError);
  CHECK(Rational(1, 3).decimal() == "0.333333333333");
  CHECK(Rational::pow2(-3) == Rational(1, 8));
  CHECK(Rational(7, 3).frac() == Rational(1, 3));
  CHECK(Rational(-1, 4).frac() == Rational(3, 4));
}

TEST_CASE("metric examples") {
  CHECK(metric(CirclePoint(0), CirclePoint(Rational(3, 4))) == Rational(1, 4));
  CHECK(metric(CantorWord::parse("111000"), CantorWord::parse("110000")) == Rational(1, 3));
  const Point x = IntervalPoint(Rational(2, 7));
  CHECK(metric(x, x) == 0);
  CHECK_THROWS_AS(metric(IntervalPoint(0), CirclePoint(0)), UsageError);
}

TEST_CASE("epsilon nets") {
  auto values = [](const std::vector<Point>& net) {
    std::vector<std::string> out;
    for (const auto& p : net) out.push_back(to_string(p));
    return out;
  };
  CHECK(values(epsilon_net(Space::Interval, Rational(1, 2))) ==
        std::vector<std::string>{"0/1", "1/2", "1/1"});
  CHECK(values(epsilon_net(Space::Circle, Rational(1, 4))) ==
        std::vector<std::string>{"0/1", "1/4", "1/2", "3/4"});
  const auto cantor = epsilon_net(Space::Cantor, Rational(1, 3), 4);
  CHECK(cantor.size() == 8);
  // Brute-force cover check over all 16 words of length 4.
  for (std::uint64_t w = 0; w < 16; ++w) {
    bool covered = false;
    for (const auto& p : cantor) covered = covered || ball_contains(p, Rational(1, 3), CantorWord(w, 4));
    CHECK(covered);
  }
  CHECK_THROWS_AS(epsilon_net(Space::Interval, Rational(0)), DomainError);
}

TEST_CASE("strict balls") {
  CHECK_FALSE(ball_contains(CirclePoint(0), Rational(1, 2), CirclePoint(Rational(1, 2))));
  CHECK(ball_contains(IntervalPoint(Rational(1, 3)), Rational(1, 6), IntervalPoint(Rational(1, 4))));
  CHECK_FALSE(ball_contains(CantorWord::parse("0000"), Rational(1, 2), CantorWord::parse("0100")));
}

TEST_CASE("interval unions merge touching members") {
  IntervalUnion u;
  u.add({Rational(1, 2), Rational(3, 4)});
  u.add({Rational(0), Rational(1, 4)});
  u.add({Rational(1, 4), Rational(1, 3)});
  REQUIRE(u.size() == 2);
  CHECK(u.parts()[0] == RationalInterval(0, Rational(1, 3)));
  CHECK(u.measure() == Rational(1, 3) + Rational(1, 4));
}

TEST_CASE("open set intersection") {
  CHECK(open_sets_meet({0, Rational(1, 2)}, {Rational(1, 4), 1}));
  CHECK_FALSE(open_sets_meet({0, Rational(1, 2)}, {Rational(1, 2), 1}));
  CHECK(open_sets_meet({Rational(1, 3), Rational(1, 3)}, {0, Rational(1, 2)}));
  CHECK_FALSE(open_sets_meet({Rational(1, 2), Rational(1, 2)}, {0, Rational(1, 2)}));
}
