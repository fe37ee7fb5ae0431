#pragma once

// Randomized property checks shared by test_properties and the acceptance run.

#include <algorithm>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nds/conditions.hpp"
#include "nds/pl_map.hpp"

namespace nds::props {

struct PropertyResult {
  std::string name;
  int instances = 0;
  int failures = 0;
  std::string first_failure;
};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::uint64_t bits() { return rng_(); }

  /// p/q in [0,1] with q <= max_den.
  Rational unit(int max_den = 16) {
    const int q = uniform(1, max_den);
    return Rational(uniform(0, q), q);
  }

  PLMap pl(int max_pieces = 4) {
    const int pieces = uniform(1, max_pieces);
    std::vector<Rational> xs{0, 1};
    while (static_cast<int>(xs.size()) < pieces + 1) {
      const Rational x = unit(12);
      if (0 < x && x < 1 && std::find(xs.begin(), xs.end(), x) == xs.end()) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Rational> ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(unit(8));
    return PLMap(xs, ys);
  }

  Point point(Space s) {
    switch (s) {
      case Space::Interval: return IntervalPoint(unit(64));
      case Space::Circle: return CirclePoint(Rational(uniform(0, 63), 64) + Rational(uniform(0, 9), 640));
      case Space::Cantor: return CantorWord(bits() & 0xffffULL, 16);
    }
    return IntervalPoint(0);
  }

 private:
  std::mt19937_64 rng_;
};

inline void record(PropertyResult& r, bool ok, const std::function<std::string()>& what) {
  ++r.instances;
  if (!ok) {
    if (r.failures == 0) r.first_failure = what();
    ++r.failures;
  }
}

inline PropertyResult metric_axioms(Gen& g, int n) {
  PropertyResult r{"metric axioms (interval, circle, Cantor)"};
  for (Space s : {Space::Interval, Space::Circle, Space::Cantor}) {
    for (int i = 0; i < n; ++i) {
      const Point x = g.point(s), y = g.point(s), z = g.point(s);
      const Rational dxy = metric(x, y);
      const bool ok = metric(x, x) == 0 && dxy == metric(y, x) && (dxy == 0) == (x == y) && 0 <= dxy &&
                      metric(x, z) <= dxy + metric(y, z);
      record(r, ok, [&] { return to_string(x) + " " + to_string(y) + " " + to_string(z); });
    }
  }
  return r;
}

inline PropertyResult compose_associativity(Gen& g, int n) {
  PropertyResult r{"compose associativity"};
  for (int i = 0; i < n; ++i) {
    const PLMap f = g.pl(), h = g.pl(), k = g.pl();
    const PLMap a = compose(f, compose(h, k)), b = compose(compose(f, h), k);
    bool ok = equivalent(a, b);
    for (int j = 0; j < 4 && ok; ++j) {
      const Rational x = g.unit(97);
      ok = a(x) == f(h(k(x)));
    }
    record(r, ok, [&] { return "instance " + std::to_string(i); });
  }
  return r;
}

inline PropertyResult sup_distance_axioms(Gen& g, int n) {
  PropertyResult r{"sup_distance metric axioms"};
  for (int i = 0; i < n; ++i) {
    const PLMap f = g.pl(), h = g.pl(), k = g.pl();
    const Rational d = sup_distance(f, h);
    bool ok = sup_distance(f, f) == 0 && d == sup_distance(h, f) && (d == 0) == equivalent(f, h) &&
              sup_distance(f, k) <= d + sup_distance(h, k);
    // Lower bound by sampled differences, attained at a breakpoint.
    Rational best = 0;
    for (const auto& x : f.breakpoints()) best = max(best, (f(x) - h(x)).abs());
    for (const auto& x : h.breakpoints()) best = max(best, (f(x) - h(x)).abs());
    ok = ok && best == d;
    record(r, ok, [&] { return "instance " + std::to_string(i); });
  }
  return r;
}

inline PropertyResult preimage_consistency(Gen& g, int n) {
  PropertyResult r{"preimage/evaluate consistency"};
  for (int i = 0; i < n; ++i) {
    const PLMap f = g.pl();
    const Rational x = g.unit(64);
    const Rational y = f(x);
    const IntervalUnion pre = preimage(f, y);
    bool ok = pre.contains(x);
    for (const auto& p : pre.points()) ok = ok && f(p) == y;
    for (const auto& iv : pre.intervals()) ok = ok && f(iv.lo) == y && f(iv.hi) == y && f((iv.lo + iv.hi) / 2) == y;
    const Rational other = g.unit(16);
    const IntervalUnion pre2 = preimage(f, other);
    for (const auto& p : pre2.points()) ok = ok && f(p) == other;
    for (const auto& b : f.breakpoints()) {
      if (f(b) == other) ok = ok && pre2.contains(b);
    }
    record(r, ok, [&] { return "instance " + std::to_string(i) + " x = " + x.str(); });
  }
  return r;
}

inline PropertyResult cocycle_identity(Gen& g, int n) {
  PropertyResult r{"cocycle f_n^(k+l) = f_(n+k)^l o f_n^k"};
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      std::vector<Map> prefix;
      for (int j = 0; j < 5; ++j) prefix.emplace_back(g.pl(3));
      const NDSystem sys(Space::Interval, prefix, g.pl(3));
      const int s = g.uniform(1, 4), k = g.uniform(1, 3), l = g.uniform(1, 3);
      const auto whole = std::get<PLMap>(window_compose(sys, s, k + l).map);
      const auto first = std::get<PLMap>(window_compose(sys, s, k).map);
      const auto second = std::get<PLMap>(window_compose(sys, s + k, l).map);
      record(r, equivalent(whole, compose(second, first)), [&] { return "pl instance " + std::to_string(i); });
    } else {
      std::vector<Map> prefix;
      for (int j = 0; j < 4; ++j) prefix.emplace_back(RotationMap(g.unit(32)));
      const NDSystem sys(Space::Circle, prefix, RotationMap(g.unit(32)));
      const int s = g.uniform(1, 4), k = g.uniform(1, 4), l = g.uniform(1, 4);
      const RotationMap whole = window_rotation(sys, s, k + l);
      const RotationMap split = then(window_rotation(sys, s, k), window_rotation(sys, s + k, l));
      record(r, whole == split, [&] { return "rotation instance " + std::to_string(i); });
    }
  }
  return r;
}

inline PropertyResult coverage_monotone(Gen& g, int n) {
  PropertyResult r{"DO coverage nondecreasing in N"};
  for (int i = 0; i < n; ++i) {
    SweepOptions opt;
    opt.N_max = 10;
    opt.exec = Exec::Serial;
    const Rational eps(1, g.uniform(3, 12));
    const bool circle = i % 2 == 0;
    const NDSystem sys = circle ? NDSystem(Space::Circle, {RotationMap(g.unit(32)), RotationMap(g.unit(32))},
                                           RotationMap(g.unit(64)))
                                : NDSystem(Space::Interval, {Map(g.pl(3))}, PLMap::tent());
    const Point x0 = g.point(circle ? Space::Circle : Space::Interval);
    const ConditionReport rep = (i % 4 < 2) ? check_DO(sys, x0, eps, opt) : check_DOstar(sys, x0, eps, opt);
    bool ok = static_cast<int>(rep.coverage.size()) == opt.N_max;
    for (std::size_t j = 0; j < rep.coverage.size(); ++j) {
      ok = ok && 0 <= rep.coverage[j].fraction && rep.coverage[j].fraction <= 1;
      if (j > 0) ok = ok && rep.coverage[j - 1].fraction <= rep.coverage[j].fraction;
    }
    record(r, ok, [&] { return "instance " + std::to_string(i); });
  }
  return r;
}

inline std::vector<PropertyResult> run_all(std::uint64_t seed, int n = 200) {
  Gen g(seed);
  return {metric_axioms(g, n),      compose_associativity(g, n), sup_distance_axioms(g, n),
          preimage_consistency(g, n), cocycle_identity(g, n),     coverage_monotone(g, n)};
}

}  // namespace nds::props
