// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "nds/errors.hpp"
#include "nds/gallery.hpp"
#include "nds/kernels.hpp"
#include "property_suite.hpp"

using namespace nds;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::string tolerance;
  double budget_s;
  std::function<Outcome()> run;
};

// Passes when every assertion of the entry whose description matches `keep` passes.
Outcome gallery_subset(const std::string& id, const Json& params, const std::function<bool(const std::string&)>& keep) {
  const GalleryReport rep = run_gallery_entry(build_gallery_entry(id, params));
  std::size_t n = 0, bad = 0;
  std::string first;
  for (const auto& a : rep.results) {
    if (!keep(a.description)) continue;
    ++n;
    if (!a.passed) {
      if (bad++ == 0) first = a.description + ": expected " + a.expected + ", got " + a.actual + a.error;
    }
  }
  std::ostringstream os;
  os << n - bad << "/" << n << " assertions";
  if (bad) os << "; first failure: " << first;
  return {n > 0 && bad == 0, os.str()};
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

Outcome criterion1() {
  return gallery_subset("G1-rotations-to-identity", Json{{"N", 16}},
                        [](const std::string& d) { return starts_with(d, "trace_"); });
}

Outcome criterion2() {
  return gallery_subset("G1-rotations-to-identity", Json{{"N", 16}, {"K_max", 4096}, {"eps_cc", "1/100"}},
                        [](const std::string& d) {
                          return starts_with(d, "CC") || starts_with(d, "DO*") || starts_with(d, "(f_n)^n(0)");
                        });
}

Outcome criterion3() {
  return gallery_subset("G3-cantor-adding-machine", Json{{"L", 32}, {"N", 12}, {"K_max", 4096}, {"samples", 100}},
                        [](const std::string& d) {
                          return starts_with(d, "max over k") || starts_with(d, "every tested word") ||
                                 starts_with(d, "rho(");
                        });
}

Outcome criterion4() {
  return gallery_subset(
      "G4-bump-reflection-pl-family",
      Json{{"m_max", 4}, {"pieces", 6}, {"samples", 50}, {"eps", "1/16"}, {"horizon", 40}},
      [](const std::string& d) {
        return starts_with(d, "f^2") || starts_with(d, "sup |f") || starts_with(d, "agreement_measure") ||
               starts_with(d, "f is transitive");
      });
}

// Fixed points of a PL map by solving x = y0 + s (x - x0) on every piece.
std::vector<Rational> per_piece_fixed_points(const PLMap& f) {
  std::vector<Rational> out;
  const auto& xs = f.breakpoints();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const Rational s = f.slope(i);
    if (s == 1) continue;
    const Rational x = (f(xs[i]) - s * xs[i]) / (Rational(1) - s);
    if (xs[i] <= x && x <= xs[i + 1]) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Outcome criterion5() {
  const PLMap T = PLMap::tent();
  const auto oracle_fix = per_piece_fixed_points(T);
  const bool fix_ok = fixed_points(T).points == oracle_fix &&
                      oracle_fix == std::vector<Rational>{Rational(0), Rational(2, 3)};
  Outcome g = gallery_subset("G5-tent-constant-slope",
                             Json{{"eps", "1/8"}, {"horizon", 16}, {"delta", "1/4"}, {"probe_grid", 32}},
                             [](const std::string&) { return true; });
  g.pass = g.pass && fix_ok;
  g.detail += fix_ok ? "; per-piece fixed points {0, 2/3}" : "; per-piece fixed point oracle disagrees";
  return g;
}

// Perturbation supports avoid the depth-3 preimage tree of Fix(T).
struct BumpSpec {
  Rational center, half_width, height;
};

BumpSpec random_bump(std::mt19937_64& rng, const IntervalUnion& avoid) {
  const PLMap T = PLMap::tent();
  for (;;) {
    const Rational c(static_cast<long>(rng() % 254) + 1, 256);
    const Rational w(1, 1L << (8 + rng() % 3));
    const Rational h = Rational(static_cast<long>(rng() % 4) + 1, 128) * ((rng() & 1) ? 1 : -1);
    if (!(0 < c - w && c + w < 1)) continue;
    bool clear = true;
    for (const auto& p : avoid.parts()) clear = clear && (p.hi < c - w || c + w < p.lo);
    if (!clear) continue;
    try {
      bump_perturbation(T, c, w, h);
    } catch (const DomainError&) {
      continue;
    }
    return {c, w, h};
  }
}

Outcome criterion6() {
  const PLMap T = PLMap::tent();
  IntervalUnion fix;
  for (const auto& p : fixed_points(T).points) fix.add(RationalInterval(p, p));
  const IntervalUnion tree = preimage_tree(T, fix, 3);
  std::mt19937_64 rng(0xacce55);
  SweepOptions opt;
  opt.N_max = 32;
  opt.K_max = 4096;
  const Rational eps(1, 8);
  int tail_ok = 0, persistent_ok = 0, theorem_failures = 0;
  std::string first;
  for (int i = 0; i < 20; ++i) {
    const int n0 = 1 + static_cast<int>(rng() % 24);
    std::vector<Map> prefix;
    for (int n = 1; n < n0; ++n) {
      const BumpSpec b = random_bump(rng, tree);
      prefix.emplace_back(bump_perturbation(T, b.center, b.half_width, b.height));
    }
    const auto rep = check_eventual_equality(NDSystem(Space::Interval, prefix, T), eps, opt);
    theorem_failures += rep.status == EventualStatus::TheoremCheckFailure;
    if (rep.status == EventualStatus::EventualEquality && rep.n0 == n0) {
      ++tail_ok;
    } else if (first.empty()) {
      first = "tail family " + std::to_string(i) + ": expected n0 " + std::to_string(n0) + ", got " +
              std::string(to_string(rep.status)) + (rep.n0 ? " n0 " + std::to_string(*rep.n0) : "");
    }
  }
  for (int i = 0; i < 20; ++i) {
    const BumpSpec b = random_bump(rng, tree);
    const Rational ratio = std::vector<Rational>{Rational(1, 2), Rational(3, 4), Rational(1)}[rng() % 3];
    const NDSystem sys({}, std::make_shared<BumpPerturbationFamily>(T, b.center, b.half_width, b.height, ratio));
    const auto rep = check_eventual_equality(sys, eps, opt);
    theorem_failures += rep.status == EventualStatus::TheoremCheckFailure;
    const bool never_agrees = rep.agreement.size() == 32 && !rep.n0;
    const bool witnessed = rep.status == EventualStatus::ConsistentViolation && rep.ccstar &&
                           rep.ccstar->witness && witness_reproduces(sys, *rep.ccstar);
    if (never_agrees && witnessed) {
      ++persistent_ok;
    } else if (first.empty()) {
      first = "persistent family " + std::to_string(i) + ": " + std::string(to_string(rep.status));
    }
  }
  std::ostringstream os;
  os << "tail-constant n0 correct " << tail_ok << "/20, persistent with CC* witness " << persistent_ok
     << "/20, theorem-check failures " << theorem_failures;
  if (!first.empty()) os << "; first miss: " << first;
  return {tail_ok == 20 && persistent_ok == 20 && theorem_failures == 0, os.str()};
}

Outcome criterion7() {
  const Rational eps(1, 20);
  SweepOptions opt;
  const auto g1 = check_equivalence_instance(build_gallery_entry("G1-rotations-to-identity").system, eps, 32, 64, opt);
  const auto g2 =
      check_equivalence_instance(build_gallery_entry("G2-rational-to-irrational-rotation").system, eps, 32, 64, opt);
  auto flags = [](const EquivalenceReport& r) {
    return std::string(r.window_hitting ? "1" : "0") + (r.dense_orbit ? "1" : "0") + (r.limit_transitive ? "1" : "0");
  };
  const bool ok = g1.status == EquivalenceStatus::Consistent && flags(g1) == "000" &&
                  g2.status == EquivalenceStatus::Consistent && flags(g2) == "111";
  return {ok, "G1 (1)(3)(4) = " + flags(g1) + " " + std::string(to_string(g1.status)) + ", G2 = " + flags(g2) + " " +
                  std::string(to_string(g2.status))};
}

Outcome criterion8() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& r : props::run_all(0x5eed, 200)) {
    ok = ok && r.failures == 0 && r.instances >= 200;
    os << r.name << " " << r.instances - r.failures << "/" << r.instances << "; ";
    if (r.failures) os << "(first failure " << r.first_failure << ") ";
  }
  return {ok, os.str()};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "G1 rotation traces, n = 1..16", "exact equality", 1, criterion1},
      {2, "G1 verdicts: CC proof, CC* witness k = 2^(n-1) at 1/2 for n <= 12, DO* < 1", "exact", 5, criterion2},
      {3, "G3 bound 1/(n+1), L = 32, n <= 12, k <= 4096, 100 words; period divides 2^n", "exact inequality", 30,
       criterion3},
      {4, "G4 family, m = 1..4, 6 pieces: f^2 agreement, sup 1/2^(2n+1), agreement measure, transitivity",
       "exact", 60, criterion4},
      {5, "tent suite: Fix, preimage tree, transitivity n <= 6, sensitivity at delta = 1/4", "exact", 10,
       criterion5},
      {6, "eventual-equality harness, 20 tail-constant + 20 persistent families, N = 32, K = 4096",
       "exact n0; no theorem-check failure", 120, criterion6},
      {7, "equivalence instances at eps = 1/20: G1 all false, G2 all true", "exact booleans", 30, criterion7},
      {8, "property suites, 200 instances each", "zero failures", 60, criterion8},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.budget_s;
    failed += !pass;
    std::printf("criterion %d: %s  %s [tolerance: %s; %.2f s of %.0f s] %s\n", c.id, pass ? "PASS" : "FAIL",
                c.title.c_str(), c.tolerance.c_str(), secs, c.budget_s, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
