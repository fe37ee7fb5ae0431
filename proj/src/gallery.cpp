#include "nds/gallery.hpp"

#include <mutex>
#include <random>

#include "nds/errors.hpp"
#include "nds/kernels.hpp"
#include "nds/reflection_family.hpp"
#include "nds/serialization.hpp"

namespace nds {

namespace {

template <class T>
std::function<const T&()> lazy(std::function<T()> make) {
  auto flag = std::make_shared<std::once_flag>();
  auto slot = std::make_shared<std::optional<T>>();
  return [flag, slot, make]() -> const T& {
    std::call_once(*flag, [&] { *slot = make(); });
    return **slot;
  };
}

class Builder {
 public:
  explicit Builder(std::vector<GalleryAssertion>& out) : out_(out) {}

  void check(std::string description, std::string expected, std::string basis, std::function<std::string()> actual,
             std::function<bool()> ok) {
    out_.push_back({std::move(description), std::move(expected), std::move(basis), std::move(actual), std::move(ok)});
  }
  void equal(std::string description, const Rational& expected, std::string basis, std::function<Rational()> actual) {
    check(std::move(description), expected.str(), std::move(basis), [actual] { return actual().str(); },
          [actual, expected] { return actual() == expected; });
  }
  void at_most(std::string description, const Rational& bound, std::string basis, std::function<Rational()> actual) {
    check(std::move(description), "<= " + bound.str(), std::move(basis), [actual] { return actual().str(); },
          [actual, bound] { return actual() <= bound; });
  }
  void holds(std::string description, std::string basis, std::function<bool()> ok) {
    check(std::move(description), "true", std::move(basis), [ok] { return ok() ? "true" : "false"; }, ok);
  }

 private:
  std::vector<GalleryAssertion>& out_;
};

// Merges user params over defaults, rejecting unknown keys.
Json merge_params(const std::string& id, const Json& defaults, const Json& params) {
  if (!params.is_object()) throw ConfigError("params", "expected an object");
  Json out = defaults;
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!defaults.contains(it.key())) throw ConfigError("params." + it.key(), "unknown parameter for " + id);
    out[it.key()] = it.value();
  }
  return out;
}

int int_param(const Json& p, const std::string& key, long lo, long hi) {
  return static_cast<int>(integer_from_json(p.at(key), "params." + key, lo, hi));
}

Rational eps_param(const Json& p, const std::string& key) {
  return positive_fraction_from_json(p.at(key), "params." + key);
}

std::string join(const std::vector<Rational>& xs) {
  std::string s = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i].str();
  return s + "}";
}

SweepOptions sweep(int N, int K) {
  SweepOptions o;
  o.N_max = N;
  o.K_max = K;
  return o;
}

// ---- G1 --------------------------------------------------------------------

GalleryEntry build_g1(const Json& p) {
  const int N = int_param(p, "N", 1, 62);
  const int offset = int_param(p, "offset", 0, 8);
  const int K = int_param(p, "K_max", 1, 1 << 20);
  const Rational eps_cc = eps_param(p, "eps_cc");
  const Rational eps_do = eps_param(p, "eps_do");
  GalleryEntry e{"G1-rotations-to-identity", p, NDSystem({}, std::make_shared<RotationDyadicFamily>(offset)), {}, {}};
  const NDSystem sys = e.system;
  e.notes.push_back("f_n is the rotation by 1/2^n of a circle of circumference 1");
  e.notes.push_back("each f_n is a rational rotation: every orbit is finite, so f_n is asserted not transitive");
  Builder b(e.assertions);
  auto lstar = lazy<ConditionReport>([=] { return check_Lstar(sys, Rational(1, 8), sweep(N, 1)); });
  auto l = lazy<ConditionReport>([=] { return check_L(sys, Rational(1, 8), sweep(N, 1)); });
  for (int n = 1; n <= N; ++n) {
    const Rational q = Rational(n) * Rational::pow2(-n);
    b.equal("trace_Lstar(" + std::to_string(n) + ") = min(n/2^n, 1 - n/2^n)", min(q, Rational(1) - q), "stated",
            [=] { return lstar().trace.at(static_cast<std::size_t>(n - 1)).value; });
    Rational sum = 0;
    for (int j = n; j <= 2 * n - 1; ++j) sum += Rational::pow2(-j);
    b.equal("trace_L(" + std::to_string(n) + ") = sum_{j=n}^{2n-1} 2^-j", sum, "stated",
            [=] { return l().trace.at(static_cast<std::size_t>(n - 1)).value; });
  }
  auto cc = lazy<ConditionReport>([=] { return check_CC(sys, eps_cc, sweep(N, K)); });
  b.check("CC holds with a closed-form certificate", "exact-proof", "stated",
          [=] { return std::string(to_string(cc().verdict)); },
          [=] { return cc().verdict == Verdict::ExactProof && cc().certificate.has_value(); });
  const int n_star = std::min(N, 12);
  auto ccs = lazy<ConditionReport>([=] { return check_CCstar(sys, eps_cc, sweep(n_star, K)); });
  for (int n = 1; n <= n_star; ++n) {
    const long k = 1L << (n - 1);
    b.check("CC* at n = " + std::to_string(n) + ": distance 1/2 first reached at k = 2^(n-1)",
            "1/2 at k = " + std::to_string(k), "stated",
            [=] {
              const auto& t = ccs().trace.at(static_cast<std::size_t>(n - 1));
              return t.value.str() + " at k = " + std::to_string(t.k);
            },
            [=] {
              const auto& t = ccs().trace.at(static_cast<std::size_t>(n - 1));
              return t.value == Rational(1, 2) && t.k == k;
            });
  }
  b.holds("CC* fails with a re-verifiable witness", "stated",
          [=] { return ccs().verdict == Verdict::FailsWithWitness && witness_reproduces(sys, ccs()); });
  auto dos = lazy<ConditionReport>([=] { return check_DOstar(sys, CirclePoint(0), eps_do, sweep(N, 1)); });
  b.check("DO* coverage at eps_do stays below 1", "< 1", "stated",
          [=] { return dos().coverage.back().fraction.str(); }, [=] { return dos().coverage.back().fraction < 1; });
  b.holds("(f_n)^n(0) all lie in the half circle [0, 1/2]", "stated", [=] {
    for (const auto& entry : orbit(sys, CirclePoint(0), N, OrbitKind::DiagonalFiber).entries) {
      if (Rational(1, 2) < std::get<CirclePoint>(entry.second).fraction) return false;
    }
    return true;
  });
  b.holds("DO* witness is an uncovered point of the far half circle", "oracle", [=] {
    const auto& w = dos().witness;
    return w && w->x && Rational(1, 2) < std::get<CirclePoint>(*w->x).fraction && witness_reproduces(sys, dos());
  });
  auto dd = lazy<ConditionReport>([=] { return check_DO(sys, CirclePoint(0), eps_do, sweep(N, 1)); });
  b.check("DO coverage at eps_do stays below 1", "< 1", "stated", [=] { return dd().coverage.back().fraction.str(); },
          [=] { return dd().coverage.back().fraction < 1; });
  for (int n = 1; n <= 3; ++n) {
    b.holds("f_" + std::to_string(n) + " has finite orbits and is not transitive", "structural", [=] {
      const auto rot = std::get<RotationMap>(sys.at(n));
      return rot.exact() && !test_transitivity(rot, Rational(1, 8), 64).transitive_on_grid;
    });
  }
  return e;
}

// ---- G2 --------------------------------------------------------------------

GalleryEntry build_g2(const Json& p) {
  const int N = int_param(p, "N", 1, 200);
  const int offset = int_param(p, "offset", 0, 64);
  const Rational eps = eps_param(p, "eps");
  const Json& t = p.at("target");
  if (!t.is_string() || !is_named_irrational(t.get<std::string>())) {
    throw ConfigError("params.target", "expected \"golden\" or \"silver\"");
  }
  const std::string target = t.get<std::string>();
  auto family = std::make_shared<RotationConvergentFamily>(target, offset);
  GalleryEntry e{"G2-rational-to-irrational-rotation", p, NDSystem({}, family), {}, {}};
  const NDSystem sys = e.system;
  e.notes.push_back("g_n are rotations by continued-fraction convergents of the " + target + " ratio; g_n -> g");
  e.notes.push_back("g is represented by a convergent with denominator above 10^40, tagged irrational");
  Builder b(e.assertions);
  b.holds("g is transitive (irrational rotation)", "stated",
          [=] { return test_transitivity(sys.limit(), eps, 64).transitive_on_grid; });
  for (int n = 1; n <= 4; ++n) {
    b.holds("g_" + std::to_string(n) + " is rational with every orbit of period q_n, not transitive", "stated", [=] {
      const auto g = std::get<RotationMap>(sys.at(n));
      const RotationMap gq = rotation_power(g, g.period().get_si());
      return g.exact() && gq.fraction == 0 && !test_transitivity(g, eps, 64).transitive_on_grid;
    });
  }
  const Rational alpha = std::get<RotationMap>(sys.limit()).fraction;
  for (int n = 1; n <= std::min(N, 12); ++n) {
    b.holds("d(g_" + std::to_string(n) + ", g) < 1/q_n^2", "oracle", [=] {
      const Rational f = family->fraction(n);
      const Rational q = Rational(f.denominator(), mpz_class(1));
      return circle_metric(f, alpha) < Rational(1) / (q * q);
    });
  }
  auto ls = lazy<ConditionReport>([=] { return check_Lstar(sys, eps, sweep(N, 1)); });
  b.check("L* holds on the truncation", "holds-on-truncation", "stated",
          [=] { return std::string(to_string(ls().verdict)); }, [=] { return ls().verdict != Verdict::FailsWithWitness; });
  auto dos = lazy<ConditionReport>([=] { return check_DOstar(sys, CirclePoint(0), eps, sweep(N, 1)); });
  b.check("DO* coverage reaches 1 at eps", "1", "oracle", [=] { return dos().coverage.back().fraction.str(); },
          [=] { return dos().verdict == Verdict::HoldsOnTruncation; });
  return e;
}

// ---- G3 --------------------------------------------------------------------

GalleryEntry build_g3(const Json& p) {
  const int L = int_param(p, "L", 2, 64);
  const Json& nj = p.at("n");
  const long n_raw = integer_from_json(nj, "params.n", 1, 64);
  if (n_raw >= L) throw ConfigError("params.n", "truncation n must be < L = " + std::to_string(L));
  const int n_ex = static_cast<int>(n_raw);
  const long N_raw = integer_from_json(p.at("N"), "params.N", 1, 64);
  if (N_raw >= L) throw ConfigError("params.N", "N must be < L = " + std::to_string(L));
  const int N = static_cast<int>(N_raw);
  const int K = int_param(p, "K_max", 1, 1 << 20);
  const int samples = int_param(p, "samples", 1, 100000);
  const std::uint64_t seed = static_cast<std::uint64_t>(integer_from_json(p.at("seed"), "params.seed", 0, INT64_MAX));
  GalleryEntry e{"G3-cantor-adding-machine", p, NDSystem({}, std::make_shared<AddingMachineFamily>(L)), {}, {}};
  const NDSystem sys = e.system;
  e.notes.push_back("words hold the first " + std::to_string(L) + " symbols; f_n adds 1 on the first n symbols");
  Builder b(e.assertions);
  std::mt19937_64 rng(seed);
  const std::uint64_t mask = L == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << L) - 1);
  auto words = std::make_shared<std::vector<std::uint64_t>>();
  for (int i = 0; i < samples; ++i) words->push_back(rng() & mask);

  b.at_most("rho((f_" + std::to_string(n_ex) + ")^5(x), f^5(x)) for x = 1^" + std::to_string(n_ex) + " 0 0 ...",
            Rational(1, n_ex + 1), "stated", [=] {
              CantorWord g((std::uint64_t{1} << n_ex) - 1, L), f = g;
              const AddingMachineMap fn(L, n_ex), full(L, std::nullopt);
              for (int k = 0; k < 5; ++k) {
                g = fn(g);
                f = full(f);
              }
              return cantor_metric(g, f);
            });
  auto divergence = lazy<std::vector<std::pair<Rational, int>>>([=] {
    std::vector<std::pair<Rational, int>> out;
    for (int n = 1; n <= N; ++n) {
      const auto res = kernels::cantor_divergence(*words, L, n, true, 1, K, Exec::Parallel);
      Rational worst = 0;
      int saturated = 0;
      for (const auto& r : res) {
        if (r.saturated) {
          ++saturated;
          continue;
        }
        worst = max(worst, r.value);
      }
      out.emplace_back(worst, saturated);
    }
    return out;
  });
  for (int n = 1; n <= N; ++n) {
    b.at_most("max over k <= " + std::to_string(K) + " and " + std::to_string(samples) +
                  " random words of rho((f_" + std::to_string(n) + ")^k(x), f^k(x))",
              Rational(1, n + 1), "stated", [=] { return divergence().at(static_cast<std::size_t>(n - 1)).first; });
    b.holds("every tested word is periodic under f_" + std::to_string(n) + " with period dividing 2^" +
                std::to_string(n),
            "stated", [=] {
              const AddingMachineMap fn(L, n);
              for (std::uint64_t w : *words) {
                CantorWord x(w, L), y = x;
                for (long k = 0; k < (1L << n); ++k) y = fn(y);
                if (!(y == x)) return false;
              }
              return true;
            });
  }
  b.check("words whose full orbit overflows the stored symbols (excluded from the bound)",
          "< " + std::to_string(samples) + " for every n", "structural",
          [=] {
            int worst = 0;
            for (const auto& d : divergence()) worst = std::max(worst, d.second);
            return std::to_string(worst);
          },
          [=] {
            for (const auto& d : divergence()) {
              if (d.second >= samples) return false;
            }
            return true;
          });
  auto ccs = lazy<ConditionReport>([=] { return check_CCstar(sys, Rational(1, 8), sweep(N, 64)); });
  b.check("CC* holds with a closed-form certificate", "exact-proof", "stated",
          [=] { return std::string(to_string(ccs().verdict)); },
          [=] { return ccs().verdict == Verdict::ExactProof && ccs().formula_match == true; });
  return e;
}

// ---- G4 --------------------------------------------------------------------

GalleryEntry build_g4(const Json& p) {
  const int M = int_param(p, "m_max", 1, 12);
  const int P = int_param(p, "pieces", 1, 20);
  const int S = int_param(p, "samples", 2, 1000);
  const Rational eps = eps_param(p, "eps");
  const int horizon = int_param(p, "horizon", 1, 1000);
  GalleryEntry e{"G4-bump-reflection-pl-family", p, NDSystem({}, std::make_shared<ReflectionFamily>()), {}, {}};
  const NDSystem sys = e.system;
  e.notes.push_back("f has infinitely many pieces accumulating at 1/2 and 1; f_m reflects the left bumps n >= m");
  Builder b(e.assertions);
  const LazyPLMapPtr f = reflection_limit_map();
  for (int m = 1; m <= M; ++m) {
    const LazyPLMapPtr fm = reflection_fiber_map(m);
    const std::string ms = std::to_string(m);
    b.holds("f_" + ms + " agrees with f off the pieces n >= " + ms + " (" + std::to_string(4 * S) + " samples)",
            "oracle", [=] {
              for (int j = 0; j <= 4 * S; ++j) {
                const Rational x(j, 4 * S);
                bool modified = false;
                for (int n = m; n <= m + 60 && !modified; ++n) {
                  const auto piece = reflection_piece(n);
                  modified = piece.start < x && x < piece.end;
                }
                if (!modified && Rational(1, 2) - Rational::pow2(-100) < x && x < Rational(1, 2)) continue;
                if (!modified && (*f)(x) != (*fm)(x)) return false;
              }
              return true;
            });
    for (int n = m; n < m + P; ++n) {
      const std::string ns = std::to_string(n);
      b.holds("f^2 = (f_" + ms + ")^2 at " + std::to_string(S) + " samples of piece " + ns, "stated", [=] {
        const auto piece = reflection_piece(n);
        for (int j = 0; j < S; ++j) {
          const Rational x = piece.start + (piece.end - piece.start) * Rational(j, S - 1);
          if ((*f)((*f)(x)) != (*fm)((*fm)(x))) return false;
        }
        return true;
      });
      b.equal("sup |f - f_" + ms + "| on piece " + ns + " = 1/2^(2n+1)", Rational::pow2(-(2L * n + 1)), "stated",
              [=] { return block_sup_distance(*f, *fm, 0, n); });
    }
    b.equal("agreement_measure(f, f_" + ms + ", [0,1]) = 1 - sum_{n>=m} 2/2^(2n+3)",
            Rational(1) - Rational(1, 3) * Rational::pow2(-2L * m), "oracle",
            [=] { return agreement_measure(Map(f), Map(fm), RationalInterval(0, 1)); });
    b.holds("f != f_" + ms + " as maps", "stated", [=] { return Rational(0) < block_sup_distance(*f, *fm, 0, m); });
  }
  auto ccs = lazy<ConditionReport>([=] { return check_CCstar(sys, Rational(1, 100), sweep(4, 16)); });
  b.check("CC* holds with sup over k at fiber n equal to 1/2^(2n+1)", "exact-proof", "stated",
          [=] { return std::string(to_string(ccs().verdict)); },
          [=] { return ccs().verdict == Verdict::ExactProof && ccs().formula_match == true; });
  b.holds("f is transitive-on-grid at eps " + eps.str() + ", horizon " + std::to_string(horizon), "oracle",
          [=] { return test_transitivity(Map(f), eps, horizon).transitive_on_grid; });
  return e;
}

// ---- G5 --------------------------------------------------------------------

GalleryEntry build_g5(const Json& p) {
  const Rational eps = eps_param(p, "eps");
  const int horizon = int_param(p, "horizon", 1, 1000);
  const Rational delta = eps_param(p, "delta");
  const int grid = int_param(p, "probe_grid", 1, 4096);
  GalleryEntry e{"G5-tent-constant-slope", p, NDSystem::constant(PLMap::tent()), {}, {}};
  e.notes.push_back("constant tent family: baseline for the eventual-equality experiments");
  Builder b(e.assertions);
  const PLMap T = PLMap::tent();
  b.check("Fix(T) = {0, 2/3}", "{0/1, 2/3}", "oracle", [=] { return join(fixed_points(T).points); },
          [=] { return fixed_points(T).points == std::vector<Rational>{0, Rational(2, 3)} && fixed_points(T).intervals.empty(); });
  b.check("preimage_tree(T, 2/3, 2) = {1/6, 1/3, 2/3, 5/6}", "{1/6, 1/3, 2/3, 5/6}", "oracle",
          [=] { return join(preimage_tree(T, Rational(2, 3), 2).points()); },
          [=] {
            // Per-piece solve: T(x) = y at x = y/2 and x = 1 - y/2.
            std::vector<Rational> level{Rational(2, 3)}, all{Rational(2, 3)};
            for (int d = 0; d < 2; ++d) {
              std::vector<Rational> next;
              for (const auto& y : level) {
                for (const Rational& x : {y / 2, Rational(1) - y / 2}) next.push_back(x);
              }
              all.insert(all.end(), next.begin(), next.end());
              level = next;
            }
            std::sort(all.begin(), all.end());
            all.erase(std::unique(all.begin(), all.end()), all.end());
            return preimage_tree(T, Rational(2, 3), 2).points() == all &&
                   all == std::vector<Rational>{Rational(1, 6), Rational(1, 3), Rational(2, 3), Rational(5, 6)};
          });
  auto tr = lazy<TransitivityReport>([=] { return test_transitivity(T, eps, horizon); });
  b.holds("T is transitive-on-grid at eps " + eps.str() + " with every minimal n <= 6", "oracle", [=] {
    if (!tr().transitive_on_grid) return false;
    for (const auto& row : tr().pair_table) {
      for (int c : row) {
        if (c < 1 || c > 6) return false;
      }
    }
    return true;
  });
  b.holds("sensitivity witnesses for delta = " + delta.str() + " at every probe of the 1/" + std::to_string(grid) +
              " grid",
          "oracle", [=] {
            std::vector<Point> probes;
            for (int j = 0; j <= grid; ++j) probes.emplace_back(IntervalPoint(Rational(j, grid)));
            const Rational pe = min(delta, Rational(1, 2 * grid));
            const auto rep = test_sensitivity(T, delta, pe, 24, probes);
            if (!rep.failures.empty()) return false;
            for (const auto& w : rep.witnesses) {
              if (!witness_reverifies(T, rep, w)) return false;
            }
            return true;
          });
  return e;
}

const std::vector<std::pair<std::string, Json>>& defaults_table() {
  static const std::vector<std::pair<std::string, Json>> table{
      {"G1-rotations-to-identity",
       Json{{"N", 16}, {"offset", 0}, {"K_max", 4096}, {"eps_cc", "1/100"}, {"eps_do", "1/16"}}},
      {"G2-rational-to-irrational-rotation", Json{{"N", 32}, {"target", "golden"}, {"offset", 2}, {"eps", "1/20"}}},
      {"G3-cantor-adding-machine",
       Json{{"L", 32}, {"n", 3}, {"N", 12}, {"K_max", 4096}, {"samples", 100}, {"seed", 20240607}}},
      {"G4-bump-reflection-pl-family",
       Json{{"m_max", 4}, {"pieces", 6}, {"samples", 50}, {"eps", "1/16"}, {"horizon", 40}}},
      {"G5-tent-constant-slope", Json{{"eps", "1/8"}, {"horizon", 16}, {"delta", "1/4"}, {"probe_grid", 32}}},
  };
  return table;
}

}  // namespace

bool GalleryReport::passed() const { return failures() == 0; }

std::size_t GalleryReport::failures() const {
  std::size_t n = 0;
  for (const auto& r : results) n += r.passed ? 0 : 1;
  return n;
}

const std::vector<std::string>& gallery_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& [id, _] : defaults_table()) out.push_back(id);
    return out;
  }();
  return ids;
}

Json gallery_defaults(const std::string& id) {
  for (const auto& [name, params] : defaults_table()) {
    if (name == id) return params;
  }
  throw ConfigError("id", "unknown gallery entry '" + id + "'");
}

GalleryEntry build_gallery_entry(const std::string& id, const Json& params) {
  const Json p = merge_params(id, gallery_defaults(id), params);
  try {
    if (id == "G1-rotations-to-identity") return build_g1(p);
    if (id == "G2-rational-to-irrational-rotation") return build_g2(p);
    if (id == "G3-cantor-adding-machine") return build_g3(p);
    if (id == "G4-bump-reflection-pl-family") return build_g4(p);
    return build_g5(p);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("params", e.what());
  }
}

GalleryReport run_gallery_entry(const GalleryEntry& entry) {
  GalleryReport r;
  r.id = entry.id;
  r.params = entry.params;
  r.system = to_json(entry.system);
  r.notes = entry.notes;
  for (const auto& a : entry.assertions) {
    AssertionResult res{a.description, a.expected, "", a.basis, false, ""};
    try {
      res.passed = a.check();
      res.actual = a.actual();
    } catch (const std::exception& e) {
      res.passed = false;
      res.error = e.what();
    }
    r.results.push_back(std::move(res));
  }
  return r;
}

std::vector<GalleryReport> run_all_gallery(Exec exec) {
  const auto& ids = gallery_ids();
  std::vector<GalleryReport> out(ids.size());
  parallel_for(ids.size(), exec, [&](std::size_t i) { out[i] = run_gallery_entry(build_gallery_entry(ids[i])); });
  return out;
}

Json to_json(const GalleryReport& r) {
  Json results = Json::array();
  for (const auto& a : r.results) {
    Json j{{"description", a.description},
           {"expected", a.expected},
           {"actual", a.actual},
           {"basis", a.basis},
           {"passed", a.passed}};
    if (!a.error.empty()) j["error"] = a.error;
    results.push_back(std::move(j));
  }
  return Json{{"record", "gallery"},
              {"id", r.id},
              {"params", r.params},
              {"system", r.system},
              {"passed", r.passed()},
              {"failures", r.failures()},
              {"assertions", results},
              {"notes", r.notes}};
}

}  // namespace nds
