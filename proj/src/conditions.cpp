#include "nds/conditions.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "nds/errors.hpp"
#include "nds/kernels.hpp"
#include "nds/reflection_family.hpp"
#include "nds/serialization.hpp"

namespace nds {

namespace {

struct Sup {
  Rational value;
  int k = 0;
  std::optional<Point> x;
  bool exact = true;
  std::size_t saturated_words = 0;
};

// Closed form for one condition on one built-in family: `value(n)` is the sup
// over all k (CC, CC*) or the exact trace value (L, L*).
struct ClosedForm {
  std::string formula;
  std::function<Rational(int)> value;
  // First k attaining value(n) together with a base point, if attained.
  std::function<std::optional<std::pair<long, Point>>(int)> attained;
  std::string note;
  // The sup is a maximum for infinite words too, even where `attained` cannot
  // build a representable witness.
  bool sup_is_max = true;
};

Rational circle_distance(const Rational& t) {
  const Rational f = t.frac();
  return min(f, Rational(1) - f);
}

void require_positive(const Rational& eps, const char* what) {
  if (eps <= 0) throw DomainError(std::string(what) + " must be positive, got " + eps.str());
}

bool fiber_is_limit(const NDSystem& sys, int n) {
  return sys.tail_is_limit() && static_cast<std::size_t>(n) > sys.prefix().size();
}

void add_breakpoints(const Map& f, int n, std::vector<Rational>& out) {
  if (const auto* p = std::get_if<PLMap>(&f)) {
    out.insert(out.end(), p->breakpoints().begin(), p->breakpoints().end());
    return;
  }
  if (const auto* l = std::get_if<LazyPLMapPtr>(&f)) {
    for (const auto& seg : (*l)->fixed()) out.insert(out.end(), seg.xs.begin(), seg.xs.end());
    for (const auto& seq : (*l)->sequences()) {
      for (int j = seq.first_index; j <= std::max(seq.first_index, n + 3); ++j) {
        const PLSegment b = seq.block(j);
        out.insert(out.end(), b.xs.begin(), b.xs.end());
      }
      out.push_back(seq.anchor);
    }
  }
}

std::vector<Rational> interval_samples(const NDSystem& sys, int n, const SweepOptions& opt,
                                       const std::optional<Rational>& extra) {
  std::vector<Rational> xs;
  const long g = static_cast<long>(std::max<std::size_t>(opt.grid, 1));
  for (long j = 0; j <= g; ++j) xs.emplace_back(j, g);
  add_breakpoints(sys.at(n), n, xs);
  add_breakpoints(sys.limit(), n, xs);
  if (extra) xs.push_back(*extra);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

std::vector<std::uint64_t> cantor_words(int L, const SweepOptions& opt) {
  std::vector<std::uint64_t> words;
  const std::uint64_t mask = L >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << L) - 1);
  // Words 1^j 0^(L-j): the carry of every truncation runs off at symbol j.
  for (int j = 0; j < L; ++j) words.push_back((std::uint64_t{1} << j) - 1);
  std::mt19937_64 rng(opt.seed);
  for (std::size_t i = 0; i < opt.cantor_samples; ++i) words.push_back(rng() & mask);
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

std::pair<Rational, Rational> pl_sup_with_argument(const PLMap& a, const PLMap& b) {
  std::vector<Rational> xs = a.breakpoints();
  xs.insert(xs.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  Rational best = 0, arg = 0;
  for (const auto& x : xs) {
    Rational d = (a(x) - b(x)).abs();
    if (best < d) {
      best = std::move(d);
      arg = x;
    }
  }
  return {best, arg};
}

// max over k_from <= k <= k_to of sup_x d(g_k(x), f^k(x)), g_k the window
// f_n^k or the fiber power (f_n)^k. Sampled sweeps stop once `stop` is reached.
Sup divergence_sup(const NDSystem& sys, int n, bool fiber, int k_from, int k_to,
                   const std::optional<Rational>& stop, const SweepOptions& opt) {
  if (fiber_is_limit(sys, n)) return {Rational(0), 0, std::nullopt, true, 0};
  switch (sys.space()) {
    case Space::Circle: {
      const Rational lim = std::get<RotationMap>(sys.limit()).fraction;
      const Rational fn = std::get<RotationMap>(sys.at(n)).fraction;
      Rational a = 0, b = 0;
      Sup best{Rational(0), 0, CirclePoint(0), true, 0};
      for (int k = 1; k <= k_to; ++k) {
        a = (a + (fiber ? fn : std::get<RotationMap>(sys.at(n + k - 1)).fraction)).frac();
        b = (b + lim).frac();
        if (k < k_from) continue;
        Rational d = circle_distance(a - b);
        if (best.value < d) {
          best.value = std::move(d);
          best.k = k;
        }
      }
      return best;
    }
    case Space::Cantor: {
      const int L = std::get<AddingMachineMap>(sys.limit()).word_length;
      for (int j = n; j <= (fiber ? n : n + k_to - 1); ++j) {
        if (!std::holds_alternative<AddingMachineMap>(sys.at(j))) {
          throw UnsupportedOperation("Cantor sweeps need adding-machine fibers");
        }
      }
      const auto words = cantor_words(L, opt);
      const auto res = kernels::cantor_divergence(words, L, n, fiber, k_from, k_to, opt.exec);
      Sup best{Rational(0), 0, std::nullopt, false, 0};
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (res[i].saturated) {
          ++best.saturated_words;
          continue;
        }
        if (best.value < res[i].value || !best.x ||
            (best.value == res[i].value && res[i].k < best.k)) {
          best.value = res[i].value;
          best.k = res[i].k;
          best.x = CantorWord(words[i], L);
        }
      }
      return best;
    }
    case Space::Interval: break;
  }
  Sup best{Rational(0), 0, std::nullopt, true, 0};
  int k_exact = 0;
  bool explicit_pl = std::holds_alternative<PLMap>(sys.limit());
  for (int j = n; explicit_pl && j <= (fiber ? n : n + k_to - 1); ++j) {
    explicit_pl = std::holds_alternative<PLMap>(sys.at(j));
  }
  if (explicit_pl) {
    const PLMap& f = std::get<PLMap>(sys.limit());
    PLMap g_k = PLMap::identity();
    PLMap f_k = PLMap::identity();
    for (int k = 1; k <= k_to; ++k) {
      g_k = compose(std::get<PLMap>(sys.at(fiber ? n : n + k - 1)), g_k);
      f_k = compose(f, f_k);
      if (g_k.breakpoints().size() > opt.breakpoint_budget ||
          f_k.breakpoints().size() > opt.breakpoint_budget) {
        break;
      }
      k_exact = k;
      if (k < k_from) continue;
      auto [d, x] = pl_sup_with_argument(g_k, f_k);
      if (best.value < d) best = {std::move(d), k, IntervalPoint(x), true, 0};
      if (stop && *stop <= best.value) return best;
    }
    if (k_exact == k_to) return best;
  }
  std::vector<Map> fibers;
  const int count = fiber ? 1 : k_to;
  fibers.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) fibers.push_back(sys.at(n + j));
  std::optional<Rational> extra;
  if (best.x) extra = std::get<IntervalPoint>(*best.x).value;
  const auto samples = interval_samples(sys, n, opt, extra);
  const auto res = kernels::interval_divergence(fibers, fiber, sys.limit(), samples,
                                                std::max(k_from, k_exact + 1), k_to, stop, opt.exec);
  best.exact = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (best.value < res[i].value || (best.value == res[i].value && res[i].k > 0 && res[i].k < best.k)) {
      best.value = res[i].value;
      best.k = res[i].k;
      best.x = IntervalPoint(samples[i]);
    }
  }
  return best;
}

std::optional<ClosedForm> closed_form(const NDSystem& sys, ConditionId c) {
  if (!sys.prefix().empty() || c == ConditionId::DO || c == ConditionId::DOstar) return std::nullopt;
  if (sys.family() == nullptr) {
    return ClosedForm{"f_n = f for every n, so every distance is 0", [](int) { return Rational(0); },
                      [](int) -> std::optional<std::pair<long, Point>> { return std::nullopt; }, "", false};
  }
  const MapFamily* fam = sys.family();
  if (const auto* rot = dynamic_cast<const RotationDyadicFamily*>(fam)) {
    const int o = rot->offset();
    switch (c) {
      case ConditionId::CC:
        return ClosedForm{
            "sup_k d(f_n^k, id) = 1/2^(n+" + std::to_string(o) + "-1), approached as k -> infinity",
            [o](int n) { return n + o == 1 ? Rational(1, 2) : Rational::pow2(-(n + o - 1L)); },
            [o](int n) -> std::optional<std::pair<long, Point>> {
              if (n + o == 1) return std::make_pair(1L, Point(CirclePoint(0)));
              return std::nullopt;
            },
            "", false};
      case ConditionId::CCstar:
        return ClosedForm{"sup_k d((f_n)^k, id) = 1/2, attained at k = 2^(n+" + std::to_string(o) + "-1)",
                          [](int) { return Rational(1, 2); },
                          [o](int n) -> std::optional<std::pair<long, Point>> {
                            if (n + o - 1 > 62) return std::nullopt;
                            return std::make_pair(1L << (n + o - 1), Point(CirclePoint(0)));
                          },
                          ""};
      case ConditionId::Lstar:
        return ClosedForm{"D((f_n)^n, id) = min(n/2^(n+o), 1 - n/2^(n+o)), o = " + std::to_string(o),
                          [o](int n) { return circle_distance(Rational(n) * Rational::pow2(-(n + o + 0L))); },
                          [](int n) -> std::optional<std::pair<long, Point>> {
                            return std::make_pair(long{n}, Point(CirclePoint(0)));
                          },
                          ""};
      case ConditionId::L:
        return ClosedForm{"D(f_n^n, id) = sum_{j=n}^{2n-1} 2^-(j+o) taken as a circle distance, o = " +
                              std::to_string(o),
                          [o](int n) {
                            Rational s = 0;
                            for (int j = n; j <= 2 * n - 1; ++j) s += Rational::pow2(-(j + o + 0L));
                            return circle_distance(s);
                          },
                          [](int n) -> std::optional<std::pair<long, Point>> {
                            return std::make_pair(long{n}, Point(CirclePoint(0)));
                          },
                          ""};
      default: return std::nullopt;
    }
  }
  if (const auto* am = dynamic_cast<const AddingMachineFamily*>(fam)) {
    if (c == ConditionId::DO || c == ConditionId::DOstar) return std::nullopt;
    const int L = am->word_length();
    const bool diagonal = c == ConditionId::L || c == ConditionId::Lstar;
    return ClosedForm{
        "sup rho = 1/(n+1), attained at x = 1^n 0 0 ... " +
            std::string(diagonal ? "(k = n)" : "(k = 1)") + "; 0 within precision for n >= L",
        [](int n) { return Rational(1, n + 1); },
        [L, diagonal](int n) -> std::optional<std::pair<long, Point>> {
          if (n >= L) return std::nullopt;
          // 1^n 0 ... shifted back so that the k-th step carries off symbol n.
          const long k = diagonal ? n : 1;
          const std::uint64_t x = (std::uint64_t{1} << n) - static_cast<std::uint64_t>(k);
          return std::make_pair(k, Point(CantorWord(x, L)));
        },
        "bound holds for infinite words; words of length " + std::to_string(L) +
            " cannot resolve indices n >= L (indeterminate beyond precision)"};
  }
  if (dynamic_cast<const ReflectionFamily*>(fam) != nullptr) {
    if (c != ConditionId::CCstar && c != ConditionId::Lstar) return std::nullopt;
    return ClosedForm{"sup_x d((f_n)^k(x), f^k(x)) = 1/2^(2n+1) for every k >= 1",
                      [](int n) { return Rational::pow2(-(2L * n + 1)); },
                      [c](int n) -> std::optional<std::pair<long, Point>> {
                        if (c == ConditionId::Lstar && n > 1) return std::nullopt;
                        return std::make_pair(1L, Point(IntervalPoint(reflection_piece(n).peak)));
                      },
                      ""};
  }
  return std::nullopt;
}

ConditionReport base_report(ConditionId id, const NDSystem& sys, const SweepOptions& opt) {
  if (opt.N_max < 1) throw DomainError("N_max must be >= 1");
  ConditionReport r;
  r.condition = id;
  r.space = sys.space();
  r.N_max = opt.N_max;
  for (const auto& w : sys.warnings()) r.notes.push_back("warning: " + w);
  const auto* conv = dynamic_cast<const RotationConvergentFamily*>(sys.family());
  if (conv != nullptr) {
    r.notes.push_back("limit is the irrational-approx surrogate of '" + conv->target() +
                      "'; values are exact for the surrogate only");
  }
  return r;
}

ConditionReport check_uniform(ConditionId id, const NDSystem& sys, const Rational& eps,
                              const SweepOptions& opt) {
  require_positive(eps, "eps");
  if (opt.K_max < 1) throw DomainError("K_max must be >= 1");
  const bool fiber = id == ConditionId::CCstar;
  ConditionReport r = base_report(id, sys, opt);
  r.K_max = opt.K_max;
  r.eps = eps;
  if (sys.space() == Space::Interval) r.grid = opt.grid;
  const auto cf = closed_form(sys, id);
  // Closed-form families report the true sup over k <= K_max; others may stop at eps.
  const std::optional<Rational> stop = cf ? std::nullopt : std::optional<Rational>(eps);
  std::vector<Sup> sups(static_cast<std::size_t>(opt.N_max));
  bool all_exact = true;
  std::size_t saturated = 0;
  for (int n = 1; n <= opt.N_max; ++n) {
    Sup s = divergence_sup(sys, n, fiber, 1, opt.K_max, stop, opt);
    all_exact = all_exact && s.exact;
    saturated += s.saturated_words;
    r.trace.push_back({n, s.value, s.k});
    sups[static_cast<std::size_t>(n - 1)] = std::move(s);
  }
  r.basis = sys.space() == Space::Cantor ? "sampled-words" : (all_exact ? "exact" : "grid-lower-bound");
  if (saturated > 0) {
    r.notes.push_back(std::to_string(saturated) + " word sweeps dropped a carry and were excluded");
  }
  if (!all_exact && sys.space() == Space::Interval) {
    r.notes.push_back("compositions above " + std::to_string(opt.breakpoint_budget) +
                      " breakpoints were sampled; sampled sweeps stop once eps is reached");
  }
  std::optional<int> n0;
  for (int n = opt.N_max; n >= 1 && r.trace[static_cast<std::size_t>(n - 1)].value < eps; --n) n0 = n;
  r.verdict = n0 ? Verdict::HoldsOnTruncation : Verdict::FailsWithWitness;
  r.n0 = n0;
  if (!n0) {
    const Sup& s = sups.back();
    r.witness = Witness{opt.N_max, s.k, s.x, s.value};
  }
  if (cf) {
    r.certificate = cf->formula;
    if (!cf->note.empty()) r.notes.push_back(cf->note);
    bool match = true;
    for (const auto& t : r.trace) {
      const Rational v = cf->value(t.n);
      const auto at = cf->attained(t.n);
      match = match && t.value <= v && (!(at && at->first <= opt.K_max) || t.value == v);
    }
    r.formula_match = match;
    // Exact verdict from the closed form: d < eps for every k iff the sup is
    // below eps, or equal to it without being attained.
    auto holds = [&](int n) {
      const Rational v = cf->value(n);
      return v < eps || (v == eps && !cf->sup_is_max && !cf->attained(n));
    };
    std::optional<int> cf_n0;
    for (int n = 1; n <= 1'000'000; ++n) {
      if (holds(n)) {
        cf_n0 = n;
        break;
      }
      if (n > 64 && cf->value(n) == cf->value(n - 1)) break;  // constant sup: never below eps
    }
    r.n0 = cf_n0;
    if (cf_n0) {
      r.verdict = Verdict::ExactProof;
      r.witness.reset();
    } else {
      r.verdict = Verdict::FailsWithWitness;
      const auto at = cf->attained(opt.N_max);
      if (at) {
        r.witness = Witness{opt.N_max, at->first, at->second, cf->value(opt.N_max)};
      }
    }
  }
  return r;
}

ConditionReport check_diagonal(ConditionId id, const NDSystem& sys, const Rational& threshold,
                               const SweepOptions& opt) {
  require_positive(threshold, "threshold");
  const bool fiber = id == ConditionId::Lstar;
  ConditionReport r = base_report(id, sys, opt);
  r.threshold = threshold;
  if (sys.space() == Space::Interval) r.grid = opt.grid;
  bool all_exact = true;
  std::size_t saturated = 0;
  std::vector<std::optional<Point>> args;
  for (int n = 1; n <= opt.N_max; ++n) {
    Sup s = divergence_sup(sys, n, fiber, n, n, std::nullopt, opt);
    all_exact = all_exact && s.exact;
    saturated += s.saturated_words;
    r.trace.push_back({n, s.value, s.k});
    args.push_back(s.x);
  }
  r.basis = sys.space() == Space::Cantor ? "sampled-words" : (all_exact ? "exact" : "grid-lower-bound");
  if (saturated > 0) {
    r.notes.push_back(std::to_string(saturated) + " word sweeps dropped a carry and were excluded");
  }
  const int tail_from = (opt.N_max + 1) / 2;
  bool holds = true;
  for (int n = std::max(tail_from, 1); n <= opt.N_max; ++n) {
    const auto& t = r.trace[static_cast<std::size_t>(n - 1)];
    if (!(t.value < threshold)) {
      holds = false;
      r.witness = Witness{n, n, args[static_cast<std::size_t>(n - 1)], t.value};
      break;
    }
    if (n > tail_from && r.trace[static_cast<std::size_t>(n - 2)].value < t.value) {
      holds = false;
      r.witness = Witness{n, n, args[static_cast<std::size_t>(n - 1)], t.value};
      r.notes.push_back("trace increases at n = " + std::to_string(n));
      break;
    }
  }
  r.verdict = holds ? Verdict::HoldsOnTruncation : Verdict::FailsWithWitness;
  if (holds) r.n0 = tail_from;
  if (const auto cf = closed_form(sys, id)) {
    r.certificate = cf->formula + "; tends to 0";
    if (!cf->note.empty()) r.notes.push_back(cf->note);
    bool match = true;
    for (const auto& t : r.trace) {
      const Rational v = cf->value(t.n);
      match = match && t.value <= v && (!cf->attained(t.n) || t.value == v);
    }
    r.formula_match = match;
    if (match) {
      r.verdict = Verdict::ExactProof;
      r.witness.reset();
    }
  }
  return r;
}

ConditionReport check_dense(ConditionId id, const NDSystem& sys, const Point& x0, const Rational& eps,
                            const SweepOptions& opt) {
  require_positive(eps, "eps");
  if (space_of(x0) != sys.space()) throw UsageError("x0 lives in another space");
  ConditionReport r = base_report(id, sys, opt);
  r.eps = eps;
  r.x0 = x0;
  r.basis = "exact";
  const OrbitKind kind = id == ConditionId::DO ? OrbitKind::DiagonalNds : OrbitKind::DiagonalFiber;
  const OrbitRecord rec = orbit(sys, x0, opt.N_max, kind);
  if (rec.saturated) r.notes.push_back("some diagonal entries dropped a carry (precision-saturated)");
  std::vector<Point> entries;
  entries.reserve(rec.entries.size());
  for (const auto& e : rec.entries) entries.push_back(e.second);
  int L = CantorWord::kDefaultLength;
  if (const auto* w = std::get_if<CantorWord>(&x0)) L = w->length();
  const auto net = epsilon_net(sys.space(), eps, L);
  const auto hits = kernels::first_hits(net, entries, eps, opt.exec);
  std::vector<long> newly(static_cast<std::size_t>(opt.N_max) + 1, 0);
  for (int h : hits) {
    if (h > 0) ++newly[static_cast<std::size_t>(h)];
  }
  long covered = 0;
  const long total = static_cast<long>(net.size());
  for (int N = 1; N <= opt.N_max; ++N) {
    covered += newly[static_cast<std::size_t>(N)];
    r.coverage.push_back({N, Rational(covered, total)});
  }
  if (covered == total) {
    r.verdict = Verdict::HoldsOnTruncation;
    const int n0 = *std::max_element(hits.begin(), hits.end());
    r.n0 = n0;
    return r;
  }
  r.verdict = Verdict::FailsWithWitness;
  // Witness: the uncovered net point farthest from every entry.
  std::optional<std::size_t> best;
  Rational best_gap = -1;
  for (std::size_t i = 0; i < net.size(); ++i) {
    if (hits[i] != 0) continue;
    Rational gap = 2;
    for (const auto& e : entries) gap = min(gap, metric(net[i], e));
    if (best_gap < gap) {
      best_gap = gap;
      best = i;
    }
  }
  r.witness = Witness{opt.N_max, 0, net[*best], best_gap};
  if (sys.space() == Space::Circle) {
    // Smallest arc containing every entry: complement of the largest gap.
    std::vector<Rational> pos;
    for (const auto& e : entries) pos.push_back(std::get<CirclePoint>(e).fraction);
    std::sort(pos.begin(), pos.end());
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    Rational largest_gap = Rational(1) - pos.back() + pos.front();
    Rational start = pos.front();
    for (std::size_t i = 1; i < pos.size(); ++i) {
      if (largest_gap < pos[i] - pos[i - 1]) {
        largest_gap = pos[i] - pos[i - 1];
        start = pos[i];
      }
    }
    const Rational arc = Rational(1) - largest_gap;
    r.notes.push_back("all entries lie on the arc of length " + arc.str() + " starting at " + start.str() +
                      (arc <= Rational(1, 2) ? " (a half circle)" : ""));
  }
  return r;
}

}  // namespace

std::string_view to_string(ConditionId c) {
  switch (c) {
    case ConditionId::CC: return "CC";
    case ConditionId::CCstar: return "CCstar";
    case ConditionId::L: return "L";
    case ConditionId::Lstar: return "Lstar";
    case ConditionId::DO: return "DO";
    case ConditionId::DOstar: return "DOstar";
  }
  return "?";
}

ConditionId parse_condition(std::string_view s) {
  for (ConditionId c : {ConditionId::CC, ConditionId::CCstar, ConditionId::L, ConditionId::Lstar,
                        ConditionId::DO, ConditionId::DOstar}) {
    if (to_string(c) == s) return c;
  }
  throw UsageError("unknown condition '" + std::string(s) + "'");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsOnTruncation: return "holds-on-truncation";
    case Verdict::FailsWithWitness: return "fails-with-witness";
    case Verdict::ExactProof: return "exact-proof";
  }
  return "?";
}

Verdict parse_verdict(std::string_view s) {
  for (Verdict v : {Verdict::HoldsOnTruncation, Verdict::FailsWithWitness, Verdict::ExactProof}) {
    if (to_string(v) == s) return v;
  }
  throw UsageError("unknown verdict '" + std::string(s) + "'");
}

ConditionReport check_CC(const NDSystem& sys, const Rational& eps, const SweepOptions& opt) {
  return check_uniform(ConditionId::CC, sys, eps, opt);
}
ConditionReport check_CCstar(const NDSystem& sys, const Rational& eps, const SweepOptions& opt) {
  return check_uniform(ConditionId::CCstar, sys, eps, opt);
}
ConditionReport check_L(const NDSystem& sys, const Rational& threshold, const SweepOptions& opt) {
  return check_diagonal(ConditionId::L, sys, threshold, opt);
}
ConditionReport check_Lstar(const NDSystem& sys, const Rational& threshold, const SweepOptions& opt) {
  return check_diagonal(ConditionId::Lstar, sys, threshold, opt);
}
ConditionReport check_DO(const NDSystem& sys, const Point& x0, const Rational& eps,
                         const SweepOptions& opt) {
  return check_dense(ConditionId::DO, sys, x0, eps, opt);
}
ConditionReport check_DOstar(const NDSystem& sys, const Point& x0, const Rational& eps,
                             const SweepOptions& opt) {
  return check_dense(ConditionId::DOstar, sys, x0, eps, opt);
}

namespace {

// d(g(x), f^k(x)) with g the window f_n^k or the fiber power (f_n)^k.
std::optional<Rational> distance_at(const NDSystem& sys, int n, long k, bool fiber, const Point& x) {
  if (sys.space() == Space::Circle) {
    const Rational lim = std::get<RotationMap>(sys.limit()).fraction;
    Rational shift = 0;
    if (fiber) {
      shift = std::get<RotationMap>(sys.at(n)).fraction * Rational(k);
    } else {
      for (long j = 0; j < k; ++j) shift += std::get<RotationMap>(sys.at(n + static_cast<int>(j))).fraction;
    }
    return circle_distance(shift - lim * Rational(k));
  }
  Point g = x, f = x;
  for (long j = 0; j < k; ++j) {
    const PointStep a = step_map(sys.at(fiber ? n : n + static_cast<int>(j)), g);
    const PointStep b = step_map(sys.limit(), f);
    if (a.saturated || b.saturated) return std::nullopt;
    g = a.point;
    f = b.point;
  }
  return metric(g, f);
}

}  // namespace

bool witness_reproduces(const NDSystem& sys, const ConditionReport& r) {
  if (r.verdict != Verdict::FailsWithWitness || !r.witness) return false;
  const Witness& w = *r.witness;
  switch (r.condition) {
    case ConditionId::CC:
    case ConditionId::CCstar: {
      if (!w.x || !r.eps) return false;
      const auto d = distance_at(sys, w.n, w.k, r.condition == ConditionId::CCstar, *w.x);
      return d && *d == w.distance && *r.eps <= *d;
    }
    case ConditionId::L:
    case ConditionId::Lstar: {
      if (!w.x || !r.threshold) return false;
      const auto d = distance_at(sys, w.n, w.n, r.condition == ConditionId::Lstar, *w.x);
      if (!d || *d != w.distance) return false;
      if (*r.threshold <= *d) return true;
      for (const auto& t : r.trace) {
        if (t.n == w.n - 1) return t.value < *d;
      }
      return false;
    }
    case ConditionId::DO:
    case ConditionId::DOstar: {
      if (!w.x || !r.eps || !r.x0) return false;
      const OrbitKind kind = r.condition == ConditionId::DO ? OrbitKind::DiagonalNds : OrbitKind::DiagonalFiber;
      const OrbitRecord rec = orbit(sys, *r.x0, w.n, kind);
      for (const auto& e : rec.entries) {
        if (ball_contains(*w.x, *r.eps, e.second)) return false;
      }
      return true;
    }
  }
  return false;
}

std::optional<Rational> composite_distance(const Composite& a, const Composite& b) {
  if (const auto* ra = std::get_if<RotationMap>(&a)) {
    if (const auto* rb = std::get_if<RotationMap>(&b)) return circle_distance(ra->fraction - rb->fraction);
  }
  if (const auto* pa = std::get_if<PLMap>(&a)) {
    if (const auto* pb = std::get_if<PLMap>(&b)) return sup_distance(*pa, *pb);
  }
  return std::nullopt;
}

std::pair<Rational, long> rotation_orbit_sup(const Rational& delta) {
  const Rational d = delta.frac();
  const mpz_class q = d.denominator();
  if (q == 1) return {Rational(0), 1};
  const mpz_class p = d.numerator();
  const mpz_class half = q / 2;
  mpz_class inv;
  mpz_invert(inv.get_mpz_t(), p.get_mpz_t(), q.get_mpz_t());
  mpz_class k = (half * inv) % q;
  if (!k.fits_slong_p()) throw DomainError("rotation period too large for an explicit witness");
  return {Rational(half, q), k.get_si()};
}

Json to_json(const ConditionReport& r) {
  Json out;
  out["record"] = "condition";
  out["condition"] = std::string(to_string(r.condition));
  out["space"] = std::string(to_string(r.space));
  out["verdict"] = std::string(to_string(r.verdict));
  out["basis"] = r.basis;
  Json params;
  params["N_max"] = r.N_max;
  params["K_max"] = r.K_max;
  params["eps"] = r.eps ? Json(r.eps->str()) : Json(nullptr);
  params["threshold"] = r.threshold ? Json(r.threshold->str()) : Json(nullptr);
  params["grid"] = r.grid ? Json(*r.grid) : Json(nullptr);
  out["parameters"] = params;
  out["n0"] = r.n0 ? Json(*r.n0) : Json(nullptr);
  if (r.witness) {
    out["witness"] = Json{{"n", r.witness->n},
                          {"k", r.witness->k},
                          {"x", r.witness->x ? to_json(*r.witness->x) : Json(nullptr)},
                          {"distance", r.witness->distance.str()}};
  } else {
    out["witness"] = nullptr;
  }
  out["x0"] = r.x0 ? to_json(*r.x0) : Json(nullptr);
  Json trace = Json::array();
  for (const auto& t : r.trace) {
    trace.push_back(Json{{"n", t.n}, {"value", t.value.str()}, {"decimal", t.value.decimal()}, {"k", t.k}});
  }
  out["trace"] = trace;
  Json cov = Json::array();
  for (const auto& c : r.coverage) {
    cov.push_back(Json{{"N", c.N}, {"fraction", c.fraction.str()}, {"decimal", c.fraction.decimal()}});
  }
  out["coverage"] = cov;
  out["certificate"] = r.certificate ? Json(*r.certificate) : Json(nullptr);
  out["formula_match"] = r.formula_match ? Json(*r.formula_match) : Json(nullptr);
  out["notes"] = r.notes;
  return out;
}

ConditionReport condition_report_from_json(const Json& j) {
  StrictObject o(j, "report");
  ConditionReport r;
  auto str = [&](const std::string& key) {
    const Json& v = o.required(key);
    if (!v.is_string()) throw ConfigError(o.path(key), "expected a string");
    return v.get<std::string>();
  };
  if (str("record") != "condition") throw ConfigError("report.record", "not a condition record");
  try {
    r.condition = parse_condition(str("condition"));
    r.space = parse_space(str("space"));
    r.verdict = parse_verdict(str("verdict"));
  } catch (const UsageError& e) {
    throw ConfigError("report", e.what());
  }
  r.basis = str("basis");
  const int L = CantorWord::kMaxLength;
  auto point = [&](const Json& v, const std::string& path) -> std::optional<Point> {
    if (v.is_null()) return std::nullopt;
    if (r.space == Space::Cantor) return point_from_json(v, r.space, path, static_cast<int>(v.get<std::string>().size()));
    return point_from_json(v, r.space, path, L);
  };
  StrictObject p(o.required("parameters"), "report.parameters");
  r.N_max = static_cast<int>(integer_from_json(p.required("N_max"), "N_max", 0, INT32_MAX));
  r.K_max = static_cast<int>(integer_from_json(p.required("K_max"), "K_max", 0, INT32_MAX));
  if (const Json& v = p.required("eps"); !v.is_null()) r.eps = rational_from_json(v, "eps");
  if (const Json& v = p.required("threshold"); !v.is_null()) r.threshold = rational_from_json(v, "threshold");
  if (const Json& v = p.required("grid"); !v.is_null()) r.grid = v.get<std::size_t>();
  p.finish();
  if (const Json& v = o.required("n0"); !v.is_null()) r.n0 = v.get<int>();
  if (const Json& w = o.required("witness"); !w.is_null()) {
    StrictObject wo(w, "report.witness");
    Witness wit;
    wit.n = wo.required("n").get<int>();
    wit.k = wo.required("k").get<long>();
    wit.x = point(wo.required("x"), "report.witness.x");
    wit.distance = rational_from_json(wo.required("distance"), "report.witness.distance");
    wo.finish();
    r.witness = wit;
  }
  r.x0 = point(o.required("x0"), "report.x0");
  for (const auto& t : o.required("trace")) {
    StrictObject to(t, "report.trace[]");
    TraceEntry e;
    e.n = to.required("n").get<int>();
    e.value = rational_from_json(to.required("value"), "report.trace[].value");
    to.required("decimal");
    e.k = to.required("k").get<int>();
    to.finish();
    r.trace.push_back(std::move(e));
  }
  for (const auto& c : o.required("coverage")) {
    StrictObject co(c, "report.coverage[]");
    CoverageEntry e;
    e.N = co.required("N").get<int>();
    e.fraction = rational_from_json(co.required("fraction"), "report.coverage[].fraction");
    co.required("decimal");
    co.finish();
    r.coverage.push_back(std::move(e));
  }
  if (const Json& v = o.required("certificate"); !v.is_null()) r.certificate = v.get<std::string>();
  if (const Json& v = o.required("formula_match"); !v.is_null()) r.formula_match = v.get<bool>();
  r.notes = o.required("notes").get<std::vector<std::string>>();
  o.finish();
  return r;
}

}  // namespace nds
