#include "nds/dynamics.hpp"

#include <algorithm>
#include <set>

#include "nds/errors.hpp"
#include "nds/kernels.hpp"
#include "nds/serialization.hpp"

namespace nds {

namespace {

Json opt_json(const std::optional<int>& v) { return v ? Json(*v) : Json(nullptr); }

std::vector<RationalInterval> circle_arcs(const Rational& eps) {
  const long m = grid_size(eps);
  std::vector<RationalInterval> out;
  for (long i = 0; i < m; ++i) out.emplace_back(Rational(i, m), Rational(i + 1, m));
  return out;
}

// Open arcs of a common length meet iff their starts are closer than that length.
bool arcs_meet(const Rational& start_a, const Rational& start_b, const Rational& length) {
  return circle_metric(start_a, start_b) < length;
}

std::vector<RationalInterval> grid_for(Space space, const Rational& eps) {
  if (!(eps > 0)) throw DomainError("eps must be positive, got " + eps.str());
  if (space == Space::Interval) return interval_grid(eps);
  if (space == Space::Circle) return circle_arcs(eps);
  throw UnsupportedOperation("grid sets are defined on the interval and the circle only");
}

// Roots of s(x) = y on one continuous PL graph; plateaus give their endpoints.
void solve_segment(const std::vector<Rational>& xs, const std::vector<Rational>& ys, const Rational& y,
                   std::vector<Rational>& out) {
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const Rational& a = ys[i];
    const Rational& b = ys[i + 1];
    if (a == y) out.push_back(xs[i]);
    if (b == y) out.push_back(xs[i + 1]);
    if ((a < y && y < b) || (b < y && y < a)) out.push_back(xs[i] + (y - a) * (xs[i + 1] - xs[i]) / (b - a));
  }
}

bool interiors_disjoint(const RationalInterval& a, const RationalInterval& b) {
  return a.hi <= b.lo || b.hi <= a.lo;
}

RationalInterval hull(const RationalInterval& a, const RationalInterval& b) {
  return RationalInterval(min(a.lo, b.lo), max(a.hi, b.hi));
}

RationalInterval image_power(const Map& f, RationalInterval k, int p) {
  for (int i = 0; i < p; ++i) k = image_of_interval(f, k);
  return k;
}

Rational pl_agreement(const PLMap& f, const PLMap& g, const RationalInterval& region) {
  std::vector<Rational> xs{region.lo, region.hi};
  for (const auto& x : f.breakpoints()) {
    if (region.lo < x && x < region.hi) xs.push_back(x);
  }
  for (const auto& x : g.breakpoints()) {
    if (region.lo < x && x < region.hi) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  Rational total = 0;
  bool left_equal = f(xs.front()) == g(xs.front());
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const bool right_equal = f(xs[i + 1]) == g(xs[i + 1]);
    if (left_equal && right_equal) total += xs[i + 1] - xs[i];
    left_equal = right_equal;
  }
  return total;
}

}  // namespace

// ---- transitivity ----------------------------------------------------------

std::string_view to_string(TransitivityMode m) {
  return m == TransitivityMode::ExactPL ? "exact-PL" : "rotation-closed-form";
}

TransitivityReport test_transitivity(const Map& f, const Rational& eps, int horizon, Exec exec) {
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  TransitivityReport r;
  r.eps = eps;
  r.horizon = horizon;
  r.grid = grid_for(space_of(f), eps);
  const std::size_t m = r.grid.size();
  r.pair_table.assign(m, std::vector<int>(m, -1));
  if (const auto* rot = std::get_if<RotationMap>(&f)) {
    r.mode = TransitivityMode::RotationClosedForm;
    const Rational len = r.grid.front().length();
    parallel_for(m, exec, [&](std::size_t u) {
      Rational start = r.grid[u].lo;
      std::size_t open = m;
      for (int n = 1; n <= horizon && open > 0; ++n) {
        start = (start + rot->fraction).frac();
        for (std::size_t v = 0; v < m; ++v) {
          if (r.pair_table[u][v] < 0 && arcs_meet(start, r.grid[v].lo, len)) {
            r.pair_table[u][v] = n;
            --open;
          }
        }
      }
    });
    r.transitive_on_grid = rot->exactness == Exactness::IrrationalApprox;
    r.notes.push_back(r.transitive_on_grid ? "irrational rotation: transitive (closed form)"
                                           : "rational rotation: every orbit is finite, not transitive");
  } else {
    if (!is_interval_map(f)) throw UnsupportedOperation("transitivity test needs an interval map or a rotation");
    parallel_for(m, exec, [&](std::size_t u) {
      RationalInterval image = r.grid[u];
      std::size_t open = m;
      for (int n = 1; n <= horizon && open > 0; ++n) {
        image = image_of_interval(f, image);
        for (std::size_t v = 0; v < m; ++v) {
          if (r.pair_table[u][v] < 0 && open_sets_meet(image, r.grid[v])) {
            r.pair_table[u][v] = n;
            --open;
          }
        }
      }
    });
    r.transitive_on_grid = true;
  }
  for (std::size_t u = 0; u < m && !r.failing_pair; ++u) {
    for (std::size_t v = 0; v < m; ++v) {
      if (r.pair_table[u][v] < 0) {
        r.failing_pair = std::make_pair(u, v);
        break;
      }
    }
  }
  if (r.mode == TransitivityMode::ExactPL) {
    r.transitive_on_grid = !r.failing_pair;
  } else if (!r.transitive_on_grid && !r.failing_pair) {
    r.notes.push_back("every grid pair met within the horizon; the grid is too coarse to separate the finite orbits");
  } else if (r.transitive_on_grid && r.failing_pair) {
    r.notes.push_back("some grid pairs need more than " + std::to_string(horizon) + " iterates");
  }
  return r;
}

bool pair_reverifies(const Map& f, const RationalInterval& u, const RationalInterval& v, int n) {
  if (n < 1) return false;
  if (const auto* rot = std::get_if<RotationMap>(&f)) {
    const Rational len = u.length();
    for (int j = 1; j <= n; ++j) {
      const bool meet = arcs_meet((u.lo + Rational(j) * rot->fraction).frac(), v.lo, len);
      if (meet != (j == n)) return false;
    }
    return true;
  }
  RationalInterval image = u;
  for (int j = 1; j <= n; ++j) {
    image = image_of_interval(f, image);
    if (open_sets_meet(image, v) != (j == n)) return false;
  }
  return true;
}

Json to_json(const TransitivityReport& r) {
  Json grid = Json::array();
  for (const auto& g : r.grid) grid.push_back(to_json(g));
  Json out{{"record", "transitivity"},
           {"mode", std::string(to_string(r.mode))},
           {"eps", r.eps.str()},
           {"horizon", r.horizon},
           {"verdict", r.transitive_on_grid ? "transitive-on-grid" : "fails-with-pair"},
           {"grid", grid},
           {"pair_table", r.pair_table}};
  out["failing_pair"] = r.failing_pair ? Json::array({r.failing_pair->first, r.failing_pair->second}) : Json(nullptr);
  out["notes"] = r.notes;
  return out;
}

std::string pair_table_csv(const TransitivityReport& r) {
  std::string out = "U\\V";
  for (const auto& g : r.grid) out += "," + g.str();
  out += "\n";
  for (std::size_t u = 0; u < r.grid.size(); ++u) {
    out += r.grid[u].str();
    for (int cell : r.pair_table[u]) out += "," + std::to_string(cell);
    out += "\n";
  }
  return out;
}

// ---- sensitivity -----------------------------------------------------------

namespace {

std::vector<Point> ball_candidates(const Point& x, const Rational& pe, const std::vector<Rational>& interior) {
  std::vector<Point> out;
  const Rational near = pe * Rational(1023, 1024);
  if (const auto* ip = std::get_if<IntervalPoint>(&x)) {
    const Rational lo = ip->value - pe, hi = ip->value + pe;
    out.emplace_back(IntervalPoint(lo < 0 ? Rational(0) : ip->value - near));
    out.emplace_back(IntervalPoint(hi > 1 ? Rational(1) : ip->value + near));
    for (const auto& b : interior) {
      if (lo < b && b < hi && 0 <= b && b <= 1) out.emplace_back(IntervalPoint(b));
    }
  } else if (const auto* cp = std::get_if<CirclePoint>(&x)) {
    out.emplace_back(CirclePoint(cp->fraction - near));
    out.emplace_back(CirclePoint(cp->fraction + near));
  } else {
    const auto& w = std::get<CantorWord>(x);
    // Words agreeing with x on the first floor(1/pe) symbols are in the ball.
    const mpz_class reach = (Rational(1) / pe).floor();
    const long keep = reach.fits_slong_p() ? reach.get_si() : w.length();
    for (long j = keep + 1; j <= w.length(); ++j) {
      out.emplace_back(CantorWord(w.packed() ^ (std::uint64_t{1} << (j - 1)), w.length()));
    }
  }
  return out;
}

}  // namespace

SensitivityReport test_sensitivity(const Map& f, const Rational& delta, const Rational& probe_eps, int horizon,
                                   const std::vector<Point>& probes, Exec exec) {
  if (!(delta > 0) || !(probe_eps > 0)) throw DomainError("delta and probe_eps must be positive");
  if (delta < probe_eps) {
    throw DomainError("probe_eps must not exceed delta: points of the ball would already be delta apart");
  }
  if (horizon < 1) throw DomainError("horizon must be >= 1");
  for (const auto& p : probes) {
    if (space_of(p) != space_of(f)) throw UsageError("probe " + to_string(p) + " lives in another space");
  }
  SensitivityReport r;
  r.delta = delta;
  r.probe_eps = probe_eps;
  r.horizon = horizon;
  // Exact powers of explicit PL maps supply the breakpoints where |f^n(y) - f^n(x)| peaks.
  std::vector<std::optional<PLMap>> powers;
  if (const auto* pl = std::get_if<PLMap>(&f)) {
    PLMap acc = PLMap::identity();
    for (int n = 1; n <= horizon; ++n) {
      acc = compose(*pl, acc);
      if (acc.breakpoints().size() > (std::size_t{1} << 16)) break;
      powers.emplace_back(acc);
    }
    if (static_cast<int>(powers.size()) < horizon) {
      r.notes.push_back("powers beyond n = " + std::to_string(powers.size()) + " use end-point candidates only");
    }
  }
  std::vector<std::optional<SensitivityWitness>> found(probes.size());
  parallel_for(probes.size(), exec, [&](std::size_t i) {
    const Point& x = probes[i];
    std::vector<Point> fixed = ball_candidates(x, probe_eps, {});
    if (std::holds_alternative<IntervalPoint>(x) && !std::holds_alternative<PLMap>(f)) {
      // Lazy maps: uniform points across the ball.
      const Rational v = std::get<IntervalPoint>(x).value;
      std::vector<Rational> inner;
      for (long j = -63; j <= 63; ++j) inner.push_back(v + probe_eps * Rational(j, 64));
      fixed = ball_candidates(x, probe_eps, inner);
    }
    std::vector<Point> ys = fixed;
    Point fx = x;
    for (int n = 1; n <= horizon && !found[i]; ++n) {
      fx = step_map(f, fx).point;
      for (auto& y : ys) y = step_map(f, y).point;
      if (n <= static_cast<int>(powers.size())) {
        const PLMap& fn = *powers[static_cast<std::size_t>(n - 1)];
        const auto cands = ball_candidates(x, probe_eps, fn.breakpoints());
        for (const auto& y : cands) {
          const Rational value = fn(std::get<IntervalPoint>(y).value);
          const Rational d = interval_metric(value, std::get<IntervalPoint>(fx).value);
          if (delta < d && (!found[i] || found[i]->distance < d)) found[i] = SensitivityWitness{x, y, n, d};
        }
        continue;
      }
      for (std::size_t c = 0; c < ys.size(); ++c) {
        const Rational d = metric(ys[c], fx);
        if (delta < d && (!found[i] || found[i]->distance < d)) found[i] = SensitivityWitness{x, fixed[c], n, d};
      }
    }
  });
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (found[i]) {
      r.witnesses.push_back(*found[i]);
    } else {
      r.failures.push_back(probes[i]);
    }
  }
  return r;
}

bool witness_reverifies(const Map& f, const SensitivityReport& r, const SensitivityWitness& w) {
  if (!(metric(w.x, w.y) < r.probe_eps) || w.n < 1) return false;
  Point a = w.x, b = w.y;
  for (int j = 0; j < w.n; ++j) {
    a = step_map(f, a).point;
    b = step_map(f, b).point;
  }
  const Rational d = metric(a, b);
  return d == w.distance && r.delta < d;
}

Json to_json(const SensitivityReport& r) {
  Json ws = Json::array();
  for (const auto& w : r.witnesses) {
    ws.push_back(Json{{"x", to_json(w.x)}, {"y", to_json(w.y)}, {"n", w.n}, {"distance", w.distance.str()}});
  }
  Json fails = Json::array();
  for (const auto& p : r.failures) fails.push_back(to_json(p));
  return Json{{"record", "sensitivity"}, {"delta", r.delta.str()}, {"probe_eps", r.probe_eps.str()},
              {"horizon", r.horizon},    {"witnesses", ws},           {"failures", fails},
              {"notes", r.notes}};
}

// ---- invariant intervals ---------------------------------------------------

InvariantResult find_invariant_interval(const Map& f, const RationalInterval& seed, int max_rounds, int max_period) {
  if (!is_interval_map(f)) throw UsageError("invariant intervals need an interval map");
  if (seed.lo < 0 || 1 < seed.hi) throw DomainError("seed must lie in [0,1]");
  InvariantResult out;
  out.interval = seed;
  auto stabilize = [&](int p, RationalInterval& k, int& rounds) {
    for (rounds = 0; rounds < max_rounds; ++rounds) {
      const RationalInterval image = image_power(f, k, p);
      if (k.contains(image)) return true;
      k = hull(k, image);
    }
    return false;
  };
  const bool ok = stabilize(1, out.interval, out.rounds);
  out.status = ok ? InvariantStatus::Stabilized : InvariantStatus::Inconclusive;
  for (int p = 2; p <= max_period; ++p) {
    RationalInterval k = seed;
    int rounds = 0;
    if (!stabilize(p, k, rounds)) continue;
    std::vector<RationalInterval> family{k};
    for (int i = 1; i < p; ++i) family.push_back(image_of_interval(f, family.back()));
    bool disjoint = true;
    for (std::size_t a = 0; a < family.size() && disjoint; ++a) {
      for (std::size_t b = a + 1; b < family.size() && disjoint; ++b) {
        disjoint = interiors_disjoint(family[a], family[b]);
      }
    }
    if (disjoint) {
      out.cycle = family;
      break;
    }
  }
  return out;
}

Json to_json(const InvariantResult& r) {
  Json cycle = Json::array();
  for (const auto& c : r.cycle) cycle.push_back(to_json(c));
  return Json{{"record", "invariant_interval"},
              {"status", r.status == InvariantStatus::Stabilized ? "stabilized" : "inconclusive"},
              {"interval", to_json(r.interval)},
              {"rounds", r.rounds},
              {"cycle", cycle}};
}

// ---- fixed points and preimages --------------------------------------------

FixInclusionReport check_fix_inclusion(const Map& f_map, const Map& fn_map, int j_max) {
  const auto* f = std::get_if<PLMap>(&f_map);
  const auto* fn = std::get_if<PLMap>(&fn_map);
  if (f == nullptr || fn == nullptr) {
    throw UsageError("fix inclusion compares two explicit PL maps, got " + describe(f_map) + " and " +
                     describe(fn_map));
  }
  if (j_max < 0) throw DomainError("j_max must be >= 0");
  FixInclusionReport r;
  r.fix = fixed_points(*f);
  for (const auto& p : r.fix.points) {
    if ((*fn)(p) != p) r.not_fixed.push_back(p);
  }
  for (const auto& iv : r.fix.intervals) {
    r.notes.push_back("f is the identity on " + iv.str() + "; compared on isolated points only");
    if ((*fn)(iv.lo) != iv.lo) r.not_fixed.push_back(iv.lo);
    if ((*fn)(iv.hi) != iv.hi) r.not_fixed.push_back(iv.hi);
  }
  r.fix_preserved = r.not_fixed.empty();
  std::vector<RationalInterval> pts;
  for (const auto& p : r.fix.points) pts.emplace_back(p, p);
  IntervalUnion a(pts), b(pts);
  for (int j = 1; j <= j_max; ++j) {
    a = preimage(*f, a);
    b = preimage(*fn, b);
    r.depth_checked = j;
    if (!a.intervals().empty() || !b.intervals().empty()) {
      r.notes.push_back("level " + std::to_string(j) + " contains plateau intervals; compared on isolated points");
    }
    const auto pa = a.points(), pb = b.points();
    if (pa != pb) {
      r.discrepancy_level = j;
      std::set_difference(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(r.only_in_f));
      std::set_difference(pb.begin(), pb.end(), pa.begin(), pa.end(), std::back_inserter(r.only_in_fn));
      break;
    }
  }
  r.holds = r.fix_preserved && !r.discrepancy_level;
  return r;
}

Json to_json(const FixInclusionReport& r) {
  auto list = [](const std::vector<Rational>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(x.str());
    return a;
  };
  Json ivs = Json::array();
  for (const auto& iv : r.fix.intervals) ivs.push_back(to_json(iv));
  return Json{{"record", "fix_inclusion"},
              {"fixed_points", list(r.fix.points)},
              {"fixed_intervals", ivs},
              {"fix_preserved", r.fix_preserved},
              {"not_fixed", list(r.not_fixed)},
              {"depth_checked", r.depth_checked},
              {"discrepancy_level", opt_json(r.discrepancy_level)},
              {"only_in_f", list(r.only_in_f)},
              {"only_in_fn", list(r.only_in_fn)},
              {"holds", r.holds},
              {"notes", r.notes}};
}

std::vector<Rational> point_preimages(const Map& f, const Rational& y, bool& truncated, int max_blocks) {
  std::vector<Rational> out;
  if (const auto* pl = std::get_if<PLMap>(&f)) {
    solve_segment(pl->breakpoints(), pl->values(), y, out);
  } else if (const auto* lz = std::get_if<LazyPLMapPtr>(&f)) {
    for (const auto& seg : (*lz)->fixed()) solve_segment(seg.xs, seg.ys, y, out);
    for (const auto& seq : (*lz)->sequences()) {
      if (seq.anchor_value == y) out.push_back(seq.anchor);
      const Rational gap = (y - seq.anchor_value).abs();
      for (int j = seq.first_index;; ++j) {
        if (j - seq.first_index >= max_blocks) {
          truncated = true;
          break;
        }
        const PLSegment b = seq.block(j);
        Rational spread = 0;
        for (const auto& v : b.ys) spread = max(spread, (v - seq.anchor_value).abs());
        // Later blocks contract towards the anchor value and cannot reach y.
        if (j >= seq.self_similar_from && spread < gap) break;
        solve_segment(b.xs, b.ys, y, out);
      }
    }
  } else {
    throw UsageError("preimages need an interval map");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PrefixAgreementReport check_prefix_agreement(const NDSystem& sys, const Rational& p, int depth, int N_max) {
  const Map& f = sys.limit();
  if (!is_interval_map(f)) throw UsageError("prefix agreement needs an interval system");
  if (depth < 0 || N_max < 1) throw DomainError("depth must be >= 0 and N_max >= 1");
  if (p < 0 || 1 < p) throw DomainError("p must lie in [0,1]");
  if (evaluate_interval(f, p) != p) throw PreconditionError(p.str() + " is not a fixed point of the limit");
  PrefixAgreementReport r;
  r.p = p;
  r.depth = depth;
  r.N_max = N_max;
  r.notes.push_back("Prefix(f) read as {x : f^j(x) = p for some j, p fixed by f}");
  std::vector<std::pair<Rational, int>> tree{{p, 0}};
  std::set<Rational> seen{p};
  std::vector<Rational> level{p};
  for (int j = 1; j <= depth; ++j) {
    std::vector<Rational> next;
    for (const auto& y : level) {
      for (auto& x : point_preimages(f, y, r.truncated_tree)) {
        if (seen.insert(x).second) {
          tree.emplace_back(x, j);
          next.push_back(x);
        }
      }
    }
    level = std::move(next);
  }
  if (r.truncated_tree) r.notes.push_back("infinitely many preimages; the first blocks of each sequence are used");
  std::sort(tree.begin(), tree.end());
  r.points.resize(tree.size());
  parallel_for(tree.size(), Exec::Parallel, [&](std::size_t i) {
    PrefixPoint pt;
    pt.x = tree[i].first;
    pt.level = tree[i].second;
    const Rational fx = evaluate_interval(f, pt.x);
    for (int n = N_max; n >= 1; --n) {
      if (evaluate_interval(sys.at(n), pt.x) != fx) {
        pt.last_disagreement = n;
        break;
      }
    }
    if (!pt.last_disagreement) {
      pt.n0 = 1;
    } else if (*pt.last_disagreement < N_max) {
      pt.n0 = *pt.last_disagreement + 1;
    }
    r.points[i] = pt;
  });
  return r;
}

Json to_json(const PrefixAgreementReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) {
    pts.push_back(Json{{"x", p.x.str()},
                       {"level", p.level},
                       {"n0", opt_json(p.n0)},
                       {"last_disagreement", opt_json(p.last_disagreement)}});
  }
  return Json{{"record", "prefix_agreement"}, {"p", r.p.str()},         {"depth", r.depth},
              {"N_max", r.N_max},             {"points", pts},          {"truncated_tree", r.truncated_tree},
              {"notes", r.notes}};
}

// ---- agreement and eventual equality ---------------------------------------

Rational agreement_measure(const Map& f, const Map& g, const RationalInterval& region) {
  if (region.lo < 0 || 1 < region.hi) throw DomainError("region must lie in [0,1]");
  const auto* pf = std::get_if<PLMap>(&f);
  const auto* pg = std::get_if<PLMap>(&g);
  if (pf != nullptr && pg != nullptr) return pl_agreement(*pf, *pg, region);
  const auto* lf = std::get_if<LazyPLMapPtr>(&f);
  const auto* lg = std::get_if<LazyPLMapPtr>(&g);
  if (lf != nullptr && lg != nullptr) return agreement_measure(**lf, **lg, region);
  throw UsageError("agreement measure compares two explicit PL maps or two lazy PL maps");
}

std::string_view to_string(EventualStatus s) {
  switch (s) {
    case EventualStatus::EventualEquality: return "eventual-equality";
    case EventualStatus::ConsistentViolation: return "violation-with-ccstar-witness";
    case EventualStatus::TheoremCheckFailure: return "theorem-check-failure";
    case EventualStatus::PreconditionUnmet: return "precondition-unmet";
  }
  return "?";
}

EventualEqualityReport check_eventual_equality(const NDSystem& sys, const Rational& eps, const SweepOptions& opt) {
  EventualEqualityReport r;
  r.N_max = opt.N_max;
  const auto* f = std::get_if<PLMap>(&sys.limit());
  if (f == nullptr) {
    r.notes.push_back("limit " + describe(sys.limit()) +
                      " is not an explicit PL map with finitely many pieces; constant slope cannot hold");
    return r;
  }
  const SlopeProfile prof = slope_profile(*f);
  if (!prof.constant_abs_slope) {
    r.notes.push_back("limit slopes are not constant in absolute value");
    return r;
  }
  const TransitivityReport tr = test_transitivity(sys.limit(), Rational(1, 8), 32, opt.exec);
  if (!tr.transitive_on_grid) {
    r.notes.push_back("limit is not transitive on the 1/8 grid within 32 iterates");
    return r;
  }
  r.notes.push_back("limit transitive on the 1/8 grid within 32 iterates, |slope| = " + prof.min_abs_slope.str());
  for (int n = 1; n <= opt.N_max; ++n) {
    const Map fn = sys.at(n);
    if (!std::holds_alternative<PLMap>(fn)) {
      r.notes.push_back("f_" + std::to_string(n) + " is not an explicit PL map");
      r.agreement.clear();
      return r;
    }
    r.agreement.push_back(agreement_measure(fn, sys.limit(), RationalInterval(0, 1)));
  }
  for (int n = opt.N_max; n >= 1; --n) {
    if (r.agreement[static_cast<std::size_t>(n - 1)] != 1) {
      r.violating_n = n;
      break;
    }
  }
  if (!r.violating_n) {
    r.n0 = 1;
  } else if (*r.violating_n < opt.N_max) {
    r.n0 = *r.violating_n + 1;
  }
  if (r.n0) {
    r.status = EventualStatus::EventualEquality;
    return r;
  }
  r.ccstar = check_CCstar(sys, eps, opt);
  if (r.ccstar->verdict == Verdict::FailsWithWitness) {
    r.status = EventualStatus::ConsistentViolation;
    r.notes.push_back("f_n differs from f up to N_max and CC* fails: consistent with eventual equality");
  } else {
    r.status = EventualStatus::TheoremCheckFailure;
    r.notes.push_back("THEOREM CHECK FAILURE: f_n differs from f up to N_max while CC* holds on the truncation");
  }
  return r;
}

Json to_json(const EventualEqualityReport& r) {
  Json ag = Json::array();
  for (const auto& a : r.agreement) ag.push_back(a.str());
  return Json{{"record", "eventual_equality"},
              {"status", std::string(to_string(r.status))},
              {"N_max", r.N_max},
              {"n0", opt_json(r.n0)},
              {"violating_n", opt_json(r.violating_n)},
              {"agreement", ag},
              {"ccstar", r.ccstar ? to_json(*r.ccstar) : Json(nullptr)},
              {"notes", r.notes}};
}

// ---- conjugation -----------------------------------------------------------

NDSystem conjugate_system(const NDSystem& sys, const PLMap& h) {
  if (!h.is_homeomorphism()) throw PreconditionError("conjugacy must be a PL homeomorphism of [0,1]");
  if (sys.space() != Space::Interval) throw UsageError("conjugation acts on interval systems");
  const PLMap h_inv = h.inverse();
  auto conj = [&](const Map& f) -> Map {
    const auto* pl = std::get_if<PLMap>(&f);
    if (pl == nullptr) throw UnsupportedOperation("conjugation needs explicit PL maps, got " + describe(f));
    return compose(h, compose(*pl, h_inv)).simplified();
  };
  std::vector<Map> prefix;
  for (const auto& f : sys.prefix()) prefix.push_back(conj(f));
  if (sys.family_ptr()) return NDSystem(std::move(prefix), std::make_shared<ConjugatedFamily>(sys.family_ptr(), h));
  return NDSystem(Space::Interval, std::move(prefix), conj(sys.limit()));
}

// ---- equivalence instances --------------------------------------------------

std::string_view to_string(EquivalenceStatus s) {
  switch (s) {
    case EquivalenceStatus::Consistent: return "consistent";
    case EquivalenceStatus::InstanceCheckFailure: return "instance-check-failure";
    case EquivalenceStatus::HypothesisUnmet: return "hypothesis-unmet";
  }
  return "?";
}

EquivalenceReport check_equivalence_instance(const NDSystem& sys, const Rational& eps, int N_max, int horizon,
                                       const SweepOptions& opt) {
  SweepOptions o = opt;
  o.N_max = N_max;
  EquivalenceReport r;
  r.eps = eps;
  r.N_max = N_max;
  r.horizon = horizon;
  r.l = check_L(sys, eps, o);
  const auto grid = grid_for(sys.space(), eps);
  const std::size_t m = grid.size();

  // (1) f_n^n(U) meets V for some n <= N_max.
  std::vector<std::vector<bool>> hit(m, std::vector<bool>(m, false));
  if (sys.space() == Space::Circle) {
    std::vector<Rational> shifts;
    for (int n = 1; n <= N_max; ++n) shifts.push_back(window_rotation(sys, n, n).fraction);
    const Rational len = grid.front().length();
    parallel_for(m, o.exec, [&](std::size_t u) {
      for (const auto& s : shifts) {
        const Rational start = (grid[u].lo + s).frac();
        for (std::size_t v = 0; v < m; ++v) hit[u][v] = hit[u][v] || arcs_meet(start, grid[v].lo, len);
      }
    });
  } else {
    std::vector<Map> maps;
    for (int j = 1; j <= 2 * N_max - 1; ++j) maps.push_back(sys.at(j));
    parallel_for(m, o.exec, [&](std::size_t u) {
      for (int n = 1; n <= N_max; ++n) {
        RationalInterval image = grid[u];
        for (int j = n; j <= 2 * n - 1; ++j) image = image_of_interval(maps[static_cast<std::size_t>(j - 1)], image);
        for (std::size_t v = 0; v < m; ++v) hit[u][v] = hit[u][v] || open_sets_meet(image, grid[v]);
      }
    });
  }
  r.window_hitting = true;
  for (std::size_t u = 0; u < m && r.window_hitting; ++u) {
    for (std::size_t v = 0; v < m; ++v) {
      if (!hit[u][v]) {
        r.window_hitting = false;
        r.missed_pair = std::make_pair(u, v);
        break;
      }
    }
  }

  // (3) a net point with full DO coverage.
  for (const auto& x0 : epsilon_net(sys.space(), eps)) {
    if (check_DO(sys, x0, eps, o).verdict == Verdict::HoldsOnTruncation) {
      r.dense_orbit = true;
      r.x0 = x0;
      break;
    }
  }

  // (4) the limit.
  r.limit_transitive = test_transitivity(sys.limit(), eps, horizon, o.exec).transitive_on_grid;

  if (r.l.verdict == Verdict::FailsWithWitness) {
    r.status = EquivalenceStatus::HypothesisUnmet;
    r.notes.push_back("(L) fails on the truncation; the equivalence is not asserted");
  } else if (r.window_hitting == r.dense_orbit && r.dense_orbit == r.limit_transitive) {
    r.status = EquivalenceStatus::Consistent;
  } else {
    r.status = EquivalenceStatus::InstanceCheckFailure;
    r.notes.push_back("INSTANCE CHECK FAILURE: (1), (3) and (4) disagree");
  }
  return r;
}

Json to_json(const EquivalenceReport& r) {
  Json out{{"record", "equivalence_instance"},
           {"status", std::string(to_string(r.status))},
           {"eps", r.eps.str()},
           {"N_max", r.N_max},
           {"horizon", r.horizon},
           {"L_verdict", std::string(to_string(r.l.verdict))},
           {"window_hitting", r.window_hitting},
           {"dense_orbit", r.dense_orbit},
           {"limit_transitive", r.limit_transitive}};
  out["missed_pair"] = r.missed_pair ? Json::array({r.missed_pair->first, r.missed_pair->second}) : Json(nullptr);
  out["x0"] = r.x0 ? to_json(*r.x0) : Json(nullptr);
  out["notes"] = r.notes;
  return out;
}

}  // namespace nds
