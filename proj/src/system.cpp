#include "nds/system.hpp"

#include "nds/errors.hpp"
#include "nds/serialization.hpp"

namespace nds {

namespace {

std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << bits) - 1);
}

bool all_rotations(const NDSystem& sys) { return sys.space() == Space::Circle; }

// Explicit PL fibers on [n, n+k); false if any is lazy.
bool explicit_pl_window(const NDSystem& sys, int n, int k) {
  for (int j = n; j < n + k; ++j) {
    if (!std::holds_alternative<PLMap>(sys.at(j))) return false;
  }
  return true;
}

const MapFamily& require_family(const MapFamilyPtr& family) {
  if (!family) throw UsageError("family must not be null");
  return *family;
}

}  // namespace

NDSystem::NDSystem(Space space, std::vector<Map> prefix, Map limit)
    : space_(space), prefix_(std::move(prefix)), limit_(std::move(limit)) {
  validate();
}

NDSystem::NDSystem(std::vector<Map> prefix, MapFamilyPtr family)
    : space_(require_family(family).space()),
      prefix_(std::move(prefix)),
      family_(std::move(family)),
      limit_(family_->limit()) {
  validate();
}

void NDSystem::validate() {
  if (space_of(limit_) != space_) throw UsageError("limit map lives in another space");
  if (!is_surjective(limit_)) warnings_.push_back("limit map is not surjective");
  for (std::size_t i = 0; i < prefix_.size(); ++i) {
    if (space_of(prefix_[i]) != space_) {
      throw UsageError("prefix map f_" + std::to_string(i + 1) + " lives in another space");
    }
    if (!is_surjective(prefix_[i])) {
      warnings_.push_back("f_" + std::to_string(i + 1) + " is not surjective");
    }
  }
}

Map NDSystem::at(int n) const {
  if (n < 1) throw DomainError("system index must be >= 1, got " + std::to_string(n));
  if (static_cast<std::size_t>(n) <= prefix_.size()) return prefix_[static_cast<std::size_t>(n) - 1];
  if (family_) return family_->at(n);
  return limit_;
}

PointStep step_map(const Map& f, const Point& x) {
  if (const auto* a = std::get_if<AddingMachineMap>(&f)) {
    const auto* w = std::get_if<CantorWord>(&x);
    if (w == nullptr) throw UsageError("adding machine applied to a non-Cantor point");
    const auto s = a->step(*w);
    return {s.word, s.saturated};
  }
  return {evaluate(f, x), false};
}

PointStep evaluate(const Composite& f, const Point& x) {
  if (const auto* m = std::get_if<PLMap>(&f)) return step_map(Map(*m), x);
  if (const auto* m = std::get_if<RotationMap>(&f)) return step_map(Map(*m), x);
  if (const auto* s = std::get_if<OdometerShift>(&f)) {
    const auto* w = std::get_if<CantorWord>(&x);
    if (w == nullptr || w->length() != s->word_length) throw UsageError("odometer shift needs a word of length L");
    const std::uint64_t mask = low_mask(s->active);
    const std::uint64_t low = w->packed() & mask;
    const std::uint64_t sum = low + s->count;
    const bool overflow = sum < low || (s->active < 64 && sum > mask);
    return {CantorWord((w->packed() & ~mask) | (sum & mask), s->word_length), overflow && !s->wraps};
  }
  PointStep out{x, false};
  for (const auto& g : std::get<Evaluator>(f).chain) {
    PointStep next = step_map(g, out.point);
    out.point = std::move(next.point);
    out.saturated = out.saturated || next.saturated;
  }
  return out;
}

RotationMap window_rotation(const NDSystem& sys, int n, int k) {
  if (!all_rotations(sys)) throw UsageError("window rotation needs a circle system");
  RotationMap acc = RotationMap::identity();
  for (int j = n; j < n + k; ++j) acc = then(acc, std::get<RotationMap>(sys.at(j)));
  return acc;
}

Composition window_compose(const NDSystem& sys, int n, int k, std::size_t budget) {
  if (n < 1 || k < 0) throw DomainError("window_compose needs n >= 1 and k >= 0");
  if (k == 0) {
    switch (sys.space()) {
      case Space::Interval: return {PLMap::identity()};
      case Space::Circle: return {RotationMap::identity()};
      case Space::Cantor: {
        const auto& a = std::get<AddingMachineMap>(sys.limit());
        return {OdometerShift{a.word_length, a.word_length, true, 0}};
      }
    }
  }
  if (all_rotations(sys)) return {window_rotation(sys, n, k)};
  if (sys.space() == Space::Interval && explicit_pl_window(sys, n, k)) {
    PLMap acc = std::get<PLMap>(sys.at(n));
    for (int j = n + 1; j < n + k; ++j) {
      acc = compose(std::get<PLMap>(sys.at(j)), acc);
      if (acc.breakpoints().size() > budget) {
        Evaluator e;
        for (int i = n; i < n + k; ++i) e.chain.push_back(sys.at(i));
        return {std::move(e), true};
      }
    }
    return {std::move(acc)};
  }
  Evaluator e;
  e.chain.reserve(static_cast<std::size_t>(k));
  for (int j = n; j < n + k; ++j) e.chain.push_back(sys.at(j));
  return {std::move(e)};
}

Composition map_power(const Map& g, long k, std::size_t budget) {
  if (k < 0) throw DomainError("power must be nonnegative");
  if (const auto* r = std::get_if<RotationMap>(&g)) return {rotation_power(*r, k)};
  if (const auto* a = std::get_if<AddingMachineMap>(&g)) {
    return {OdometerShift{a->word_length, a->active_length(), a->first_n.has_value(),
                          static_cast<std::uint64_t>(k)}};
  }
  if (const auto* p = std::get_if<PLMap>(&g)) {
    if (k <= static_cast<long>(std::numeric_limits<int>::max())) {
      if (auto pk = power(*p, static_cast<int>(k), budget)) return {std::move(*pk)};
    }
    return {Evaluator{std::vector<Map>(static_cast<std::size_t>(k), g)}, true};
  }
  return {Evaluator{std::vector<Map>(static_cast<std::size_t>(k), g)}};
}

Composition fiber_power(const NDSystem& sys, int n, int k, std::size_t budget) {
  if (n < 1 || k < 0) throw DomainError("fiber_power needs n >= 1 and k >= 0");
  return map_power(sys.at(n), k, budget);
}

std::string_view to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::Orbit: return "orbit";
    case OrbitKind::DiagonalNds: return "diagonal-nds";
    case OrbitKind::DiagonalFiber: return "diagonal-fiber";
    case OrbitKind::Autonomous: return "autonomous";
  }
  return "?";
}

OrbitKind parse_orbit_kind(std::string_view s) {
  if (s == "orbit") return OrbitKind::Orbit;
  if (s == "diagonal-nds") return OrbitKind::DiagonalNds;
  if (s == "diagonal-fiber") return OrbitKind::DiagonalFiber;
  if (s == "autonomous") return OrbitKind::Autonomous;
  throw UsageError("unknown orbit kind '" + std::string(s) + "'");
}

OrbitRecord orbit(const NDSystem& sys, const Point& x, int N, OrbitKind kind) {
  if (N < 1) throw DomainError("orbit length must be >= 1");
  if (space_of(x) != sys.space()) throw UsageError("base point lives in another space");
  OrbitRecord rec{x, kind, {}, false};
  rec.entries.reserve(static_cast<std::size_t>(N));
  auto push = [&](int n, PointStep s) {
    rec.saturated = rec.saturated || s.saturated;
    rec.entries.emplace_back(n, std::move(s.point));
  };
  switch (kind) {
    case OrbitKind::Orbit: {
      PointStep cur{x, false};
      for (int n = 1; n <= N; ++n) {
        PointStep next = step_map(sys.at(n), cur.point);
        next.saturated = next.saturated || cur.saturated;
        cur = next;
        push(n, cur);
      }
      break;
    }
    case OrbitKind::Autonomous: {
      PointStep cur{x, false};
      for (int n = 1; n <= N; ++n) {
        PointStep next = step_map(sys.limit(), cur.point);
        next.saturated = next.saturated || cur.saturated;
        cur = next;
        push(n, cur);
      }
      break;
    }
    case OrbitKind::DiagonalNds: {
      if (all_rotations(sys)) {
        // Running window sum: S_{n+1} = S_n - a_n + a_{2n} + a_{2n+1}.
        RotationMap s = window_rotation(sys, 1, 1);
        for (int n = 1; n <= N; ++n) {
          push(n, {s(std::get<CirclePoint>(x)), false});
          const auto a = [&](int j) { return std::get<RotationMap>(sys.at(j)); };
          s = then(then(then(s, rotation_power(a(n), -1)), a(2 * n)), a(2 * n + 1));
        }
      } else {
        for (int n = 1; n <= N; ++n) {
          PointStep cur{x, false};
          for (int j = n; j < 2 * n; ++j) {
            PointStep next = step_map(sys.at(j), cur.point);
            cur = {std::move(next.point), cur.saturated || next.saturated};
          }
          push(n, std::move(cur));
        }
      }
      break;
    }
    case OrbitKind::DiagonalFiber:
      for (int n = 1; n <= N; ++n) {
        const Map fn = sys.at(n);
        if (!is_interval_map(fn)) {
          push(n, evaluate(map_power(fn, n).map, x));
          continue;
        }
        PointStep cur{x, false};
        for (int j = 0; j < n; ++j) cur.point = step_map(fn, cur.point).point;
        push(n, std::move(cur));
      }
      break;
  }
  return rec;
}

IntervalUnion inverse_window_set(const NDSystem& sys, int n, const IntervalUnion& v) {
  if (n < 1) throw DomainError("inverse_window_set needs n >= 1");
  if (sys.space() != Space::Interval || !explicit_pl_window(sys, n, n)) {
    throw UnsupportedOperation("inverse window sets need explicit PL fibers");
  }
  IntervalUnion s = v;
  for (int j = 2 * n - 1; j >= n; --j) s = preimage(std::get<PLMap>(sys.at(j)), s);
  return s;
}

Json to_json(const NDSystem& sys) {
  Json out;
  out["space"] = std::string(to_string(sys.space()));
  Json prefix = Json::array();
  for (const auto& f : sys.prefix()) prefix.push_back(to_json(f));
  out["prefix"] = prefix;
  if (const auto* fam = sys.family()) {
    out["family"] = Json{{"name", fam->name()}, {"params", fam->params()}};
  } else {
    out["tail"] = "constant-equal-to-limit";
  }
  out["limit"] = to_json(sys.limit());
  return out;
}

NDSystem system_from_json(const Json& j, const std::string& path) {
  StrictObject o(j, path);
  const Json& space_j = o.required("space");
  Space space;
  try {
    space = parse_space(space_j.is_string() ? space_j.get<std::string>() : std::string());
  } catch (const std::exception& e) {
    throw ConfigError(o.path("space"), e.what());
  }
  std::vector<Map> prefix;
  if (const Json* p = o.optional("prefix")) {
    if (!p->is_array()) throw ConfigError(o.path("prefix"), "expected an array of maps");
    for (std::size_t i = 0; i < p->size(); ++i) {
      prefix.push_back(map_from_json((*p)[i], o.path("prefix") + "[" + std::to_string(i) + "]"));
    }
  }
  const Json* fam = o.optional("family");
  const Json* lim = o.optional("limit");
  if (const Json* tail = o.optional("tail")) {
    if (!(tail->is_string() && tail->get<std::string>() == "constant-equal-to-limit")) {
      throw ConfigError(o.path("tail"), "only \"constant-equal-to-limit\" is supported");
    }
    if (fam != nullptr) throw ConfigError(o.path("tail"), "conflicts with family");
  }
  o.finish();
  try {
    if (fam != nullptr) {
      StrictObject fo(*fam, o.path("family"));
      const Json& name = fo.required("name");
      if (!name.is_string()) throw ConfigError(fo.path("name"), "expected a string");
      const Json empty = Json::object();
      const Json* params = fo.optional("params");
      fo.finish();
      MapFamilyPtr family = make_family(name.get<std::string>(), params ? *params : empty);
      if (family->space() != space) throw ConfigError(o.path("space"), "family lives in another space");
      if (lim != nullptr) {
        const Map given = map_from_json(*lim, o.path("limit"));
        if (to_json(given) != to_json(family->limit())) {
          throw ConfigError(o.path("limit"), "does not match the family's limit");
        }
      }
      return NDSystem(std::move(prefix), std::move(family));
    }
    if (lim == nullptr) throw ConfigError(o.path("limit"), "required when no family is given");
    return NDSystem(space, std::move(prefix), map_from_json(*lim, o.path("limit")));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path.empty() ? "system" : path, e.what());
  }
}

}  // namespace nds
