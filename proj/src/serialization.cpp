#include "nds/serialization.hpp"

#include "nds/errors.hpp"
#include "nds/reflection_family.hpp"

namespace nds {

namespace {

bool is_reflection_family_id(const std::string& id) {
  return id == "G4" || id.rfind("G4-", 0) == 0 || id == "bump_reflection";
}

}  // namespace

StrictObject::StrictObject(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
}

const Json& StrictObject::required(const std::string& key) {
  const Json* v = optional(key);
  if (v == nullptr) throw ConfigError(path(key), "required field missing");
  return *v;
}

const Json* StrictObject::optional(const std::string& key) {
  seen_.insert(key);
  auto it = j_.find(key);
  return it == j_.end() ? nullptr : &*it;
}

void StrictObject::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
  }
}

Json to_json(const Rational& r) { return r.str(); }

Rational rational_from_json(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw ConfigError(path, "expected an exact rational \"p/q\"");
  try {
    return Rational::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

Rational positive_fraction_from_json(const Json& j, const std::string& path) {
  Rational r = rational_from_json(j, path);
  if (r <= 0 || r > 1) throw ConfigError(path, "must satisfy 0 < value <= 1, got " + r.str());
  return r;
}

long integer_from_json(const Json& j, const std::string& path, long min_value, long max_value) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const long v = j.get<long>();
  if (v < min_value || v > max_value) {
    throw ConfigError(path, "must lie in [" + std::to_string(min_value) + ", " +
                                std::to_string(max_value) + "], got " + std::to_string(v));
  }
  return v;
}

Json to_json(const Map& f) {
  Json out;
  if (const auto* m = std::get_if<PLMap>(&f)) {
    out["kind"] = "pl";
    Json xs = Json::array(), ys = Json::array();
    for (const auto& x : m->breakpoints()) xs.push_back(x.str());
    for (const auto& y : m->values()) ys.push_back(y.str());
    out["breakpoints"] = xs;
    out["values"] = ys;
  } else if (const auto* m = std::get_if<LazyPLMapPtr>(&f)) {
    out["kind"] = "lazy_pl";
    out["family"] = "G4";
    const std::string& name = (*m)->name();
    const std::string prefix = "reflection_fiber_";
    if (name.rfind(prefix, 0) == 0) out["index"] = std::stoi(name.substr(prefix.size()));
  } else if (const auto* m = std::get_if<RotationMap>(&f)) {
    out["kind"] = "rotation";
    out["fraction"] = m->exact() ? Json(m->fraction.str()) : Json(m->label);
  } else {
    const auto& a = std::get<AddingMachineMap>(f);
    out["kind"] = "adding_machine";
    out["truncation"] = a.first_n ? Json(*a.first_n) : Json("full");
    out["word_length"] = a.word_length;
  }
  return out;
}

Map map_from_json(const Json& j, const std::string& path) {
  StrictObject o(j, path);
  const Json& kind_j = o.required("kind");
  if (!kind_j.is_string()) throw ConfigError(o.path("kind"), "expected a string");
  const std::string kind = kind_j.get<std::string>();
  std::optional<Map> out;
  if (kind == "pl") {
    auto read_list = [&](const std::string& key) {
      const Json& arr = o.required(key);
      if (!arr.is_array()) throw ConfigError(o.path(key), "expected an array");
      std::vector<Rational> v;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        v.push_back(rational_from_json(arr[i], o.path(key) + "[" + std::to_string(i) + "]"));
      }
      return v;
    };
    auto xs = read_list("breakpoints");
    auto ys = read_list("values");
    try {
      out = PLMap(std::move(xs), std::move(ys));
    } catch (const std::exception& e) {
      throw ConfigError(path, e.what());
    }
  } else if (kind == "rotation") {
    const Json& f = o.required("fraction");
    if (f.is_string() && is_named_irrational(f.get<std::string>())) {
      out = RotationMap::irrational(f.get<std::string>());
    } else {
      out = RotationMap(rational_from_json(f, o.path("fraction")));
    }
  } else if (kind == "adding_machine") {
    const long length = integer_from_json(o.required("word_length"), o.path("word_length"), 1, 64);
    const Json& t = o.required("truncation");
    std::optional<int> first_n;
    if (!(t.is_string() && t.get<std::string>() == "full")) {
      first_n = static_cast<int>(integer_from_json(t, o.path("truncation"), 1, length));
    }
    out = AddingMachineMap(static_cast<int>(length), first_n);
  } else if (kind == "lazy_pl") {
    const Json& fam = o.required("family");
    if (!fam.is_string() || !is_reflection_family_id(fam.get<std::string>())) {
      throw ConfigError(o.path("family"), "unknown lazy family (supported: G4)");
    }
    if (const Json* idx = o.optional("index")) {
      out = reflection_fiber_map(static_cast<int>(integer_from_json(*idx, o.path("index"), 1, 1000)));
    } else {
      out = reflection_limit_map();
    }
  } else {
    throw ConfigError(o.path("kind"), "unknown map kind '" + kind + "'");
  }
  o.finish();
  return *out;
}

Json to_json(const Point& p) { return to_string(p); }

Point point_from_json(const Json& j, Space space, const std::string& path, int cantor_length) {
  try {
    switch (space) {
      case Space::Interval: return IntervalPoint(rational_from_json(j, path));
      case Space::Circle: return CirclePoint(rational_from_json(j, path));
      case Space::Cantor: {
        if (!j.is_string()) throw ConfigError(path, "expected a binary word");
        std::string w = j.get<std::string>();
        if (static_cast<int>(w.size()) > cantor_length) throw ConfigError(path, "word longer than L");
        w.resize(static_cast<std::size_t>(cantor_length), '0');
        return CantorWord::parse(w);
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "unknown space");
}

Json to_json(const RationalInterval& iv) { return Json::array({iv.lo.str(), iv.hi.str()}); }

RationalInterval interval_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(path, "expected [lo, hi]");
  Rational lo = rational_from_json(j[0], path + "[0]");
  Rational hi = rational_from_json(j[1], path + "[1]");
  if (!(0 <= lo && lo <= hi && hi <= 1)) throw ConfigError(path, "need 0 <= lo <= hi <= 1");
  return RationalInterval(std::move(lo), std::move(hi));
}

}  // namespace nds
