#include "nds/families.hpp"

#include "nds/errors.hpp"
#include "nds/reflection_family.hpp"
#include "nds/serialization.hpp"

namespace nds {

namespace {

void require_index(int n) {
  if (n < 1) throw DomainError("family index must be >= 1, got " + std::to_string(n));
}

}  // namespace

RotationDyadicFamily::RotationDyadicFamily(int offset) : offset_(offset) {
  if (offset < 0) throw DomainError("rotation offset must be nonnegative");
}

Json RotationDyadicFamily::params() const { return Json{{"offset", offset_}}; }

Rational RotationDyadicFamily::fraction(int n) const {
  require_index(n);
  return Rational::pow2(-(static_cast<long>(n) + offset_));
}

Map RotationDyadicFamily::at(int n) const { return RotationMap(fraction(n)); }

RotationConvergentFamily::RotationConvergentFamily(std::string target, int offset)
    : target_(std::move(target)), offset_(offset), limit_(RotationMap::irrational(target_)) {
  if (offset < 0) throw DomainError("convergent offset must be nonnegative");
}

Json RotationConvergentFamily::params() const {
  return Json{{"target", target_}, {"offset", offset_}};
}

Rational RotationConvergentFamily::fraction(int n) const {
  require_index(n);
  const auto j = static_cast<std::size_t>(n + offset_);
  std::lock_guard<std::mutex> lock(cache_guard_);
  if (cache_.size() <= j) cache_ = convergents(target_, static_cast<int>(std::max(2 * j, j + 64)));
  return cache_[j];
}

AddingMachineFamily::AddingMachineFamily(int word_length) : word_length_(word_length) {
  if (word_length < 1 || word_length > CantorWord::kMaxLength) {
    throw DomainError("word length must lie in [1, 64]");
  }
}

Json AddingMachineFamily::params() const { return Json{{"word_length", word_length_}}; }

Map AddingMachineFamily::at(int n) const {
  require_index(n);
  return AddingMachineMap(word_length_, std::min(n, word_length_));
}

ReflectionFamily::ReflectionFamily() : limit_(reflection_limit_map()) {}

Map ReflectionFamily::at(int n) const {
  require_index(n);
  const auto i = static_cast<std::size_t>(n);
  std::lock_guard<std::mutex> lock(cache_guard_);
  if (cache_.size() <= i) cache_.resize(i + 1);
  if (!cache_[i]) cache_[i] = reflection_fiber_map(n);
  return cache_[i];
}

PLMap bump_perturbation(const PLMap& base, const Rational& center, const Rational& half_width,
                        const Rational& height) {
  const Rational a = center - half_width;
  const Rational b = center + half_width;
  if (half_width <= 0 || a <= 0 || b >= 1) throw DomainError("bump support must lie inside (0,1)");
  std::vector<Rational> xs;
  for (const auto& x : base.breakpoints()) {
    if (x <= a || x >= b) xs.push_back(x);
  }
  for (const Rational& x : {a, center, b}) xs.push_back(x);
  for (const auto& x : base.breakpoints()) {
    if (a < x && x < b && x != center) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Rational> ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) {
    Rational y = base(x);
    if (a < x && x < b) y += height * (Rational(1) - (x - center).abs() / half_width);
    if (y < 0 || y > 1) throw DomainError("bump pushes the map outside [0,1] at " + x.str());
    ys.push_back(std::move(y));
  }
  return PLMap(std::move(xs), std::move(ys)).simplified();
}

BumpPerturbationFamily::BumpPerturbationFamily(PLMap base, Rational center, Rational half_width,
                                               Rational amplitude, Rational ratio)
    : base_(std::move(base)),
      center_(std::move(center)),
      half_width_(std::move(half_width)),
      amplitude_(std::move(amplitude)),
      ratio_(std::move(ratio)) {
  if (amplitude_.is_zero()) throw DomainError("bump amplitude must be nonzero");
  if (!(0 < ratio_ && ratio_ <= 1)) throw DomainError("bump ratio must lie in (0,1]");
  bump_perturbation(base_, center_, half_width_, amplitude_);  // validates the largest bump
}

Json BumpPerturbationFamily::params() const {
  return Json{{"base", to_json(Map(base_))},
              {"center", center_.str()},
              {"half_width", half_width_.str()},
              {"amplitude", amplitude_.str()},
              {"ratio", ratio_.str()}};
}

Map BumpPerturbationFamily::at(int n) const {
  require_index(n);
  return bump_perturbation(base_, center_, half_width_,
                           amplitude_ * Rational::pow(ratio_, static_cast<unsigned long>(n)));
}

ConjugatedFamily::ConjugatedFamily(MapFamilyPtr base, PLMap h)
    : base_(std::move(base)), h_(std::move(h)), h_inverse_(h_.inverse()), limit_(PLMap::identity()) {
  if (!base_) throw UsageError("conjugated family needs a base family");
  if (base_->space() != Space::Interval) throw UsageError("only interval families can be conjugated");
  limit_ = conjugate(base_->limit());
}

Json ConjugatedFamily::params() const {
  return Json{{"family", Json{{"name", base_->name()}, {"params", base_->params()}}}, {"h", to_json(Map(h_))}};
}

Map ConjugatedFamily::conjugate(const Map& f) const {
  const auto* pl = std::get_if<PLMap>(&f);
  if (pl == nullptr) throw UnsupportedOperation("conjugation needs explicit PL maps, got " + describe(f));
  return compose(h_, compose(*pl, h_inverse_)).simplified();
}

Map ConjugatedFamily::at(int n) const { return conjugate(base_->at(n)); }

MapFamilyPtr make_family(const std::string& name, const Json& params) {
  StrictObject o(params, "family.params");
  MapFamilyPtr out;
  try {
    if (name == "rotation_dyadic") {
      int offset = 0;
      if (const Json* v = o.optional("offset")) {
        offset = static_cast<int>(integer_from_json(*v, o.path("offset"), 0, 64));
      }
      out = std::make_shared<RotationDyadicFamily>(offset);
    } else if (name == "rotation_convergents") {
      std::string target = "golden";
      int offset = 2;
      if (const Json* v = o.optional("target")) {
        if (!v->is_string() || !is_named_irrational(v->get<std::string>())) {
          throw ConfigError(o.path("target"), "expected \"golden\" or \"silver\"");
        }
        target = v->get<std::string>();
      }
      if (const Json* v = o.optional("offset")) {
        offset = static_cast<int>(integer_from_json(*v, o.path("offset"), 0, 64));
      }
      out = std::make_shared<RotationConvergentFamily>(target, offset);
    } else if (name == "adding_machine_truncations") {
      const long length = integer_from_json(o.required("word_length"), o.path("word_length"), 1, 64);
      out = std::make_shared<AddingMachineFamily>(static_cast<int>(length));
    } else if (name == "bump_reflection") {
      out = std::make_shared<ReflectionFamily>();
    } else if (name == "bump_perturbation") {
      Map base = PLMap::tent();
      if (const Json* v = o.optional("base")) base = map_from_json(*v, o.path("base"));
      if (!std::holds_alternative<PLMap>(base)) throw ConfigError(o.path("base"), "expected a pl map");
      out = std::make_shared<BumpPerturbationFamily>(
          std::get<PLMap>(base), rational_from_json(o.required("center"), o.path("center")),
          rational_from_json(o.required("half_width"), o.path("half_width")),
          rational_from_json(o.required("amplitude"), o.path("amplitude")),
          rational_from_json(o.required("ratio"), o.path("ratio")));
    } else if (name == "conjugated") {
      StrictObject inner(o.required("family"), o.path("family"));
      const Json& inner_name = inner.required("name");
      if (!inner_name.is_string()) throw ConfigError(inner.path("name"), "expected a string");
      const Json* inner_params = inner.optional("params");
      MapFamilyPtr base = make_family(inner_name.get<std::string>(), inner_params ? *inner_params : Json::object());
      inner.finish();
      const Map h = map_from_json(o.required("h"), o.path("h"));
      if (!std::holds_alternative<PLMap>(h)) throw ConfigError(o.path("h"), "expected a pl map");
      try {
        out = std::make_shared<ConjugatedFamily>(base, std::get<PLMap>(h));
      } catch (const PreconditionError& e) {
        throw ConfigError(o.path("h"), e.what());
      }
    } else {
      throw ConfigError("family.name", "unknown family '" + name + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("family.params", e.what());
  }
  o.finish();
  return out;
}

}  // namespace nds
