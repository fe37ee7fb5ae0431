#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "nds/map.hpp"

namespace nds {

using Json = nlohmann::ordered_json;

/// Named parametric family n -> f_n (n >= 1) with its uniform limit.
class MapFamily {
 public:
  virtual ~MapFamily() = default;
  virtual std::string name() const = 0;
  virtual Json params() const = 0;
  virtual Space space() const = 0;
  virtual Map at(int n) const = 0;
  virtual Map limit() const = 0;
};

using MapFamilyPtr = std::shared_ptr<const MapFamily>;

/// f_n = rotation by 1/2^(n + offset), limit the identity.
class RotationDyadicFamily final : public MapFamily {
 public:
  explicit RotationDyadicFamily(int offset = 0);
  std::string name() const override { return "rotation_dyadic"; }
  Json params() const override;
  Space space() const override { return Space::Circle; }
  Map at(int n) const override;
  Map limit() const override { return RotationMap::identity(); }
  int offset() const { return offset_; }
  Rational fraction(int n) const;

 private:
  int offset_;
};

/// f_n = rotation by the convergent p_j/q_j, j = n + offset, of a named
/// irrational; limit the irrational rotation (tagged surrogate).
class RotationConvergentFamily final : public MapFamily {
 public:
  RotationConvergentFamily(std::string target, int offset);
  std::string name() const override { return "rotation_convergents"; }
  Json params() const override;
  Space space() const override { return Space::Circle; }
  Map at(int n) const override { return RotationMap(fraction(n)); }
  Map limit() const override { return limit_; }
  const std::string& target() const { return target_; }
  Rational fraction(int n) const;

 private:
  std::string target_;
  int offset_;
  RotationMap limit_;
  mutable std::mutex cache_guard_;
  mutable std::vector<Rational> cache_;
};

/// f_n = adding machine on the first min(n, L) symbols, limit the full map.
class AddingMachineFamily final : public MapFamily {
 public:
  explicit AddingMachineFamily(int word_length);
  std::string name() const override { return "adding_machine_truncations"; }
  Json params() const override;
  Space space() const override { return Space::Cantor; }
  Map at(int n) const override;
  Map limit() const override { return AddingMachineMap(word_length_, std::nullopt); }
  int word_length() const { return word_length_; }

 private:
  int word_length_;
};

/// f_n = reflection_fiber_map(n), limit reflection_limit_map().
class ReflectionFamily final : public MapFamily {
 public:
  ReflectionFamily();
  std::string name() const override { return "bump_reflection"; }
  Json params() const override { return Json::object(); }
  Space space() const override { return Space::Interval; }
  Map at(int n) const override;
  Map limit() const override { return limit_; }

 private:
  LazyPLMapPtr limit_;
  mutable std::mutex cache_guard_;
  mutable std::vector<LazyPLMapPtr> cache_;
};

/// f_n = base + triangular bump of height amplitude * ratio^n on
/// [center - half_width, center + half_width]; limit the base map.
class BumpPerturbationFamily final : public MapFamily {
 public:
  BumpPerturbationFamily(PLMap base, Rational center, Rational half_width, Rational amplitude,
                         Rational ratio);
  std::string name() const override { return "bump_perturbation"; }
  Json params() const override;
  Space space() const override { return Space::Interval; }
  Map at(int n) const override;
  Map limit() const override { return base_; }

 private:
  PLMap base_;
  Rational center_, half_width_, amplitude_, ratio_;
};

/// g_n = h o f_n o h^{-1} for a PL homeomorphism h and a family of explicit PL maps.
class ConjugatedFamily final : public MapFamily {
 public:
  ConjugatedFamily(MapFamilyPtr base, PLMap h);
  std::string name() const override { return "conjugated"; }
  Json params() const override;
  Space space() const override { return Space::Interval; }
  Map at(int n) const override;
  Map limit() const override { return limit_; }
  const PLMap& conjugacy() const { return h_; }
  const MapFamilyPtr& base() const { return base_; }
  /// h o f o h^{-1}; UnsupportedOperation unless f is explicit PL.
  Map conjugate(const Map& f) const;

 private:
  MapFamilyPtr base_;
  PLMap h_;
  PLMap h_inverse_;
  Map limit_;
};

/// base plus a triangular bump of the given height (negative heights dent).
/// DomainError if the result leaves [0,1] or the support leaves (0,1).
PLMap bump_perturbation(const PLMap& base, const Rational& center, const Rational& half_width,
                        const Rational& height);

/// Builds a family from its serialized name and parameters; ConfigError on bad input.
MapFamilyPtr make_family(const std::string& name, const Json& params);

}  // namespace nds
