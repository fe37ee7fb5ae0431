#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "nds/families.hpp"

namespace nds {

/// Nonautonomous system f_1, f_2, ...: an explicit prefix, then either a named
/// family (f_n = family.at(n)) or the limit repeated.
class NDSystem {
 public:
  /// Tail constant-equal-to-limit.
  NDSystem(Space space, std::vector<Map> prefix, Map limit);
  /// Tail from `family`; its limit is the system's limit.
  NDSystem(std::vector<Map> prefix, MapFamilyPtr family);

  static NDSystem constant(const Map& f) { return NDSystem(space_of(f), {}, f); }

  Space space() const { return space_; }
  const Map& limit() const { return limit_; }
  const std::vector<Map>& prefix() const { return prefix_; }
  const MapFamily* family() const { return family_.get(); }
  const MapFamilyPtr& family_ptr() const { return family_; }
  /// f_n for n >= 1.
  Map at(int n) const;
  /// f_n = limit for every n > prefix length.
  bool tail_is_limit() const { return !family_; }
  /// Maps that could not be confirmed surjective, one message each.
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void validate();

  Space space_;
  std::vector<Map> prefix_;
  MapFamilyPtr family_;
  Map limit_;
  std::vector<std::string> warnings_;
};

/// Chain of maps applied first to last.
struct Evaluator {
  std::vector<Map> chain;
};

/// x -> x + count on the first `active` symbols (carries stop there), or on
/// all symbols with overflow flagged when `active` equals the word length and
/// `wraps` is false.
struct OdometerShift {
  int word_length = CantorWord::kDefaultLength;
  int active = CantorWord::kDefaultLength;
  bool wraps = true;
  std::uint64_t count = 0;
};

using Composite = std::variant<PLMap, RotationMap, OdometerShift, Evaluator>;

struct Composition {
  Composite map;
  /// Breakpoint budget exceeded; `map` is a point evaluator.
  bool budget_fallback = false;
};

constexpr std::size_t kDefaultBreakpointBudget = 1'000'000;

struct PointStep {
  Point point;
  bool saturated = false;
};
PointStep evaluate(const Composite& f, const Point& x);
PointStep step_map(const Map& f, const Point& x);

/// f_n^k = f_{n+k-1} o ... o f_n.
Composition window_compose(const NDSystem& sys, int n, int k,
                           std::size_t budget = kDefaultBreakpointBudget);
/// (f_n)^k.
Composition fiber_power(const NDSystem& sys, int n, int k,
                        std::size_t budget = kDefaultBreakpointBudget);
/// g^k for a single map.
Composition map_power(const Map& g, long k, std::size_t budget = kDefaultBreakpointBudget);

enum class OrbitKind { Orbit, DiagonalNds, DiagonalFiber, Autonomous };
std::string_view to_string(OrbitKind k);
OrbitKind parse_orbit_kind(std::string_view s);

struct OrbitRecord {
  Point base_point;
  OrbitKind kind = OrbitKind::Orbit;
  std::vector<std::pair<int, Point>> entries;  // n = 1..N
  bool saturated = false;                       // some Cantor evaluation dropped a carry
};

/// Orbit f_1^n(x), diagonal f_n^n(x), fiber diagonal (f_n)^n(x) or f^n(x), n = 1..N.
OrbitRecord orbit(const NDSystem& sys, const Point& x, int N, OrbitKind kind);

/// f_n^{-n}(V) = f_n^{-1} o ... o f_{2n-1}^{-1}(V) for explicit PL systems.
IntervalUnion inverse_window_set(const NDSystem& sys, int n, const IntervalUnion& v);

/// Rotation by the exact window sum, for rotation systems.
RotationMap window_rotation(const NDSystem& sys, int n, int k);

Json to_json(const NDSystem& sys);
/// {"space", "prefix"?, "family"?: {"name", "params"}, "limit"?}; strict.
NDSystem system_from_json(const Json& j, const std::string& path);

}  // namespace nds
