#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nds/conditions.hpp"

namespace nds {

// ---- transitivity ----------------------------------------------------------

enum class TransitivityMode { ExactPL, RotationClosedForm };
std::string_view to_string(TransitivityMode m);

struct TransitivityReport {
  TransitivityMode mode = TransitivityMode::ExactPL;
  Rational eps;
  int horizon = 0;
  bool transitive_on_grid = false;
  /// Basic open sets by closure: (i/m, (i+1)/m) on the interval, arcs on the circle.
  std::vector<RationalInterval> grid;
  /// pair_table[u][v]: minimal n >= 1 with f^n(U) meeting V, or -1.
  std::vector<std::vector<int>> pair_table;
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;
  std::vector<std::string> notes;
};

/// All ordered pairs of eps-grid sets, exact images up to `horizon`. Interval
/// maps (explicit or lazy PL) and rotations.
TransitivityReport test_transitivity(const Map& f, const Rational& eps, int horizon,
                                     Exec exec = Exec::Parallel);
/// f^n(U) meets V and no smaller n >= 1 does.
bool pair_reverifies(const Map& f, const RationalInterval& u, const RationalInterval& v, int n);
Json to_json(const TransitivityReport& r);
/// Rows U, columns V, cells minimal n or -1.
std::string pair_table_csv(const TransitivityReport& r);

// ---- sensitivity -----------------------------------------------------------

struct SensitivityWitness {
  Point x;
  Point y;
  int n = 0;
  Rational distance;  // d(f^n(x), f^n(y)) > delta
};

struct SensitivityReport {
  Rational delta;
  Rational probe_eps;
  int horizon = 0;
  std::vector<SensitivityWitness> witnesses;
  std::vector<Point> failures;  // probes without a witness up to the horizon
  std::vector<std::string> notes;
};

/// For each probe x, the first n <= horizon and a y with d(x, y) < probe_eps and
/// d(f^n(x), f^n(y)) > delta. Candidates y: breakpoints of f^n inside the ball
/// plus points 1023/1024 of the way to its ends. Requires probe_eps <= delta so
/// that n = 0 never counts.
SensitivityReport test_sensitivity(const Map& f, const Rational& delta, const Rational& probe_eps, int horizon,
                                   const std::vector<Point>& probes, Exec exec = Exec::Parallel);
bool witness_reverifies(const Map& f, const SensitivityReport& r, const SensitivityWitness& w);
Json to_json(const SensitivityReport& r);

// ---- invariant intervals ---------------------------------------------------

enum class InvariantStatus { Stabilized, Inconclusive };

struct InvariantResult {
  InvariantStatus status = InvariantStatus::Inconclusive;
  /// Minimal closed interval containing the seed with f(K) contained in K.
  RationalInterval interval;
  int rounds = 0;
  /// Period p >= 2 family J_0, ..., J_{p-1} with f(J_i) = J_{i+1},
  /// f(J_{p-1}) inside J_0, interiors pairwise disjoint (smallest such p).
  std::vector<RationalInterval> cycle;
};

InvariantResult find_invariant_interval(const Map& f, const RationalInterval& seed, int max_rounds,
                                        int max_period = 8);
Json to_json(const InvariantResult& r);

// ---- fixed points and preimages --------------------------------------------

struct FixInclusionReport {
  FixedPointSet fix;
  bool fix_preserved = false;  // every isolated fixed point of f is fixed by f_n
  std::vector<Rational> not_fixed;
  int depth_checked = 0;
  /// First level j with f^{-j}(Fix f) != (f_n)^{-j}(Fix f), compared on isolated points.
  std::optional<int> discrepancy_level;
  std::vector<Rational> only_in_f;
  std::vector<Rational> only_in_fn;
  bool holds = false;
  std::vector<std::string> notes;  // fixed intervals are reported here
};

/// UsageError unless both maps are explicit PL.
FixInclusionReport check_fix_inclusion(const Map& f, const Map& fn, int j_max);
Json to_json(const FixInclusionReport& r);

struct PrefixPoint {
  Rational x;
  int level = 0;            // f^level(x) = p
  std::optional<int> n0;    // f_n(x) = f(x) for all n0 <= n <= N_max
  std::optional<int> last_disagreement;
};

struct PrefixAgreementReport {
  Rational p;
  int depth = 0;
  int N_max = 0;
  std::vector<PrefixPoint> points;
  bool truncated_tree = false;  // infinitely many preimages; only the first blocks kept
  std::vector<std::string> notes;
};

/// Tree points x with f^j(x) = p, j <= depth, and the minimal agreement index
/// of f_n(x) = f(x) on [n0, N_max]. PreconditionError unless f(p) = p.
PrefixAgreementReport check_prefix_agreement(const NDSystem& sys, const Rational& p, int depth, int N_max);
Json to_json(const PrefixAgreementReport& r);

/// Points of f^{-1}(y) for an interval map; `truncated` is set when a lazy map
/// has infinitely many and only those in the first `max_blocks` blocks of a
/// sequence are returned. Plateaus at y contribute their endpoints.
std::vector<Rational> point_preimages(const Map& f, const Rational& y, bool& truncated, int max_blocks = 64);

// ---- agreement and eventual equality ---------------------------------------

/// Exact length of {x in region : f(x) = g(x)} for two explicit PL maps or two
/// lazy maps with a common skeleton.
Rational agreement_measure(const Map& f, const Map& g, const RationalInterval& region);

enum class EventualStatus { EventualEquality, ConsistentViolation, TheoremCheckFailure, PreconditionUnmet };
std::string_view to_string(EventualStatus s);

struct EventualEqualityReport {
  EventualStatus status = EventualStatus::PreconditionUnmet;
  int N_max = 0;
  std::optional<int> n0;
  std::optional<int> violating_n;  // largest n with f_n != f
  std::vector<Rational> agreement;  // agreement_measure(f_n, f, [0,1]), n = 1..N_max
  std::optional<ConditionReport> ccstar;
  std::vector<std::string> notes;
};

/// Minimal n0 with f_n = f on [0,1] for all n0 <= n <= N_max. A violation at
/// N_max is cross-checked against CC* at `eps`: if CC* holds as well, the
/// limit being transitive with constant |slope|, the report is a
/// theorem-check-failure. Limits that are not explicit constant-slope
/// transitive PL maps are refused (precondition-unmet).
EventualEqualityReport check_eventual_equality(const NDSystem& sys, const Rational& eps,
                                               const SweepOptions& opt = {});
Json to_json(const EventualEqualityReport& r);

// ---- conjugation -----------------------------------------------------------

/// g_n = h o f_n o h^{-1} and limit h o f o h^{-1}; explicit PL fibers only.
/// PreconditionError unless h is a PL homeomorphism.
NDSystem conjugate_system(const NDSystem& sys, const PLMap& h);

// ---- equivalence instances --------------------------------------------------

enum class EquivalenceStatus { Consistent, InstanceCheckFailure, HypothesisUnmet };
std::string_view to_string(EquivalenceStatus s);

struct EquivalenceReport {
  EquivalenceStatus status = EquivalenceStatus::HypothesisUnmet;
  Rational eps;
  int N_max = 0;
  int horizon = 0;
  ConditionReport l;
  /// (1): every grid pair (U, V) has n <= N_max with U meeting f_n^{-n}(V).
  bool window_hitting = false;
  std::optional<std::pair<std::size_t, std::size_t>> missed_pair;
  /// (3): some net point x0 has full DO coverage by N_max.
  bool dense_orbit = false;
  std::optional<Point> x0;
  /// (4): the limit is transitive on the grid within the horizon.
  bool limit_transitive = false;
  std::vector<std::string> notes;
};

EquivalenceReport check_equivalence_instance(const NDSystem& sys, const Rational& eps, int N_max, int horizon,
                                       const SweepOptions& opt = {});
Json to_json(const EquivalenceReport& r);

}  // namespace nds
