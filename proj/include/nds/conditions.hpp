#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nds/exec.hpp"
#include "nds/system.hpp"

namespace nds {

enum class ConditionId { CC, CCstar, L, Lstar, DO, DOstar };
std::string_view to_string(ConditionId c);
ConditionId parse_condition(std::string_view s);

enum class Verdict { HoldsOnTruncation, FailsWithWitness, ExactProof };
std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view s);

/// A violation: index n, iterate k, base point x and the distance reached.
struct Witness {
  int n = 0;
  long k = 0;
  std::optional<Point> x;
  Rational distance;
};

struct TraceEntry {
  int n = 0;
  Rational value;
  int k = 0;  // iterate attaining the value (sup traces); 0 otherwise
};

struct CoverageEntry {
  int N = 0;
  Rational fraction;
};

struct ConditionReport {
  ConditionId condition = ConditionId::CC;
  Space space = Space::Interval;
  Verdict verdict = Verdict::FailsWithWitness;
  /// How trace values were obtained: "exact", "closed-form", "grid-lower-bound"
  /// (sampled points, values are lower bounds) or "sampled-words" (Cantor).
  std::string basis;
  int N_max = 0;
  int K_max = 0;
  std::optional<Rational> eps;
  std::optional<Rational> threshold;
  std::optional<std::size_t> grid;
  std::optional<int> n0;
  std::optional<Witness> witness;
  std::optional<Point> x0;
  std::vector<TraceEntry> trace;
  std::vector<CoverageEntry> coverage;
  /// Closed form valid for all n and k, when one applies.
  std::optional<std::string> certificate;
  /// Computed trace equals the closed form entry by entry.
  std::optional<bool> formula_match;
  std::vector<std::string> notes;
};

Json to_json(const ConditionReport& r);
ConditionReport condition_report_from_json(const Json& j);

struct SweepOptions {
  int N_max = 32;
  int K_max = 4096;
  Exec exec = Exec::Parallel;
  /// Breakpoints allowed in exactly composed PL windows before sampling takes over.
  std::size_t breakpoint_budget = 4096;
  /// Uniform sample grid j/grid (plus breakpoints) for sampled interval sweeps.
  std::size_t grid = 64;
  /// Random words (plus structured ones) for Cantor sweeps.
  std::size_t cantor_samples = 100;
  std::uint64_t seed = 0x5eed;
};

/// sup_{k <= K_max} sup_x d(f_n^k(x), f^k(x)) per n and the truncated verdict.
ConditionReport check_CC(const NDSystem& sys, const Rational& eps, const SweepOptions& opt = {});
/// Same with fiber powers (f_n)^k.
ConditionReport check_CCstar(const NDSystem& sys, const Rational& eps, const SweepOptions& opt = {});
/// Trace n -> D(f_n^n, f^n); holds when the tail [ceil(N/2), N] stays below
/// `threshold` and is nonincreasing.
ConditionReport check_L(const NDSystem& sys, const Rational& threshold, const SweepOptions& opt = {});
ConditionReport check_Lstar(const NDSystem& sys, const Rational& threshold, const SweepOptions& opt = {});
/// eps-net coverage by {f_n^n(x0)} (DO) or {(f_n)^n(x0)} (DO*), n <= N_max.
ConditionReport check_DO(const NDSystem& sys, const Point& x0, const Rational& eps,
                         const SweepOptions& opt = {});
ConditionReport check_DOstar(const NDSystem& sys, const Point& x0, const Rational& eps,
                             const SweepOptions& opt = {});

/// Re-evaluates the witness of a fails-with-witness report exactly; true when it
/// still shows a violation (distance >= eps, trace >= threshold or increasing,
/// net point farther than eps from every diagonal entry).
bool witness_reproduces(const NDSystem& sys, const ConditionReport& r);

/// Exact distance between two composites on the system's space where a
/// closed form exists (rotations, PL maps); nullopt otherwise.
std::optional<Rational> composite_distance(const Composite& a, const Composite& b);

/// sup over all k of the circle distance between rotation by k*delta and the
/// identity, with the first k attaining it (delta rational).
std::pair<Rational, long> rotation_orbit_sup(const Rational& delta);

}  // namespace nds
