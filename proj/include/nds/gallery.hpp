#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nds/dynamics.hpp"

namespace nds {

/// One executable claim of a gallery entry.
struct GalleryAssertion {
  std::string description;
  std::string expected;  // exact value or bound, as text
  /// "stated" (closed-form value of the construction), "oracle" (checked
  /// against an independent computation) or "structural" (precondition or sanity).
  std::string basis;
  std::function<std::string()> actual;  // the observed value, as text
  std::function<bool()> check;
};

struct GalleryEntry {
  std::string id;
  Json params;
  NDSystem system;
  std::vector<GalleryAssertion> assertions;
  std::vector<std::string> notes;
};

struct AssertionResult {
  std::string description;
  std::string expected;
  std::string actual;
  std::string basis;
  bool passed = false;
  std::string error;  // exception text when evaluation threw
};

struct GalleryReport {
  std::string id;
  Json params;
  Json system;
  std::vector<AssertionResult> results;
  std::vector<std::string> notes;
  bool passed() const;
  std::size_t failures() const;
};

/// Entry ids in run order.
const std::vector<std::string>& gallery_ids();
/// Documented parameters with defaults for an id.
Json gallery_defaults(const std::string& id);

/// Builds an entry; unknown ids or fields and out-of-range values raise ConfigError.
GalleryEntry build_gallery_entry(const std::string& id, const Json& params = Json::object());
/// Evaluates every assertion; failures are collected, never thrown.
GalleryReport run_gallery_entry(const GalleryEntry& entry);
/// Every entry with default parameters, run in parallel, reported in id order.
std::vector<GalleryReport> run_all_gallery(Exec exec = Exec::Parallel);

Json to_json(const GalleryReport& r);

}  // namespace nds
