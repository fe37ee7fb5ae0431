#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "nds/map.hpp"

namespace nds {

using Json = nlohmann::ordered_json;

/// Strict reader for one JSON object: every key must be consumed before
/// finish(), otherwise ConfigError names the first unknown field.
class StrictObject {
 public:
  StrictObject(const Json& j, std::string path);

  const Json& required(const std::string& key);
  const Json* optional(const std::string& key);
  void finish() const;
  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Json to_json(const Rational& r);
/// "p/q" or an integer (string or JSON number); decimals rejected with ConfigError.
Rational rational_from_json(const Json& j, const std::string& path);
/// Rational with 0 < value <= 1.
Rational positive_fraction_from_json(const Json& j, const std::string& path);
long integer_from_json(const Json& j, const std::string& path, long min_value, long max_value);

Json to_json(const Map& f);
Map map_from_json(const Json& j, const std::string& path);

Json to_json(const Point& p);
Point point_from_json(const Json& j, Space space, const std::string& path, int cantor_length);

Json to_json(const RationalInterval& iv);
RationalInterval interval_from_json(const Json& j, const std::string& path);

}  // namespace nds
