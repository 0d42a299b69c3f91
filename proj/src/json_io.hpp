#pragma once

// Helpers shared by the JSON readers/writers. Not installed.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "bayesid/errors.hpp"
#include "bayesid/types.hpp"

namespace bayesid::detail {

inline constexpr int kSchemaVersion = 1;

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline void check_schema(const nlohmann::json& j, const char* what) {
  if (!j.is_object()) throw ValidationError(std::string(what) + ": expected a JSON object");
  const int version = j.value("schema_version", kSchemaVersion);
  if (version != kSchemaVersion)
    throw ValidationError(std::string(what) + ": unsupported schema_version " +
                          std::to_string(version));
}

// JSON has no infinities; they travel as the strings "inf" / "-inf".
inline nlohmann::json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double real_from_json(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ValidationError("expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw ValidationError("expected a number");
  return j.get<double>();
}

inline Vector3d vec3_from_json(const nlohmann::json& j, const char* field) {
  if (!j.is_array() || j.size() != 3)
    throw ValidationError(std::string(field) + ": expected an array of 3 numbers");
  return {real_from_json(j[0]), real_from_json(j[1]), real_from_json(j[2])};
}

inline nlohmann::json vec3_to_json(const Vector3d& v) { return {v(0), v(1), v(2)}; }

}  // namespace bayesid::detail
