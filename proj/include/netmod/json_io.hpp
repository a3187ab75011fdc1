#pragma once

#include <string>

#include <json.hpp>

#include "netmod/matrix.hpp"

namespace netmod {

inline constexpr const char* kVersion = "0.1.0";

// {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major.
Mat matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const Mat& m);

// File wrappers; throw ParseError with the offending path in the message.
Mat load_matrix(const std::string& path);
void save_matrix(const std::string& path, const Mat& m);

// 17-significant-digit float rendering, shared by the JSON and CSV writers
// so both report formats carry identical numeric content.
std::string format_double(double v);

// Serializer that prints every float via format_double (the library default
// prints shortest-round-trip, not a fixed digit count).
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace netmod
