#pragma once

// Helpers shared by the JSON readers. Every schema violation becomes a
// PARSE_ERROR naming the offending JSON path.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "icsthreat/error.hpp"

namespace icsthreat::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

/// Parses text, converting syntax errors into PARSE_ERROR with line:column.
Json parse_json(std::string_view text, std::string_view what);

[[noreturn]] void schema_error(const std::string& path, const std::string& message);

const Json& require(const Json& object, const char* key, const std::string& path);
std::string require_string(const Json& object, const char* key, const std::string& path);
std::string optional_string(const Json& object, const char* key, const std::string& path);
std::optional<double> optional_number(const Json& object, const char* key, const std::string& path);
bool optional_bool(const Json& object, const char* key, const std::string& path);
const Json& require_array(const Json& object, const char* key, const std::string& path);
std::vector<std::string> require_string_array(const Json& object, const char* key, const std::string& path);
void require_object(const Json& value, const std::string& path);

/// Rejects keys outside `allowed`; keys starting with '_' are comments.
void check_keys(const Json& object, std::initializer_list<std::string_view> allowed, const std::string& path);

std::string index_path(const std::string& path, std::size_t index);

/// Two-space indented dump with trailing newline.
std::string dump_canonical(const OrderedJson& document);

} // namespace icsthreat::detail
