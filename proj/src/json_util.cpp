#include "json_util.hpp"

#include <algorithm>

namespace icsthreat::detail {

namespace {

std::string line_column(std::string_view text, std::size_t byte)
{
    // nlohmann reports the 1-based index of the last byte it read.
    std::size_t offset = byte == 0 ? 0 : std::min(byte - 1, text.size());
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

} // namespace

Json parse_json(std::string_view text, std::string_view what)
{
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw Error(ErrorCode::ParseError,
                    std::string(what) + ": malformed JSON at " + line_column(text, e.byte) + ": " + e.what());
    }
}

void schema_error(const std::string& path, const std::string& message)
{
    throw Error(ErrorCode::ParseError, (path.empty() ? std::string("document") : path) + ": " + message);
}

void require_object(const Json& value, const std::string& path)
{
    if (!value.is_object()) {
        schema_error(path, "expected an object");
    }
}

const Json& require(const Json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end()) {
        schema_error(path, std::string("missing field '") + key + "'");
    }
    return *it;
}

std::string require_string(const Json& object, const char* key, const std::string& path)
{
    const Json& value = require(object, key, path);
    if (!value.is_string()) {
        schema_error(path + "." + key, "expected a string");
    }
    return value.get<std::string>();
}

std::string optional_string(const Json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        return {};
    }
    if (!it->is_string()) {
        schema_error(path + "." + key, "expected a string");
    }
    return it->get<std::string>();
}

std::optional<double> optional_number(const Json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_number()) {
        schema_error(path + "." + key, "expected a number");
    }
    return it->get<double>();
}

bool optional_bool(const Json& object, const char* key, const std::string& path)
{
    auto it = object.find(key);
    if (it == object.end() || it->is_null()) {
        return false;
    }
    if (!it->is_boolean()) {
        schema_error(path + "." + key, "expected true or false");
    }
    return it->get<bool>();
}

const Json& require_array(const Json& object, const char* key, const std::string& path)
{
    const Json& value = require(object, key, path);
    if (!value.is_array()) {
        schema_error(path + "." + key, "expected an array");
    }
    return value;
}

std::vector<std::string> require_string_array(const Json& object, const char* key, const std::string& path)
{
    const Json& array = require_array(object, key, path);
    std::vector<std::string> out;
    out.reserve(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) {
        if (!array[i].is_string()) {
            schema_error(index_path(path + "." + key, i), "expected a string");
        }
        out.push_back(array[i].get<std::string>());
    }
    return out;
}

void check_keys(const Json& object, std::initializer_list<std::string_view> allowed, const std::string& path)
{
    for (auto it = object.begin(); it != object.end(); ++it) {
        const std::string& key = it.key();
        if (!key.empty() && key.front() == '_') {
            continue;
        }
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            schema_error(path, "unknown field '" + key + "'");
        }
    }
}

std::string index_path(const std::string& path, std::size_t index)
{
    return path + "[" + std::to_string(index) + "]";
}

std::string dump_canonical(const OrderedJson& document)
{
    return document.dump(2, ' ', false, Json::error_handler_t::strict) + "\n";
}

} // namespace icsthreat::detail
