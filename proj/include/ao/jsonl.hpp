// JSON Lines reading/writing with line-number-carrying errors.
#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "ao/common.hpp"

namespace ao {

using Json = nlohmann::json;

// Calls `fn(line_number, record)` for every nonempty line; parse failures raise
// DataError naming the file and 1-based line number.
void read_jsonl(const std::string& path,
                const std::function<void(std::size_t, const Json&)>& fn);

// Writes one compact JSON document per line. Overwrites.
void write_jsonl(const std::string& path, const std::vector<Json>& records);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

// Field access helpers that raise DataError with context on missing/mistyped keys.
std::string require_string(const Json& rec, const char* key, const std::string& ctx);
long long require_int(const Json& rec, const char* key, const std::string& ctx);
std::string optional_string(const Json& rec, const char* key, const std::string& fallback);

}  // namespace ao
