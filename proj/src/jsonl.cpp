#include "ao/jsonl.hpp"

#include <fstream>

namespace ao {

void read_jsonl(const std::string& path,
                const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec = Json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw DataError(path, line_no, "malformed JSON");
    fn(line_no, rec);
  }
}

void write_jsonl(const std::string& path, const std::vector<Json>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path);
  for (const Json& rec : records) out << rec.dump() << "\n";
  if (!out) throw DataError("write failed: " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw DataError("malformed JSON: " + path);
  return doc;
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw DataError("write failed: " + path);
}

std::string require_string(const Json& rec, const char* key, const std::string& ctx) {
  if (!rec.contains(key) || !rec[key].is_string())
    throw DataError(ctx + ": missing or non-string field \"" + key + "\"");
  return rec[key].get<std::string>();
}

long long require_int(const Json& rec, const char* key, const std::string& ctx) {
  if (!rec.contains(key) || !rec[key].is_number_integer())
    throw DataError(ctx + ": missing or non-integer field \"" + key + "\"");
  return rec[key].get<long long>();
}

std::string optional_string(const Json& rec, const char* key, const std::string& fallback) {
  if (!rec.contains(key) || rec[key].is_null()) return fallback;
  if (!rec[key].is_string()) throw DataError(std::string("non-string field \"") + key + "\"");
  return rec[key].get<std::string>();
}

}  // namespace ao
