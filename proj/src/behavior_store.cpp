#include "stinger/behavior_store.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "json.hpp"
#include "stinger/errors.hpp"
#include "stinger/util.hpp"

namespace stinger {

using nlohmann::json;

namespace {

constexpr const char* kRequiredColumns[] = {"behavior_id", "text", "category",
                                            "split"};

// RFC 4180 field splitting for one logical record. Records are pre-split on
// newlines by the caller; embedded newlines inside quotes are not supported
// by this loader (HarmBench-style exports keep one behavior per line).
std::vector<std::string> split_csv_record(const std::string& line,
                                          size_t row_for_error) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (in_quotes) {
    throw IoError("unterminated quote in CSV row " +
                  std::to_string(row_for_error));
  }
  fields.push_back(field);
  return fields;
}

Behavior make_behavior(const std::string& id, const std::string& text,
                       const std::string& category, const std::string& split,
                       size_t row) {
  Behavior b;
  b.behavior_id = id;
  b.text = text;
  if (trim(b.text).empty()) throw EmptyText(row);
  b.category = category;
  b.split = parse_split(split);
  return b;
}

std::vector<Behavior> parse_csv(const std::string& content) {
  std::vector<std::string> lines;
  {
    std::string line;
    for (char c : content) {
      if (c == '\n') {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
        line.clear();
      } else {
        line.push_back(c);
      }
    }
    if (!line.empty()) {
      if (line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  if (lines.empty()) throw MissingColumn("behavior_id");

  const std::vector<std::string> header = split_csv_record(lines[0], 1);
  std::map<std::string, size_t> col;
  for (size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
  for (const char* required : kRequiredColumns) {
    if (col.find(required) == col.end()) throw MissingColumn(required);
  }

  std::vector<Behavior> behaviors;
  for (size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto fields = split_csv_record(lines[row], row + 1);
    auto get = [&](const char* name) -> std::string {
      const size_t idx = col.at(name);
      if (idx >= fields.size()) {
        throw IoError("CSV row " + std::to_string(row + 1) +
                      " has too few fields");
      }
      return fields[idx];
    };
    behaviors.push_back(make_behavior(get("behavior_id"), get("text"),
                                      get("category"), get("split"),
                                      row + 1));
  }
  return behaviors;
}

std::vector<Behavior> parse_jsonl(const std::string& content) {
  std::vector<Behavior> behaviors;
  size_t row = 0;
  size_t start = 0;
  while (start <= content.size()) {
    size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    start = end + 1;
    ++row;
    if (trim(line).empty()) {
      if (end == content.size()) break;
      continue;
    }
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError("invalid JSON on line " + std::to_string(row) + ": " +
                    e.what());
    }
    for (const char* required : kRequiredColumns) {
      if (!obj.contains(required)) throw MissingColumn(required);
    }
    behaviors.push_back(make_behavior(
        obj.at("behavior_id").get<std::string>(),
        obj.at("text").get<std::string>(),
        obj.at("category").get<std::string>(),
        obj.at("split").get<std::string>(), row));
    if (end == content.size()) break;
  }
  return behaviors;
}

}  // namespace

Split parse_split(const std::string& value) {
  if (value == "train") return Split::kTrain;
  if (value == "test") return Split::kTest;
  throw UnknownSplit(value);
}

std::string split_name(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

BehaviorStore::BehaviorStore(std::vector<Behavior> behaviors,
                             std::string source_digest)
    : behaviors_(std::move(behaviors)),
      source_digest_(std::move(source_digest)) {
  std::sort(behaviors_.begin(), behaviors_.end(),
            [](const Behavior& a, const Behavior& b) {
              return a.behavior_id < b.behavior_id;
            });
  std::set<std::string> seen;
  for (const auto& b : behaviors_) {
    if (!seen.insert(b.behavior_id).second) throw DuplicateId(b.behavior_id);
  }
}

std::vector<Behavior> BehaviorStore::select_split(Split split) const {
  std::vector<Behavior> out;
  for (const auto& b : behaviors_) {
    if (b.split == split) out.push_back(b);
  }
  return out;
}

BehaviorStore load_behaviors(const std::string& path, BehaviorFormat format) {
  if (!std::filesystem::exists(path)) {
    throw IoError("behaviors file not found: " + path);
  }
  const std::string content = read_file(path);
  std::vector<Behavior> behaviors = format == BehaviorFormat::kCsv
                                        ? parse_csv(content)
                                        : parse_jsonl(content);
  return BehaviorStore(std::move(behaviors), sha256_hex(content));
}

BehaviorStore load_behaviors(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv") return load_behaviors(path, BehaviorFormat::kCsv);
  if (ext == ".jsonl" || ext == ".ndjson") {
    return load_behaviors(path, BehaviorFormat::kJsonl);
  }
  throw ConfigError("cannot infer behaviors format from extension: " + path);
}

}  // namespace stinger
