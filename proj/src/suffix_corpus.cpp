#include "stinger/suffix_corpus.hpp"

#include <algorithm>
#include <filesystem>

#include "json.hpp"
#include "stinger/errors.hpp"

namespace stinger {

using nlohmann::json;

namespace {

std::string normalize_text(const std::string& raw) {
  return collapse_whitespace(raw);
}

json record_to_json(const SuffixRecord& rec) {
  return json{
      {"suffix_id", rec.suffix_id},
      {"raw_text", rec.raw_text},
      {"origin", rec.origin == SuffixOrigin::kSeed ? "seed" : "generated"},
      {"created_at_ms", rec.created_at_ms},
  };
}

}  // namespace

size_t SuffixRecord::success_count_for(
    const std::optional<std::string>& victim_id) const {
  if (!victim_id) return successes.size();
  size_t n = 0;
  for (const auto& s : successes) {
    if (s.victim_id == *victim_id) ++n;
  }
  return n;
}

std::vector<SuffixRecord> load_seeds(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw IoError("seeds file not found: " + path);
  }
  std::vector<SuffixRecord> seeds;
  size_t index = 0;
  for (const std::string& line : read_lines(path)) {
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    SuffixRecord rec;
    rec.suffix_id = "seed-" + std::to_string(++index);
    rec.raw_text = text;
    rec.tokens = tokenize(text);
    rec.origin = SuffixOrigin::kSeed;
    seeds.push_back(std::move(rec));
  }
  if (seeds.empty()) {
    throw EmptyFile("seeds file has no suffixes: " + path);
  }
  return seeds;
}

SuffixArchive::SuffixArchive(Clock* clock) : clock_(clock) {}

SuffixArchive::SuffixArchive(std::string path, Clock* clock)
    : path_(std::move(path)), clock_(clock) {
  if (!path_.empty() && std::filesystem::exists(path_)) {
    replay_file();
  }
}

int64_t SuffixArchive::now_ms() { return clock_ ? clock_->now_ms() : 0; }

void SuffixArchive::replay_file() {
  for (const std::string& line : read_lines(path_)) {
    if (trim(line).empty()) continue;
    json event;
    try {
      event = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError("corrupt archive line in " + path_ + ": " + e.what());
    }
    const std::string type = event.at("event").get<std::string>();
    if (type == "insert") {
      SuffixRecord rec;
      rec.suffix_id = event.at("suffix_id").get<std::string>();
      rec.raw_text = event.at("raw_text").get<std::string>();
      rec.origin = event.at("origin").get<std::string>() == "seed"
                       ? SuffixOrigin::kSeed
                       : SuffixOrigin::kGenerated;
      rec.created_at_ms = event.at("created_at_ms").get<int64_t>();
      rec.tokens = tokenize(rec.raw_text);
      apply_insert(rec);
    } else if (type == "success") {
      SuccessEntry entry;
      entry.behavior_id = event.at("behavior_id").get<std::string>();
      entry.victim_id = event.at("victim_id").get<std::string>();
      entry.timestamp_ms = event.at("timestamp_ms").get<int64_t>();
      apply_success(event.at("suffix_id").get<std::string>(), entry);
    } else {
      throw IoError("unknown archive event '" + type + "' in " + path_);
    }
  }
}

void SuffixArchive::apply_insert(const SuffixRecord& rec) {
  const std::string norm = normalize_text(rec.raw_text);
  if (by_normalized_text_.count(norm) > 0) {
    throw IoError("archive replay: duplicate normalized text for " +
                  rec.suffix_id);
  }
  records_.push_back(rec);
  by_normalized_text_[norm] = records_.size() - 1;
  by_id_[rec.suffix_id] = records_.size() - 1;
  // Keep the id counter ahead of anything replayed.
  if (rec.suffix_id.rfind("gen-", 0) == 0) {
    const uint64_t n = std::strtoull(rec.suffix_id.c_str() + 4, nullptr, 10);
    next_id_ = std::max(next_id_, n + 1);
  }
}

bool SuffixArchive::apply_success(const std::string& suffix_id,
                                  const SuccessEntry& entry) {
  auto it = by_id_.find(suffix_id);
  if (it == by_id_.end()) {
    throw IoError("archive replay: success event for unknown id " + suffix_id);
  }
  SuffixRecord& rec = records_[it->second];
  for (const auto& s : rec.successes) {
    if (s.behavior_id == entry.behavior_id &&
        s.victim_id == entry.victim_id) {
      return false;  // idempotent per (text, behavior, victim)
    }
  }
  rec.successes.push_back(entry);
  return true;
}

void SuffixArchive::persist_line(const std::string& line) {
  if (path_.empty()) return;
  const auto dir = std::filesystem::path(path_).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  append_line(path_, line);
}

const SuffixRecord& SuffixArchive::record_success(
    const std::string& raw_text, const std::string& behavior_id,
    const std::string& victim_id) {
  if (trim(raw_text).empty()) {
    throw EmptySuffix("cannot record an empty suffix");
  }
  const std::string norm = normalize_text(raw_text);
  const int64_t now = now_ms();

  size_t index;
  auto it = by_normalized_text_.find(norm);
  if (it != by_normalized_text_.end()) {
    index = it->second;
  } else {
    SuffixRecord rec;
    rec.suffix_id = "gen-" + std::to_string(next_id_++);
    rec.raw_text = raw_text;
    rec.tokens = tokenize(raw_text);
    rec.origin = SuffixOrigin::kGenerated;
    rec.created_at_ms = now;
    json insert_event = record_to_json(rec);
    insert_event["event"] = "insert";
    apply_insert(rec);
    persist_line(insert_event.dump());
    index = records_.size() - 1;
  }

  SuccessEntry entry{behavior_id, victim_id, now};
  if (apply_success(records_[index].suffix_id, entry)) {
    persist_line(json{{"event", "success"},
                      {"suffix_id", records_[index].suffix_id},
                      {"behavior_id", behavior_id},
                      {"victim_id", victim_id},
                      {"timestamp_ms", now}}
                     .dump());
  }
  return records_[index];
}

std::vector<SuffixRecord> SuffixArchive::top_k(
    size_t k, const std::optional<std::string>& victim_id) const {
  std::vector<SuffixRecord> generated;
  for (const auto& rec : records_) {
    if (rec.origin == SuffixOrigin::kGenerated) generated.push_back(rec);
  }
  std::stable_sort(generated.begin(), generated.end(),
                   [&](const SuffixRecord& a, const SuffixRecord& b) {
                     const size_t ca = a.success_count_for(victim_id);
                     const size_t cb = b.success_count_for(victim_id);
                     if (ca != cb) return ca > cb;
                     if (a.created_at_ms != b.created_at_ms) {
                       return a.created_at_ms < b.created_at_ms;
                     }
                     return a.suffix_id < b.suffix_id;
                   });
  if (generated.size() > k) generated.resize(k);
  return generated;
}

std::vector<SuffixRecord> SuffixCorpus::references() const {
  std::vector<SuffixRecord> refs = seeds_;
  for (const auto& rec : archive_.records()) {
    refs.push_back(rec);
  }
  return refs;
}

}  // namespace stinger
