#ifndef STINGER_SUFFIX_CORPUS_HPP_
#define STINGER_SUFFIX_CORPUS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stinger/tokenize.hpp"
#include "stinger/util.hpp"

namespace stinger {

enum class SuffixOrigin { kSeed, kGenerated };

struct SuccessEntry {
  std::string behavior_id;
  std::string victim_id;
  int64_t timestamp_ms = 0;
};

struct SuffixRecord {
  std::string suffix_id;
  TokenSeq tokens;  // always tokenize(raw_text); stored for fast similarity
  std::string raw_text;
  SuffixOrigin origin = SuffixOrigin::kGenerated;
  std::vector<SuccessEntry> successes;
  int64_t created_at_ms = 0;

  size_t success_count_for(const std::optional<std::string>& victim_id) const;
};

// Seed suffixes from a plain-text file: one suffix per line, '#' lines are
// comments, blank lines skipped. Order is file order.
std::vector<SuffixRecord> load_seeds(const std::string& path);

// Append-only archive of policy-generated suffixes that beat a victim at
// least once. Deduplicated by normalized text (trim + collapse internal
// whitespace). Every mutation is one JSONL event on disk; replaying the file
// reconstructs the in-memory state exactly.
class SuffixArchive {
 public:
  // In-memory only (tests, eval scratch archives).
  explicit SuffixArchive(Clock* clock = nullptr);

  // Backed by `path`; replays existing events if the file is present.
  SuffixArchive(std::string path, Clock* clock);

  // Records a success for the suffix, inserting it first if the normalized
  // text is new. Returns the owning record. Idempotent per
  // (normalized text, behavior_id, victim_id).
  const SuffixRecord& record_success(const std::string& raw_text,
                                     const std::string& behavior_id,
                                     const std::string& victim_id);

  // Generated records ranked by (success count desc, created_at asc,
  // suffix_id asc), truncated to k. With victim_id set, only successes
  // against that victim count.
  std::vector<SuffixRecord> top_k(
      size_t k, const std::optional<std::string>& victim_id = {}) const;

  const std::vector<SuffixRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

 private:
  void replay_file();
  void apply_insert(const SuffixRecord& rec);
  bool apply_success(const std::string& suffix_id, const SuccessEntry& entry);
  void persist_line(const std::string& line);
  int64_t now_ms();

  std::string path_;  // empty => memory only
  Clock* clock_ = nullptr;
  std::vector<SuffixRecord> records_;
  std::map<std::string, size_t> by_normalized_text_;
  std::map<std::string, size_t> by_id_;
  uint64_t next_id_ = 1;
};

// The full reference corpus: immutable seeds plus the growing archive.
// Similarity references are seeds followed by archived records.
class SuffixCorpus {
 public:
  SuffixCorpus(std::vector<SuffixRecord> seeds, SuffixArchive archive)
      : seeds_(std::move(seeds)), archive_(std::move(archive)) {}

  const std::vector<SuffixRecord>& seeds() const { return seeds_; }
  SuffixArchive& archive() { return archive_; }
  const SuffixArchive& archive() const { return archive_; }

  std::vector<SuffixRecord> references() const;

 private:
  std::vector<SuffixRecord> seeds_;
  SuffixArchive archive_;
};

}  // namespace stinger

#endif  // STINGER_SUFFIX_CORPUS_HPP_
