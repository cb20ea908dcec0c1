#ifndef STINGER_BEHAVIOR_STORE_HPP_
#define STINGER_BEHAVIOR_STORE_HPP_

#include <string>
#include <vector>

namespace stinger {

enum class Split { kTrain, kTest };

Split parse_split(const std::string& value);
std::string split_name(Split split);

// One harmful-behavior record, the unit a campaign attacks.
struct Behavior {
  std::string behavior_id;
  std::string text;
  std::string category;
  Split split = Split::kTrain;
};

enum class BehaviorFormat { kCsv, kJsonl };

// Validated, immutable collection of behaviors. Iteration is always sorted
// by behavior_id; train and test subsets are disjoint by construction
// (duplicate ids are rejected at load).
class BehaviorStore {
 public:
  BehaviorStore(std::vector<Behavior> behaviors, std::string source_digest);

  const std::vector<Behavior>& behaviors() const { return behaviors_; }
  const std::string& source_digest() const { return source_digest_; }
  size_t size() const { return behaviors_.size(); }

  std::vector<Behavior> select_split(Split split) const;

 private:
  std::vector<Behavior> behaviors_;  // sorted by behavior_id
  std::string source_digest_;
};

// Required columns/keys: behavior_id, text, category, split.
// CSV follows RFC 4180 quoting; JSONL is one object per line.
BehaviorStore load_behaviors(const std::string& path, BehaviorFormat format);

// Picks the format from the file extension (.csv / .jsonl / .ndjson).
BehaviorStore load_behaviors(const std::string& path);

}  // namespace stinger

#endif  // STINGER_BEHAVIOR_STORE_HPP_
