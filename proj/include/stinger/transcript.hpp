#ifndef STINGER_TRANSCRIPT_HPP_
#define STINGER_TRANSCRIPT_HPP_

#include <string>

#include "json.hpp"

namespace stinger {

// Append-only JSONL episode log. One line per episode; lines are flushed as
// written so an interrupted run keeps everything it already did.
class TranscriptWriter {
 public:
  explicit TranscriptWriter(std::string path) : path_(std::move(path)) {}

  void write(const nlohmann::json& entry);
  const std::string& path() const { return path_; }
  int64_t entries_written() const { return entries_; }

 private:
  std::string path_;
  int64_t entries_ = 0;
};

}  // namespace stinger

#endif  // STINGER_TRANSCRIPT_HPP_
