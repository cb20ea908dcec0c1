#ifndef STINGER_UTIL_HPP_
#define STINGER_UTIL_HPP_

#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace stinger {

// --- string helpers ---

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Trim plus collapse of internal whitespace runs to a single space.
std::string collapse_whitespace(std::string_view s);

bool contains_ci(std::string_view haystack, std::string_view needle);

// --- hashing ---

// Hex-encoded SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

// splitmix64 mix; used to derive independent RNG streams from one seed.
uint64_t mix_seed(uint64_t seed, std::string_view tag);

// --- file helpers ---

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// Append one line plus '\n' and flush before returning, so a crash after the
// call never loses the record.
void append_line(const std::string& path, std::string_view line);

std::vector<std::string> read_lines(const std::string& path);

// --- clock ---

// Millisecond timestamps. The system clock is the default; campaigns that
// must replay byte-identically use the logical clock instead, which advances
// by a fixed quantum per reading.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual int64_t now_ms() = 0;
  virtual void sleep_ms(int64_t ms) = 0;
};

class SystemClock final : public Clock {
 public:
  int64_t now_ms() override;
  void sleep_ms(int64_t ms) override;
};

class LogicalClock final : public Clock {
 public:
  explicit LogicalClock(int64_t start_ms = 0, int64_t tick_ms = 1)
      : now_(start_ms), tick_(tick_ms) {}
  int64_t now_ms() override {
    int64_t t = now_;
    now_ += tick_;
    return t;
  }
  void sleep_ms(int64_t ms) override { now_ += ms; }

  // Reads the state without advancing it; checkpoints persist this so a
  // resumed run continues the same timestamp stream.
  int64_t current() const { return now_; }

 private:
  int64_t now_;
  int64_t tick_;
};

// Fake clock for tests: time moves only when told to.
class FakeClock final : public Clock {
 public:
  explicit FakeClock(int64_t start_ms = 0) : now_(start_ms) {}
  int64_t now_ms() override { return now_; }
  void sleep_ms(int64_t ms) override { now_ += ms; }
  void advance_ms(int64_t ms) { now_ += ms; }

 private:
  int64_t now_;
};

}  // namespace stinger

#endif  // STINGER_UTIL_HPP_
