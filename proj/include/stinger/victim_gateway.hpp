#ifndef STINGER_VICTIM_GATEWAY_HPP_
#define STINGER_VICTIM_GATEWAY_HPP_

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stinger/tokenize.hpp"
#include "stinger/util.hpp"

namespace stinger {

enum class VictimKind { kHttpChat, kMock };

struct MockVictimRules {
  TokenSeq trigger_tokens;
  std::string refusal_text;
  std::string compliance_template;  // "{question}" is substituted
};

struct VictimSpec {
  std::string victim_id;
  VictimKind kind = VictimKind::kMock;
  std::string endpoint;    // http_chat only
  std::string model_name;  // http_chat only
  int max_tokens = 512;
  double temperature = 0.7;  // must be 0 for mock victims
  int64_t request_timeout_ms = 30000;
  int rate_limit_per_min = 60;
  std::map<std::string, std::string> extra_headers;
  std::optional<MockVictimRules> mock_rules;
};

struct VictimResponse {
  std::string text;
  int64_t latency_ms = 0;
  bool cached = false;
  int attempt_count = 1;
};

// Minimal HTTP surface so tests can script the upstream.
struct HttpResult {
  int status = 0;
  std::string body;
  bool transport_error = false;
  bool timed_out = false;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResult post(const std::string& url,
                          const std::map<std::string, std::string>& headers,
                          const std::string& body, int64_t timeout_ms) = 0;
};

// Real transport over cpp-httplib.
std::shared_ptr<HttpTransport> make_httplib_transport();

// Sliding-window limiter: at most `per_minute` admissions in any 60 s
// window. acquire() blocks (via the clock) until a slot frees.
class RateLimiter {
 public:
  RateLimiter(int per_minute, Clock& clock);
  void acquire();

 private:
  int per_minute_;
  Clock& clock_;
  std::mutex mutex_;
  std::deque<int64_t> admitted_ms_;
};

// Black-box victim access with response caching, rate limiting and retry.
//
// Cache entries live on disk under cache_dir/<victim_id>/<sha256>.json keyed
// by (victim_id, prompt), so an interrupted campaign resumes without
// re-spending its API budget. Retries use exponential backoff with full
// jitter: up to `kMaxAttempts` tries, sleeping uniform(0, base * factor^k)
// between them.
class VictimGateway {
 public:
  static constexpr int kMaxAttempts = 5;
  static constexpr int64_t kBackoffBaseMs = 1000;
  static constexpr double kBackoffFactor = 2.0;

  VictimGateway(std::string cache_dir, Clock& clock,
                std::shared_ptr<HttpTransport> transport,
                uint64_t jitter_seed = 0);

  void register_victim(VictimSpec spec);
  const VictimSpec& spec(const std::string& victim_id) const;
  std::vector<std::string> victim_ids() const;

  // prompt = question + " " + suffix, sent as a single user message.
  VictimResponse query(const std::string& victim_id,
                       const std::string& question, const std::string& suffix);

  size_t purge_cache(const std::optional<std::string>& victim_id = {});

  int64_t upstream_calls() const { return upstream_calls_; }
  int64_t cache_hits() const { return cache_hits_; }

  static std::string api_key_env_var(const std::string& victim_id);

 private:
  struct CacheEntry {
    std::string text;
    int64_t latency_ms = 0;
    int attempt_count = 1;
  };

  std::optional<CacheEntry> cache_lookup(const std::string& victim_id,
                                         const std::string& prompt);
  void cache_store(const VictimSpec& spec, const std::string& prompt,
                   const CacheEntry& entry);
  std::string cache_path(const std::string& victim_id,
                         const std::string& prompt) const;

  VictimResponse query_mock(const VictimSpec& spec,
                            const std::string& question,
                            const std::string& suffix);
  CacheEntry query_http(const VictimSpec& spec, const std::string& prompt);

  std::string cache_dir_;
  Clock& clock_;
  std::shared_ptr<HttpTransport> transport_;
  std::mt19937_64 jitter_rng_;
  std::map<std::string, VictimSpec> victims_;
  std::map<std::string, RateLimiter> limiters_;
  std::map<std::string, CacheEntry> memory_cache_;  // key: victim \n prompt
  mutable std::mutex mutex_;
  int64_t upstream_calls_ = 0;
  int64_t cache_hits_ = 0;
};

// The deterministic stand-in victim: complies iff the trigger tokens appear
// as a (not necessarily contiguous) subsequence of the tokenized suffix.
// Pure function of (rules, question, suffix).
std::string mock_victim_response(const MockVictimRules& rules,
                                 const std::string& question,
                                 const std::string& suffix);

bool is_token_subsequence(const TokenSeq& needle, const TokenSeq& haystack);

}  // namespace stinger

#endif  // STINGER_VICTIM_GATEWAY_HPP_
