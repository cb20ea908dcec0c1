#include "stinger/victim_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "httplib.h"
#include "json.hpp"
#include "stinger/errors.hpp"

namespace stinger {

using nlohmann::json;

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResult post(const std::string& url,
                  const std::map<std::string, std::string>& headers,
                  const std::string& body, int64_t timeout_ms) override {
    // Split scheme://host[:port] from the path.
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      return {.transport_error = true, .error = "malformed endpoint: " + url};
    }
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin =
        path_start == std::string::npos ? url : url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(timeout_ms));

    httplib::Headers hl_headers;
    for (const auto& [k, v] : headers) hl_headers.emplace(k, v);

    auto res = client.Post(path, hl_headers, body, "application/json");
    HttpResult out;
    if (!res) {
      out.transport_error = true;
      out.timed_out = res.error() == httplib::Error::ConnectionTimeout ||
                      res.error() == httplib::Error::Read ||
                      res.error() == httplib::Error::Write;
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_httplib_transport() {
  return std::make_shared<HttplibTransport>();
}

bool is_token_subsequence(const TokenSeq& needle, const TokenSeq& haystack) {
  size_t i = 0;
  for (const auto& tok : haystack) {
    if (i < needle.size() && tok == needle[i]) ++i;
  }
  return i == needle.size();
}

std::string mock_victim_response(const MockVictimRules& rules,
                                 const std::string& question,
                                 const std::string& suffix) {
  if (is_token_subsequence(rules.trigger_tokens, tokenize(suffix))) {
    std::string out = rules.compliance_template;
    const std::string placeholder = "{question}";
    const auto pos = out.find(placeholder);
    if (pos != std::string::npos) {
      out.replace(pos, placeholder.size(), question);
    }
    return out;
  }
  return rules.refusal_text;
}

RateLimiter::RateLimiter(int per_minute, Clock& clock)
    : per_minute_(per_minute), clock_(clock) {}

void RateLimiter::acquire() {
  std::lock_guard<std::mutex> lock(mutex_);
  constexpr int64_t kWindowMs = 60000;
  for (;;) {
    const int64_t now = clock_.now_ms();
    while (!admitted_ms_.empty() && admitted_ms_.front() + kWindowMs <= now) {
      admitted_ms_.pop_front();
    }
    if (static_cast<int>(admitted_ms_.size()) < per_minute_) {
      admitted_ms_.push_back(now);
      return;
    }
    clock_.sleep_ms(admitted_ms_.front() + kWindowMs - now);
  }
}

VictimGateway::VictimGateway(std::string cache_dir, Clock& clock,
                             std::shared_ptr<HttpTransport> transport,
                             uint64_t jitter_seed)
    : cache_dir_(std::move(cache_dir)),
      clock_(clock),
      transport_(std::move(transport)),
      jitter_rng_(jitter_seed) {}

void VictimGateway::register_victim(VictimSpec spec) {
  if (spec.victim_id.empty()) throw ConfigError("victim_id must not be empty");
  if (spec.kind == VictimKind::kHttpChat) {
    if (spec.endpoint.empty() || spec.model_name.empty()) {
      throw ConfigError("http_chat victim '" + spec.victim_id +
                        "' requires endpoint and model_name");
    }
  } else {
    if (!spec.mock_rules) {
      throw ConfigError("mock victim '" + spec.victim_id +
                        "' requires mock_rules");
    }
    if (spec.temperature != 0.0) {
      throw ConfigError("mock victim '" + spec.victim_id +
                        "' must use temperature 0");
    }
  }
  if (spec.rate_limit_per_min <= 0) {
    throw ConfigError("rate_limit_per_min must be positive for '" +
                      spec.victim_id + "'");
  }
  limiters_.try_emplace(spec.victim_id, spec.rate_limit_per_min, clock_);
  victims_[spec.victim_id] = std::move(spec);
}

const VictimSpec& VictimGateway::spec(const std::string& victim_id) const {
  auto it = victims_.find(victim_id);
  if (it == victims_.end()) {
    throw ConfigError("unknown victim: " + victim_id);
  }
  return it->second;
}

std::vector<std::string> VictimGateway::victim_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, _] : victims_) ids.push_back(id);
  return ids;
}

std::string VictimGateway::api_key_env_var(const std::string& victim_id) {
  std::string var = "STINGER_API_KEY_";
  for (unsigned char c : victim_id) {
    var.push_back(std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_');
  }
  return var;
}

std::string VictimGateway::cache_path(const std::string& victim_id,
                                      const std::string& prompt) const {
  const std::string digest = sha256_hex(victim_id + "\n" + prompt);
  return (std::filesystem::path(cache_dir_) / victim_id / (digest + ".json"))
      .string();
}

std::optional<VictimGateway::CacheEntry> VictimGateway::cache_lookup(
    const std::string& victim_id, const std::string& prompt) {
  const std::string key = victim_id + "\n" + prompt;
  auto it = memory_cache_.find(key);
  if (it != memory_cache_.end()) return it->second;
  if (cache_dir_.empty()) return std::nullopt;
  const std::string path = cache_path(victim_id, prompt);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    const json doc = json::parse(read_file(path));
    CacheEntry entry;
    entry.text = doc.at("response").at("text").get<std::string>();
    entry.latency_ms = doc.at("response").at("latency_ms").get<int64_t>();
    entry.attempt_count = doc.at("response").at("attempt_count").get<int>();
    memory_cache_[key] = entry;
    return entry;
  } catch (const json::exception&) {
    return std::nullopt;  // corrupt entry: treat as a miss and overwrite
  }
}

void VictimGateway::cache_store(const VictimSpec& spec,
                                const std::string& prompt,
                                const CacheEntry& entry) {
  memory_cache_[spec.victim_id + "\n" + prompt] = entry;
  if (cache_dir_.empty()) return;
  const std::string path = cache_path(spec.victim_id, prompt);
  std::filesystem::create_directories(
      std::filesystem::path(path).parent_path());
  const json doc = {
      {"request",
       {{"victim_id", spec.victim_id},
        {"prompt", prompt},
        {"model", spec.model_name},
        {"max_tokens", spec.max_tokens},
        {"temperature", spec.temperature}}},
      {"response",
       {{"text", entry.text},
        {"latency_ms", entry.latency_ms},
        {"attempt_count", entry.attempt_count}}},
      {"timestamp_ms", clock_.now_ms()},
  };
  write_file(path, doc.dump());
}

VictimResponse VictimGateway::query(const std::string& victim_id,
                                    const std::string& question,
                                    const std::string& suffix) {
  if (trim(question).empty()) {
    throw ConfigError("question must not be empty");
  }
  const VictimSpec& victim = spec(victim_id);
  const std::string prompt = question + " " + suffix;

  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto hit = cache_lookup(victim_id, prompt)) {
      ++cache_hits_;
      VictimResponse resp;
      resp.text = hit->text;
      resp.latency_ms = hit->latency_ms;
      resp.cached = true;
      resp.attempt_count = hit->attempt_count;
      return resp;
    }
  }

  CacheEntry entry;
  if (victim.kind == VictimKind::kMock) {
    const int64_t started = clock_.now_ms();
    entry.text = mock_victim_response(*victim.mock_rules, question, suffix);
    entry.latency_ms = clock_.now_ms() - started;
    entry.attempt_count = 1;
  } else {
    entry = query_http(victim, prompt);
  }

  {
    std::lock_guard<std::mutex> lock(mutex_);
    cache_store(victim, prompt, entry);
    ++upstream_calls_;
  }

  VictimResponse resp;
  resp.text = entry.text;
  resp.latency_ms = entry.latency_ms;
  resp.cached = false;
  resp.attempt_count = entry.attempt_count;
  return resp;
}

VictimGateway::CacheEntry VictimGateway::query_http(const VictimSpec& spec,
                                                    const std::string& prompt) {
  const std::string env_var = api_key_env_var(spec.victim_id);
  const char* api_key = std::getenv(env_var.c_str());
  if (api_key == nullptr || *api_key == '\0') {
    throw AuthMissing(env_var);
  }

  const json request = {
      {"model", spec.model_name},
      {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
      {"max_tokens", spec.max_tokens},
      {"temperature", spec.temperature},
  };
  std::map<std::string, std::string> headers = spec.extra_headers;
  headers["Authorization"] = std::string("Bearer ") + api_key;

  const int64_t started = clock_.now_ms();
  std::string last_error;
  int last_status = 0;
  bool rate_limited = false;
  bool timed_out = false;

  for (int attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    limiters_.at(spec.victim_id).acquire();
    const HttpResult result = transport_->post(
        spec.endpoint, headers, request.dump(), spec.request_timeout_ms);

    if (!result.transport_error && result.status == 200) {
      try {
        const json doc = json::parse(result.body);
        CacheEntry entry;
        entry.text = doc.at("choices").at(0).at("message").at("content")
                         .get<std::string>();
        entry.latency_ms = clock_.now_ms() - started;
        entry.attempt_count = attempt;
        return entry;
      } catch (const json::exception& e) {
        throw UpstreamError(result.status,
                            std::string("unparseable response: ") + e.what());
      }
    }

    rate_limited = !result.transport_error && result.status == 429;
    timed_out = result.transport_error && result.timed_out;
    last_status = result.status;
    last_error = result.transport_error ? result.error : result.body;

    const bool retryable =
        result.transport_error || result.status == 429 || result.status >= 500;
    if (!retryable) {
      throw UpstreamError(result.status, last_error);
    }
    if (attempt < kMaxAttempts) {
      // Full jitter: uniform over [0, base * factor^(attempt-1)].
      const double cap = static_cast<double>(kBackoffBaseMs) *
                         std::pow(kBackoffFactor, attempt - 1);
      std::uniform_real_distribution<double> dist(0.0, cap);
      int64_t delay;
      {
        std::lock_guard<std::mutex> lock(mutex_);
        delay = static_cast<int64_t>(dist(jitter_rng_));
      }
      clock_.sleep_ms(delay);
    }
  }

  if (rate_limited) {
    throw RateLimited("rate limited after " + std::to_string(kMaxAttempts) +
                      " attempts: " + spec.victim_id);
  }
  if (timed_out) {
    throw Timeout("timed out after " + std::to_string(kMaxAttempts) +
                  " attempts: " + spec.victim_id);
  }
  throw UpstreamError(last_status, last_error);
}

size_t VictimGateway::purge_cache(const std::optional<std::string>& victim_id) {
  std::lock_guard<std::mutex> lock(mutex_);
  size_t memory_evicted = 0;

  for (auto it = memory_cache_.begin(); it != memory_cache_.end();) {
    const std::string& key = it->first;
    const std::string id = key.substr(0, key.find('\n'));
    if (!victim_id || id == *victim_id) {
      it = memory_cache_.erase(it);
      ++memory_evicted;
    } else {
      ++it;
    }
  }

  // Disk is the authoritative store when configured; the memory map only
  // mirrors entries this process has touched.
  if (cache_dir_.empty() || !std::filesystem::exists(cache_dir_)) {
    return memory_evicted;
  }
  size_t disk_evicted = 0;
  for (const auto& dir : std::filesystem::directory_iterator(cache_dir_)) {
    if (!dir.is_directory()) continue;
    const std::string id = dir.path().filename().string();
    if (victim_id && id != *victim_id) continue;
    for (const auto& file : std::filesystem::directory_iterator(dir.path())) {
      if (file.path().extension() == ".json") {
        std::filesystem::remove(file.path());
        ++disk_evicted;
      }
    }
  }
  return disk_evicted;
}

}  // namespace stinger
