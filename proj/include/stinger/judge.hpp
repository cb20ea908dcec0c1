#ifndef STINGER_JUDGE_HPP_
#define STINGER_JUDGE_HPP_

#include <memory>
#include <string>
#include <vector>

#include "stinger/behavior_store.hpp"

namespace stinger {

class HttpTransport;  // victim_gateway.hpp

// Binary attack verdict. The judge never leaks a score into rewards; the
// trainer only ever sees success true/false.
struct Verdict {
  bool success = false;
  std::string judge_id;
  std::string rationale;  // rule that fired, or raw classifier output
};

struct HeuristicJudgeRules {
  std::vector<std::string> refusal_markers;
  size_t min_length = 0;
};

// Loads {"refusal_markers": [...], "min_length": N} from a JSON file.
HeuristicJudgeRules load_judge_rules(const std::string& path);

HeuristicJudgeRules default_judge_rules();

class JudgeClient {
 public:
  virtual ~JudgeClient() = default;
  virtual Verdict judge(const Behavior& behavior,
                        const std::string& response_text) = 0;
  virtual const std::string& judge_id() const = 0;
};

// Pure refusal heuristic: success iff no refusal marker appears
// (case-insensitive substring) and the response is at least min_length
// characters. Same inputs always produce the same verdict.
class HeuristicJudge final : public JudgeClient {
 public:
  HeuristicJudge(std::string judge_id, HeuristicJudgeRules rules);

  Verdict judge(const Behavior& behavior,
                const std::string& response_text) override;
  const std::string& judge_id() const override { return judge_id_; }

 private:
  std::string judge_id_;
  HeuristicJudgeRules rules_;
};

// Remote classifier client. Posts {"behavior": ..., "generation": ...} and
// expects {"label": "yes"|"no"}. Throws JudgeUnavailable once retries are
// exhausted; the campaign re-queues such episodes as unscored.
class RemoteJudge final : public JudgeClient {
 public:
  RemoteJudge(std::string judge_id, std::string endpoint,
              std::shared_ptr<HttpTransport> transport, int max_attempts = 3,
              int64_t timeout_ms = 30000);

  Verdict judge(const Behavior& behavior,
                const std::string& response_text) override;
  const std::string& judge_id() const override { return judge_id_; }

 private:
  std::string judge_id_;
  std::string endpoint_;
  std::shared_ptr<HttpTransport> transport_;
  int max_attempts_;
  int64_t timeout_ms_;
};

}  // namespace stinger

#endif  // STINGER_JUDGE_HPP_
