#ifndef STINGER_CAMPAIGN_HPP_
#define STINGER_CAMPAIGN_HPP_

#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stinger/config.hpp"
#include "stinger/rl_core.hpp"

namespace stinger {

enum class EvalOutcomeKind {
  kGeneratedSuccess,
  kArchiveSuccess,
  kFailure,
  kUnscored,
};

std::string outcome_name(EvalOutcomeKind kind);

struct AttemptRecord {
  std::string suffix_text;
  std::string source;     // "generated" | "archive"
  std::string suffix_id;  // archive attempts only
  bool success = false;
  std::string judge_id;
  std::string rationale;
  bool cached = false;
};

struct EvalOutcome {
  std::string behavior_id;
  EvalOutcomeKind outcome = EvalOutcomeKind::kFailure;
  std::optional<std::string> winning_suffix_id;  // archive successes
  std::vector<AttemptRecord> attempts;
};

struct CampaignReport {
  std::string victim_id;
  Split split = Split::kTest;
  std::vector<EvalOutcome> outcomes;
  double asr = 0.0;  // percent of scored behaviors beaten
  int generated_successes = 0;
  int archive_successes = 0;
  int failures = 0;
  int unscored = 0;
  nlohmann::json config;  // redacted snapshot
  int64_t victim_calls = 0;
  int64_t cache_hits = 0;
  int64_t judge_calls = 0;
  int64_t wall_clock_ms = 0;
};

struct TrainingReport {
  std::vector<EpochStats> epochs;
  bool interrupted = false;
  std::string checkpoint_path;
  std::string archive_path;
  nlohmann::json config;
  int64_t wall_clock_ms = 0;
};

// asr = 100 * successes / (total - unscored). Throws NoScoredOutcomes when
// every outcome is unscored (or the list is empty).
double compute_asr(const std::vector<EvalOutcome>& outcomes);

// Half-up rounding to two decimals; presentation only.
std::string format_percent(double value);

nlohmann::json report_to_json(const CampaignReport& report);
CampaignReport report_from_json(const nlohmann::json& doc);

// One table row per report; unscored counts surface in the table.
std::string reports_to_markdown(const std::vector<CampaignReport>& reports);

nlohmann::json training_report_to_json(const TrainingReport& report);

// --- evaluation protocol ---

// Victim access as the protocol sees it; production wires this to the
// gateway, tests can script it.
using QueryFn =
    std::function<VictimResponse(const Behavior&, const std::string& suffix)>;

struct EvalProtocolConfig {
  int gen_attempts = 5;
  int archive_top_k = 38;
  double temperature = 1.0;
  int max_new_tokens = 32;
  uint64_t seed = 0;
  std::string prompt_template_id = "v1";
  int parallelism = 1;
};

// The archive-fallback protocol, one behavior at a time: up to gen_attempts
// fresh suffixes, then the ranked archive records until something lands.
// Fresh generation and fallback never mutate `policy` or `ranked_archive`;
// successes are reported back through `on_success` so the caller can store
// them elsewhere. A judge outage re-queues the behavior once, then marks it
// unscored.
std::vector<EvalOutcome> evaluate_outcomes(
    const std::vector<Behavior>& behaviors, const Policy& policy,
    const std::vector<SuffixRecord>& seeds,
    const std::vector<SuffixRecord>& ranked_archive,
    const EvalProtocolConfig& config, const QueryFn& query, JudgeClient& judge,
    const std::function<void(const Behavior&, const std::string& suffix)>&
        on_success = nullptr,
    TranscriptWriter* transcript = nullptr);

// --- config-level entry points ---

struct RunOptions {
  const std::atomic<bool>* interrupt = nullptr;  // checked between epochs
  std::ostream* progress = nullptr;              // one line per epoch
};

// Runs ppo.epochs training epochs, checkpointing every
// ppo.checkpoint_interval epochs. Resumes from an existing checkpoint in
// paths.checkpoint_dir, continuing the RNG stream and epoch counter, so an
// interrupted-then-resumed run finishes in the same state as an
// uninterrupted one.
TrainingReport run_training(const RunConfig& config, const RunOptions& options = {});

// Evaluates the trained policy on a split. Requires the training checkpoint
// and archive file. Eval-time successes go to a separate eval archive so
// the ranking used for fallback stays frozen.
CampaignReport evaluate(const RunConfig& config, Split split,
                        const std::string& victim_id);

}  // namespace stinger

#endif  // STINGER_CAMPAIGN_HPP_
