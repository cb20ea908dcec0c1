#ifndef STINGER_RL_CORE_HPP_
#define STINGER_RL_CORE_HPP_

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "stinger/behavior_store.hpp"
#include "stinger/judge.hpp"
#include "stinger/policy.hpp"
#include "stinger/similarity.hpp"
#include "stinger/suffix_corpus.hpp"
#include "stinger/transcript.hpp"
#include "stinger/victim_gateway.hpp"

namespace stinger {

struct PPOConfig {
  int epochs = 50;
  int steps_per_epoch = 4;  // optimizer passes over each epoch's rollouts
  int minibatch_size = 8;   // rollouts per gradient step
  double clip_ratio = 0.2;
  double gamma = 1.0;
  double gae_lambda = 0.95;
  double kl_coef = 0.05;
  double value_coef = 0.5;
  double learning_rate = 0.3;
  int max_new_tokens = 32;
  double success_bonus = 10.0;
  int rollouts_per_behavior = 1;
  double temperature = 1.0;  // sampling temperature during training
  int checkpoint_interval = 1;

  void validate() const;
};

enum class EpisodeOutcome { kSuccess, kFailure, kPruned };

// One attack episode. All per-token arrays share the generated length T.
struct Rollout {
  std::string behavior_id;
  std::vector<int> prompt_tokens;
  std::vector<int> generated_tokens;
  std::string generated_text;
  std::vector<double> logprobs_old;
  std::vector<double> values;
  std::vector<double> reward_vector;
  std::vector<double> ref_logprobs;
  EpisodeOutcome outcome = EpisodeOutcome::kFailure;
  std::optional<Verdict> verdict;  // absent when pruned
  double similarity_score = 0.0;
};

struct Prompt {
  std::string text;
  std::vector<int> tokens;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double kl = 0.0;
  double clip_fraction = 0.0;
  int gradient_steps = 0;
};

struct EpochStats {
  int epoch = 0;
  int episodes = 0;
  int successes = 0;
  int pruned = 0;
  int unscored = 0;
  double train_success_rate = 0.0;
  double mean_similarity = 0.0;
  double prune_rate = 0.0;
  double kl = 0.0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double clip_fraction = 0.0;
  bool update_skipped = false;  // degenerate advantage batch
};

// Deterministic attack prompt: instruction header, the question, one seed
// suffix per line, then the generation cue. template_id selects the frozen
// wording; only "v1" exists.
Prompt build_prompt(const Behavior& behavior,
                    const std::vector<SuffixRecord>& seeds,
                    const Policy& policy, const std::string& template_id = "v1");

// Re-buckets corpus-token rewards onto policy tokens by character position:
// each corpus token's reward lands on the policy token whose span contains
// its first character. Total reward mass is conserved exactly.
RewardVector map_rewards(const std::string& generated_text,
                         const std::vector<CharSpan>& policy_spans,
                         const RewardVector& corpus_reward);

// Success: zeros with +success_bonus at the last token. Failure: the mapped
// similarity vector unchanged. Pruned: the mapped similarity vector with an
// extra -0.1 * success_bonus at the last token.
RewardVector compose_reward(size_t generated_len, EpisodeOutcome outcome,
                            const RewardVector& mapped_similarity,
                            const PPOConfig& config);

// delta_t = r_t + gamma * V_{t+1} - V_t with V_T = 0;
// A_t = sum_{k>=t} (gamma*lambda)^(k-t) delta_k; returns = A + V.
GaeResult gae_advantages(const std::vector<double>& rewards,
                         const std::vector<double>& values, double gamma,
                         double lambda);

// Loss over a set of rollouts with advantages/returns already attached to
// tokens, as one flat token batch:
//   mean_t[ -min(rho_t A_t, clip(rho_t) A_t)
//           + value_coef (V_t - R_t)^2
//           + kl_coef (logpi_t - logpi_ref_t) ]
// Accumulates d(loss)/d(theta) into the policy's gradient buffer.
struct TokenBatch {
  const Rollout* rollout = nullptr;
  size_t t = 0;
  double advantage = 0.0;
  double ret = 0.0;
};

double ppo_loss(const std::vector<TokenBatch>& tokens, Policy& policy,
                const PPOConfig& config, UpdateStats* stats);

// Normalizes advantages over the whole batch (mean 0, std 1, std floor
// 1e-8), then runs steps_per_epoch shuffled minibatch passes, one gradient
// step per minibatch. Throws DegenerateBatch when every normalized
// advantage is zero.
UpdateStats ppo_update(const std::vector<Rollout>& batch, Policy& policy,
                       const PPOConfig& config, std::mt19937_64& rng);

struct TrainComponents {
  SuffixCorpus* corpus = nullptr;
  SimilarityParams similarity;
  VictimGateway* gateway = nullptr;
  std::string victim_id;
  JudgeClient* judge = nullptr;
  TranscriptWriter* transcript = nullptr;  // optional
  Clock* clock = nullptr;
  std::string prompt_template_id = "v1";
};

// One pass over the behavior list: prompt, sample, prune-check, victim +
// judge when not pruned, reward composition, then a PPO update over the
// collected rollouts. Successful suffixes go to the archive.
EpochStats train_epoch(const std::vector<Behavior>& behaviors, Policy& policy,
                       const Policy& reference,
                       const TrainComponents& components,
                       const PPOConfig& config, std::mt19937_64& rng,
                       int epoch_index);

}  // namespace stinger

#endif  // STINGER_RL_CORE_HPP_
