#ifndef STINGER_CONFIG_HPP_
#define STINGER_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "stinger/rl_core.hpp"
#include "stinger/similarity.hpp"
#include "stinger/victim_gateway.hpp"

namespace stinger {

struct PathsConfig {
  std::string behaviors;
  std::string seeds;
  std::string archive_dir;
  std::string checkpoint_dir;
  std::string cache_dir;
  std::string report_dir;
};

struct JudgeConfig {
  std::string kind = "heuristic";  // heuristic | remote
  std::string judge_id = "refusal-heuristic";
  HeuristicJudgeRules rules;       // heuristic
  std::string rules_file;          // optional; overrides inline rules
  std::string endpoint;            // remote
  int max_attempts = 3;
  int64_t timeout_ms = 30000;
};

struct EvalConfig {
  int gen_attempts = 5;
  int archive_top_k = 38;
  double temperature = 1.0;
};

struct PolicyConfig {
  std::vector<std::string> vocabulary;
  double init_stddev = 0.1;
};

// Full run configuration. Files are JSON; // and /* */ comments are allowed
// so the shipped example can document every default inline. Relative paths
// resolve against the config file's directory.
struct RunConfig {
  uint64_t seed = 0;
  PathsConfig paths;
  std::vector<VictimSpec> victims;
  std::string train_victim_id;  // defaults to the first victim
  JudgeConfig judge;
  SimilarityParams similarity;
  PPOConfig ppo;
  EvalConfig eval;
  PolicyConfig policy;
  std::string prompt_template_id = "v1";
  int parallelism = 1;
  bool logical_clock = false;

  void validate() const;
};

RunConfig load_config(const std::string& path);

// Provenance snapshot embedded in every report. Credential-bearing header
// values are replaced with "<redacted>"; API keys themselves only ever live
// in environment variables.
nlohmann::json config_snapshot(const RunConfig& config);

}  // namespace stinger

#endif  // STINGER_CONFIG_HPP_
