#include "stinger/config.hpp"

#include <filesystem>

#include "stinger/errors.hpp"
#include "stinger/util.hpp"

namespace stinger {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string resolve(const fs::path& base, const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute()) return p.lexically_normal().string();
  return (base / p).lexically_normal().string();
}

VictimSpec parse_victim(const json& v) {
  VictimSpec spec;
  spec.victim_id = v.at("victim_id").get<std::string>();
  const std::string kind = v.value("kind", std::string("mock"));
  if (kind == "mock") {
    spec.kind = VictimKind::kMock;
  } else if (kind == "http_chat") {
    spec.kind = VictimKind::kHttpChat;
  } else {
    throw ConfigError("victim '" + spec.victim_id + "': unknown kind '" +
                      kind + "'");
  }
  spec.endpoint = v.value("endpoint", std::string());
  spec.model_name = v.value("model_name", std::string());
  spec.max_tokens = v.value("max_tokens", 512);
  spec.temperature =
      v.value("temperature", spec.kind == VictimKind::kMock ? 0.0 : 0.7);
  spec.request_timeout_ms = v.value("request_timeout_ms", int64_t{30000});
  spec.rate_limit_per_min = v.value("rate_limit_per_min", 60);
  if (v.contains("extra_headers")) {
    spec.extra_headers =
        v.at("extra_headers").get<std::map<std::string, std::string>>();
  }
  if (v.contains("mock_rules")) {
    MockVictimRules rules;
    const json& m = v.at("mock_rules");
    rules.trigger_tokens = tokenize(m.at("trigger_tokens").get<std::string>());
    rules.refusal_text = m.at("refusal_text").get<std::string>();
    rules.compliance_template = m.at("compliance_template").get<std::string>();
    spec.mock_rules = std::move(rules);
  }
  return spec;
}

}  // namespace

void RunConfig::validate() const {
  if (paths.behaviors.empty()) throw ConfigError("paths.behaviors is required");
  if (paths.seeds.empty()) throw ConfigError("paths.seeds is required");
  if (paths.archive_dir.empty()) {
    throw ConfigError("paths.archive_dir is required");
  }
  if (paths.checkpoint_dir.empty()) {
    throw ConfigError("paths.checkpoint_dir is required");
  }
  if (!fs::exists(paths.behaviors)) {
    throw ConfigError("behaviors file not found: " + paths.behaviors);
  }
  if (!fs::exists(paths.seeds)) {
    throw ConfigError("seeds file not found: " + paths.seeds);
  }
  if (victims.empty()) throw ConfigError("at least one victim is required");
  bool found = train_victim_id.empty();
  for (const auto& v : victims) {
    if (v.victim_id == train_victim_id) found = true;
  }
  if (!found) {
    throw ConfigError("train_victim_id '" + train_victim_id +
                      "' does not name a configured victim");
  }
  if (judge.kind != "heuristic" && judge.kind != "remote") {
    throw ConfigError("judge.kind must be 'heuristic' or 'remote'");
  }
  if (judge.kind == "remote" && judge.endpoint.empty()) {
    throw ConfigError("judge.endpoint is required for a remote judge");
  }
  if (!(similarity.alpha > 0.0)) {
    throw ConfigError("similarity.alpha must be positive");
  }
  if (similarity.beta < 0.0) {
    throw ConfigError("similarity.beta must be >= 0");
  }
  if (!(similarity.theta >= 0.0 && similarity.theta <= 1.0)) {
    throw ConfigError("similarity.theta must be in [0, 1]");
  }
  ppo.validate();
  if (eval.gen_attempts <= 0) {
    throw ConfigError("eval.gen_attempts must be positive");
  }
  if (eval.archive_top_k <= 0) {
    throw ConfigError("eval.archive_top_k must be positive");
  }
  if (eval.temperature < 0.0) {
    throw ConfigError("eval.temperature must be >= 0");
  }
  if (policy.vocabulary.empty()) {
    throw ConfigError("policy.vocabulary must not be empty");
  }
  if (parallelism <= 0) throw ConfigError("parallelism must be positive");
}

RunConfig load_config(const std::string& path) {
  if (!fs::exists(path)) {
    throw ConfigError("config file not found: " + path);
  }
  json doc;
  try {
    doc = json::parse(read_file(path), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw ConfigError("invalid config " + path + ": " + e.what());
  }
  const fs::path base = fs::absolute(fs::path(path)).parent_path();

  RunConfig config;
  try {
    config.seed = doc.value("seed", uint64_t{0});

    const json& p = doc.at("paths");
    config.paths.behaviors = resolve(base, p.at("behaviors").get<std::string>());
    config.paths.seeds = resolve(base, p.at("seeds").get<std::string>());
    config.paths.archive_dir =
        resolve(base, p.at("archive_dir").get<std::string>());
    config.paths.checkpoint_dir =
        resolve(base, p.at("checkpoint_dir").get<std::string>());
    config.paths.cache_dir =
        resolve(base, p.value("cache_dir", std::string("cache")));
    config.paths.report_dir =
        resolve(base, p.value("report_dir", std::string("reports")));

    for (const json& v : doc.at("victims")) {
      config.victims.push_back(parse_victim(v));
    }
    config.train_victim_id = doc.value(
        "train_victim_id",
        config.victims.empty() ? std::string() : config.victims[0].victim_id);

    if (doc.contains("judge")) {
      const json& j = doc.at("judge");
      config.judge.kind = j.value("kind", std::string("heuristic"));
      config.judge.judge_id = j.value("judge_id", config.judge.judge_id);
      config.judge.endpoint = j.value("endpoint", std::string());
      config.judge.max_attempts = j.value("max_attempts", 3);
      config.judge.timeout_ms = j.value("timeout_ms", int64_t{30000});
      if (j.contains("rules_file")) {
        config.judge.rules_file =
            resolve(base, j.at("rules_file").get<std::string>());
        config.judge.rules = load_judge_rules(config.judge.rules_file);
      } else if (j.contains("refusal_markers")) {
        config.judge.rules.refusal_markers =
            j.at("refusal_markers").get<std::vector<std::string>>();
        config.judge.rules.min_length = j.value("min_length", size_t{0});
      } else {
        config.judge.rules = default_judge_rules();
      }
    } else {
      config.judge.rules = default_judge_rules();
    }

    if (doc.contains("similarity")) {
      const json& s = doc.at("similarity");
      config.similarity.alpha = s.value("alpha", 0.1);
      config.similarity.beta = s.value("beta", 0.05);
      config.similarity.theta = s.value("theta", 0.3);
    }

    if (doc.contains("ppo")) {
      const json& o = doc.at("ppo");
      config.ppo.epochs = o.value("epochs", 50);
      config.ppo.steps_per_epoch = o.value("steps_per_epoch", 4);
      config.ppo.minibatch_size = o.value("minibatch_size", 8);
      config.ppo.clip_ratio = o.value("clip_ratio", 0.2);
      config.ppo.gamma = o.value("gamma", 1.0);
      config.ppo.gae_lambda = o.value("gae_lambda", 0.95);
      config.ppo.kl_coef = o.value("kl_coef", 0.05);
      config.ppo.value_coef = o.value("value_coef", 0.5);
      config.ppo.learning_rate = o.value("learning_rate", 0.3);
      config.ppo.max_new_tokens = o.value("max_new_tokens", 32);
      config.ppo.success_bonus = o.value("success_bonus", 10.0);
      config.ppo.rollouts_per_behavior = o.value("rollouts_per_behavior", 1);
      config.ppo.temperature = o.value("temperature", 1.0);
      config.ppo.checkpoint_interval = o.value("checkpoint_interval", 1);
    }

    if (doc.contains("eval")) {
      const json& e = doc.at("eval");
      config.eval.gen_attempts = e.value("gen_attempts", 5);
      config.eval.archive_top_k = e.value("archive_top_k", 38);
      config.eval.temperature = e.value("temperature", 1.0);
    }

    const json& pol = doc.at("policy");
    config.policy.vocabulary =
        pol.at("vocabulary").get<std::vector<std::string>>();
    config.policy.init_stddev = pol.value("init_stddev", 0.1);

    config.prompt_template_id =
        doc.value("prompt_template_id", std::string("v1"));
    config.parallelism = doc.value("parallelism", 1);
    config.logical_clock = doc.value("logical_clock", false);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }

  config.validate();
  return config;
}

nlohmann::json config_snapshot(const RunConfig& config) {
  auto redact_headers = [](const std::map<std::string, std::string>& headers) {
    json out = json::object();
    for (const auto& [k, v] : headers) {
      const std::string lk = to_lower(k);
      const bool sensitive = lk.find("authorization") != std::string::npos ||
                             lk.find("api-key") != std::string::npos ||
                             lk.find("api_key") != std::string::npos ||
                             lk.find("token") != std::string::npos;
      out[k] = sensitive ? "<redacted>" : v;
    }
    return out;
  };

  json victims = json::array();
  for (const auto& v : config.victims) {
    json jv = {
        {"victim_id", v.victim_id},
        {"kind", v.kind == VictimKind::kMock ? "mock" : "http_chat"},
        {"endpoint", v.endpoint},
        {"model_name", v.model_name},
        {"max_tokens", v.max_tokens},
        {"temperature", v.temperature},
        {"request_timeout_ms", v.request_timeout_ms},
        {"rate_limit_per_min", v.rate_limit_per_min},
        {"extra_headers", redact_headers(v.extra_headers)},
    };
    if (v.mock_rules) {
      jv["mock_rules"] = {
          {"trigger_tokens", v.mock_rules->trigger_tokens},
          {"refusal_text", v.mock_rules->refusal_text},
          {"compliance_template", v.mock_rules->compliance_template},
      };
    }
    victims.push_back(std::move(jv));
  }

  return json{
      {"seed", config.seed},
      {"paths",
       {{"behaviors", config.paths.behaviors},
        {"seeds", config.paths.seeds},
        {"archive_dir", config.paths.archive_dir},
        {"checkpoint_dir", config.paths.checkpoint_dir},
        {"cache_dir", config.paths.cache_dir},
        {"report_dir", config.paths.report_dir}}},
      {"victims", victims},
      {"train_victim_id", config.train_victim_id},
      {"judge",
       {{"kind", config.judge.kind},
        {"judge_id", config.judge.judge_id},
        {"endpoint", config.judge.endpoint},
        {"refusal_markers", config.judge.rules.refusal_markers},
        {"min_length", config.judge.rules.min_length}}},
      {"similarity",
       {{"alpha", config.similarity.alpha},
        {"beta", config.similarity.beta},
        {"theta", config.similarity.theta}}},
      {"ppo",
       {{"epochs", config.ppo.epochs},
        {"steps_per_epoch", config.ppo.steps_per_epoch},
        {"minibatch_size", config.ppo.minibatch_size},
        {"clip_ratio", config.ppo.clip_ratio},
        {"gamma", config.ppo.gamma},
        {"gae_lambda", config.ppo.gae_lambda},
        {"kl_coef", config.ppo.kl_coef},
        {"value_coef", config.ppo.value_coef},
        {"learning_rate", config.ppo.learning_rate},
        {"max_new_tokens", config.ppo.max_new_tokens},
        {"success_bonus", config.ppo.success_bonus},
        {"rollouts_per_behavior", config.ppo.rollouts_per_behavior},
        {"temperature", config.ppo.temperature},
        {"checkpoint_interval", config.ppo.checkpoint_interval}}},
      {"eval",
       {{"gen_attempts", config.eval.gen_attempts},
        {"archive_top_k", config.eval.archive_top_k},
        {"temperature", config.eval.temperature}}},
      {"policy",
       {{"vocabulary", config.policy.vocabulary},
        {"init_stddev", config.policy.init_stddev}}},
      {"prompt_template_id", config.prompt_template_id},
      {"parallelism", config.parallelism},
      {"logical_clock", config.logical_clock},
  };
}

}  // namespace stinger
