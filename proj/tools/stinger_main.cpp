// Command-line front end: train a suffix-attack policy, evaluate it against
// configured victims, fire one-off attacks, re-render reports, and manage
// the response cache.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "stinger/campaign.hpp"
#include "stinger/config.hpp"
#include "stinger/errors.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void handle_sigint(int) { g_interrupted.store(true); }

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;
constexpr int kExitInterrupted = 130;

int cmd_train(const std::string& config_path) {
  stinger::RunConfig config;
  try {
    config = stinger::load_config(config_path);
  } catch (const stinger::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::signal(SIGINT, handle_sigint);
  try {
    stinger::RunOptions options;
    options.interrupt = &g_interrupted;
    options.progress = &std::cerr;
    const stinger::TrainingReport report =
        stinger::run_training(config, options);
    if (report.interrupted) {
      std::cerr << "interrupted; checkpoint flushed to "
                << report.checkpoint_path << "\n";
      return kExitInterrupted;
    }
    std::cerr << "training finished: " << report.epochs.size()
              << " epochs, checkpoint at " << report.checkpoint_path << "\n";
    return kExitOk;
  } catch (const stinger::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const stinger::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

int cmd_eval(const std::string& config_path, const std::string& split_arg,
             std::string victim_id) {
  stinger::RunConfig config;
  stinger::Split split;
  try {
    config = stinger::load_config(config_path);
    split = stinger::parse_split(split_arg);
    if (victim_id.empty()) victim_id = config.train_victim_id;
    bool known = false;
    for (const auto& v : config.victims) {
      if (v.victim_id == victim_id) known = true;
    }
    if (!known) {
      throw stinger::ConfigError("unknown victim: " + victim_id);
    }
  } catch (const stinger::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    const stinger::CampaignReport report =
        stinger::evaluate(config, split, victim_id);
    std::cout << "ASR: " << stinger::format_percent(report.asr) << "%\n";
    return kExitOk;
  } catch (const stinger::MissingCheckpoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const stinger::MissingArchive& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const stinger::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

int cmd_attack(const std::string& config_path, const std::string& question,
               std::string victim_id) {
  if (stinger::trim(question).empty()) {
    std::cerr << "config error: --question must not be empty\n";
    return kExitConfigError;
  }
  stinger::RunConfig config;
  try {
    config = stinger::load_config(config_path);
    if (victim_id.empty()) victim_id = config.train_victim_id;
  } catch (const stinger::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    const std::string ckpt_path =
        (std::filesystem::path(config.paths.checkpoint_dir) /
         "checkpoint.json")
            .string();
    if (!std::filesystem::exists(ckpt_path)) {
      throw stinger::MissingCheckpoint(
          "no checkpoint at " + ckpt_path +
          "; run 'stinger train' before 'stinger attack'");
    }
    const nlohmann::json ckpt =
        nlohmann::json::parse(stinger::read_file(ckpt_path));
    const std::unique_ptr<stinger::Policy> policy =
        stinger::policy_from_snapshot(ckpt.at("policy"));

    auto clock = std::make_unique<stinger::SystemClock>();
    const auto seeds = stinger::load_seeds(config.paths.seeds);
    const std::string archive_path =
        (std::filesystem::path(config.paths.archive_dir) / "archive.jsonl")
            .string();
    std::optional<stinger::SuffixArchive> archive;
    std::vector<stinger::SuffixRecord> ranked;
    if (std::filesystem::exists(archive_path)) {
      archive.emplace(archive_path, clock.get());
      ranked = archive->top_k(
          static_cast<size_t>(config.eval.archive_top_k), victim_id);
    }

    stinger::VictimGateway gateway(config.paths.cache_dir, *clock,
                                   stinger::make_httplib_transport(),
                                   config.seed);
    for (const auto& spec : config.victims) gateway.register_victim(spec);
    stinger::HeuristicJudge heuristic(config.judge.judge_id,
                                      config.judge.rules);
    std::unique_ptr<stinger::JudgeClient> remote;
    stinger::JudgeClient* judge = &heuristic;
    if (config.judge.kind == "remote") {
      remote = std::make_unique<stinger::RemoteJudge>(
          config.judge.judge_id, config.judge.endpoint,
          stinger::make_httplib_transport(), config.judge.max_attempts,
          config.judge.timeout_ms);
      judge = remote.get();
    }

    stinger::Behavior behavior;
    behavior.behavior_id = "adhoc";
    behavior.text = question;
    behavior.category = "adhoc";
    behavior.split = stinger::Split::kTest;

    stinger::EvalProtocolConfig protocol;
    protocol.gen_attempts = config.eval.gen_attempts;
    protocol.archive_top_k = config.eval.archive_top_k;
    protocol.temperature = config.eval.temperature;
    protocol.max_new_tokens = config.ppo.max_new_tokens;
    protocol.seed = config.seed;
    protocol.prompt_template_id = config.prompt_template_id;

    const auto outcomes = stinger::evaluate_outcomes(
        {behavior}, *policy, seeds, ranked, protocol,
        [&](const stinger::Behavior& b, const std::string& suffix) {
          return gateway.query(victim_id, b.text, suffix);
        },
        *judge);

    const auto& outcome = outcomes.at(0);
    for (const auto& attempt : outcome.attempts) {
      std::cout << (attempt.success ? "[success] " : "[failure] ") << "("
                << attempt.source << ") " << attempt.suffix_text << "\n";
      std::cout << "           " << attempt.rationale << "\n";
    }
    std::cout << "outcome: " << stinger::outcome_name(outcome.outcome) << "\n";
    return kExitOk;
  } catch (const stinger::MissingCheckpoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const stinger::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

int cmd_report(const std::string& config_path,
               const std::vector<std::string>& inputs,
               const std::string& format) {
  (void)config_path;
  try {
    std::vector<stinger::CampaignReport> reports;
    for (const auto& path : inputs) {
      reports.push_back(stinger::report_from_json(
          nlohmann::json::parse(stinger::read_file(path))));
    }
    if (format == "markdown") {
      std::cout << stinger::reports_to_markdown(reports);
    } else {
      nlohmann::json docs = nlohmann::json::array();
      for (const auto& r : reports) docs.push_back(stinger::report_to_json(r));
      std::cout << docs.dump(2) << "\n";
    }
    return kExitOk;
  } catch (const stinger::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: invalid report file: " << e.what() << "\n";
    return kExitConfigError;
  }
}

int cmd_purge_cache(const std::string& config_path,
                    const std::string& victim_id) {
  try {
    const stinger::RunConfig config = stinger::load_config(config_path);
    stinger::SystemClock clock;
    stinger::VictimGateway gateway(config.paths.cache_dir, clock,
                                   stinger::make_httplib_transport(), 0);
    for (const auto& spec : config.victims) gateway.register_victim(spec);
    const size_t evicted = gateway.purge_cache(
        victim_id.empty() ? std::nullopt
                          : std::optional<std::string>(victim_id));
    std::cout << "evicted " << evicted << " cache entries\n";
    return kExitOk;
  } catch (const stinger::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const stinger::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial-suffix red-teaming campaigns"};
  app.require_subcommand(1);

  std::string config_path;
  std::string split_arg = "test";
  std::string victim_id;
  std::string question;
  std::string format = "markdown";
  std::vector<std::string> report_inputs;

  auto* train = app.add_subcommand("train", "Run the RL training campaign");
  train->add_option("-c,--config", config_path, "Config file")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate the trained policy");
  eval->add_option("-c,--config", config_path, "Config file")->required();
  eval->add_option("--split", split_arg, "Split to evaluate (train|test)");
  eval->add_option("--victim", victim_id, "Victim id (default: train victim)");

  auto* attack = app.add_subcommand("attack", "One-off attack on a question");
  attack->add_option("-c,--config", config_path, "Config file")->required();
  attack->add_option("--question", question, "Question to attack")->required();
  attack->add_option("--victim", victim_id, "Victim id");

  auto* report = app.add_subcommand("report", "Re-render report files");
  report->add_option("-c,--config", config_path, "Config file");
  report->add_option("--in", report_inputs, "Report JSON file(s)")->required();
  report->add_option("--format", format, "Output format (json|markdown)");

  auto* purge = app.add_subcommand("purge-cache", "Evict cached responses");
  purge->add_option("-c,--config", config_path, "Config file")->required();
  purge->add_option("--victim", victim_id, "Only this victim's entries");

  CLI11_PARSE(app, argc, argv);

  if (train->parsed()) return cmd_train(config_path);
  if (eval->parsed()) return cmd_eval(config_path, split_arg, victim_id);
  if (attack->parsed()) return cmd_attack(config_path, question, victim_id);
  if (report->parsed()) return cmd_report(config_path, report_inputs, format);
  if (purge->parsed()) return cmd_purge_cache(config_path, victim_id);
  return kExitConfigError;
}
