#include "stinger/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "stinger/errors.hpp"
#include "stinger/tokenize.hpp"

namespace stinger {

using nlohmann::json;

TinyPolicy::TinyPolicy(std::vector<std::string> vocabulary, int max_positions)
    : vocab_(std::move(vocabulary)), max_positions_(max_positions) {
  if (vocab_.empty()) throw ConfigError("policy vocabulary must not be empty");
  if (max_positions_ <= 0) {
    throw ConfigError("policy max_positions must be positive");
  }
  for (const auto& tok : vocab_) {
    if (tok.empty() || tokenize(tok).size() == 0) {
      throw ConfigError("policy vocabulary entries must be non-empty");
    }
    for (unsigned char c : tok) {
      if (std::isspace(c)) {
        throw ConfigError("policy vocabulary entry contains whitespace: '" +
                          tok + "'");
      }
    }
  }
  const size_t v = vocab_.size();
  const size_t total = static_cast<size_t>(max_positions_) * (v + 1) * v +
                       static_cast<size_t>(max_positions_) * (v + 1);
  params_.assign(total, 0.0);
  grad_.assign(total, 0.0);
}

void TinyPolicy::randomize(std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  const size_t v = vocab_.size();
  const size_t logits = static_cast<size_t>(max_positions_) * (v + 1) * v;
  for (size_t i = 0; i < logits; ++i) params_[i] = dist(rng);
  for (size_t i = logits; i < params_.size(); ++i) params_[i] = 0.0;
}

int TinyPolicy::clamp_pos(size_t t) const {
  // Generation past the parameterized horizon reuses the last row.
  return static_cast<int>(
      std::min<size_t>(t, static_cast<size_t>(max_positions_) - 1));
}

size_t TinyPolicy::logit_offset(int pos, int prev) const {
  const size_t v = vocab_.size();
  return (static_cast<size_t>(pos) * (v + 1) + static_cast<size_t>(prev)) * v;
}

size_t TinyPolicy::value_offset(int pos, int prev) const {
  const size_t v = vocab_.size();
  return static_cast<size_t>(max_positions_) * (v + 1) * v +
         static_cast<size_t>(pos) * (v + 1) + static_cast<size_t>(prev);
}

int TinyPolicy::prev_token(std::span<const int> generated, size_t t) const {
  if (t == 0) return bos();
  const int prev = generated[t - 1];
  if (prev < 0 || prev >= static_cast<int>(vocab_.size())) {
    throw ConfigError("token id out of vocabulary range: " +
                      std::to_string(prev));
  }
  return prev;
}

std::vector<double> TinyPolicy::log_softmax_row(int pos, int prev) const {
  const size_t v = vocab_.size();
  const size_t off = logit_offset(pos, prev);
  double max_logit = params_[off];
  for (size_t k = 1; k < v; ++k) max_logit = std::max(max_logit, params_[off + k]);
  double sum = 0.0;
  for (size_t k = 0; k < v; ++k) sum += std::exp(params_[off + k] - max_logit);
  const double lse = max_logit + std::log(sum);
  std::vector<double> out(v);
  for (size_t k = 0; k < v; ++k) out[k] = params_[off + k] - lse;
  return out;
}

std::vector<double> TinyPolicy::token_distribution(int position,
                                                   int prev) const {
  const auto logp = log_softmax_row(position, prev);
  std::vector<double> probs(logp.size());
  for (size_t k = 0; k < logp.size(); ++k) probs[k] = std::exp(logp[k]);
  return probs;
}

std::vector<int> TinyPolicy::encode(const std::string& text) const {
  std::map<std::string, int> index;
  for (size_t i = 0; i < vocab_.size(); ++i) {
    index[vocab_[i]] = static_cast<int>(i);
  }
  std::vector<int> ids;
  for (const auto& tok : tokenize(text)) {
    auto it = index.find(tok);
    if (it != index.end()) ids.push_back(it->second);
  }
  return ids;
}

DecodedText TinyPolicy::decode(std::span<const int> tokens) const {
  DecodedText out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const int id = tokens[i];
    if (id < 0 || id >= static_cast<int>(vocab_.size())) {
      throw ConfigError("token id out of vocabulary range: " +
                        std::to_string(id));
    }
    CharSpan span;
    span.begin = out.text.size();
    if (i > 0) out.text.push_back(' ');  // separator belongs to this token
    out.text += vocab_[id];
    span.end = out.text.size();
    out.spans.push_back(span);
  }
  return out;
}

GenerationResult TinyPolicy::sample(std::span<const int> prompt_tokens,
                                    int max_new_tokens, double temperature,
                                    std::mt19937_64& rng) {
  (void)prompt_tokens;  // the tabular policy conditions on position/prev only
  if (max_new_tokens <= 0) {
    throw ConfigError("max_new_tokens must be positive");
  }
  GenerationResult out;
  out.tokens.reserve(max_new_tokens);
  out.logprobs.reserve(max_new_tokens);
  const size_t v = vocab_.size();

  for (int t = 0; t < max_new_tokens; ++t) {
    const int pos = clamp_pos(static_cast<size_t>(t));
    const int prev = prev_token(out.tokens, static_cast<size_t>(t));
    const auto logp = log_softmax_row(pos, prev);

    int choice = 0;
    if (temperature <= 0.0) {
      for (size_t k = 1; k < v; ++k) {
        if (logp[k] > logp[choice]) choice = static_cast<int>(k);
      }
    } else {
      // Inverse-CDF draw over softmax(logits / temperature); one uniform per
      // token keeps the RNG stream stable across library versions.
      std::vector<double> scaled(v);
      double max_s = -1e300;
      for (size_t k = 0; k < v; ++k) {
        scaled[k] = logp[k] / temperature;
        max_s = std::max(max_s, scaled[k]);
      }
      double total = 0.0;
      for (size_t k = 0; k < v; ++k) {
        scaled[k] = std::exp(scaled[k] - max_s);
        total += scaled[k];
      }
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      const double u = uniform(rng) * total;
      double acc = 0.0;
      choice = static_cast<int>(v) - 1;
      for (size_t k = 0; k < v; ++k) {
        acc += scaled[k];
        if (u < acc) {
          choice = static_cast<int>(k);
          break;
        }
      }
    }
    out.tokens.push_back(choice);
    out.logprobs.push_back(logp[static_cast<size_t>(choice)]);
  }
  return out;
}

EvaluationResult TinyPolicy::evaluate(std::span<const int> prompt_tokens,
                                      std::span<const int> generated) const {
  (void)prompt_tokens;
  EvaluationResult out;
  out.logprobs.reserve(generated.size());
  out.values.reserve(generated.size());
  for (size_t t = 0; t < generated.size(); ++t) {
    const int pos = clamp_pos(t);
    const int prev = prev_token(generated, t);
    const int tok = generated[t];
    if (tok < 0 || tok >= static_cast<int>(vocab_.size())) {
      throw ConfigError("token id out of vocabulary range: " +
                        std::to_string(tok));
    }
    const auto logp = log_softmax_row(pos, prev);
    out.logprobs.push_back(logp[static_cast<size_t>(tok)]);
    out.values.push_back(params_[value_offset(pos, prev)]);
  }
  return out;
}

void TinyPolicy::accumulate_logprob_grad(std::span<const int> prompt_tokens,
                                         std::span<const int> generated,
                                         size_t t, double coeff) {
  (void)prompt_tokens;
  const int pos = clamp_pos(t);
  const int prev = prev_token(generated, t);
  const int chosen = generated[t];
  const auto probs = token_distribution(pos, prev);
  const size_t off = logit_offset(pos, prev);
  for (size_t k = 0; k < probs.size(); ++k) {
    const double indicator = static_cast<int>(k) == chosen ? 1.0 : 0.0;
    grad_[off + k] += coeff * (indicator - probs[k]);
  }
}

void TinyPolicy::accumulate_value_grad(std::span<const int> prompt_tokens,
                                       std::span<const int> generated,
                                       size_t t, double coeff) {
  (void)prompt_tokens;
  const int pos = clamp_pos(t);
  const int prev = prev_token(generated, t);
  grad_[value_offset(pos, prev)] += coeff;
}

void TinyPolicy::apply_update(double learning_rate) {
  for (size_t i = 0; i < params_.size(); ++i) {
    params_[i] -= learning_rate * grad_[i];
    grad_[i] = 0.0;
  }
}

json TinyPolicy::snapshot() const {
  return json{
      {"type", "tiny"},
      {"vocabulary", vocab_},
      {"max_positions", max_positions_},
      {"params", params_},
  };
}

void TinyPolicy::restore(const json& state) {
  if (state.at("type").get<std::string>() != "tiny") {
    throw ConfigError("snapshot is not a tiny policy");
  }
  const auto vocab = state.at("vocabulary").get<std::vector<std::string>>();
  const int positions = state.at("max_positions").get<int>();
  if (vocab != vocab_ || positions != max_positions_) {
    throw ConfigError("snapshot shape does not match this policy");
  }
  const auto params = state.at("params").get<std::vector<double>>();
  if (params.size() != params_.size()) {
    throw ConfigError("snapshot parameter count mismatch");
  }
  params_ = params;
  std::fill(grad_.begin(), grad_.end(), 0.0);
}

std::unique_ptr<Policy> TinyPolicy::clone() const {
  auto copy = std::make_unique<TinyPolicy>(vocab_, max_positions_);
  copy->params_ = params_;
  return copy;
}

std::unique_ptr<Policy> policy_from_snapshot(const json& state) {
  const std::string type = state.at("type").get<std::string>();
  if (type == "tiny") {
    auto policy = std::make_unique<TinyPolicy>(
        state.at("vocabulary").get<std::vector<std::string>>(),
        state.at("max_positions").get<int>());
    policy->restore(state);
    return policy;
  }
  throw ConfigError("unknown policy snapshot type: " + type);
}

}  // namespace stinger
