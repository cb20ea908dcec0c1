#ifndef STINGER_POLICY_HPP_
#define STINGER_POLICY_HPP_

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace stinger {

struct GenerationResult {
  std::vector<int> tokens;
  std::vector<double> logprobs;
};

struct EvaluationResult {
  std::vector<double> logprobs;
  std::vector<double> values;
};

struct CharSpan {
  size_t begin = 0;
  size_t end = 0;  // half-open
};

struct DecodedText {
  std::string text;
  std::vector<CharSpan> spans;  // one per token; spans tile [0, text.size())
};

// Behavioral contract for the trainable suffix generator. Everything the RL
// loop needs from a language model: a tokenizer over a finite vocabulary
// with char-span decodability, sampling, logprob/value evaluation and a
// gradient channel.
//
// Logprobs are always reported under the temperature-1 policy distribution,
// whatever sampling temperature was used, so sample() and evaluate() agree
// whenever the parameters have not moved.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual const std::vector<std::string>& vocabulary() const = 0;

  // Maps text onto vocabulary ids; tokens outside the vocabulary are
  // dropped.
  virtual std::vector<int> encode(const std::string& text) const = 0;

  // Renders tokens to text together with the char span each token owns.
  virtual DecodedText decode(std::span<const int> tokens) const = 0;

  // temperature == 0 means greedy; temperature > 0 samples from
  // softmax(logits / temperature). The RNG is caller-owned so runs replay.
  virtual GenerationResult sample(std::span<const int> prompt_tokens,
                                  int max_new_tokens, double temperature,
                                  std::mt19937_64& rng) = 0;

  virtual EvaluationResult evaluate(std::span<const int> prompt_tokens,
                                    std::span<const int> generated) const = 0;

  // Adds coeff * d(log pi(generated[t]))/d(theta) to the gradient
  // accumulator. The trainer supplies the outer derivative of its loss.
  virtual void accumulate_logprob_grad(std::span<const int> prompt_tokens,
                                       std::span<const int> generated,
                                       size_t t, double coeff) = 0;

  // Adds coeff * d(V_t)/d(theta).
  virtual void accumulate_value_grad(std::span<const int> prompt_tokens,
                                     std::span<const int> generated, size_t t,
                                     double coeff) = 0;

  // One gradient-descent step over the accumulated gradient; clears it.
  virtual void apply_update(double learning_rate) = 0;

  virtual nlohmann::json snapshot() const = 0;
  virtual void restore(const nlohmann::json& state) = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;
};

// Desk-scale reference policy: order-1 autoregressive categorical logits
// conditioned on (position, previous token), plus a tabular value head over
// the same features. Small enough for exact finite-difference checks.
class TinyPolicy final : public Policy {
 public:
  TinyPolicy(std::vector<std::string> vocabulary, int max_positions);

  // Gaussian logit init; the value head starts at zero.
  void randomize(std::mt19937_64& rng, double stddev = 0.1);

  const std::vector<std::string>& vocabulary() const override {
    return vocab_;
  }
  std::vector<int> encode(const std::string& text) const override;
  DecodedText decode(std::span<const int> tokens) const override;
  GenerationResult sample(std::span<const int> prompt_tokens,
                          int max_new_tokens, double temperature,
                          std::mt19937_64& rng) override;
  EvaluationResult evaluate(std::span<const int> prompt_tokens,
                            std::span<const int> generated) const override;
  void accumulate_logprob_grad(std::span<const int> prompt_tokens,
                               std::span<const int> generated, size_t t,
                               double coeff) override;
  void accumulate_value_grad(std::span<const int> prompt_tokens,
                             std::span<const int> generated, size_t t,
                             double coeff) override;
  void apply_update(double learning_rate) override;
  nlohmann::json snapshot() const override;
  void restore(const nlohmann::json& state) override;
  std::unique_ptr<Policy> clone() const override;

  // Raw parameter access for gradient checks.
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<double>& gradient() const { return grad_; }

  int max_positions() const { return max_positions_; }

  // Temperature-1 token distribution at (position, previous token); rows
  // sum to 1.
  std::vector<double> token_distribution(int position, int prev) const;

 private:
  int bos() const { return static_cast<int>(vocab_.size()); }
  int clamp_pos(size_t t) const;
  size_t logit_offset(int pos, int prev) const;
  size_t value_offset(int pos, int prev) const;
  int prev_token(std::span<const int> generated, size_t t) const;
  std::vector<double> log_softmax_row(int pos, int prev) const;

  std::vector<std::string> vocab_;
  int max_positions_;
  std::vector<double> params_;  // logits block then value block
  std::vector<double> grad_;
};

// Restores any snapshot produced by Policy::snapshot().
std::unique_ptr<Policy> policy_from_snapshot(const nlohmann::json& state);

}  // namespace stinger

#endif  // STINGER_POLICY_HPP_
