#include "stinger/policy.hpp"

#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "oracle_helpers.hpp"
#include "stinger/errors.hpp"

using namespace stinger;

namespace {

std::vector<std::string> small_vocab() {
  return {"red", "green", "blue", "cyan", "magenta", "yellow", "black",
          "white"};
}

TinyPolicy randomized_policy(uint64_t seed = 11, int positions = 6) {
  TinyPolicy policy(small_vocab(), positions);
  std::mt19937_64 rng(seed);
  policy.randomize(rng, 0.5);
  return policy;
}

}  // namespace

TEST_SUITE("tiny_policy") {
  TEST_CASE("token distributions are normalized at every state") {
    const TinyPolicy policy = randomized_policy();
    const int vocab = static_cast<int>(policy.vocabulary().size());
    for (int pos = 0; pos < policy.max_positions(); ++pos) {
      for (int prev = 0; prev <= vocab; ++prev) {
        const auto probs = policy.token_distribution(pos, prev);
        double sum = 0.0;
        for (double p : probs) {
          CHECK(p >= 0.0);
          sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("sample and evaluate agree on logprobs for fixed parameters") {
    TinyPolicy policy = randomized_policy();
    std::mt19937_64 rng(3);
    for (double temperature : {1.0, 0.7, 0.0}) {
      const auto gen = policy.sample({}, 6, temperature, rng);
      const auto eval = policy.evaluate({}, gen.tokens);
      REQUIRE(eval.logprobs.size() == gen.logprobs.size());
      for (size_t t = 0; t < gen.logprobs.size(); ++t) {
        CHECK(std::abs(eval.logprobs[t] - gen.logprobs[t]) < 1e-6);
      }
      for (double v : eval.values) CHECK(std::isfinite(v));
    }
  }

  TEST_CASE("sampling replays bit-for-bit from the same rng state") {
    TinyPolicy policy = randomized_policy();
    std::mt19937_64 rng_a(42);
    std::mt19937_64 rng_b(42);
    const auto a = policy.sample({}, 8, 1.0, rng_a);
    const auto b = policy.sample({}, 8, 1.0, rng_b);
    CHECK(a.tokens == b.tokens);
    CHECK(a.logprobs == b.logprobs);
  }

  TEST_CASE("temperature zero is greedy and ignores the rng") {
    TinyPolicy policy = randomized_policy();
    std::mt19937_64 rng_a(1);
    std::mt19937_64 rng_b(999);
    CHECK(policy.sample({}, 6, 0.0, rng_a).tokens ==
          policy.sample({}, 6, 0.0, rng_b).tokens);
  }

  TEST_CASE("decode emits text whose spans tile it exactly") {
    const TinyPolicy policy(small_vocab(), 4);
    const auto decoded = policy.decode(std::vector<int>{0, 2, 5});
    CHECK(decoded.text == "red blue yellow");
    REQUIRE(decoded.spans.size() == 3);
    CHECK(decoded.spans[0].begin == 0);
    size_t expected_begin = 0;
    for (const auto& span : decoded.spans) {
      CHECK(span.begin == expected_begin);
      expected_begin = span.end;
    }
    CHECK(expected_begin == decoded.text.size());
  }

  TEST_CASE("encode maps known words and drops everything else") {
    const TinyPolicy policy(small_vocab(), 4);
    CHECK(policy.encode("RED unknown blue!") == std::vector<int>{0, 2});
    CHECK(policy.encode("").empty());
  }

  TEST_CASE("snapshot restores the exact parameter vector") {
    TinyPolicy policy = randomized_policy(77);
    const nlohmann::json snap = policy.snapshot();

    TinyPolicy other(small_vocab(), policy.max_positions());
    other.restore(snap);
    CHECK(other.parameters() == policy.parameters());

    const auto cloned = policy_from_snapshot(snap);
    std::mt19937_64 rng_a(5);
    std::mt19937_64 rng_b(5);
    CHECK(cloned->sample({}, 6, 1.0, rng_a).tokens ==
          policy.sample({}, 6, 1.0, rng_b).tokens);
  }

  TEST_CASE("restore rejects mismatched shapes") {
    TinyPolicy policy = randomized_policy();
    TinyPolicy bigger(small_vocab(), policy.max_positions() + 1);
    CHECK_THROWS_AS(bigger.restore(policy.snapshot()), ConfigError);
  }

  TEST_CASE("clone is an independent copy") {
    TinyPolicy policy = randomized_policy();
    const auto clone = policy.clone();
    policy.accumulate_value_grad({}, std::vector<int>{0, 1}, 0, 1.0);
    policy.apply_update(0.5);
    std::mt19937_64 rng_a(9);
    std::mt19937_64 rng_b(9);
    const auto from_clone = clone->sample({}, 4, 1.0, rng_a);
    const auto from_policy = policy.sample({}, 4, 1.0, rng_b);
    // The value update must not have leaked into the clone.
    const auto eval_clone = clone->evaluate({}, from_clone.tokens);
    const auto eval_policy = policy.evaluate({}, from_clone.tokens);
    CHECK(eval_clone.values[0] != eval_policy.values[0]);
    (void)from_policy;
  }

  TEST_CASE("zero gradient means apply_update is a fixed point") {
    TinyPolicy policy = randomized_policy();
    const auto before = policy.parameters();
    policy.apply_update(0.5);
    CHECK(policy.parameters() == before);
  }

  TEST_CASE("logprob gradient matches finite differences") {
    TinyPolicy policy = randomized_policy(123, 3);
    const std::vector<int> generated = {1, 4, 2};
    const size_t t = 1;

    policy.accumulate_logprob_grad({}, generated, t, 1.0);
    const auto grad = policy.gradient();

    const double h = 1e-6;
    auto& params = policy.parameters();
    double max_err = 0.0;
    for (size_t i = 0; i < params.size(); ++i) {
      if (grad[i] == 0.0) continue;  // untouched rows stay untouched
      const double saved = params[i];
      params[i] = saved + h;
      const double up = policy.evaluate({}, generated).logprobs[t];
      params[i] = saved - h;
      const double down = policy.evaluate({}, generated).logprobs[t];
      params[i] = saved;
      const double fd = (up - down) / (2 * h);
      max_err = std::max(max_err, std::abs(fd - grad[i]));
    }
    CHECK(max_err < 1e-6);
  }

  TEST_CASE("vocabulary entries must be non-empty and spaceless") {
    CHECK_THROWS_AS(TinyPolicy({"ok", "has space"}, 4), ConfigError);
    CHECK_THROWS_AS(TinyPolicy({""}, 4), ConfigError);
    CHECK_THROWS_AS(TinyPolicy({}, 4), ConfigError);
  }
}
