#include "stinger/similarity.hpp"

#include <random>

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "stinger/errors.hpp"
#include "stinger/tokenize.hpp"

using namespace stinger;

TEST_SUITE("tokenize") {
  TEST_CASE("splits punctuation into single-character tokens") {
    const TokenSeq expected = {"describing", ".", "\\", "+", "similarly"};
    CHECK(tokenize("describing.\\ + similarly") == expected);
  }

  TEST_CASE("empty input yields empty sequence") {
    CHECK(tokenize("").empty());
  }

  TEST_CASE("lowercases and collapses whitespace") {
    CHECK(tokenize("A  a") == TokenSeq{"a", "a"});
  }

  TEST_CASE("total and deterministic on arbitrary bytes") {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> byte_dist(1, 255);
    for (int round = 0; round < 200; ++round) {
      std::string text;
      for (int i = 0; i < 40; ++i) {
        text.push_back(static_cast<char>(byte_dist(rng)));
      }
      const TokenSeq first = tokenize(text);
      CHECK(tokenize(text) == first);
    }
  }

  TEST_CASE("spans point at each token's first character") {
    const auto spanned = tokenize_with_spans("Hi, there");
    REQUIRE(spanned.size() == 3);
    CHECK(spanned[0].text == "hi");
    CHECK(spanned[0].begin == 0);
    CHECK(spanned[1].text == ",");
    CHECK(spanned[1].begin == 2);
    CHECK(spanned[2].text == "there");
    CHECK(spanned[2].begin == 4);
  }
}

TEST_SUITE("lcs_length") {
  TEST_CASE("identical sequences") {
    const TokenSeq a = {"a", "b", "c", "d"};
    CHECK(lcs_length(a, a) == 4);
  }

  TEST_CASE("disjoint vocabularies") {
    CHECK(lcs_length({"a", "b"}, {"x", "y", "z"}) == 0);
  }

  TEST_CASE("partial overlap") {
    // Frozen from the enumeration oracle.
    const TokenSeq a = {"a", "b", "c", "d"};
    const TokenSeq b = {"a", "x", "c"};
    CHECK(oracle::lcs_brute_force(a, b) == 2);
    CHECK(lcs_length(a, b) == 2);
  }

  TEST_CASE("matches exhaustive enumeration on random pairs") {
    std::mt19937_64 rng(1234);
    for (int round = 0; round < 300; ++round) {
      const TokenSeq a = oracle::random_token_seq(rng);
      const TokenSeq b = oracle::random_token_seq(rng);
      CHECK(lcs_length(a, b) == oracle::lcs_brute_force(a, b));
    }
  }

  TEST_CASE("symmetry, identity and bounds") {
    std::mt19937_64 rng(777);
    for (int round = 0; round < 200; ++round) {
      const TokenSeq a = oracle::random_token_seq(rng);
      const TokenSeq b = oracle::random_token_seq(rng);
      const size_t ab = lcs_length(a, b);
      CHECK(ab == lcs_length(b, a));
      CHECK(ab <= std::min(a.size(), b.size()));
      CHECK(lcs_length(a, a) == a.size());
    }
  }
}

TEST_SUITE("best_similarity") {
  TEST_CASE("exact match scores 1 with all-true mask") {
    const auto ref = oracle::make_ref("r1", "a b c");
    const auto result = best_similarity(tokenize("a b c"), {ref});
    CHECK(result.score == doctest::Approx(1.0));
    CHECK(result.best_ref_id == "r1");
    for (bool m : result.matched_mask) CHECK(m);
  }

  TEST_CASE("disjoint scores 0 with all-false mask") {
    const auto ref = oracle::make_ref("r1", "x y z");
    const auto result = best_similarity(tokenize("a b"), {ref});
    CHECK(result.score == 0.0);
    for (bool m : result.matched_mask) CHECK_FALSE(m);
  }

  TEST_CASE("partial overlap score and mask") {
    const auto ref = oracle::make_ref("r1", "a x c");
    const auto result = best_similarity(tokenize("a b c d"), {ref});
    CHECK(result.score == doctest::Approx(2.0 * 2 / 7).epsilon(1e-12));
    REQUIRE(result.matched_mask.size() == 4);
    CHECK(result.matched_mask[0]);
    CHECK_FALSE(result.matched_mask[1]);
    CHECK(result.matched_mask[2]);
    CHECK_FALSE(result.matched_mask[3]);
  }

  TEST_CASE("ties go to the lower reference index") {
    const auto r1 = oracle::make_ref("first", "a b");
    const auto r2 = oracle::make_ref("second", "a b");
    const auto result = best_similarity(tokenize("a b"), {r1, r2});
    CHECK(result.best_ref_id == "first");
  }

  TEST_CASE("errors on empty inputs") {
    const auto ref = oracle::make_ref("r1", "a");
    CHECK_THROWS_AS(best_similarity(tokenize("a"), {}), NoReferences);
    CHECK_THROWS_AS(best_similarity({}, {ref}), EmptyCandidate);
  }

  TEST_CASE("score is 1 exactly when the winner equals the candidate") {
    std::mt19937_64 rng(4321);
    for (int round = 0; round < 200; ++round) {
      TokenSeq g = oracle::random_token_seq(rng);
      if (g.empty()) g.push_back("a");
      const auto ref = oracle::make_ref(
          "r", oracle::join_tokens(oracle::random_token_seq(rng)));
      if (ref.tokens.empty()) continue;
      const auto result = best_similarity(g, {ref});
      CHECK((result.score == 1.0) == (g == ref.tokens));
    }
  }

  TEST_CASE("mask count equals the LCS length") {
    std::mt19937_64 rng(555);
    for (int round = 0; round < 200; ++round) {
      TokenSeq g = oracle::random_token_seq(rng);
      if (g.empty()) g.push_back("b");
      TokenSeq r = oracle::random_token_seq(rng);
      if (r.empty()) r.push_back("c");
      const auto ref = oracle::make_ref("r", oracle::join_tokens(r));
      const auto result = best_similarity(g, {ref});
      CHECK(result.match_count() == lcs_length(g, ref.tokens));
    }
  }

  TEST_CASE("appending a token grows the alignment by at most one") {
    std::mt19937_64 rng(31337);
    static const char* kTokens[] = {"a", "b", "c", "d", "e"};
    for (int round = 0; round < 200; ++round) {
      TokenSeq g = oracle::random_token_seq(rng);
      if (g.empty()) g.push_back("a");
      TokenSeq r = oracle::random_token_seq(rng);
      if (r.empty()) r.push_back("a");
      const size_t before = lcs_length(g, r);
      g.push_back(kTokens[rng() % 5]);
      const size_t after = lcs_length(g, r);
      CHECK(after >= before);
      CHECK(after <= before + 1);
    }
  }
}

TEST_SUITE("similarity_reward") {
  TEST_CASE("alpha for matches, minus beta elsewhere") {
    const auto ref = oracle::make_ref("r1", "a x c");
    const auto reward =
        similarity_reward(tokenize("a b c d"), {ref}, 0.1, 0.05);
    const std::vector<double> expected = {0.1, -0.05, 0.1, -0.05};
    REQUIRE(reward.values.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
      CHECK(reward.values[i] == doctest::Approx(expected[i]));
    }
    CHECK(reward.terminal_bonus == 0.0);
  }

  TEST_CASE("fully matched sequence never sees the penalty") {
    const auto ref = oracle::make_ref("r1", "a b c");
    const auto reward = similarity_reward(tokenize("a b c"), {ref}, 1.0, 7.0);
    for (double v : reward.values) CHECK(v == doctest::Approx(1.0));
  }

  TEST_CASE("beta zero disables the penalty") {
    const auto ref = oracle::make_ref("r1", "x y");
    const auto reward = similarity_reward(tokenize("a b"), {ref}, 1.0, 0.0);
    for (double v : reward.values) CHECK(v == 0.0);
  }

  TEST_CASE("reward sum is alpha*LCS - beta*(len-LCS)") {
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 200; ++round) {
      TokenSeq g = oracle::random_token_seq(rng);
      if (g.empty()) g.push_back("d");
      TokenSeq r = oracle::random_token_seq(rng);
      if (r.empty()) r.push_back("e");
      const auto ref = oracle::make_ref("r", oracle::join_tokens(r));
      const double alpha = 0.1;
      const double beta = 0.05;
      const auto reward = similarity_reward(g, {ref}, alpha, beta);
      REQUIRE(reward.values.size() == g.size());
      const double lcs = static_cast<double>(lcs_length(g, ref.tokens));
      const double expected =
          alpha * lcs - beta * (static_cast<double>(g.size()) - lcs);
      CHECK(reward.sum() == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_SUITE("should_prune") {
  TEST_CASE("theta zero never prunes") {
    const auto ref = oracle::make_ref("r1", "x y z");
    CHECK_FALSE(should_prune(tokenize("a b"), {ref}, 0.0));
  }

  TEST_CASE("theta one prunes anything short of an exact match") {
    const auto ref = oracle::make_ref("r1", "a b c");
    CHECK(should_prune(tokenize("a b"), {ref}, 1.0));
    CHECK_FALSE(should_prune(tokenize("a b c"), {ref}, 1.0));
  }

  TEST_CASE("score just below theta prunes") {
    const auto ref = oracle::make_ref("r1", "a x c");
    // score = 4/7 ~ 0.5714
    CHECK(should_prune(tokenize("a b c d"), {ref}, 0.6));
    CHECK_FALSE(should_prune(tokenize("a b c d"), {ref}, 0.5));
  }
}
