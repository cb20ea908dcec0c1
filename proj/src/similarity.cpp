#include "stinger/similarity.hpp"

#include <algorithm>

#include "stinger/errors.hpp"
#include "stinger/suffix_corpus.hpp"

namespace stinger {

namespace {

// Full DP table; row-major (|a|+1) x (|b|+1).
std::vector<size_t> lcs_table(const TokenSeq& a, const TokenSeq& b) {
  const size_t n = a.size();
  const size_t m = b.size();
  std::vector<size_t> dp((n + 1) * (m + 1), 0);
  auto at = [&](size_t i, size_t j) -> size_t& { return dp[i * (m + 1) + j]; };
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      if (a[i - 1] == b[j - 1]) {
        at(i, j) = at(i - 1, j - 1) + 1;
      } else {
        at(i, j) = std::max(at(i - 1, j), at(i, j - 1));
      }
    }
  }
  return dp;
}

double normalized_score(size_t lcs, size_t glen, size_t rlen) {
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(glen + rlen);
}

}  // namespace

size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  const auto dp = lcs_table(a, b);
  return dp[a.size() * (b.size() + 1) + b.size()];
}

SimilarityResult best_similarity(const TokenSeq& generated,
                                 const std::vector<SuffixRecord>& refs) {
  if (refs.empty()) throw NoReferences();
  if (generated.empty()) throw EmptyCandidate();

  size_t best_index = 0;
  double best_score = -1.0;
  for (size_t i = 0; i < refs.size(); ++i) {
    const size_t lcs = lcs_length(generated, refs[i].tokens);
    const double score =
        normalized_score(lcs, generated.size(), refs[i].tokens.size());
    if (score > best_score) {  // strict: ties keep the lower index
      best_score = score;
      best_index = i;
    }
  }

  SimilarityResult result;
  result.best_ref_id = refs[best_index].suffix_id;
  result.score = best_score;
  result.matched_mask.assign(generated.size(), false);

  // Canonical backtrace of the winner: diagonal on a token match, otherwise
  // up when dp[i-1][j] >= dp[i][j-1], else left.
  const TokenSeq& ref = refs[best_index].tokens;
  const auto dp = lcs_table(generated, ref);
  const size_t m = ref.size();
  auto at = [&](size_t i, size_t j) { return dp[i * (m + 1) + j]; };
  size_t i = generated.size();
  size_t j = m;
  while (i > 0 && j > 0) {
    if (generated[i - 1] == ref[j - 1]) {
      result.matched_mask[i - 1] = true;
      --i;
      --j;
    } else if (at(i - 1, j) >= at(i, j - 1)) {
      --i;
    } else {
      --j;
    }
  }
  return result;
}

RewardVector similarity_reward(const TokenSeq& generated,
                               const std::vector<SuffixRecord>& refs,
                               double alpha, double beta) {
  const SimilarityResult sim = best_similarity(generated, refs);
  RewardVector reward;
  reward.values.reserve(generated.size());
  for (bool matched : sim.matched_mask) {
    reward.values.push_back(matched ? alpha : -beta);
  }
  reward.terminal_bonus = 0.0;
  return reward;
}

bool should_prune(const TokenSeq& generated,
                  const std::vector<SuffixRecord>& refs, double theta) {
  return best_similarity(generated, refs).score < theta;
}

}  // namespace stinger
