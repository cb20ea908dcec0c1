#ifndef STINGER_SIMILARITY_HPP_
#define STINGER_SIMILARITY_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "stinger/tokenize.hpp"

namespace stinger {

struct SuffixRecord;  // suffix_corpus.hpp

// Scalar similarity plus the per-token alignment against the best reference.
// score = 2*|LCS(g, r*)| / (|g| + |r*|) for the winning reference r*;
// matched_mask[i] is true iff g[i] participates in the canonical LCS
// backtrace of the winner.
struct SimilarityResult {
  std::string best_ref_id;
  double score = 0.0;
  std::vector<bool> matched_mask;

  size_t match_count() const {
    size_t n = 0;
    for (bool b : matched_mask) n += b ? 1 : 0;
    return n;
  }
};

// Per-generated-token rewards. terminal_bonus is what the reward composer
// added at the last position (zero until composition).
struct RewardVector {
  std::vector<double> values;
  double terminal_bonus = 0.0;

  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

struct SimilarityParams {
  double alpha = 0.1;  // reward per aligned token
  double beta = 0.05;  // penalty per unaligned token
  double theta = 0.3;  // prune candidates scoring below this
};

// Longest common subsequence length, O(|a|*|b|) dynamic programming.
size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// Highest-scoring reference; ties go to the lower reference index. The mask
// comes from one canonical backtrace of the winner (diagonal match
// preferred, then up, then left), so equal inputs always yield equal masks.
SimilarityResult best_similarity(const TokenSeq& generated,
                                 const std::vector<SuffixRecord>& refs);

// +alpha for aligned tokens, -beta for the rest. terminal_bonus stays 0;
// success bonuses are the reward composer's job.
RewardVector similarity_reward(const TokenSeq& generated,
                               const std::vector<SuffixRecord>& refs,
                               double alpha, double beta);

bool should_prune(const TokenSeq& generated,
                  const std::vector<SuffixRecord>& refs, double theta);

}  // namespace stinger

#endif  // STINGER_SIMILARITY_HPP_
