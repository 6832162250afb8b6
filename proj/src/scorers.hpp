#pragma once

#include "corpus.hpp"
#include "lexicon.hpp"

namespace chatsent {

struct ScoreThresholds {
  double pos_above = 0.1;
  double neg_below = -0.1;
  bool on_raw = false;  // threshold the raw score instead of the normalized one
};

struct SentimentScore {
  double raw = 0.0;
  double normalized = 0.0;  // in [-1, +1]
};

// Sum of valences over greedy longest-first phrase matches; each token is
// consumed at most once. normalized = raw / (5 * matches), clamped.
SentimentScore afinn_score(const TokenSequence& tokens, const ValenceLexicon& lex);

// Rule-based scorer over single-token lexicon hits, adjusted by five rules:
//   1. booster increments within the 2 preceding tokens (sign-following),
//   2. a negator within the 3 preceding tokens flips and damps by -0.74,
//   3. all-caps emphasis adds 0.733 when casing is mixed across the sentence,
//   4. "but" reweights valences (0.5 before / 1.5 after),
//   5. up to 3 trailing '!' add 0.292 each to the summed magnitude.
// normalized is the compound score s / sqrt(s^2 + 15).
SentimentScore vader_score(const TokenSequence& tokens, const RuleLexicon& lex);

// Mean polarity of matched entries. An intensifier entry immediately before a
// match multiplies its polarity by the intensifier's intensity; "not", "never"
// or "no" within the 2 preceding tokens multiplies it by -0.5.
SentimentScore pattern_polarity(const TokenSequence& tokens, const PolarityLexicon& lex);

// Strict inequalities; scores on the threshold fall to Neutral.
SentimentLabel map_score(const SentimentScore& score, const ScoreThresholds& thresholds);

}  // namespace chatsent
