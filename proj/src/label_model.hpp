#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lf.hpp"

namespace chatsent {

inline constexpr int kNumVotes = 4;  // abstain, negative, neutral, positive

inline int vote_index(LfVote v) { return static_cast<int>(v) + 1; }

struct SoftLabel {
  std::array<double, kNumClasses> probs{};

  double operator[](std::size_t c) const { return probs[c]; }
};

// argmax with ties (exact float equality) broken toward Neutral, then Negative.
SentimentLabel hard_label(const SoftLabel& soft);

struct LfConditional {
  std::string lf_name;
  // p[y][v] = P(vote = v | Y = y); rows are distributions over the 4 votes.
  std::array<std::array<double, kNumVotes>, kNumClasses> p{};
};

struct LabelModelParams {
  std::array<double, kNumClasses> class_prior{};
  std::vector<LfConditional> conditionals;
};

enum class TieBreak { Neutral, Negative, Positive };

// Most frequent non-abstain vote; all-abstain rows and ties fall to the
// tie-break label.
SentimentLabel majority_vote(const std::vector<LfVote>& row, TieBreak tie_break = TieBreak::Neutral);

struct EmConfig {
  int max_iters = 100;
  double tol = 1e-6;
  uint64_t seed = 0;      // interface stability; the fit itself is deterministic
  bool smoothing = true;  // additive smoothing on all counts
  double eps = 1e-6;
  // When set, the class prior is held at this distribution instead of being
  // learned.
  std::optional<std::array<double, kNumClasses>> fixed_prior;
};

struct EmTrace {
  std::vector<double> log_likelihood;     // observed-data log-likelihood per iteration
  std::vector<double> penalized_objective;  // EM objective incl. smoothing prior terms
  int iterations = 0;
};

// Conditionally independent generative model P(Y) * prod_j P(vote_j | Y),
// fit by EM from majority-vote hard assignments.
LabelModelParams fit_em(const LabelMatrix& matrix, const EmConfig& config = {},
                        EmTrace* trace = nullptr);

// probs(y) proportional to P(Y=y) * prod_j P(vote_j | Y=y). The row must be
// ordered like params.conditionals.
SoftLabel posterior(const LabelModelParams& params, const std::vector<LfVote>& row);

struct WeakLabel {
  SampleId sample_id;
  SoftLabel soft;
  SentimentLabel hard = SentimentLabel::Neutral;
};

// Posterior for every matrix row; matrix columns are matched to the params
// conditionals by LF name.
std::vector<WeakLabel> weak_label_dataset(const LabelMatrix& matrix, const LabelModelParams& params);

// {"class_prior": [...], "conditionals": {lf_name: 3x4 arrays}}
std::string params_to_json(const LabelModelParams& params);
LabelModelParams params_from_json(const std::string& text, const std::string& origin);
void save_params(const LabelModelParams& params, const std::string& path);
LabelModelParams load_params(const std::string& path);

// JSONL: {"sample_id": ..., "probs": [3], "hard": ...}
std::string weak_labels_to_jsonl(const std::vector<WeakLabel>& labels);
std::vector<WeakLabel> weak_labels_from_jsonl(const std::string& text, const std::string& origin);
void save_weak_labels(const std::vector<WeakLabel>& labels, const std::string& path);
std::vector<WeakLabel> load_weak_labels(const std::string& path);

}  // namespace chatsent
