#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corpus.hpp"
#include "lexicon.hpp"
#include "scorers.hpp"

namespace chatsent {

enum class LfVote : int { Abstain = -1, Negative = 0, Neutral = 1, Positive = 2 };

inline LfVote vote_from_label(SentimentLabel label) {
  return static_cast<LfVote>(static_cast<int>(label));
}

inline SentimentLabel label_from_vote(LfVote vote) {
  return static_cast<SentimentLabel>(static_cast<int>(vote));  // vote must not be Abstain
}

enum class ScorerKind { Pattern, Afinn, Vader };

struct ScorerLfConfig {
  ScorerKind scorer = ScorerKind::Pattern;
  ScoreThresholds thresholds;
};

struct DomainTermLfConfig {
  SentimentLabel label = SentimentLabel::Negative;  // emitted on any term match
};

struct LabelingFunction {
  std::string name;
  std::variant<ScorerLfConfig, DomainTermLfConfig> config;

  bool is_scorer() const { return std::holds_alternative<ScorerLfConfig>(config); }
};

// Per-scorer thresholds for the standard LF set. The term-sum scorer is
// thresholded on its raw sum at 0, the other two on normalized scores at 0.1.
struct ThresholdSet {
  ScoreThresholds pattern{0.1, -0.1, false};
  ScoreThresholds afinn{0.0, 0.0, true};
  ScoreThresholds vader{0.1, -0.1, false};
};

// The standard five-column set: pattern, afinn, vader, domain_neg, domain_pos.
std::vector<LabelingFunction> standard_lfs(const ThresholdSet& thresholds = {});

// Scorer LFs always vote; domain-term LFs emit their fixed label on a
// token-boundary phrase match and abstain otherwise.
LfVote apply_lf(const LabelingFunction& lf, const Lexicons& lexicons, const Utterance& utterance);

struct LabelMatrix {
  std::vector<SampleId> sample_ids;
  std::vector<std::string> lf_names;
  std::vector<int8_t> votes;  // row-major, values in {-1, 0, 1, 2}

  std::size_t rows() const { return sample_ids.size(); }
  std::size_t cols() const { return lf_names.size(); }
  LfVote at(std::size_t row, std::size_t col) const {
    return static_cast<LfVote>(votes[row * lf_names.size() + col]);
  }
  std::vector<LfVote> row(std::size_t r) const;
};

LabelMatrix build_label_matrix(const std::vector<LabelingFunction>& lfs, const Lexicons& lexicons,
                               const std::vector<Utterance>& utterances);

// CSV with header "sample_id,<lf names...>" and cells in {-1,0,1,2}.
std::string matrix_to_csv(const LabelMatrix& matrix);
void save_matrix_csv(const LabelMatrix& matrix, const std::string& path);
LabelMatrix load_matrix_csv(const std::string& path);

struct LfStats {
  std::string name;
  double coverage = 0.0;  // fraction of samples with a non-abstain vote
  double overlap = 0.0;   // of covered samples, fraction where another LF also votes
  double conflict = 0.0;  // of covered samples, fraction where another LF disagrees
  std::optional<double> empirical_accuracy;  // against gold, over covered samples
};

struct LfDiagnostics {
  std::vector<LfStats> lfs;
  std::size_t n_samples = 0;
};

// gold, when present, must align with matrix.sample_ids; entries may be empty.
LfDiagnostics diagnostics(const LabelMatrix& matrix,
                          const std::vector<std::optional<SentimentLabel>>* gold = nullptr);

std::string diagnostics_to_json(const LfDiagnostics& d);

}  // namespace chatsent
