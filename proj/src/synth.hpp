#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "label_model.hpp"

namespace chatsent {

struct SynthLfSpec {
  std::string name;
  // p[y][v] = P(vote = v | Y = y) over {abstain, negative, neutral, positive}.
  std::array<std::array<double, kNumVotes>, kNumClasses> conditionals{};
};

// Builds conditionals for an LF that abstains with the given rate and, when
// voting, is right with probability `accuracy` (errors split evenly).
SynthLfSpec accuracy_lf(const std::string& name, double accuracy, double abstain_rate = 0.0);

struct SynthVocabSpec {
  int class_tokens = 30;   // generated per class when explicit vocab is absent
  int shared_tokens = 60;
  double separability = 0.8;  // probability a token comes from the class vocab
  int min_len = 3;
  int max_len = 15;
  std::array<std::vector<std::string>, kNumClasses> class_vocab;  // optional override
  std::vector<std::string> shared_vocab;                          // optional override
};

struct SynthSpec {
  std::size_t n_samples = 0;
  std::array<double, kNumClasses> class_prior{1.0 / 3, 1.0 / 3, 1.0 / 3};
  std::vector<SynthLfSpec> lf_specs;
  std::optional<SynthVocabSpec> vocab;
  uint64_t seed = 0;
};

SynthSpec synth_spec_from_json(const std::string& text, const std::string& origin);
SynthSpec load_synth_spec(const std::string& path);

// Draws Y ~ class_prior and votes lambda_j ~ P(.|Y) independently; sample ids
// are m000000:0, m000001:0, ...
std::pair<LabelMatrix, std::vector<SentimentLabel>> generate_matrix(const SynthSpec& spec);

// Votes aligned to externally supplied gold labels and sample ids.
LabelMatrix generate_votes(const std::vector<SampleId>& ids,
                           const std::vector<SentimentLabel>& gold,
                           const std::vector<SynthLfSpec>& lf_specs, uint64_t seed);

// Sessions of 5-10 alternating turns (customer first) until at least
// n_samples customer utterances exist. Customer turns carry gold labels and
// class-conditional tokens; resolutions are consistent with the ending label
// (Resolved -> Positive ending, CustomerLeft -> non-positive ending).
Corpus generate_text_corpus(const SynthSpec& spec);

}  // namespace chatsent
