#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corpus.hpp"

namespace chatsent {

struct Metrics {
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::array<std::array<int64_t, kNumClasses>, kNumClasses> confusion{};  // [gold][pred]
  std::array<double, kNumClasses> per_class_f1{};
};

// Per-class F1 = 2PR / (P + R), zero when P + R = 0; macro-F1 averages all
// three classes, empty classes contributing zero.
Metrics compute_metrics(const std::vector<SentimentLabel>& pred,
                        const std::vector<SentimentLabel>& gold);

std::string metrics_to_json(const Metrics& m);

using LabelsById = std::map<SampleId, SentimentLabel>;

// Label of the last customer utterance; with window_k > 1, majority over the
// labeled utterances among the last k customer turns, ties toward the latest.
SentimentLabel ending_sentiment(const ChatSession& session, const LabelsById& labels,
                                int window_k = 1);

struct ResolutionReport {
  struct Category {
    std::array<int64_t, kNumClasses> ending_counts{};
    int64_t sessions = 0;
  };
  std::array<Category, 3> categories{};  // indexed by Resolution
  int64_t skipped_no_resolution = 0;
  int64_t skipped_unlabeled = 0;
};

ResolutionReport resolution_report(const Corpus& corpus, const LabelsById& labels,
                                   int window_k = 1);

std::string report_to_json(const ResolutionReport& r);
std::string report_to_csv(const ResolutionReport& r);

}  // namespace chatsent
