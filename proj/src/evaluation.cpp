#include "evaluation.hpp"

#include <algorithm>
#include <cstdio>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

Metrics compute_metrics(const std::vector<SentimentLabel>& pred,
                        const std::vector<SentimentLabel>& gold) {
  if (pred.size() != gold.size()) {
    raise(ErrCode::length_mismatch, "predictions and gold labels differ in length (" +
                                        std::to_string(pred.size()) + " vs " +
                                        std::to_string(gold.size()) + ")");
  }
  if (pred.empty()) raise(ErrCode::empty_input, "no predictions to score");

  Metrics m;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++m.confusion[static_cast<int>(gold[i])][static_cast<int>(pred[i])];
  }
  int64_t total = static_cast<int64_t>(pred.size());
  int64_t trace = 0;
  for (int c = 0; c < kNumClasses; ++c) trace += m.confusion[c][c];
  m.accuracy = static_cast<double>(trace) / static_cast<double>(total);

  double f1_sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    int64_t tp = m.confusion[c][c];
    int64_t fp = 0, fn = 0;
    for (int o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      fp += m.confusion[o][c];
      fn += m.confusion[c][o];
    }
    double precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    double recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.per_class_f1[c] =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    f1_sum += m.per_class_f1[c];
  }
  m.macro_f1 = f1_sum / kNumClasses;
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  json j;
  j["macro_f1"] = m.macro_f1;
  j["accuracy"] = m.accuracy;
  j["confusion"] = m.confusion;
  j["per_class_f1"] = m.per_class_f1;
  return j.dump(2) + "\n";
}

SentimentLabel ending_sentiment(const ChatSession& session, const LabelsById& labels,
                                int window_k) {
  if (window_k < 1) raise(ErrCode::invalid_config, "window_k must be >= 1");
  std::vector<const Utterance*> customer;
  for (const auto& u : session.utterances) {
    if (u.speaker == Speaker::Customer) customer.push_back(&u);
  }
  if (customer.empty()) {
    raise(ErrCode::no_labeled_customer_utterance,
          "session '" + session.session_id + "' has no customer utterance");
  }
  const std::size_t k = std::min<std::size_t>(window_k, customer.size());
  std::array<int, kNumClasses> counts{};
  std::vector<SentimentLabel> latest_first;
  for (std::size_t d = 0; d < k; ++d) {
    auto it = labels.find(customer[customer.size() - 1 - d]->id());
    if (it == labels.end()) continue;
    ++counts[static_cast<int>(it->second)];
    latest_first.push_back(it->second);
  }
  if (latest_first.empty()) {
    raise(ErrCode::no_labeled_customer_utterance,
          "session '" + session.session_id + "': no label in the ending window");
  }
  int best = std::max({counts[0], counts[1], counts[2]});
  for (SentimentLabel l : latest_first) {
    if (counts[static_cast<int>(l)] == best) return l;
  }
  return latest_first.front();
}

ResolutionReport resolution_report(const Corpus& corpus, const LabelsById& labels,
                                   int window_k) {
  ResolutionReport r;
  for (const auto& session : corpus) {
    if (!session.resolution) {
      ++r.skipped_no_resolution;
      continue;
    }
    SentimentLabel ending;
    try {
      ending = ending_sentiment(session, labels, window_k);
    } catch (const Error&) {
      ++r.skipped_unlabeled;
      continue;
    }
    auto& cat = r.categories[static_cast<int>(*session.resolution)];
    ++cat.sessions;
    ++cat.ending_counts[static_cast<int>(ending)];
  }
  return r;
}

namespace {

const Resolution kResolutions[] = {Resolution::Resolved, Resolution::CustomerLeft,
                                   Resolution::AlternativeSolution};

}  // namespace

std::string report_to_json(const ResolutionReport& r) {
  json j;
  for (Resolution res : kResolutions) {
    const auto& cat = r.categories[static_cast<int>(res)];
    json e;
    e["sessions"] = cat.sessions;
    json counts, fractions;
    for (int c = 0; c < kNumClasses; ++c) {
      const char* name = to_string(static_cast<SentimentLabel>(c));
      counts[name] = cat.ending_counts[c];
      fractions[name] = cat.sessions > 0 ? static_cast<double>(cat.ending_counts[c]) /
                                               static_cast<double>(cat.sessions)
                                         : 0.0;
    }
    e["ending_counts"] = counts;
    e["ending_fractions"] = fractions;
    j[to_string(res)] = e;
  }
  j["skipped_no_resolution"] = r.skipped_no_resolution;
  j["skipped_unlabeled"] = r.skipped_unlabeled;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ResolutionReport& r) {
  std::string out = "category,label,fraction,count\n";
  char buf[64];
  for (Resolution res : kResolutions) {
    const auto& cat = r.categories[static_cast<int>(res)];
    for (int c = 0; c < kNumClasses; ++c) {
      double fraction = cat.sessions > 0 ? static_cast<double>(cat.ending_counts[c]) /
                                               static_cast<double>(cat.sessions)
                                         : 0.0;
      std::snprintf(buf, sizeof(buf), "%.6f", fraction);
      out += to_string(res);
      out += ',';
      out += to_string(static_cast<SentimentLabel>(c));
      out += ',';
      out += buf;
      out += ',';
      out += std::to_string(cat.ending_counts[c]);
      out += '\n';
    }
  }
  return out;
}

}  // namespace chatsent
