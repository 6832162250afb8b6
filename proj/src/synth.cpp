#include "synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

namespace {

// Draws avoid std::*_distribution so corpora are identical across standard
// library implementations.
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

int draw_int(std::mt19937_64& rng, int lo, int hi) {
  const int n = hi - lo + 1;
  int k = static_cast<int>(u01(rng) * static_cast<double>(n));
  return lo + (k >= n ? n - 1 : k);
}

template <std::size_t N>
int draw_categorical(std::mt19937_64& rng, const std::array<double, N>& probs) {
  double u = u01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(N) - 1;
}

template <std::size_t N>
void check_distribution(const std::array<double, N>& probs, const std::string& what) {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) raise(ErrCode::invalid_config, what + ": negative probability");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-6) {
    raise(ErrCode::invalid_config, what + ": probabilities sum to " + std::to_string(sum));
  }
}

void check_spec(const SynthSpec& spec) {
  check_distribution(spec.class_prior, "class_prior");
  for (const auto& lf : spec.lf_specs) {
    for (int y = 0; y < kNumClasses; ++y) {
      check_distribution(lf.conditionals[y], "lf '" + lf.name + "' row " + std::to_string(y));
    }
  }
  if (spec.vocab) {
    const auto& v = *spec.vocab;
    if (v.separability < 0.0 || v.separability > 1.0) {
      raise(ErrCode::invalid_config, "separability must lie in [0, 1]");
    }
    if (v.min_len < 1 || v.max_len < v.min_len) {
      raise(ErrCode::invalid_config, "need 1 <= min_len <= max_len");
    }
  }
}

std::string synth_token(const char* prefix, int i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%02d", prefix, i);
  return buf;
}

}  // namespace

SynthLfSpec accuracy_lf(const std::string& name, double accuracy, double abstain_rate) {
  if (accuracy < 0.0 || accuracy > 1.0 || abstain_rate < 0.0 || abstain_rate >= 1.0) {
    raise(ErrCode::invalid_config, "accuracy in [0,1] and abstain_rate in [0,1) required");
  }
  SynthLfSpec lf;
  lf.name = name;
  const double vote_mass = 1.0 - abstain_rate;
  for (int y = 0; y < kNumClasses; ++y) {
    lf.conditionals[y][0] = abstain_rate;
    for (int c = 0; c < kNumClasses; ++c) {
      lf.conditionals[y][c + 1] =
          c == y ? vote_mass * accuracy : vote_mass * (1.0 - accuracy) / 2.0;
    }
  }
  return lf;
}

SynthSpec synth_spec_from_json(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(ErrCode::schema_error, origin + ": invalid JSON");
  SynthSpec spec;
  try {
    spec.n_samples = j.at("n_samples").get<std::size_t>();
    if (!j.contains("seed")) raise(ErrCode::schema_error, origin + ": 'seed' is required");
    spec.seed = j.at("seed").get<uint64_t>();
    if (j.contains("class_prior")) {
      auto prior = j.at("class_prior").get<std::vector<double>>();
      if (prior.size() != kNumClasses) raise(ErrCode::schema_error, origin + ": class_prior needs 3 entries");
      std::copy(prior.begin(), prior.end(), spec.class_prior.begin());
    }
    if (j.contains("lf_specs")) {
      for (const auto& e : j.at("lf_specs")) {
        if (e.contains("accuracy")) {
          spec.lf_specs.push_back(accuracy_lf(e.at("name").get<std::string>(),
                                              e.at("accuracy").get<double>(),
                                              e.value("abstain_rate", 0.0)));
          continue;
        }
        SynthLfSpec lf;
        lf.name = e.at("name").get<std::string>();
        auto rows = e.at("conditionals").get<std::vector<std::vector<double>>>();
        if (rows.size() != kNumClasses) raise(ErrCode::schema_error, origin + ": conditionals need 3 rows");
        for (int y = 0; y < kNumClasses; ++y) {
          if (rows[y].size() != kNumVotes) {
            raise(ErrCode::schema_error, origin + ": conditional rows need 4 entries");
          }
          std::copy(rows[y].begin(), rows[y].end(), lf.conditionals[y].begin());
        }
        spec.lf_specs.push_back(std::move(lf));
      }
    }
    if (j.contains("vocab")) {
      const auto& v = j.at("vocab");
      SynthVocabSpec vocab;
      vocab.class_tokens = v.value("class_tokens", vocab.class_tokens);
      vocab.shared_tokens = v.value("shared_tokens", vocab.shared_tokens);
      vocab.separability = v.value("separability", vocab.separability);
      vocab.min_len = v.value("min_len", vocab.min_len);
      vocab.max_len = v.value("max_len", vocab.max_len);
      if (v.contains("class_vocab")) {
        auto lists = v.at("class_vocab").get<std::vector<std::vector<std::string>>>();
        if (lists.size() != kNumClasses) raise(ErrCode::schema_error, origin + ": class_vocab needs 3 lists");
        for (int c = 0; c < kNumClasses; ++c) vocab.class_vocab[c] = std::move(lists[c]);
      }
      if (v.contains("shared_vocab")) {
        vocab.shared_vocab = v.at("shared_vocab").get<std::vector<std::string>>();
      }
      spec.vocab = std::move(vocab);
    }
  } catch (const json::exception& e) {
    raise(ErrCode::schema_error, origin + ": " + e.what());
  }
  check_spec(spec);
  return spec;
}

SynthSpec load_synth_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open synth spec: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return synth_spec_from_json(ss.str(), path);
}

std::pair<LabelMatrix, std::vector<SentimentLabel>> generate_matrix(const SynthSpec& spec) {
  check_spec(spec);
  if (spec.lf_specs.empty()) raise(ErrCode::invalid_config, "generate_matrix needs lf_specs");
  std::mt19937_64 rng(spec.seed);

  std::vector<SampleId> ids;
  std::vector<SentimentLabel> gold;
  ids.reserve(spec.n_samples);
  gold.reserve(spec.n_samples);
  char buf[32];
  for (std::size_t i = 0; i < spec.n_samples; ++i) {
    std::snprintf(buf, sizeof(buf), "m%06zu", i);
    ids.push_back({buf, 0});
    gold.push_back(static_cast<SentimentLabel>(draw_categorical(rng, spec.class_prior)));
  }

  LabelMatrix m = generate_votes(ids, gold, spec.lf_specs, rng());
  return {std::move(m), std::move(gold)};
}

LabelMatrix generate_votes(const std::vector<SampleId>& ids,
                           const std::vector<SentimentLabel>& gold,
                           const std::vector<SynthLfSpec>& lf_specs, uint64_t seed) {
  if (ids.size() != gold.size()) raise(ErrCode::length_mismatch, "ids and gold labels differ");
  std::mt19937_64 rng(seed);
  LabelMatrix m;
  m.sample_ids = ids;
  for (const auto& lf : lf_specs) m.lf_names.push_back(lf.name);
  m.votes.resize(ids.size() * lf_specs.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const int y = static_cast<int>(gold[i]);
    for (std::size_t j = 0; j < lf_specs.size(); ++j) {
      int v = draw_categorical(rng, lf_specs[j].conditionals[y]) - 1;
      m.votes[i * lf_specs.size() + j] = static_cast<int8_t>(v);
    }
  }
  return m;
}

Corpus generate_text_corpus(const SynthSpec& spec) {
  check_spec(spec);
  if (!spec.vocab) raise(ErrCode::invalid_config, "generate_text_corpus needs a vocab spec");
  const SynthVocabSpec& vs = *spec.vocab;

  std::array<std::vector<std::string>, kNumClasses> class_vocab = vs.class_vocab;
  std::vector<std::string> shared = vs.shared_vocab;
  for (int c = 0; c < kNumClasses; ++c) {
    if (class_vocab[c].empty()) {
      for (int i = 0; i < vs.class_tokens; ++i) {
        class_vocab[c].push_back(synth_token(("c" + std::to_string(c) + "w").c_str(), i));
      }
    }
    if (class_vocab[c].empty()) raise(ErrCode::invalid_config, "empty class vocabulary");
  }
  if (shared.empty()) {
    for (int i = 0; i < vs.shared_tokens; ++i) shared.push_back(synth_token("shw", i));
  }

  std::mt19937_64 rng(spec.seed);
  auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
    return v[static_cast<std::size_t>(draw_int(rng, 0, static_cast<int>(v.size()) - 1))];
  };

  Corpus corpus;
  std::size_t customer_count = 0;
  int session_no = 0;
  char buf[32];
  while (customer_count < spec.n_samples) {
    std::snprintf(buf, sizeof(buf), "s%05d", session_no++);
    ChatSession session;
    session.session_id = buf;
    const int length = draw_int(rng, 5, 10);
    SentimentLabel ending = SentimentLabel::Neutral;
    for (int t = 0; t < length; ++t) {
      Utterance u;
      u.session_id = session.session_id;
      u.turn_index = t;
      u.speaker = t % 2 == 0 ? Speaker::Customer : Speaker::Agent;
      const int len = draw_int(rng, vs.min_len, vs.max_len);
      std::string text;
      if (u.speaker == Speaker::Customer) {
        const int y = draw_categorical(rng, spec.class_prior);
        u.gold_label = static_cast<SentimentLabel>(y);
        ending = *u.gold_label;
        ++customer_count;
        for (int w = 0; w < len; ++w) {
          const bool from_class = shared.empty() || u01(rng) < vs.separability;
          if (w > 0) text += ' ';
          text += from_class ? pick(class_vocab[y]) : pick(shared);
        }
      } else {
        for (int w = 0; w < len; ++w) {
          if (w > 0) text += ' ';
          text += shared.empty() ? "ok" : pick(shared);
        }
      }
      u.text = std::move(text);
      session.utterances.push_back(std::move(u));
    }
    if (ending == SentimentLabel::Positive) {
      session.resolution = u01(rng) < 0.7 ? Resolution::Resolved : Resolution::AlternativeSolution;
    } else {
      session.resolution = u01(rng) < 0.7 ? Resolution::CustomerLeft : Resolution::AlternativeSolution;
    }
    corpus.push_back(std::move(session));
  }
  return corpus;
}

}  // namespace chatsent
