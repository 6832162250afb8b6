#include "chatsent/chatsent.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "corpus.hpp"
#include "errors.hpp"
#include "evaluation.hpp"
#include "json.hpp"
#include "label_model.hpp"
#include "lexicon.hpp"
#include "lf.hpp"
#include "student.hpp"
#include "synth.hpp"
#include "trainer.hpp"

using namespace chatsent;

struct cs_corpus {
  Corpus value;
};
struct cs_lexicons {
  Lexicons value;
};
struct cs_lfset {
  std::vector<LabelingFunction> lfs;
  Lexicons lexicons;
};
struct cs_matrix {
  LabelMatrix value;
};
struct cs_labelmodel {
  LabelModelParams value;
};
struct cs_labels {
  std::vector<WeakLabel> value;
};
struct cs_student {
  ClassifierParams value;
};

namespace {

thread_local std::string g_last_error;

cs_status fail(cs_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
cs_status guarded(Fn&& fn) {
  try {
    fn();
    return CS_OK;
  } catch (const Error& e) {
    return fail(is_config_error(e.code()) ? CS_ERR_CONFIG : CS_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(CS_ERR_DATA, e.what());
  }
}

cs_status require(bool ok, const char* what) {
  return ok ? CS_OK : fail(CS_ERR_CONFIG, std::string("invalid argument: ") + what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

TrainerConfig to_core(const cs_train_config& c) {
  TrainerConfig cfg;
  cfg.t1 = c.t1;
  cfg.t2 = c.t2;
  cfg.t3 = c.t3;
  cfg.xi = c.xi;
  cfg.lambda = c.lambda;
  cfg.gamma = c.gamma;
  cfg.mu = c.mu;
  cfg.batch_size = c.batch_size;
  cfg.lr = c.lr;
  cfg.weight_decay = c.weight_decay;
  cfg.dropout = c.dropout;
  cfg.momentum = c.momentum;
  cfg.early_stop_patience = c.early_stop_patience;
  cfg.eval_every = c.eval_every;
  cfg.init_fraction = c.init_fraction;
  cfg.hidden_width = c.hidden_width;
  cfg.seed = c.seed;
  return cfg;
}

void from_core(const TrainerConfig& cfg, cs_train_config* c) {
  c->t1 = cfg.t1;
  c->t2 = cfg.t2;
  c->t3 = cfg.t3;
  c->xi = cfg.xi;
  c->lambda = cfg.lambda;
  c->gamma = cfg.gamma;
  c->mu = cfg.mu;
  c->batch_size = cfg.batch_size;
  c->lr = cfg.lr;
  c->weight_decay = cfg.weight_decay;
  c->dropout = cfg.dropout;
  c->momentum = cfg.momentum;
  c->early_stop_patience = cfg.early_stop_patience;
  c->eval_every = cfg.eval_every;
  c->init_fraction = cfg.init_fraction;
  c->hidden_width = cfg.hidden_width;
  c->seed = cfg.seed;
}

std::vector<DevExample> dev_examples(const Corpus& corpus, const FeaturizerConfig& featurizer) {
  std::vector<DevExample> dev;
  for (const auto& u : customer_utterances(corpus)) {
    if (!u.gold_label) continue;
    dev.push_back({featurize(tokenize(u.text), featurizer), *u.gold_label});
  }
  return dev;
}

std::map<SampleId, SentimentLabel> gold_by_id(const Corpus& corpus) {
  std::map<SampleId, SentimentLabel> gold;
  for (const auto& u : customer_utterances(corpus)) {
    if (u.gold_label) gold.emplace(u.id(), *u.gold_label);
  }
  return gold;
}

Metrics score_against_gold(const std::vector<WeakLabel>& predictions, const Corpus& gold_corpus) {
  auto gold = gold_by_id(gold_corpus);
  std::vector<SentimentLabel> pred_v, gold_v;
  for (const auto& p : predictions) {
    auto it = gold.find(p.sample_id);
    if (it == gold.end()) continue;
    pred_v.push_back(p.hard);
    gold_v.push_back(it->second);
  }
  if (pred_v.empty()) {
    raise(ErrCode::length_mismatch, "no prediction matches a gold-labeled utterance");
  }
  return compute_metrics(pred_v, gold_v);
}

}  // namespace

extern "C" {

const char* cs_last_error(void) { return g_last_error.c_str(); }

const char* cs_version(void) { return "0.1.0"; }

void cs_string_free(char* s) { std::free(s); }

/* ---- corpus ---- */

cs_status cs_corpus_load(const char* path, cs_corpus** out) {
  if (auto s = require(path && out, "cs_corpus_load")) return s;
  return guarded([&] { *out = new cs_corpus{load_corpus(path)}; });
}

cs_status cs_corpus_save(const cs_corpus* corpus, const char* path) {
  if (auto s = require(corpus && path, "cs_corpus_save")) return s;
  return guarded([&] { write_corpus(corpus->value, path); });
}

cs_status cs_corpus_counts(const cs_corpus* corpus, size_t* sessions, size_t* utterances,
                           size_t* customer) {
  if (auto s = require(corpus != nullptr, "cs_corpus_counts")) return s;
  if (sessions) *sessions = corpus->value.size();
  if (utterances) *utterances = utterance_count(corpus->value);
  if (customer) *customer = customer_utterances(corpus->value).size();
  return CS_OK;
}

void cs_corpus_free(cs_corpus* corpus) { delete corpus; }

/* ---- lexicons ---- */

cs_status cs_lexicons_load(const char* valence_tsv, const char* rules_json,
                           const char* polarity_json, const char* negative_terms,
                           const char* positive_terms, cs_lexicons** out) {
  if (auto s = require(valence_tsv && rules_json && polarity_json && negative_terms &&
                           positive_terms && out,
                       "cs_lexicons_load")) {
    return s;
  }
  return guarded([&] {
    *out = new cs_lexicons{
        load_lexicons(valence_tsv, rules_json, polarity_json, negative_terms, positive_terms)};
  });
}

void cs_lexicons_free(cs_lexicons* lexicons) { delete lexicons; }

/* ---- labeling functions ---- */

void cs_thresholds_defaults(cs_thresholds* t) {
  if (!t) return;
  ThresholdSet d;
  t->pattern_neg_below = d.pattern.neg_below;
  t->pattern_pos_above = d.pattern.pos_above;
  t->afinn_neg_below = d.afinn.neg_below;
  t->afinn_pos_above = d.afinn.pos_above;
  t->vader_neg_below = d.vader.neg_below;
  t->vader_pos_above = d.vader.pos_above;
}

cs_status cs_lfset_create(const cs_lexicons* lexicons, const cs_thresholds* thresholds,
                          const char* lf_names, cs_lfset** out) {
  if (auto s = require(lexicons && out, "cs_lfset_create")) return s;
  return guarded([&] {
    ThresholdSet set;
    if (thresholds) {
      set.pattern.neg_below = thresholds->pattern_neg_below;
      set.pattern.pos_above = thresholds->pattern_pos_above;
      set.afinn.neg_below = thresholds->afinn_neg_below;
      set.afinn.pos_above = thresholds->afinn_pos_above;
      set.vader.neg_below = thresholds->vader_neg_below;
      set.vader.pos_above = thresholds->vader_pos_above;
    }
    auto all = standard_lfs(set);
    std::vector<LabelingFunction> picked;
    if (!lf_names) {
      picked = all;
    } else {
      std::string names(lf_names);
      std::size_t begin = 0;
      while (begin <= names.size()) {
        auto comma = names.find(',', begin);
        std::string name = names.substr(begin, comma == std::string::npos ? comma : comma - begin);
        begin = comma == std::string::npos ? names.size() + 1 : comma + 1;
        if (name.empty()) continue;
        bool found = false;
        for (const auto& lf : all) {
          if (lf.name == name) {
            picked.push_back(lf);
            found = true;
            break;
          }
        }
        if (!found) raise(ErrCode::invalid_config, "unknown labeling function '" + name + "'");
      }
      if (picked.empty()) raise(ErrCode::invalid_config, "no labeling functions selected");
    }
    *out = new cs_lfset{std::move(picked), lexicons->value};
  });
}

void cs_lfset_free(cs_lfset* lfset) { delete lfset; }

cs_status cs_lfset_apply(const cs_lfset* lfset, const cs_corpus* corpus, cs_matrix** out) {
  if (auto s = require(lfset && corpus && out, "cs_lfset_apply")) return s;
  return guarded([&] {
    auto utterances = customer_utterances(corpus->value);
    *out = new cs_matrix{build_label_matrix(lfset->lfs, lfset->lexicons, utterances)};
  });
}

/* ---- matrix ---- */

cs_status cs_matrix_save_csv(const cs_matrix* matrix, const char* path) {
  if (auto s = require(matrix && path, "cs_matrix_save_csv")) return s;
  return guarded([&] { save_matrix_csv(matrix->value, path); });
}

cs_status cs_matrix_load_csv(const char* path, cs_matrix** out) {
  if (auto s = require(path && out, "cs_matrix_load_csv")) return s;
  return guarded([&] { *out = new cs_matrix{load_matrix_csv(path)}; });
}

cs_status cs_matrix_shape(const cs_matrix* matrix, size_t* rows, size_t* cols) {
  if (auto s = require(matrix != nullptr, "cs_matrix_shape")) return s;
  if (rows) *rows = matrix->value.rows();
  if (cols) *cols = matrix->value.cols();
  return CS_OK;
}

cs_status cs_matrix_diagnostics_json(const cs_matrix* matrix, const cs_corpus* gold_corpus,
                                     char** json_out) {
  if (auto s = require(matrix && json_out, "cs_matrix_diagnostics_json")) return s;
  return guarded([&] {
    LfDiagnostics d;
    if (gold_corpus) {
      auto gold = gold_by_id(gold_corpus->value);
      std::vector<std::optional<SentimentLabel>> aligned;
      aligned.reserve(matrix->value.rows());
      for (const auto& id : matrix->value.sample_ids) {
        auto it = gold.find(id);
        aligned.push_back(it == gold.end() ? std::nullopt
                                           : std::optional<SentimentLabel>(it->second));
      }
      d = diagnostics(matrix->value, &aligned);
    } else {
      d = diagnostics(matrix->value);
    }
    *json_out = dup_string(diagnostics_to_json(d));
  });
}

cs_status cs_matrix_column_as_labels(const cs_matrix* matrix, const char* lf_name,
                                     cs_labels** out) {
  if (auto s = require(matrix && lf_name && out, "cs_matrix_column_as_labels")) return s;
  return guarded([&] {
    const auto& m = matrix->value;
    auto it = std::find(m.lf_names.begin(), m.lf_names.end(), std::string(lf_name));
    if (it == m.lf_names.end()) {
      raise(ErrCode::invalid_config, "matrix has no column '" + std::string(lf_name) + "'");
    }
    const std::size_t j = static_cast<std::size_t>(it - m.lf_names.begin());
    std::vector<WeakLabel> labels;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      LfVote v = m.at(i, j);
      if (v == LfVote::Abstain) continue;
      WeakLabel wl;
      wl.sample_id = m.sample_ids[i];
      wl.hard = label_from_vote(v);
      wl.soft.probs = {0.0, 0.0, 0.0};
      wl.soft.probs[static_cast<int>(wl.hard)] = 1.0;
      labels.push_back(std::move(wl));
    }
    if (labels.empty()) {
      raise(ErrCode::empty_input, "column '" + std::string(lf_name) + "' abstained everywhere");
    }
    *out = new cs_labels{std::move(labels)};
  });
}

void cs_matrix_free(cs_matrix* matrix) { delete matrix; }

/* ---- label model ---- */

cs_status cs_labelmodel_fit(const cs_matrix* matrix, int max_iters, double tol, uint64_t seed,
                            const double* fixed_prior, cs_labelmodel** out) {
  if (auto s = require(matrix && out, "cs_labelmodel_fit")) return s;
  return guarded([&] {
    EmConfig cfg;
    if (max_iters > 0) cfg.max_iters = max_iters;
    if (tol > 0) cfg.tol = tol;
    cfg.seed = seed;
    if (fixed_prior) {
      cfg.fixed_prior = {fixed_prior[0], fixed_prior[1], fixed_prior[2]};
    }
    *out = new cs_labelmodel{fit_em(matrix->value, cfg)};
  });
}

cs_status cs_labelmodel_save(const cs_labelmodel* model, const char* path) {
  if (auto s = require(model && path, "cs_labelmodel_save")) return s;
  return guarded([&] { save_params(model->value, path); });
}

cs_status cs_labelmodel_load(const char* path, cs_labelmodel** out) {
  if (auto s = require(path && out, "cs_labelmodel_load")) return s;
  return guarded([&] { *out = new cs_labelmodel{load_params(path)}; });
}

cs_status cs_labelmodel_apply(const cs_labelmodel* model, const cs_matrix* matrix,
                              cs_labels** out) {
  if (auto s = require(model && matrix && out, "cs_labelmodel_apply")) return s;
  return guarded([&] { *out = new cs_labels{weak_label_dataset(matrix->value, model->value)}; });
}

void cs_labelmodel_free(cs_labelmodel* model) { delete model; }

/* ---- labels ---- */

cs_status cs_labels_save(const cs_labels* labels, const char* path) {
  if (auto s = require(labels && path, "cs_labels_save")) return s;
  return guarded([&] { save_weak_labels(labels->value, path); });
}

cs_status cs_labels_load(const char* path, cs_labels** out) {
  if (auto s = require(path && out, "cs_labels_load")) return s;
  return guarded([&] { *out = new cs_labels{load_weak_labels(path)}; });
}

cs_status cs_labels_count(const cs_labels* labels, size_t* out) {
  if (auto s = require(labels && out, "cs_labels_count")) return s;
  *out = labels->value.size();
  return CS_OK;
}

void cs_labels_free(cs_labels* labels) { delete labels; }

/* ---- training ---- */

void cs_train_config_defaults(cs_train_config* cfg) {
  if (!cfg) return;
  from_core(TrainerConfig{}, cfg);
}

cs_status cs_train_config_load(const char* path, cs_train_config* cfg) {
  if (auto s = require(path && cfg, "cs_train_config_load")) return s;
  return guarded([&] { from_core(load_trainer_config(path, to_core(*cfg)), cfg); });
}

cs_status cs_train_init(const cs_corpus* train, const cs_labels* weak, const cs_corpus* dev,
                        const cs_train_config* cfg, const char* log_path, cs_student** out) {
  if (auto s = require(train && weak && cfg && out, "cs_train_init")) return s;
  return guarded([&] {
    TrainerConfig config = to_core(*cfg);
    validate(config);
    ClassifierParams student = make_student(
        kFeatureBuckets, static_cast<uint32_t>(config.hidden_width), config.dropout, config.seed);

    std::map<SampleId, const WeakLabel*> by_id;
    for (const auto& wl : weak->value) by_id.emplace(wl.sample_id, &wl);
    std::vector<TrainExample> examples;
    for (const auto& u : customer_utterances(train->value)) {
      auto it = by_id.find(u.id());
      if (it == by_id.end()) continue;
      examples.push_back({featurize(tokenize(u.text), student.featurizer), it->second->soft});
    }
    if (examples.empty()) {
      raise(ErrCode::empty_training_set, "no weak label matches a training utterance");
    }
    std::vector<DevExample> dev_set;
    if (dev) dev_set = dev_examples(dev->value, student.featurizer);

    std::ofstream log;
    if (log_path) {
      log.open(log_path, std::ios::binary | std::ios::trunc);
      if (!log) raise(ErrCode::io_error, "cannot write log file: " + std::string(log_path));
    }
    ClassifierParams trained =
        train_init(std::move(student), examples, dev_set, config, log_path ? &log : nullptr);
    *out = new cs_student{std::move(trained)};
  });
}

cs_status cs_self_train(cs_student* student, const cs_corpus* unlabeled, const cs_corpus* dev,
                        const cs_train_config* cfg, const char* log_path) {
  if (auto s = require(student && unlabeled && cfg, "cs_self_train")) return s;
  return guarded([&] {
    TrainerConfig config = to_core(*cfg);
    validate(config);
    auto features =
        featurize_utterances(customer_utterances(unlabeled->value), student->value.featurizer);
    std::vector<DevExample> dev_set;
    if (dev) dev_set = dev_examples(dev->value, student->value.featurizer);

    std::ofstream log;
    if (log_path) {
      log.open(log_path, std::ios::binary | std::ios::app);
      if (!log) raise(ErrCode::io_error, "cannot append to log file: " + std::string(log_path));
    }
    student->value = self_train(std::move(student->value), features, dev_set, config,
                                log_path ? &log : nullptr);
  });
}

cs_status cs_student_save(const cs_student* student, const char* path) {
  if (auto s = require(student && path, "cs_student_save")) return s;
  return guarded([&] { save_student(student->value, path); });
}

cs_status cs_student_load(const char* path, cs_student** out) {
  if (auto s = require(path && out, "cs_student_load")) return s;
  return guarded([&] { *out = new cs_student{load_student(path)}; });
}

cs_status cs_student_clone(const cs_student* student, cs_student** out) {
  if (auto s = require(student && out, "cs_student_clone")) return s;
  *out = new cs_student{student->value};
  return CS_OK;
}

cs_status cs_student_predict(const cs_student* student, const cs_corpus* corpus, cs_labels** out) {
  if (auto s = require(student && corpus && out, "cs_student_predict")) return s;
  return guarded([&] {
    std::vector<WeakLabel> labels;
    for (const auto& u : customer_utterances(corpus->value)) {
      Prediction pred =
          forward(student->value, featurize(tokenize(u.text), student->value.featurizer));
      WeakLabel wl;
      wl.sample_id = u.id();
      wl.soft = pred.probs;
      wl.hard = hard_label(pred.probs);
      labels.push_back(std::move(wl));
    }
    if (labels.empty()) raise(ErrCode::empty_input, "corpus has no customer utterances");
    *out = new cs_labels{std::move(labels)};
  });
}

void cs_student_free(cs_student* student) { delete student; }

/* ---- evaluation ---- */

cs_status cs_eval_metrics_json(const cs_labels* predictions, const cs_corpus* gold,
                               char** json_out) {
  if (auto s = require(predictions && gold && json_out, "cs_eval_metrics_json")) return s;
  return guarded([&] {
    Metrics m = score_against_gold(predictions->value, gold->value);
    *json_out = dup_string(metrics_to_json(m));
  });
}

cs_status cs_eval_per_lf_json(const cs_matrix* matrix, const cs_corpus* gold, char** json_out) {
  if (auto s = require(matrix && gold && json_out, "cs_eval_per_lf_json")) return s;
  return guarded([&] {
    auto gold_map = gold_by_id(gold->value);
    const auto& m = matrix->value;
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t col = 0; col < m.cols(); ++col) {
      std::vector<SentimentLabel> pred_v, gold_v;
      for (std::size_t i = 0; i < m.rows(); ++i) {
        LfVote v = m.at(i, col);
        if (v == LfVote::Abstain) continue;
        auto it = gold_map.find(m.sample_ids[i]);
        if (it == gold_map.end()) continue;
        pred_v.push_back(label_from_vote(v));
        gold_v.push_back(it->second);
      }
      nlohmann::json entry;
      entry["n_scored"] = pred_v.size();
      if (!pred_v.empty()) {
        Metrics metrics = compute_metrics(pred_v, gold_v);
        entry["macro_f1"] = metrics.macro_f1;
        entry["accuracy"] = metrics.accuracy;
        entry["per_class_f1"] = metrics.per_class_f1;
      }
      j[m.lf_names[col]] = entry;
    }
    *json_out = dup_string(j.dump(2) + "\n");
  });
}

cs_status cs_eval_external_scores_json(const char* scores_csv, double neg_below, double pos_above,
                                       const cs_corpus* gold, const char* per_sample_csv_out,
                                       char** json_out) {
  if (auto s = require(scores_csv && gold && json_out, "cs_eval_external_scores_json")) return s;
  return guarded([&] {
    std::ifstream in(scores_csv, std::ios::binary);
    if (!in) raise(ErrCode::io_error, "cannot open scores file: " + std::string(scores_csv));
    ScoreThresholds thresholds{pos_above, neg_below, false};

    std::string per_sample = "sample_id,score,label\n";
    std::vector<std::pair<SampleId, SentimentLabel>> labeled;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line == "sample_id,score") continue;
      auto comma = line.rfind(',');
      if (comma == std::string::npos) {
        raise(ErrCode::schema_error, std::string(scores_csv) + ": line " +
                                         std::to_string(line_no) + ": expected sample_id,score");
      }
      SampleId id = SampleId::parse(line.substr(0, comma));
      double score = 0.0;
      try {
        score = std::stod(line.substr(comma + 1));
      } catch (const std::exception&) {
        raise(ErrCode::schema_error, std::string(scores_csv) + ": line " +
                                         std::to_string(line_no) + ": score is not a number");
      }
      SentimentLabel label = map_score(SentimentScore{score, score}, thresholds);
      labeled.emplace_back(id, label);
      per_sample += line.substr(0, comma) + "," + line.substr(comma + 1) + "," + to_string(label) + "\n";
    }
    if (labeled.empty()) raise(ErrCode::empty_input, "scores file has no rows");

    if (per_sample_csv_out) {
      std::ofstream out(per_sample_csv_out, std::ios::binary);
      if (!out) raise(ErrCode::io_error, "cannot write: " + std::string(per_sample_csv_out));
      out << per_sample;
    }

    auto gold_map = gold_by_id(gold->value);
    std::vector<SentimentLabel> pred_v, gold_v;
    for (const auto& [id, label] : labeled) {
      auto it = gold_map.find(id);
      if (it == gold_map.end()) continue;
      pred_v.push_back(label);
      gold_v.push_back(it->second);
    }
    if (pred_v.empty()) {
      raise(ErrCode::length_mismatch, "no external score matches a gold-labeled utterance");
    }
    *json_out = dup_string(metrics_to_json(compute_metrics(pred_v, gold_v)));
  });
}

cs_status cs_analyze_sessions(const cs_corpus* corpus, const cs_labels* labels, int window_k,
                              const char* json_path, const char* csv_path, char** json_out) {
  if (auto s = require(corpus != nullptr, "cs_analyze_sessions")) return s;
  return guarded([&] {
    LabelsById by_id;
    if (labels) {
      for (const auto& wl : labels->value) by_id.emplace(wl.sample_id, wl.hard);
    } else {
      by_id = gold_by_id(corpus->value);
    }
    ResolutionReport report = resolution_report(corpus->value, by_id, window_k);
    std::string json_text = report_to_json(report);
    if (json_path) {
      std::ofstream out(json_path, std::ios::binary);
      if (!out) raise(ErrCode::io_error, "cannot write: " + std::string(json_path));
      out << json_text;
    }
    if (csv_path) {
      std::ofstream out(csv_path, std::ios::binary);
      if (!out) raise(ErrCode::io_error, "cannot write: " + std::string(csv_path));
      out << report_to_csv(report);
    }
    if (json_out) *json_out = dup_string(json_text);
  });
}

/* ---- synthetic benchmarks ---- */

cs_status cs_synth_generate(const char* spec_json_path, const uint64_t* seed_override,
                            const char* corpus_out, const char* matrix_out, const char* gold_out) {
  if (auto s = require(spec_json_path != nullptr, "cs_synth_generate")) return s;
  if (auto s = require(corpus_out || matrix_out, "cs_synth_generate needs an output")) return s;
  return guarded([&] {
    SynthSpec spec = load_synth_spec(spec_json_path);
    if (seed_override) spec.seed = *seed_override;
    auto write_gold = [&](const std::vector<SampleId>& ids,
                          const std::vector<SentimentLabel>& gold) {
      if (!gold_out) return;
      std::ofstream out(gold_out, std::ios::binary);
      if (!out) raise(ErrCode::io_error, "cannot write: " + std::string(gold_out));
      out << "sample_id,gold\n";
      for (std::size_t i = 0; i < ids.size(); ++i) {
        out << ids[i].str() << ',' << to_string(gold[i]) << '\n';
      }
    };

    if (spec.vocab) {
      Corpus corpus = generate_text_corpus(spec);
      if (corpus_out) write_corpus(corpus, corpus_out);
      std::vector<SampleId> ids;
      std::vector<SentimentLabel> gold;
      for (const auto& u : customer_utterances(corpus)) {
        ids.push_back(u.id());
        gold.push_back(*u.gold_label);
      }
      if (matrix_out) {
        if (spec.lf_specs.empty()) {
          raise(ErrCode::invalid_config, "matrix output requested but the spec has no lf_specs");
        }
        LabelMatrix m = generate_votes(ids, gold, spec.lf_specs, spec.seed ^ 0x5eedf00dULL);
        save_matrix_csv(m, matrix_out);
      }
      write_gold(ids, gold);
      return;
    }

    if (corpus_out) {
      raise(ErrCode::invalid_config, "corpus output requested but the spec has no vocab");
    }
    auto [matrix, gold] = generate_matrix(spec);
    save_matrix_csv(matrix, matrix_out);
    write_gold(matrix.sample_ids, gold);
  });
}

} /* extern "C" */
