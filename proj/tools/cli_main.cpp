// chatsent command line: wires the pipeline end to end over the C API.
//
// Exit codes: 0 success, 2 configuration error, 3 data/runtime error.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chatsent/chatsent.h"
#include "json.hpp"

namespace {

using nlohmann::json;

[[noreturn]] void die(cs_status status) {
  std::fprintf(stderr, "error: %s\n", cs_last_error());
  std::exit(status == CS_OK ? 3 : static_cast<int>(status));
}

void check(cs_status status) {
  if (status != CS_OK) die(status);
}

template <typename T, void (*FreeFn)(T*)>
class Handle {
 public:
  Handle() = default;
  ~Handle() { FreeFn(ptr_); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  T** out() {
    FreeFn(ptr_);
    ptr_ = nullptr;
    return &ptr_;
  }
  T* get() const { return ptr_; }
  explicit operator bool() const { return ptr_ != nullptr; }

 private:
  T* ptr_ = nullptr;
};

using CorpusH = Handle<cs_corpus, cs_corpus_free>;
using LexiconsH = Handle<cs_lexicons, cs_lexicons_free>;
using LfSetH = Handle<cs_lfset, cs_lfset_free>;
using MatrixH = Handle<cs_matrix, cs_matrix_free>;
using LabelModelH = Handle<cs_labelmodel, cs_labelmodel_free>;
using LabelsH = Handle<cs_labels, cs_labels_free>;
using StudentH = Handle<cs_student, cs_student_free>;

class JsonText {
 public:
  ~JsonText() { cs_string_free(text_); }
  char** out() { return &text_; }
  json parse() const { return json::parse(text_ ? text_ : "null"); }
  const char* c_str() const { return text_ ? text_ : ""; }

 private:
  char* text_ = nullptr;
};

void write_text(const std::string& path, const std::string& text) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "error: cannot write %s\n", path.c_str());
    std::exit(3);
  }
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

// ---- lexicon path options ----

struct LexiconOpts {
  std::string dir;
  std::string valence, rules, polarity, neg_terms, pos_terms;

  void add_to(CLI::App* sub) {
    sub->add_option("--lexicon-dir", dir,
                    "directory with valence.tsv, rules.json, polarity.json, "
                    "domain_negative.txt, domain_positive.txt");
    sub->add_option("--valence", valence, "valence lexicon TSV")->check(CLI::ExistingFile);
    sub->add_option("--rules", rules, "rule lexicon JSON")->check(CLI::ExistingFile);
    sub->add_option("--polarity", polarity, "polarity lexicon JSON")->check(CLI::ExistingFile);
    sub->add_option("--neg-terms", neg_terms, "negative domain term list")->check(CLI::ExistingFile);
    sub->add_option("--pos-terms", pos_terms, "positive domain term list")->check(CLI::ExistingFile);
  }

  std::string resolve(const std::string& explicit_path, const char* name) const {
    if (!explicit_path.empty()) return explicit_path;
    if (dir.empty()) {
      std::fprintf(stderr, "error: missing lexicon path: pass --lexicon-dir or --%s\n", name);
      std::exit(2);
    }
    return dir + "/" + name;
  }

  void load(LexiconsH* out) const {
    check(cs_lexicons_load(resolve(valence, "valence.tsv").c_str(),
                           resolve(rules, "rules.json").c_str(),
                           resolve(polarity, "polarity.json").c_str(),
                           resolve(neg_terms, "domain_negative.txt").c_str(),
                           resolve(pos_terms, "domain_positive.txt").c_str(), out->out()));
  }
};

struct ThresholdOpts {
  cs_thresholds t{};

  void add_to(CLI::App* sub) {
    cs_thresholds_defaults(&t);
    sub->add_option("--pattern-neg", t.pattern_neg_below, "pattern: negative below");
    sub->add_option("--pattern-pos", t.pattern_pos_above, "pattern: positive above");
    sub->add_option("--afinn-neg", t.afinn_neg_below, "afinn: negative below (raw sum)");
    sub->add_option("--afinn-pos", t.afinn_pos_above, "afinn: positive above (raw sum)");
    sub->add_option("--vader-neg", t.vader_neg_below, "vader: negative below");
    sub->add_option("--vader-pos", t.vader_pos_above, "vader: positive above");
  }
};

// ---- trainer config options (defaults < config file < flags) ----

struct TrainOpts {
  std::string config_path;
  CLI::App* sub = nullptr;
  cs_train_config flags{};

  void add_to(CLI::App* s, bool seed_required) {
    sub = s;
    cs_train_config_defaults(&flags);
    sub->add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--t1", flags.t1, "init training steps");
    sub->add_option("--t2", flags.t2, "self-training steps");
    sub->add_option("--t3", flags.t3, "pseudo-label refresh period");
    sub->add_option("--xi", flags.xi, "confidence threshold");
    sub->add_option("--lambda", flags.lambda, "confidence regularization weight");
    sub->add_option("--gamma", flags.gamma, "contrastive margin");
    sub->add_option("--mu", flags.mu, "contrastive weight");
    sub->add_option("--batch_size", flags.batch_size, "mini-batch size");
    sub->add_option("--lr", flags.lr, "learning rate");
    sub->add_option("--weight_decay", flags.weight_decay, "L2 penalty");
    sub->add_option("--dropout", flags.dropout, "hidden dropout rate");
    sub->add_option("--momentum", flags.momentum, "SGD momentum");
    sub->add_option("--early_stop_patience", flags.early_stop_patience, "evals without improvement");
    sub->add_option("--eval_every", flags.eval_every, "dev evaluation cadence (steps)");
    sub->add_option("--init_fraction", flags.init_fraction, "fraction of weak labels used for init");
    sub->add_option("--hidden_width", flags.hidden_width, "hidden units (0 = linear)");
    auto* seed = sub->add_option("--seed", flags.seed, "RNG seed");
    if (seed_required) seed->required();
  }

  cs_train_config resolve() const {
    cs_train_config cfg;
    cs_train_config_defaults(&cfg);
    if (!config_path.empty()) check(cs_train_config_load(config_path.c_str(), &cfg));
    auto take = [&](const char* name, auto member) {
      if (sub->count(name) > 0) cfg.*member = flags.*member;
    };
    take("--t1", &cs_train_config::t1);
    take("--t2", &cs_train_config::t2);
    take("--t3", &cs_train_config::t3);
    take("--xi", &cs_train_config::xi);
    take("--lambda", &cs_train_config::lambda);
    take("--gamma", &cs_train_config::gamma);
    take("--mu", &cs_train_config::mu);
    take("--batch_size", &cs_train_config::batch_size);
    take("--lr", &cs_train_config::lr);
    take("--weight_decay", &cs_train_config::weight_decay);
    take("--dropout", &cs_train_config::dropout);
    take("--momentum", &cs_train_config::momentum);
    take("--early_stop_patience", &cs_train_config::early_stop_patience);
    take("--eval_every", &cs_train_config::eval_every);
    take("--init_fraction", &cs_train_config::init_fraction);
    take("--hidden_width", &cs_train_config::hidden_width);
    take("--seed", &cs_train_config::seed);
    return cfg;
  }
};

void print_lf_table(const json& diag) {
  std::printf("%-12s %10s %10s %10s %10s\n", "lf", "coverage", "overlap", "conflict", "accuracy");
  for (const auto& [name, stats] : diag.at("lfs").items()) {
    std::printf("%-12s %10.4f %10.4f %10.4f ", name.c_str(), stats.at("coverage").get<double>(),
                stats.at("overlap").get<double>(), stats.at("conflict").get<double>());
    if (stats.contains("empirical_accuracy")) {
      std::printf("%10.4f\n", stats.at("empirical_accuracy").get<double>());
    } else {
      std::printf("%10s\n", "-");
    }
  }
}

double macro_f1_of(const cs_labels* labels, const cs_corpus* gold) {
  JsonText text;
  check(cs_eval_metrics_json(labels, gold, text.out()));
  return text.parse().at("macro_f1").get<double>();
}

// ---- subcommand implementations ----

struct LfApplyArgs {
  std::string corpus, matrix_out, diagnostics_out, lfs;
  LexiconOpts lex;
  ThresholdOpts thresholds;
};

int run_lf_apply(const LfApplyArgs& a) {
  CorpusH corpus;
  check(cs_corpus_load(a.corpus.c_str(), corpus.out()));
  LexiconsH lexicons;
  a.lex.load(&lexicons);
  LfSetH lfset;
  check(cs_lfset_create(lexicons.get(), &a.thresholds.t, a.lfs.empty() ? nullptr : a.lfs.c_str(),
                        lfset.out()));
  MatrixH matrix;
  check(cs_lfset_apply(lfset.get(), corpus.get(), matrix.out()));
  check(cs_matrix_save_csv(matrix.get(), a.matrix_out.c_str()));
  JsonText diag;
  check(cs_matrix_diagnostics_json(matrix.get(), corpus.get(), diag.out()));
  if (!a.diagnostics_out.empty()) write_text(a.diagnostics_out, diag.c_str());
  size_t rows = 0, cols = 0;
  check(cs_matrix_shape(matrix.get(), &rows, &cols));
  std::printf("label matrix: %zu samples x %zu LFs -> %s\n", rows, cols, a.matrix_out.c_str());
  print_lf_table(diag.parse());
  return 0;
}

struct LfStatsArgs {
  std::string matrix, corpus, out;
};

int run_lf_stats(const LfStatsArgs& a) {
  MatrixH matrix;
  check(cs_matrix_load_csv(a.matrix.c_str(), matrix.out()));
  CorpusH corpus;
  if (!a.corpus.empty()) check(cs_corpus_load(a.corpus.c_str(), corpus.out()));
  JsonText diag;
  check(cs_matrix_diagnostics_json(matrix.get(), corpus.get(), diag.out()));
  if (!a.out.empty()) write_text(a.out, diag.c_str());
  print_lf_table(diag.parse());
  return 0;
}

struct LabelArgs {
  std::string matrix, params_out, weak_out;
  int max_iters = 100;
  double tol = 1e-6;
  uint64_t seed = 0;
  std::vector<double> fixed_prior;
};

int run_label(const LabelArgs& a) {
  MatrixH matrix;
  check(cs_matrix_load_csv(a.matrix.c_str(), matrix.out()));
  if (!a.fixed_prior.empty() && a.fixed_prior.size() != 3) {
    std::fprintf(stderr, "error: --fixed-prior needs exactly 3 probabilities\n");
    return 2;
  }
  LabelModelH model;
  check(cs_labelmodel_fit(matrix.get(), a.max_iters, a.tol, a.seed,
                          a.fixed_prior.empty() ? nullptr : a.fixed_prior.data(), model.out()));
  check(cs_labelmodel_save(model.get(), a.params_out.c_str()));
  LabelsH weak;
  check(cs_labelmodel_apply(model.get(), matrix.get(), weak.out()));
  check(cs_labels_save(weak.get(), a.weak_out.c_str()));
  size_t n = 0;
  check(cs_labels_count(weak.get(), &n));
  std::printf("label model fitted; %zu weak labels -> %s\n", n, a.weak_out.c_str());
  return 0;
}

struct TrainArgs {
  std::string corpus, weak, dev, init_out, final_out, log_out;
  TrainOpts train;
};

int run_train(const TrainArgs& a) {
  cs_train_config cfg = a.train.resolve();
  CorpusH corpus;
  check(cs_corpus_load(a.corpus.c_str(), corpus.out()));
  LabelsH weak;
  check(cs_labels_load(a.weak.c_str(), weak.out()));
  CorpusH dev;
  if (!a.dev.empty()) check(cs_corpus_load(a.dev.c_str(), dev.out()));

  StudentH student;
  check(cs_train_init(corpus.get(), weak.get(), dev.get(), &cfg,
                      a.log_out.empty() ? nullptr : a.log_out.c_str(), student.out()));
  if (!a.init_out.empty()) check(cs_student_save(student.get(), a.init_out.c_str()));
  check(cs_self_train(student.get(), corpus.get(), dev.get(), &cfg,
                      a.log_out.empty() ? nullptr : a.log_out.c_str()));
  check(cs_student_save(student.get(), a.final_out.c_str()));
  std::printf("training done: init -> %s, final -> %s\n",
              a.init_out.empty() ? "(skipped)" : a.init_out.c_str(), a.final_out.c_str());
  return 0;
}

struct PredictArgs {
  std::string model, corpus, out;
};

int run_predict(const PredictArgs& a) {
  StudentH student;
  check(cs_student_load(a.model.c_str(), student.out()));
  CorpusH corpus;
  check(cs_corpus_load(a.corpus.c_str(), corpus.out()));
  LabelsH pred;
  check(cs_student_predict(student.get(), corpus.get(), pred.out()));
  check(cs_labels_save(pred.get(), a.out.c_str()));
  size_t n = 0;
  check(cs_labels_count(pred.get(), &n));
  std::printf("%zu predictions -> %s\n", n, a.out.c_str());
  return 0;
}

struct EvalArgs {
  std::string pred, model, matrix, external_scores;
  std::string gold, out, per_sample_out;
  double ext_neg = -0.1, ext_pos = 0.1;
};

int run_eval(const EvalArgs& a) {
  int modes = !a.pred.empty() + !a.model.empty() + !a.matrix.empty() + !a.external_scores.empty();
  if (modes != 1) {
    std::fprintf(stderr,
                 "error: pass exactly one of --pred, --model, --matrix, --external-scores\n");
    return 2;
  }
  CorpusH gold;
  check(cs_corpus_load(a.gold.c_str(), gold.out()));
  JsonText metrics;
  if (!a.pred.empty()) {
    LabelsH pred;
    check(cs_labels_load(a.pred.c_str(), pred.out()));
    check(cs_eval_metrics_json(pred.get(), gold.get(), metrics.out()));
  } else if (!a.model.empty()) {
    StudentH student;
    check(cs_student_load(a.model.c_str(), student.out()));
    LabelsH pred;
    check(cs_student_predict(student.get(), gold.get(), pred.out()));
    check(cs_eval_metrics_json(pred.get(), gold.get(), metrics.out()));
  } else if (!a.matrix.empty()) {
    MatrixH matrix;
    check(cs_matrix_load_csv(a.matrix.c_str(), matrix.out()));
    check(cs_eval_per_lf_json(matrix.get(), gold.get(), metrics.out()));
  } else {
    check(cs_eval_external_scores_json(a.external_scores.c_str(), a.ext_neg, a.ext_pos, gold.get(),
                                       a.per_sample_out.empty() ? nullptr : a.per_sample_out.c_str(),
                                       metrics.out()));
  }
  if (!a.out.empty()) write_text(a.out, metrics.c_str());
  std::printf("%s", metrics.c_str());
  return 0;
}

struct AnalyzeArgs {
  std::string corpus, labels_source, pred, json_out, csv_out;
  int window_k = 1;
};

int run_analyze(const AnalyzeArgs& a) {
  CorpusH corpus;
  check(cs_corpus_load(a.corpus.c_str(), corpus.out()));
  LabelsH pred;
  if (a.labels_source == "model") {
    if (a.pred.empty()) {
      std::fprintf(stderr, "error: --labels-source model needs --pred\n");
      return 2;
    }
    check(cs_labels_load(a.pred.c_str(), pred.out()));
  }
  JsonText report;
  check(cs_analyze_sessions(corpus.get(), pred.get(), a.window_k,
                            a.json_out.empty() ? nullptr : a.json_out.c_str(),
                            a.csv_out.empty() ? nullptr : a.csv_out.c_str(), report.out()));
  std::printf("%s", report.c_str());
  return 0;
}

struct AblationArgs {
  std::string corpus, dev, test, out;
  std::string sources = "pattern,afinn,labelmodel";
  LexiconOpts lex;
  ThresholdOpts thresholds;
  TrainOpts train;
};

int run_ablation(const AblationArgs& a) {
  cs_train_config cfg = a.train.resolve();
  CorpusH train_corpus, dev_corpus, test_corpus;
  check(cs_corpus_load(a.corpus.c_str(), train_corpus.out()));
  if (!a.dev.empty()) check(cs_corpus_load(a.dev.c_str(), dev_corpus.out()));
  check(cs_corpus_load(a.test.c_str(), test_corpus.out()));
  LexiconsH lexicons;
  a.lex.load(&lexicons);

  std::vector<std::string> sources;
  {
    std::string rest = a.sources;
    std::size_t begin = 0;
    while (begin <= rest.size()) {
      auto comma = rest.find(',', begin);
      std::string name = rest.substr(begin, comma == std::string::npos ? comma : comma - begin);
      begin = comma == std::string::npos ? rest.size() + 1 : comma + 1;
      if (!name.empty()) sources.push_back(name);
    }
  }
  if (sources.empty()) {
    std::fprintf(stderr, "error: --sources is empty\n");
    return 2;
  }

  std::string csv = "source,weak_f1,init_f1,final_f1\n";
  for (const auto& source : sources) {
    const bool is_model = source == "labelmodel";
    const char* lf_subset = is_model ? nullptr : source.c_str();

    LfSetH lfset;
    check(cs_lfset_create(lexicons.get(), &a.thresholds.t, lf_subset, lfset.out()));
    MatrixH train_matrix, test_matrix;
    check(cs_lfset_apply(lfset.get(), train_corpus.get(), train_matrix.out()));
    check(cs_lfset_apply(lfset.get(), test_corpus.get(), test_matrix.out()));

    LabelsH weak_train, weak_test;
    LabelModelH model;
    if (is_model) {
      check(cs_labelmodel_fit(train_matrix.get(), 0, 0.0, cfg.seed, nullptr, model.out()));
      check(cs_labelmodel_apply(model.get(), train_matrix.get(), weak_train.out()));
      check(cs_labelmodel_apply(model.get(), test_matrix.get(), weak_test.out()));
    } else {
      check(cs_matrix_column_as_labels(train_matrix.get(), source.c_str(), weak_train.out()));
      check(cs_matrix_column_as_labels(test_matrix.get(), source.c_str(), weak_test.out()));
    }
    double weak_f1 = macro_f1_of(weak_test.get(), test_corpus.get());

    StudentH student;
    check(cs_train_init(train_corpus.get(), weak_train.get(), dev_corpus.get(), &cfg, nullptr,
                        student.out()));
    LabelsH init_pred;
    check(cs_student_predict(student.get(), test_corpus.get(), init_pred.out()));
    double init_f1 = macro_f1_of(init_pred.get(), test_corpus.get());

    check(cs_self_train(student.get(), train_corpus.get(), dev_corpus.get(), &cfg, nullptr));
    LabelsH final_pred;
    check(cs_student_predict(student.get(), test_corpus.get(), final_pred.out()));
    double final_f1 = macro_f1_of(final_pred.get(), test_corpus.get());

    char row[160];
    std::snprintf(row, sizeof(row), "%s,%.6f,%.6f,%.6f\n", source.c_str(), weak_f1, init_f1,
                  final_f1);
    csv += row;
    std::printf("%-12s weak %.4f  init %.4f  final %.4f\n", source.c_str(), weak_f1, init_f1,
                final_f1);
  }
  write_text(a.out, csv);
  return 0;
}

struct GenSynthArgs {
  std::string spec, corpus_out, matrix_out, gold_out;
  uint64_t seed = 0;
};

int run_gen_synth(const GenSynthArgs& a) {
  check(cs_synth_generate(a.spec.c_str(), &a.seed,
                          a.corpus_out.empty() ? nullptr : a.corpus_out.c_str(),
                          a.matrix_out.empty() ? nullptr : a.matrix_out.c_str(),
                          a.gold_out.empty() ? nullptr : a.gold_out.c_str()));
  std::printf("synthetic data written (seed %" PRIu64 ")\n", a.seed);
  return 0;
}

struct GridArgs {
  std::string corpus, scorer, out;
  std::string neg_grid = "-0.3:0:0.05";
  std::string pos_grid = "0:0.3:0.05";
  LexiconOpts lex;
};

std::vector<double> parse_grid(const std::string& text) {
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 || hi < lo) {
    std::fprintf(stderr, "error: bad grid '%s' (want lo:hi:step)\n", text.c_str());
    std::exit(2);
  }
  std::vector<double> values;
  for (double v = lo; v <= hi + 1e-12; v += step) values.push_back(v);
  return values;
}

int run_grid(const GridArgs& a) {
  if (a.scorer != "pattern" && a.scorer != "afinn" && a.scorer != "vader") {
    std::fprintf(stderr, "error: --scorer must be pattern, afinn, or vader\n");
    return 2;
  }
  CorpusH corpus;
  check(cs_corpus_load(a.corpus.c_str(), corpus.out()));
  LexiconsH lexicons;
  a.lex.load(&lexicons);

  std::string csv = "neg_below,pos_above,macro_f1,accuracy\n";
  double best_f1 = -1.0, best_neg = 0.0, best_pos = 0.0;
  for (double neg : parse_grid(a.neg_grid)) {
    for (double pos : parse_grid(a.pos_grid)) {
      if (neg > pos) continue;
      cs_thresholds t;
      cs_thresholds_defaults(&t);
      if (a.scorer == "pattern") {
        t.pattern_neg_below = neg;
        t.pattern_pos_above = pos;
      } else if (a.scorer == "afinn") {
        t.afinn_neg_below = neg;
        t.afinn_pos_above = pos;
      } else {
        t.vader_neg_below = neg;
        t.vader_pos_above = pos;
      }
      LfSetH lfset;
      check(cs_lfset_create(lexicons.get(), &t, a.scorer.c_str(), lfset.out()));
      MatrixH matrix;
      check(cs_lfset_apply(lfset.get(), corpus.get(), matrix.out()));
      JsonText per_lf;
      check(cs_eval_per_lf_json(matrix.get(), corpus.get(), per_lf.out()));
      json stats = per_lf.parse().at(a.scorer);
      if (!stats.contains("macro_f1")) continue;
      double f1 = stats.at("macro_f1").get<double>();
      double acc = stats.at("accuracy").get<double>();
      char row[128];
      std::snprintf(row, sizeof(row), "%.6f,%.6f,%.6f,%.6f\n", neg, pos, f1, acc);
      csv += row;
      if (f1 > best_f1) {
        best_f1 = f1;
        best_neg = neg;
        best_pos = pos;
      }
    }
  }
  if (!a.out.empty()) write_text(a.out, csv);
  std::printf("best %s thresholds: neg_below %.4f pos_above %.4f (macro_f1 %.4f)\n",
              a.scorer.c_str(), best_neg, best_pos, best_f1);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weak-supervision sentiment pipeline for customer-agent chat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cs_version());

  LfApplyArgs lf_apply;
  auto* sc_lf_apply = app.add_subcommand("lf-apply", "apply labeling functions to a corpus");
  sc_lf_apply->add_option("--corpus", lf_apply.corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
  lf_apply.lex.add_to(sc_lf_apply);
  lf_apply.thresholds.add_to(sc_lf_apply);
  sc_lf_apply->add_option("--lfs", lf_apply.lfs, "comma-separated LF subset");
  sc_lf_apply->add_option("--matrix-out", lf_apply.matrix_out, "label matrix CSV")->required();
  sc_lf_apply->add_option("--diagnostics-out", lf_apply.diagnostics_out, "diagnostics JSON");

  LfStatsArgs lf_stats;
  auto* sc_lf_stats = app.add_subcommand("lf-stats", "coverage/overlap/conflict of a label matrix");
  sc_lf_stats->add_option("--matrix", lf_stats.matrix, "label matrix CSV")->required()->check(CLI::ExistingFile);
  sc_lf_stats->add_option("--corpus", lf_stats.corpus, "corpus with gold labels")->check(CLI::ExistingFile);
  sc_lf_stats->add_option("--out", lf_stats.out, "diagnostics JSON");

  LabelArgs label;
  auto* sc_label = app.add_subcommand("label", "fit the label model and emit weak labels");
  sc_label->add_option("--matrix", label.matrix, "label matrix CSV")->required()->check(CLI::ExistingFile);
  sc_label->add_option("--params-out", label.params_out, "label model JSON")->required();
  sc_label->add_option("--weak-out", label.weak_out, "weak labels JSONL")->required();
  sc_label->add_option("--max-iters", label.max_iters, "EM iteration cap");
  sc_label->add_option("--tol", label.tol, "EM convergence tolerance");
  sc_label->add_option("--seed", label.seed, "RNG seed");
  sc_label->add_option("--fixed-prior", label.fixed_prior,
                       "pin the class prior: three probabilities neg neu pos")
      ->expected(3);

  TrainArgs train;
  auto* sc_train = app.add_subcommand("train", "init + self-train a student on weak labels");
  sc_train->add_option("--corpus", train.corpus, "training corpus JSONL")->required()->check(CLI::ExistingFile);
  sc_train->add_option("--weak", train.weak, "weak labels JSONL")->required()->check(CLI::ExistingFile);
  sc_train->add_option("--dev", train.dev, "labeled dev corpus")->check(CLI::ExistingFile);
  sc_train->add_option("--init-out", train.init_out, "init checkpoint path");
  sc_train->add_option("--final-out", train.final_out, "final checkpoint path")->required();
  sc_train->add_option("--log-out", train.log_out, "training log JSONL");
  train.train.add_to(sc_train, /*seed_required=*/true);

  PredictArgs predict;
  auto* sc_predict = app.add_subcommand("predict", "predict labels with a checkpoint");
  sc_predict->add_option("--model", predict.model, "student checkpoint")->required()->check(CLI::ExistingFile);
  sc_predict->add_option("--corpus", predict.corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
  sc_predict->add_option("--out", predict.out, "predictions JSONL")->required();

  EvalArgs eval;
  auto* sc_eval = app.add_subcommand("eval", "score predictions against gold labels");
  sc_eval->add_option("--pred", eval.pred, "predictions JSONL")->check(CLI::ExistingFile);
  sc_eval->add_option("--model", eval.model, "student checkpoint")->check(CLI::ExistingFile);
  sc_eval->add_option("--matrix", eval.matrix, "label matrix CSV (per-LF metrics)")->check(CLI::ExistingFile);
  sc_eval->add_option("--external-scores", eval.external_scores, "CSV sample_id,score")->check(CLI::ExistingFile);
  sc_eval->add_option("--ext-neg", eval.ext_neg, "external score: negative below");
  sc_eval->add_option("--ext-pos", eval.ext_pos, "external score: positive above");
  sc_eval->add_option("--per-sample-out", eval.per_sample_out, "per-sample labels CSV");
  sc_eval->add_option("--gold", eval.gold, "gold corpus JSONL")->required()->check(CLI::ExistingFile);
  sc_eval->add_option("--out", eval.out, "metrics JSON");

  AnalyzeArgs analyze;
  auto* sc_analyze = app.add_subcommand("analyze-sessions", "ending sentiment vs problem resolution");
  sc_analyze->add_option("--corpus", analyze.corpus, "corpus JSONL")->required()->check(CLI::ExistingFile);
  sc_analyze->add_option("--labels-source", analyze.labels_source, "gold or model")
      ->required()
      ->check(CLI::IsMember({"gold", "model"}));
  sc_analyze->add_option("--pred", analyze.pred, "predictions JSONL (model source)")->check(CLI::ExistingFile);
  sc_analyze->add_option("--window-k", analyze.window_k, "ending window size");
  sc_analyze->add_option("--json-out", analyze.json_out, "report JSON");
  sc_analyze->add_option("--csv-out", analyze.csv_out, "report CSV");

  AblationArgs ablation;
  auto* sc_ablation = app.add_subcommand("ablation", "train students from different label sources");
  sc_ablation->add_option("--corpus", ablation.corpus, "training corpus")->required()->check(CLI::ExistingFile);
  sc_ablation->add_option("--dev", ablation.dev, "labeled dev corpus")->check(CLI::ExistingFile);
  sc_ablation->add_option("--test", ablation.test, "labeled test corpus")->required()->check(CLI::ExistingFile);
  sc_ablation->add_option("--sources", ablation.sources, "label sources (default pattern,afinn,labelmodel)");
  ablation.lex.add_to(sc_ablation);
  ablation.thresholds.add_to(sc_ablation);
  sc_ablation->add_option("--out", ablation.out, "report CSV")->required();
  ablation.train.add_to(sc_ablation, /*seed_required=*/true);

  GenSynthArgs gen_synth;
  auto* sc_gen = app.add_subcommand("gen-synth", "generate synthetic corpora and label matrices");
  sc_gen->add_option("--spec", gen_synth.spec, "synth spec JSON")->required()->check(CLI::ExistingFile);
  sc_gen->add_option("--seed", gen_synth.seed, "RNG seed (overrides the spec)")->required();
  sc_gen->add_option("--corpus-out", gen_synth.corpus_out, "corpus JSONL");
  sc_gen->add_option("--matrix-out", gen_synth.matrix_out, "label matrix CSV");
  sc_gen->add_option("--gold-out", gen_synth.gold_out, "gold labels CSV");

  GridArgs grid;
  auto* sc_grid = app.add_subcommand("grid-thresholds", "grid-search scorer thresholds on a dev corpus");
  sc_grid->add_option("--corpus", grid.corpus, "labeled dev corpus")->required()->check(CLI::ExistingFile);
  sc_grid->add_option("--scorer", grid.scorer, "pattern, afinn, or vader")->required();
  sc_grid->add_option("--neg-grid", grid.neg_grid, "lo:hi:step for neg_below");
  sc_grid->add_option("--pos-grid", grid.pos_grid, "lo:hi:step for pos_above");
  grid.lex.add_to(sc_grid);
  sc_grid->add_option("--out", grid.out, "grid results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sc_lf_apply->parsed()) return run_lf_apply(lf_apply);
    if (sc_lf_stats->parsed()) return run_lf_stats(lf_stats);
    if (sc_label->parsed()) return run_label(label);
    if (sc_train->parsed()) return run_train(train);
    if (sc_predict->parsed()) return run_predict(predict);
    if (sc_eval->parsed()) return run_eval(eval);
    if (sc_analyze->parsed()) return run_analyze(analyze);
    if (sc_ablation->parsed()) return run_ablation(ablation);
    if (sc_gen->parsed()) return run_gen_synth(gen_synth);
    if (sc_grid->parsed()) return run_grid(grid);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
