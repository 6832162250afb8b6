/*
 * chatsent — weak-supervision sentiment pipeline for customer-agent chat.
 *
 * C API over the core library: opaque handles, status-code returns, and a
 * thread-local error message. Every *_free accepts NULL. Strings returned
 * through char** are heap-allocated; release them with cs_string_free.
 *
 * Status codes mirror the CLI exit contract: 0 success, 2 configuration
 * error (bad paths, bad arguments), 3 data or runtime error.
 */
#ifndef CHATSENT_H
#define CHATSENT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef CHATSENT_API
#if defined(_WIN32)
#define CHATSENT_API
#else
#define CHATSENT_API __attribute__((visibility("default")))
#endif
#endif

typedef enum cs_status {
  CS_OK = 0,
  CS_ERR_CONFIG = 2,
  CS_ERR_DATA = 3,
} cs_status;

/* Message for the most recent failure on this thread. */
CHATSENT_API const char* cs_last_error(void);
CHATSENT_API const char* cs_version(void);
CHATSENT_API void cs_string_free(char* s);

typedef struct cs_corpus cs_corpus;
typedef struct cs_lexicons cs_lexicons;
typedef struct cs_lfset cs_lfset;
typedef struct cs_matrix cs_matrix;
typedef struct cs_labelmodel cs_labelmodel;
typedef struct cs_labels cs_labels; /* weak labels or model predictions */
typedef struct cs_student cs_student;

/* ---- corpus (JSON Lines, one utterance per line) ---- */

CHATSENT_API cs_status cs_corpus_load(const char* path, cs_corpus** out);
CHATSENT_API cs_status cs_corpus_save(const cs_corpus* corpus, const char* path);
CHATSENT_API cs_status cs_corpus_counts(const cs_corpus* corpus, size_t* sessions,
                                        size_t* utterances, size_t* customer_utterances);
CHATSENT_API void cs_corpus_free(cs_corpus* corpus);

/* ---- lexicons ---- */

CHATSENT_API cs_status cs_lexicons_load(const char* valence_tsv, const char* rules_json,
                                        const char* polarity_json, const char* negative_terms,
                                        const char* positive_terms, cs_lexicons** out);
CHATSENT_API void cs_lexicons_free(cs_lexicons* lexicons);

/* ---- labeling functions ---- */

typedef struct cs_thresholds {
  double pattern_neg_below, pattern_pos_above; /* on the normalized score */
  double afinn_neg_below, afinn_pos_above;     /* on the raw term sum */
  double vader_neg_below, vader_pos_above;     /* on the compound score */
} cs_thresholds;

CHATSENT_API void cs_thresholds_defaults(cs_thresholds* t);

/* lf_names: comma-separated subset of pattern,afinn,vader,domain_neg,domain_pos
 * (NULL selects all five). NULL thresholds selects the defaults. */
CHATSENT_API cs_status cs_lfset_create(const cs_lexicons* lexicons, const cs_thresholds* thresholds,
                                       const char* lf_names, cs_lfset** out);
CHATSENT_API void cs_lfset_free(cs_lfset* lfset);

/* Votes over the customer utterances of the corpus. */
CHATSENT_API cs_status cs_lfset_apply(const cs_lfset* lfset, const cs_corpus* corpus,
                                      cs_matrix** out);

/* ---- label matrix (CSV: sample_id,<lf names...>; cells in {-1,0,1,2}) ---- */

CHATSENT_API cs_status cs_matrix_save_csv(const cs_matrix* matrix, const char* path);
CHATSENT_API cs_status cs_matrix_load_csv(const char* path, cs_matrix** out);
CHATSENT_API cs_status cs_matrix_shape(const cs_matrix* matrix, size_t* rows, size_t* cols);
/* Coverage / overlap / conflict per LF, with empirical accuracy when a gold
 * corpus is supplied. */
CHATSENT_API cs_status cs_matrix_diagnostics_json(const cs_matrix* matrix,
                                                  const cs_corpus* gold_corpus, char** json_out);
/* One LF column as hard one-hot labels; abstained rows are skipped. */
CHATSENT_API cs_status cs_matrix_column_as_labels(const cs_matrix* matrix, const char* lf_name,
                                                  cs_labels** out);
CHATSENT_API void cs_matrix_free(cs_matrix* matrix);

/* ---- label model ---- */

/* fixed_prior: NULL to learn the class prior, or 3 probabilities to pin it. */
CHATSENT_API cs_status cs_labelmodel_fit(const cs_matrix* matrix, int max_iters, double tol,
                                         uint64_t seed, const double* fixed_prior,
                                         cs_labelmodel** out);
CHATSENT_API cs_status cs_labelmodel_save(const cs_labelmodel* model, const char* path);
CHATSENT_API cs_status cs_labelmodel_load(const char* path, cs_labelmodel** out);
CHATSENT_API cs_status cs_labelmodel_apply(const cs_labelmodel* model, const cs_matrix* matrix,
                                           cs_labels** out);
CHATSENT_API void cs_labelmodel_free(cs_labelmodel* model);

/* ---- weak labels / predictions (JSONL: sample_id, probs, hard) ---- */

CHATSENT_API cs_status cs_labels_save(const cs_labels* labels, const char* path);
CHATSENT_API cs_status cs_labels_load(const char* path, cs_labels** out);
CHATSENT_API cs_status cs_labels_count(const cs_labels* labels, size_t* out);
CHATSENT_API void cs_labels_free(cs_labels* labels);

/* ---- training ---- */

typedef struct cs_train_config {
  int t1, t2, t3;
  double xi, lambda, gamma, mu;
  int batch_size;
  double lr, weight_decay, dropout, momentum;
  int early_stop_patience, eval_every;
  double init_fraction;
  int hidden_width;
  uint64_t seed;
} cs_train_config;

CHATSENT_API void cs_train_config_defaults(cs_train_config* cfg);
/* Overlays "key = value" lines from the file onto cfg. */
CHATSENT_API cs_status cs_train_config_load(const char* path, cs_train_config* cfg);

/* Warm-up training on weak labels. dev may be NULL (no early stopping). When
 * log_path is given it is created/truncated and receives one JSON line per
 * step. */
CHATSENT_API cs_status cs_train_init(const cs_corpus* train, const cs_labels* weak,
                                     const cs_corpus* dev, const cs_train_config* cfg,
                                     const char* log_path, cs_student** out);
/* Contrastive-regularized self-training; updates the student in place and
 * appends to log_path. */
CHATSENT_API cs_status cs_self_train(cs_student* student, const cs_corpus* unlabeled,
                                     const cs_corpus* dev, const cs_train_config* cfg,
                                     const char* log_path);

CHATSENT_API cs_status cs_student_save(const cs_student* student, const char* path);
CHATSENT_API cs_status cs_student_load(const char* path, cs_student** out);
CHATSENT_API cs_status cs_student_clone(const cs_student* student, cs_student** out);
/* Soft + hard predictions over the customer utterances of the corpus. */
CHATSENT_API cs_status cs_student_predict(const cs_student* student, const cs_corpus* corpus,
                                          cs_labels** out);
CHATSENT_API void cs_student_free(cs_student* student);

/* ---- evaluation ---- */

/* Predictions scored against the gold labels of the corpus; every prediction
 * with a gold-labeled counterpart participates. */
CHATSENT_API cs_status cs_eval_metrics_json(const cs_labels* predictions, const cs_corpus* gold,
                                            char** json_out);
/* Per-LF metrics over covered samples, keyed by LF name. */
CHATSENT_API cs_status cs_eval_per_lf_json(const cs_matrix* matrix, const cs_corpus* gold,
                                           char** json_out);
/* scores file: CSV "sample_id,score"; scores are thresholded into labels. The
 * per-sample file, when requested, gets "sample_id,score,label" rows. */
CHATSENT_API cs_status cs_eval_external_scores_json(const char* scores_csv, double neg_below,
                                                    double pos_above, const cs_corpus* gold,
                                                    const char* per_sample_csv_out,
                                                    char** json_out);

/* Ending-sentiment distribution per resolution category. labels == NULL uses
 * the corpus gold labels. */
CHATSENT_API cs_status cs_analyze_sessions(const cs_corpus* corpus, const cs_labels* labels,
                                           int window_k, const char* json_path,
                                           const char* csv_path, char** json_out);

/* ---- synthetic benchmarks ---- */

/* Spec is a JSON document; outputs are optional (corpus JSONL, matrix CSV,
 * gold CSV "sample_id,gold"). The matrix aligns with the corpus when both are
 * requested. seed_override, when non-NULL, replaces the spec's seed. */
CHATSENT_API cs_status cs_synth_generate(const char* spec_json_path, const uint64_t* seed_override,
                                         const char* corpus_out, const char* matrix_out,
                                         const char* gold_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CHATSENT_H */
