#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evaluation.hpp"
#include "student.hpp"

namespace chatsent {

struct TrainerConfig {
  int t1 = 120;  // init steps
  int t2 = 600;  // self-training steps
  int t3 = 120;  // pseudo-label refresh period
  double xi = 0.6;      // confidence threshold
  double lambda = 0.1;  // confidence regularization weight
  double gamma = 1.0;   // contrastive margin
  double mu = 1.0;      // contrastive weight
  int batch_size = 256;
  double lr = 0.5;  // tuned for the hashed n-gram student; 1e-5 suits transformer backends
  double weight_decay = 1e-5;
  double dropout = 0.1;
  double momentum = 0.0;
  int early_stop_patience = 5;
  int eval_every = 20;
  double init_fraction = 1.0;
  int hidden_width = 128;
  uint64_t seed = 0;
};

void validate(const TrainerConfig& cfg);

// Flat "key = value" file; '#' starts a comment. Keys mirror the field names;
// unknown keys are rejected. Parsed values overlay the passed-in config.
TrainerConfig parse_trainer_config(const std::string& text, const std::string& origin,
                                   TrainerConfig base = {});
TrainerConfig load_trainer_config(const std::string& path, TrainerConfig base = {});
std::string trainer_config_to_text(const TrainerConfig& cfg);

// 1 - H(p)/ln3, clamped to [0, 1].
double confidence(const SoftLabel& p);

struct TrainExample {
  FeatureVector x;
  SoftLabel target;
};

struct DevExample {
  FeatureVector x;
  SentimentLabel gold;
};

double dev_macro_f1(const ClassifierParams& params, const std::vector<DevExample>& dev);

struct PseudoLabel {
  SoftLabel target;  // squared-probability sharpening of the prediction
  double confidence = 0.0;
  double weight = 0.0;  // confidence when selected, else 0
  bool selected = false;
  SentimentLabel hard = SentimentLabel::Neutral;
};

std::vector<PseudoLabel> make_pseudo_labels(const ClassifierParams& params,
                                            const std::vector<FeatureVector>& unlabeled,
                                            const TrainerConfig& cfg);

// Supervised warm-up on weak labels: at most t1 steps over seeded shuffled
// mini-batches, dev macro-F1 evaluated every eval_every steps, best-dev
// checkpoint returned (the untrained state counts as a candidate). Writes one
// JSON log line per step when log is given.
ClassifierParams train_init(ClassifierParams student, const std::vector<TrainExample>& weak,
                            const std::vector<DevExample>& dev, const TrainerConfig& cfg,
                            std::ostream* log = nullptr);

// Contrastive-regularized self-training: every t3 steps the pseudo-label set
// is refreshed from the current student (replacing the previous one); each
// step minimizes weighted soft cross-entropy over selected samples plus
// lambda * R_conf and mu * R_contrast. An empty selection halves xi once,
// then fails. Returns the best-dev checkpoint when dev is non-empty.
ClassifierParams self_train(ClassifierParams student, const std::vector<FeatureVector>& unlabeled,
                            const std::vector<DevExample>& dev, const TrainerConfig& cfg,
                            std::ostream* log = nullptr);

}  // namespace chatsent
