#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "label_model.hpp"

namespace chatsent {

inline constexpr uint32_t kFeatureBits = 18;
inline constexpr uint32_t kFeatureBuckets = 1u << kFeatureBits;

struct FeaturizerConfig {
  uint64_t hash_seed = 0;  // folded into the FNV-1a offset basis
};

// Sparse L2-normalized vector; items sorted by bucket index, indices unique.
struct FeatureVector {
  std::vector<std::pair<uint32_t, double>> items;

  bool empty() const { return items.empty(); }
};

// Lowercase unigram and bigram counts hashed into 2^18 buckets with FNV-1a
// (64-bit), then L2-normalized. Deterministic across runs and platforms.
FeatureVector featurize(const TokenSequence& tokens, const FeaturizerConfig& config = {});

double sparse_dot(const FeatureVector& a, const FeatureVector& b);

// Softmax classifier over sparse features with an optional ReLU hidden layer.
// Hidden input weights are stored as touched rows only; absent rows are zero,
// so decay and the L2 penalty see exactly the nonzero weights.
struct ClassifierParams {
  FeaturizerConfig featurizer;
  uint32_t input_dim = kFeatureBuckets;
  uint32_t hidden_width = 128;  // 0 selects the plain linear softmax
  double dropout_rate = 0.1;

  std::map<uint32_t, std::vector<double>> w_hidden;  // row -> [hidden_width]
  std::vector<double> b_hidden;                      // [hidden_width]
  std::vector<double> w_out;  // hidden: [hidden_width*3]; linear: [input_dim*3]
  std::vector<double> b_out;  // [3]
};

// Hidden biases and output weights get small deterministic per-index values
// so units differentiate without an RNG; hidden input rows start at zero.
ClassifierParams make_student(uint32_t input_dim, uint32_t hidden_width, double dropout_rate,
                              uint64_t seed, const FeaturizerConfig& featurizer = {});

struct Prediction {
  SoftLabel probs;
  // Hidden activations before dropout; empty for the linear student, whose
  // representation is the (already normalized) input vector itself.
  std::vector<double> representation;
};

Prediction forward(const ClassifierParams& params, const FeatureVector& x, bool train_mode = false,
                   std::mt19937_64* rng = nullptr);

struct BatchItem {
  const FeatureVector* x = nullptr;
  SoftLabel target;
  double weight = 1.0;
  SentimentLabel hard = SentimentLabel::Neutral;  // pseudo-label, pairs the contrastive term
};

struct RegWeights {
  double lambda = 0.0;  // confidence penalty weight
  double mu = 0.0;      // contrastive weight
  double gamma = 1.0;   // contrastive margin
};

struct LossParts {
  double total = 0.0;
  double ce = 0.0;
  double r_conf = 0.0;
  double r_contrast = 0.0;
  double l2 = 0.0;
};

struct Gradients {
  std::map<uint32_t, std::vector<double>> w_hidden;
  std::vector<double> b_hidden;
  std::vector<double> w_out;
  std::vector<double> b_out;
};

// total = weighted-mean cross-entropy + lambda * mean(ln3 - H(p))
//       + mu * mean over selected pairs of the margin contrastive term
//       + l2/2 * ||weights||^2  (biases excluded).
// Pair distances use L2-normalized representations. Gradients are exact
// analytic derivatives; pass grads = nullptr for loss only.
LossParts loss_and_grad(const ClassifierParams& params, const std::vector<BatchItem>& batch,
                        double l2, Gradients* grads, const RegWeights& reg = {},
                        std::mt19937_64* dropout_rng = nullptr);

void sgd_step(ClassifierParams& params, const Gradients& grads, double lr);

// velocity <- momentum * velocity + grads  (shapes follow grads)
void momentum_update(Gradients& velocity, double momentum, const Gradients& grads);

// Bit-exact JSON checkpoint.
std::string student_to_json(const ClassifierParams& params);
ClassifierParams student_from_json(const std::string& text, const std::string& origin);
void save_student(const ClassifierParams& params, const std::string& path);
ClassifierParams load_student(const std::string& path);

std::vector<FeatureVector> featurize_utterances(const std::vector<Utterance>& utterances,
                                                const FeaturizerConfig& config = {});

}  // namespace chatsent
