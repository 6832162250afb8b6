#include "trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

void validate(const TrainerConfig& cfg) {
  auto bad = [](const std::string& what) { raise(ErrCode::invalid_config, what); };
  if (cfg.t1 < 0 || cfg.t2 < 0) bad("t1 and t2 must be >= 0");
  if (cfg.t3 < 1) bad("t3 must be >= 1");
  if (cfg.t2 > 0 && cfg.t3 > cfg.t2) bad("t3 must not exceed t2");
  if (cfg.xi < 0.0 || cfg.xi > 1.0) bad("xi must lie in [0, 1]");
  if (cfg.lambda < 0.0) bad("lambda must be >= 0");
  if (cfg.gamma <= 0.0) bad("gamma must be > 0");
  if (cfg.mu < 0.0) bad("mu must be >= 0");
  if (cfg.batch_size < 1) bad("batch_size must be >= 1");
  if (cfg.lr <= 0.0) bad("lr must be > 0");
  if (cfg.weight_decay < 0.0) bad("weight_decay must be >= 0");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) bad("dropout must lie in [0, 1)");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) bad("momentum must lie in [0, 1)");
  if (cfg.early_stop_patience < 1) bad("early_stop_patience must be >= 1");
  if (cfg.eval_every < 1) bad("eval_every must be >= 1");
  if (cfg.init_fraction <= 0.0 || cfg.init_fraction > 1.0) bad("init_fraction must lie in (0, 1]");
  if (cfg.hidden_width < 0) bad("hidden_width must be >= 0");
}

TrainerConfig parse_trainer_config(const std::string& text, const std::string& origin,
                                   TrainerConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto eq = line.find('=');
    std::string key, value;
    if (eq != std::string::npos) {
      key = line.substr(0, eq);
      value = line.substr(eq + 1);
    } else {
      key = line;
    }
    auto trim = [](std::string& s) {
      std::size_t b = s.find_first_not_of(" \t\r");
      std::size_t e = s.find_last_not_of(" \t\r");
      s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    };
    trim(key);
    trim(value);
    if (key.empty() && value.empty()) continue;
    const std::string where = origin + ": line " + std::to_string(line_no);
    if (key.empty() || eq == std::string::npos || value.empty()) {
      raise(ErrCode::invalid_config, where + ": expected key = value");
    }
    try {
      if (key == "t1") base.t1 = std::stoi(value);
      else if (key == "t2") base.t2 = std::stoi(value);
      else if (key == "t3") base.t3 = std::stoi(value);
      else if (key == "xi") base.xi = std::stod(value);
      else if (key == "lambda") base.lambda = std::stod(value);
      else if (key == "gamma") base.gamma = std::stod(value);
      else if (key == "mu") base.mu = std::stod(value);
      else if (key == "batch_size") base.batch_size = std::stoi(value);
      else if (key == "lr") base.lr = std::stod(value);
      else if (key == "weight_decay") base.weight_decay = std::stod(value);
      else if (key == "dropout") base.dropout = std::stod(value);
      else if (key == "momentum") base.momentum = std::stod(value);
      else if (key == "early_stop_patience") base.early_stop_patience = std::stoi(value);
      else if (key == "eval_every") base.eval_every = std::stoi(value);
      else if (key == "init_fraction") base.init_fraction = std::stod(value);
      else if (key == "hidden_width") base.hidden_width = std::stoi(value);
      else if (key == "seed") base.seed = std::stoull(value);
      else raise(ErrCode::invalid_config, where + ": unknown key '" + key + "'");
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      raise(ErrCode::invalid_config, where + ": bad value for '" + key + "'");
    }
  }
  validate(base);
  return base;
}

TrainerConfig load_trainer_config(const std::string& path, TrainerConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trainer_config(ss.str(), path, base);
}

std::string trainer_config_to_text(const TrainerConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "t1 = " << cfg.t1 << "\nt2 = " << cfg.t2 << "\nt3 = " << cfg.t3
      << "\nxi = " << cfg.xi << "\nlambda = " << cfg.lambda << "\ngamma = " << cfg.gamma
      << "\nmu = " << cfg.mu << "\nbatch_size = " << cfg.batch_size << "\nlr = " << cfg.lr
      << "\nweight_decay = " << cfg.weight_decay << "\ndropout = " << cfg.dropout
      << "\nmomentum = " << cfg.momentum << "\nearly_stop_patience = " << cfg.early_stop_patience
      << "\neval_every = " << cfg.eval_every << "\ninit_fraction = " << cfg.init_fraction
      << "\nhidden_width = " << cfg.hidden_width << "\nseed = " << cfg.seed << "\n";
  return out.str();
}

double confidence(const SoftLabel& p) {
  double entropy = 0.0;
  for (double v : p.probs) {
    if (v > 0.0) entropy -= v * std::log(v);
  }
  return std::clamp(1.0 - entropy / std::log(3.0), 0.0, 1.0);
}

double dev_macro_f1(const ClassifierParams& params, const std::vector<DevExample>& dev) {
  std::vector<SentimentLabel> pred, gold;
  pred.reserve(dev.size());
  gold.reserve(dev.size());
  for (const auto& ex : dev) {
    pred.push_back(hard_label(forward(params, ex.x).probs));
    gold.push_back(ex.gold);
  }
  return compute_metrics(pred, gold).macro_f1;
}

namespace {

// Fisher-Yates with explicit draws; std::shuffle's method is unspecified and
// would tie run reproducibility to one standard library.
void seeded_shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng() % i]);
  }
}

SoftLabel sharpen(const SoftLabel& p) {
  SoftLabel q;
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) {
    q.probs[c] = p.probs[c] * p.probs[c];
    sum += q.probs[c];
  }
  if (sum > 0.0) {
    for (int c = 0; c < kNumClasses; ++c) q.probs[c] /= sum;
  } else {
    q.probs = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  }
  return q;
}

std::vector<PseudoLabel> pseudo_labels_at(const ClassifierParams& params,
                                          const std::vector<FeatureVector>& unlabeled, double xi) {
  std::vector<PseudoLabel> out;
  out.reserve(unlabeled.size());
  for (const auto& x : unlabeled) {
    Prediction pred = forward(params, x);
    PseudoLabel pl;
    pl.target = sharpen(pred.probs);
    pl.confidence = confidence(pred.probs);
    pl.selected = pl.confidence > xi;
    pl.weight = pl.selected ? pl.confidence : 0.0;
    pl.hard = hard_label(pred.probs);
    out.push_back(pl);
  }
  return out;
}

void log_step(std::ostream* log, int step, const char* stage, const LossParts& parts,
              std::size_t n_selected, const double* dev_f1) {
  if (!log) return;
  json j;
  j["step"] = step;
  j["stage"] = stage;
  j["loss"] = parts.total;
  j["ce"] = parts.ce;
  j["r_conf"] = parts.r_conf;
  j["r_contrast"] = parts.r_contrast;
  j["n_selected"] = n_selected;
  if (dev_f1) j["dev_macro_f1"] = *dev_f1;
  *log << j.dump() << '\n';
}

// Seeded epoch shuffler: hands out index batches, reshuffling at wrap.
class BatchCycler {
 public:
  BatchCycler(std::vector<std::size_t> indices, std::mt19937_64* rng)
      : indices_(std::move(indices)), rng_(rng) {}

  std::vector<std::size_t> next(std::size_t batch_size) {
    std::vector<std::size_t> batch;
    batch.reserve(std::min(batch_size, indices_.size()));
    if (pos_ >= indices_.size()) {
      seeded_shuffle(indices_, *rng_);
      pos_ = 0;
    }
    std::size_t take = std::min(batch_size, indices_.size() - pos_);
    for (std::size_t k = 0; k < take; ++k) batch.push_back(indices_[pos_ + k]);
    pos_ += take;
    return batch;
  }

 private:
  std::vector<std::size_t> indices_;
  std::size_t pos_ = std::numeric_limits<std::size_t>::max();
  std::mt19937_64* rng_;
};

struct BestTracker {
  bool enabled = false;
  double best_f1 = -1.0;
  ClassifierParams best;
  int stale_evals = 0;

  // Returns true when patience is exhausted.
  bool observe(double f1, const ClassifierParams& params, int patience) {
    if (!enabled) return false;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = params;
      stale_evals = 0;
    } else {
      ++stale_evals;
    }
    return stale_evals >= patience;
  }
};

}  // namespace

std::vector<PseudoLabel> make_pseudo_labels(const ClassifierParams& params,
                                            const std::vector<FeatureVector>& unlabeled,
                                            const TrainerConfig& cfg) {
  return pseudo_labels_at(params, unlabeled, cfg.xi);
}

ClassifierParams train_init(ClassifierParams student, const std::vector<TrainExample>& weak,
                            const std::vector<DevExample>& dev, const TrainerConfig& cfg,
                            std::ostream* log) {
  validate(cfg);
  if (weak.empty()) raise(ErrCode::empty_training_set, "no weakly labeled samples");

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> indices(weak.size());
  for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
  if (cfg.init_fraction < 1.0) {
    seeded_shuffle(indices, rng);
    std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(cfg.init_fraction * static_cast<double>(weak.size()))));
    indices.resize(std::min(keep, indices.size()));
  }

  BestTracker tracker;
  tracker.enabled = !dev.empty();
  tracker.observe(tracker.enabled ? dev_macro_f1(student, dev) : 0.0, student,
                  std::numeric_limits<int>::max());

  BatchCycler cycler(indices, &rng);
  Gradients grads, velocity;
  for (int step = 1; step <= cfg.t1; ++step) {
    auto batch_idx = cycler.next(static_cast<std::size_t>(cfg.batch_size));
    std::vector<BatchItem> batch;
    batch.reserve(batch_idx.size());
    for (std::size_t i : batch_idx) {
      batch.push_back({&weak[i].x, weak[i].target, 1.0, hard_label(weak[i].target)});
    }
    LossParts parts = loss_and_grad(student, batch, cfg.weight_decay, &grads, RegWeights{},
                                    cfg.dropout > 0.0 ? &rng : nullptr);
    if (cfg.momentum > 0.0) {
      momentum_update(velocity, cfg.momentum, grads);
      sgd_step(student, velocity, cfg.lr);
    } else {
      sgd_step(student, grads, cfg.lr);
    }

    bool eval_now = tracker.enabled && (step % cfg.eval_every == 0 || step == cfg.t1);
    if (eval_now) {
      double f1 = dev_macro_f1(student, dev);
      log_step(log, step, "init", parts, weak.size(), &f1);
      if (tracker.observe(f1, student, cfg.early_stop_patience)) break;
    } else {
      log_step(log, step, "init", parts, weak.size(), nullptr);
    }
  }
  return tracker.enabled ? tracker.best : student;
}

ClassifierParams self_train(ClassifierParams student, const std::vector<FeatureVector>& unlabeled,
                            const std::vector<DevExample>& dev, const TrainerConfig& cfg,
                            std::ostream* log) {
  validate(cfg);
  if (unlabeled.empty()) raise(ErrCode::empty_training_set, "no unlabeled samples");
  if (cfg.t2 == 0) return student;

  // A distinct stream from train_init, so running both stages with one seed
  // does not correlate their shuffles.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  BestTracker tracker;
  tracker.enabled = !dev.empty();
  tracker.observe(tracker.enabled ? dev_macro_f1(student, dev) : 0.0, student,
                  std::numeric_limits<int>::max());

  double xi = cfg.xi;
  bool xi_halved = false;
  std::vector<PseudoLabel> pseudo;
  std::vector<std::size_t> selected;
  std::unique_ptr<BatchCycler> cycler;
  Gradients grads, velocity;

  for (int step = 1; step <= cfg.t2; ++step) {
    if ((step - 1) % cfg.t3 == 0) {
      pseudo = pseudo_labels_at(student, unlabeled, xi);
      auto collect = [&] {
        selected.clear();
        for (std::size_t i = 0; i < pseudo.size(); ++i) {
          if (pseudo[i].selected) selected.push_back(i);
        }
      };
      collect();
      if (selected.empty() && !xi_halved) {
        xi *= 0.5;
        xi_halved = true;
        for (auto& pl : pseudo) {
          pl.selected = pl.confidence > xi;
          pl.weight = pl.selected ? pl.confidence : 0.0;
        }
        collect();
      }
      if (selected.empty()) {
        raise(ErrCode::no_selected_samples,
              "no sample exceeds the confidence threshold (xi = " + std::to_string(xi) + ")");
      }
      cycler = std::make_unique<BatchCycler>(selected, &rng);
    }

    auto batch_idx = cycler->next(static_cast<std::size_t>(cfg.batch_size));
    std::vector<BatchItem> batch;
    batch.reserve(batch_idx.size());
    for (std::size_t i : batch_idx) {
      batch.push_back({&unlabeled[i], pseudo[i].target, pseudo[i].weight, pseudo[i].hard});
    }
    LossParts parts =
        loss_and_grad(student, batch, cfg.weight_decay, &grads,
                      RegWeights{cfg.lambda, cfg.mu, cfg.gamma}, cfg.dropout > 0.0 ? &rng : nullptr);
    if (cfg.momentum > 0.0) {
      momentum_update(velocity, cfg.momentum, grads);
      sgd_step(student, velocity, cfg.lr);
    } else {
      sgd_step(student, grads, cfg.lr);
    }

    bool eval_now = tracker.enabled && (step % cfg.eval_every == 0 || step == cfg.t2);
    if (eval_now) {
      double f1 = dev_macro_f1(student, dev);
      log_step(log, step, "self_train", parts, selected.size(), &f1);
      if (tracker.observe(f1, student, cfg.early_stop_patience)) break;
    } else {
      log_step(log, step, "self_train", parts, selected.size(), nullptr);
    }
  }
  return tracker.enabled ? tracker.best : student;
}

}  // namespace chatsent
