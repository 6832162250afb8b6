#include "label_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

SentimentLabel hard_label(const SoftLabel& soft) {
  double best = std::max({soft.probs[0], soft.probs[1], soft.probs[2]});
  if (soft.probs[1] == best) return SentimentLabel::Neutral;
  if (soft.probs[0] == best) return SentimentLabel::Negative;
  return SentimentLabel::Positive;
}

SentimentLabel majority_vote(const std::vector<LfVote>& row, TieBreak tie_break) {
  std::array<int, kNumClasses> counts{};
  for (LfVote v : row) {
    if (v != LfVote::Abstain) ++counts[static_cast<int>(v)];
  }
  const SentimentLabel fallback = tie_break == TieBreak::Neutral   ? SentimentLabel::Neutral
                                  : tie_break == TieBreak::Negative ? SentimentLabel::Negative
                                                                    : SentimentLabel::Positive;
  int best = std::max({counts[0], counts[1], counts[2]});
  if (best == 0) return fallback;
  int winners = 0;
  SentimentLabel winner = fallback;
  for (int c = 0; c < kNumClasses; ++c) {
    if (counts[c] == best) {
      ++winners;
      winner = static_cast<SentimentLabel>(c);
    }
  }
  return winners == 1 ? winner : fallback;
}

namespace {

double log_sum_exp(const std::array<double, kNumClasses>& v) {
  double m = std::max({v[0], v[1], v[2]});
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

LabelModelParams fit_em(const LabelMatrix& matrix, const EmConfig& config, EmTrace* trace) {
  const std::size_t n = matrix.rows();
  const std::size_t k = matrix.cols();
  if (n < 2) raise(ErrCode::empty_input, "EM needs at least 2 samples");
  if (k < 1) raise(ErrCode::empty_input, "EM needs at least 1 labeling function");
  const double eps = config.smoothing ? config.eps : 0.0;
  if (config.fixed_prior) {
    double sum = 0.0;
    for (double p : *config.fixed_prior) {
      if (p <= 0.0) raise(ErrCode::invalid_config, "fixed prior entries must be positive");
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-6) {
      raise(ErrCode::invalid_config, "fixed prior must sum to 1");
    }
  }

  // Responsibilities start as one-hot majority-vote assignments.
  std::vector<std::array<double, kNumClasses>> resp(n);
  for (std::size_t i = 0; i < n; ++i) {
    resp[i] = {0.0, 0.0, 0.0};
    resp[i][static_cast<int>(majority_vote(matrix.row(i)))] = 1.0;
  }

  LabelModelParams params;
  params.conditionals.resize(k);
  for (std::size_t j = 0; j < k; ++j) params.conditionals[j].lf_name = matrix.lf_names[j];
  LabelModelParams prev = params;

  if (trace) *trace = EmTrace{};

  for (int iter = 0; iter < config.max_iters; ++iter) {
    // M-step: multinomial MLE with additive smoothing on all counts.
    std::array<double, kNumClasses> class_mass{};
    for (std::size_t i = 0; i < n; ++i) {
      for (int y = 0; y < kNumClasses; ++y) class_mass[y] += resp[i][y];
    }
    if (!config.smoothing) {
      for (int y = 0; y < kNumClasses; ++y) {
        if (class_mass[y] <= 0.0) {
          raise(ErrCode::degenerate_matrix,
                "class " + std::string(to_string(static_cast<SentimentLabel>(y))) +
                    " receives no vote mass and smoothing is disabled");
        }
      }
    }
    if (config.fixed_prior) {
      params.class_prior = *config.fixed_prior;
    } else {
      for (int y = 0; y < kNumClasses; ++y) {
        params.class_prior[y] =
            (class_mass[y] + eps) / (static_cast<double>(n) + kNumClasses * eps);
      }
    }
    for (std::size_t j = 0; j < k; ++j) {
      auto& cond = params.conditionals[j].p;
      for (auto& row : cond) row.fill(0.0);
      for (std::size_t i = 0; i < n; ++i) {
        int v = vote_index(matrix.at(i, j));
        for (int y = 0; y < kNumClasses; ++y) cond[y][v] += resp[i][y];
      }
      for (int y = 0; y < kNumClasses; ++y) {
        double denom = class_mass[y] + kNumVotes * eps;
        for (int v = 0; v < kNumVotes; ++v) cond[y][v] = (cond[y][v] + eps) / denom;
      }
    }

    // E-step, accumulating the observed-data log-likelihood.
    double ll = 0.0, ll_comp = 0.0;  // Kahan compensation keeps the sum order-stable
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, kNumClasses> logp;
      for (int y = 0; y < kNumClasses; ++y) {
        double lp = std::log(params.class_prior[y]);
        for (std::size_t j = 0; j < k; ++j) {
          lp += std::log(params.conditionals[j].p[y][vote_index(matrix.at(i, j))]);
        }
        logp[y] = lp;
      }
      double lse = log_sum_exp(logp);
      double term = lse - ll_comp;
      double next = ll + term;
      ll_comp = (next - ll) - term;
      ll = next;
      for (int y = 0; y < kNumClasses; ++y) resp[i][y] = std::exp(logp[y] - lse);
    }

    if (trace) {
      trace->log_likelihood.push_back(ll);
      // The smoothed M-step maximizes ll plus Dirichlet(1 + eps) log-prior
      // terms; that penalized objective is the one EM drives monotonically.
      double pen = ll;
      if (eps > 0.0) {
        for (int y = 0; y < kNumClasses; ++y) pen += eps * std::log(params.class_prior[y]);
        for (std::size_t j = 0; j < k; ++j) {
          for (int y = 0; y < kNumClasses; ++y) {
            for (int v = 0; v < kNumVotes; ++v) {
              pen += eps * std::log(params.conditionals[j].p[y][v]);
            }
          }
        }
      }
      trace->penalized_objective.push_back(pen);
      trace->iterations = iter + 1;
    }

    if (iter > 0) {
      double delta = 0.0;
      for (int y = 0; y < kNumClasses; ++y) {
        delta = std::max(delta, std::fabs(params.class_prior[y] - prev.class_prior[y]));
      }
      for (std::size_t j = 0; j < k; ++j) {
        for (int y = 0; y < kNumClasses; ++y) {
          for (int v = 0; v < kNumVotes; ++v) {
            delta = std::max(delta,
                             std::fabs(params.conditionals[j].p[y][v] - prev.conditionals[j].p[y][v]));
          }
        }
      }
      if (delta < config.tol) break;
    }
    prev = params;
  }

  // Floor every parameter at eps so downstream posteriors never see zero
  // likelihoods; the added mass comes out of the largest entry, keeping each
  // distribution normalized. Runs once, after the EM loop.
  if (config.smoothing) {
    auto floor_distribution = [eps = config.eps](double* p, int n) {
      int largest = 0;
      double deficit = 0.0;
      for (int i = 1; i < n; ++i) {
        if (p[i] > p[largest]) largest = i;
      }
      for (int i = 0; i < n; ++i) {
        if (i != largest && p[i] < eps) {
          deficit += eps - p[i];
          p[i] = eps;
        }
      }
      p[largest] -= deficit;
    };
    if (!config.fixed_prior) floor_distribution(params.class_prior.data(), kNumClasses);
    for (std::size_t j = 0; j < k; ++j) {
      for (int y = 0; y < kNumClasses; ++y) {
        floor_distribution(params.conditionals[j].p[y].data(), kNumVotes);
      }
    }
  }
  return params;
}

SoftLabel posterior(const LabelModelParams& params, const std::vector<LfVote>& row) {
  if (row.size() != params.conditionals.size()) {
    raise(ErrCode::length_mismatch,
          "vote row has " + std::to_string(row.size()) + " entries, params expect " +
              std::to_string(params.conditionals.size()));
  }
  std::array<double, kNumClasses> logp;
  for (int y = 0; y < kNumClasses; ++y) {
    double lp = std::log(params.class_prior[y]);
    for (std::size_t j = 0; j < row.size(); ++j) {
      lp += std::log(params.conditionals[j].p[y][vote_index(row[j])]);
    }
    logp[y] = lp;
  }
  double lse = log_sum_exp(logp);
  SoftLabel soft;
  for (int y = 0; y < kNumClasses; ++y) soft.probs[y] = std::exp(logp[y] - lse);
  return soft;
}

std::vector<WeakLabel> weak_label_dataset(const LabelMatrix& matrix, const LabelModelParams& params) {
  // Align matrix columns with the params conditionals by name.
  std::vector<std::size_t> order(params.conditionals.size());
  for (std::size_t j = 0; j < params.conditionals.size(); ++j) {
    const std::string& want = params.conditionals[j].lf_name;
    auto it = std::find(matrix.lf_names.begin(), matrix.lf_names.end(), want);
    if (it == matrix.lf_names.end()) {
      raise(ErrCode::length_mismatch, "matrix has no column for LF '" + want + "'");
    }
    order[j] = static_cast<std::size_t>(it - matrix.lf_names.begin());
  }
  if (params.conditionals.size() != matrix.cols()) {
    raise(ErrCode::length_mismatch, "matrix and params disagree on the LF set");
  }

  std::vector<WeakLabel> out;
  out.reserve(matrix.rows());
  std::vector<LfVote> row(params.conditionals.size());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < order.size(); ++j) row[j] = matrix.at(i, order[j]);
    WeakLabel wl;
    wl.sample_id = matrix.sample_ids[i];
    wl.soft = posterior(params, row);
    wl.hard = hard_label(wl.soft);
    out.push_back(std::move(wl));
  }
  return out;
}

std::string params_to_json(const LabelModelParams& params) {
  json j;
  j["class_prior"] = params.class_prior;
  json conds = json::object();
  for (const auto& c : params.conditionals) {
    conds[c.lf_name] = c.p;
  }
  j["conditionals"] = conds;
  return j.dump(2) + "\n";
}

LabelModelParams params_from_json(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(ErrCode::schema_error, origin + ": invalid JSON");
  LabelModelParams params;
  try {
    auto prior = j.at("class_prior").get<std::vector<double>>();
    if (prior.size() != kNumClasses) raise(ErrCode::schema_error, origin + ": class_prior must have 3 entries");
    std::copy(prior.begin(), prior.end(), params.class_prior.begin());
    for (auto& [name, value] : j.at("conditionals").items()) {
      LfConditional cond;
      cond.lf_name = name;
      auto rows = value.get<std::vector<std::vector<double>>>();
      if (rows.size() != kNumClasses) raise(ErrCode::schema_error, origin + ": conditional needs 3 rows");
      for (int y = 0; y < kNumClasses; ++y) {
        if (rows[y].size() != kNumVotes) raise(ErrCode::schema_error, origin + ": conditional rows need 4 entries");
        std::copy(rows[y].begin(), rows[y].end(), cond.p[y].begin());
      }
      params.conditionals.push_back(std::move(cond));
    }
  } catch (const json::exception& e) {
    raise(ErrCode::schema_error, origin + ": " + e.what());
  }
  if (params.conditionals.empty()) raise(ErrCode::schema_error, origin + ": no conditionals");
  return params;
}

void save_params(const LabelModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrCode::io_error, "cannot write params file: " + path);
  out << params_to_json(params);
}

LabelModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open params file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return params_from_json(ss.str(), path);
}

std::string weak_labels_to_jsonl(const std::vector<WeakLabel>& labels) {
  std::string out;
  for (const auto& wl : labels) {
    json j;
    j["sample_id"] = wl.sample_id.str();
    j["probs"] = wl.soft.probs;
    j["hard"] = to_string(wl.hard);
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<WeakLabel> weak_labels_from_jsonl(const std::string& text, const std::string& origin) {
  std::vector<WeakLabel> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = origin + ": line " + std::to_string(line_no);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) raise(ErrCode::schema_error, where + ": invalid JSON");
    WeakLabel wl;
    try {
      wl.sample_id = SampleId::parse(j.at("sample_id").get<std::string>());
      auto probs = j.at("probs").get<std::vector<double>>();
      if (probs.size() != kNumClasses) raise(ErrCode::schema_error, where + ": probs must have 3 entries");
      std::copy(probs.begin(), probs.end(), wl.soft.probs.begin());
      wl.hard = sentiment_from_string(j.at("hard").get<std::string>());
    } catch (const json::exception& e) {
      raise(ErrCode::schema_error, where + ": " + e.what());
    }
    out.push_back(std::move(wl));
  }
  return out;
}

void save_weak_labels(const std::vector<WeakLabel>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrCode::io_error, "cannot write labels file: " + path);
  out << weak_labels_to_jsonl(labels);
}

std::vector<WeakLabel> load_weak_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open labels file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return weak_labels_from_jsonl(ss.str(), path);
}

}  // namespace chatsent
