#include "student.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr uint64_t kFnvPrime = 1099511628211ULL;
constexpr double kTinyNorm = 1e-12;

uint64_t fnv1a(const std::string& s, uint64_t h) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

double uniform01(std::mt19937_64& rng) { return unit_double(rng()); }

}  // namespace

FeatureVector featurize(const TokenSequence& tokens, const FeaturizerConfig& config) {
  const uint64_t basis = kFnvOffset ^ config.hash_seed;
  std::map<uint32_t, double> counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string key = "1\x1f" + tokens.tokens[i];
    counts[static_cast<uint32_t>(fnv1a(key, basis) & (kFeatureBuckets - 1))] += 1.0;
    if (i + 1 < tokens.size()) {
      key = "2\x1f" + tokens.tokens[i] + "\x1f" + tokens.tokens[i + 1];
      counts[static_cast<uint32_t>(fnv1a(key, basis) & (kFeatureBuckets - 1))] += 1.0;
    }
  }
  FeatureVector x;
  x.items.reserve(counts.size());
  double ssq = 0.0;
  for (const auto& [idx, c] : counts) ssq += c * c;
  const double inv = ssq > 0.0 ? 1.0 / std::sqrt(ssq) : 0.0;
  for (const auto& [idx, c] : counts) x.items.emplace_back(idx, c * inv);
  return x;
}

double sparse_dot(const FeatureVector& a, const FeatureVector& b) {
  double dot = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.items.size() && j < b.items.size()) {
    if (a.items[i].first == b.items[j].first) {
      dot += a.items[i].second * b.items[j].second;
      ++i;
      ++j;
    } else if (a.items[i].first < b.items[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  return dot;
}

ClassifierParams make_student(uint32_t input_dim, uint32_t hidden_width, double dropout_rate,
                              uint64_t seed, const FeaturizerConfig& featurizer) {
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    raise(ErrCode::invalid_config, "dropout_rate must lie in [0, 1)");
  }
  if (input_dim == 0) raise(ErrCode::invalid_config, "input_dim must be positive");

  ClassifierParams p;
  p.featurizer = featurizer;
  p.input_dim = input_dim;
  p.hidden_width = hidden_width;
  p.dropout_rate = dropout_rate;
  p.b_out.assign(kNumClasses, 0.0);
  if (hidden_width == 0) {
    p.w_out.assign(static_cast<std::size_t>(input_dim) * kNumClasses, 0.0);
    return p;
  }
  // Hidden rows stay zero until touched; distinct positive biases and small
  // output weights break the symmetry between units deterministically.
  const uint64_t bias_stream = splitmix64(seed ^ 0xb1a5b1a5b1a5b1a5ULL);
  const uint64_t out_stream = splitmix64(seed ^ 0x075e7c0ffee0105aULL);
  p.b_hidden.resize(hidden_width);
  for (uint32_t j = 0; j < hidden_width; ++j) {
    p.b_hidden[j] = 0.02 + 0.08 * unit_double(splitmix64(bias_stream + j));
  }
  p.w_out.resize(static_cast<std::size_t>(hidden_width) * kNumClasses);
  for (std::size_t i = 0; i < p.w_out.size(); ++i) {
    p.w_out[i] = 0.2 * (unit_double(splitmix64(out_stream + i)) - 0.5);
  }
  return p;
}

namespace {

struct ForwardState {
  std::vector<double> pre;      // hidden pre-activations
  std::vector<double> h;        // relu(pre)
  std::vector<double> h_drop;   // after inverted dropout (train mode)
  std::vector<char> keep;       // dropout mask
  double rep_norm = 0.0;        // ||h||
  std::vector<double> rhat;     // h / ||h||, or zeros
  std::array<double, kNumClasses> logits{};
  std::array<double, kNumClasses> logp{};
  std::array<double, kNumClasses> p{};
};

void check_input(const ClassifierParams& params, const FeatureVector& x) {
  if (!x.items.empty() && x.items.back().first >= params.input_dim) {
    raise(ErrCode::shape_mismatch, "feature index " + std::to_string(x.items.back().first) +
                                       " outside input_dim " + std::to_string(params.input_dim));
  }
}

void run_forward(const ClassifierParams& params, const FeatureVector& x, bool train_mode,
                 std::mt19937_64* rng, ForwardState* st) {
  check_input(params, x);
  const uint32_t h_width = params.hidden_width;
  if (h_width > 0) {
    st->pre = params.b_hidden;
    for (const auto& [row, val] : x.items) {
      auto it = params.w_hidden.find(row);
      if (it == params.w_hidden.end()) continue;
      const auto& w = it->second;
      for (uint32_t j = 0; j < h_width; ++j) st->pre[j] += val * w[j];
    }
    st->h.resize(h_width);
    double ssq = 0.0;
    for (uint32_t j = 0; j < h_width; ++j) {
      st->h[j] = st->pre[j] > 0.0 ? st->pre[j] : 0.0;
      ssq += st->h[j] * st->h[j];
    }
    st->rep_norm = std::sqrt(ssq);
    st->rhat.assign(h_width, 0.0);
    if (st->rep_norm > kTinyNorm) {
      for (uint32_t j = 0; j < h_width; ++j) st->rhat[j] = st->h[j] / st->rep_norm;
    }
    const bool use_dropout = train_mode && params.dropout_rate > 0.0 && rng != nullptr;
    st->h_drop = st->h;
    if (use_dropout) {
      st->keep.resize(h_width);
      const double scale = 1.0 / (1.0 - params.dropout_rate);
      for (uint32_t j = 0; j < h_width; ++j) {
        st->keep[j] = uniform01(*rng) >= params.dropout_rate ? 1 : 0;
        st->h_drop[j] = st->keep[j] ? st->h[j] * scale : 0.0;
      }
    } else {
      st->keep.assign(h_width, 1);
    }
    for (int c = 0; c < kNumClasses; ++c) {
      double z = params.b_out[c];
      for (uint32_t j = 0; j < h_width; ++j) z += params.w_out[j * kNumClasses + c] * st->h_drop[j];
      st->logits[c] = z;
    }
  } else {
    for (int c = 0; c < kNumClasses; ++c) st->logits[c] = params.b_out[c];
    for (const auto& [row, val] : x.items) {
      const std::size_t base = static_cast<std::size_t>(row) * kNumClasses;
      for (int c = 0; c < kNumClasses; ++c) st->logits[c] += val * params.w_out[base + c];
    }
  }
  const double m = std::max({st->logits[0], st->logits[1], st->logits[2]});
  double sum = 0.0;
  for (int c = 0; c < kNumClasses; ++c) sum += std::exp(st->logits[c] - m);
  const double lse = m + std::log(sum);
  for (int c = 0; c < kNumClasses; ++c) {
    st->logp[c] = st->logits[c] - lse;
    st->p[c] = std::exp(st->logp[c]);
  }
}

}  // namespace

Prediction forward(const ClassifierParams& params, const FeatureVector& x, bool train_mode,
                   std::mt19937_64* rng) {
  ForwardState st;
  run_forward(params, x, train_mode, rng, &st);
  Prediction out;
  for (int c = 0; c < kNumClasses; ++c) out.probs.probs[c] = st.p[c];
  out.representation = st.h;
  return out;
}

LossParts loss_and_grad(const ClassifierParams& params, const std::vector<BatchItem>& batch,
                        double l2, Gradients* grads, const RegWeights& reg,
                        std::mt19937_64* dropout_rng) {
  if (batch.empty()) raise(ErrCode::empty_batch, "loss over an empty batch");
  for (const auto& item : batch) {
    if (item.weight < 0.0) raise(ErrCode::invalid_config, "negative sample weight");
  }
  const std::size_t B = batch.size();
  const uint32_t h_width = params.hidden_width;
  const bool train_mode = dropout_rng != nullptr;

  if (grads) {
    grads->w_hidden.clear();
    grads->b_hidden.assign(params.b_hidden.size(), 0.0);
    grads->w_out.assign(params.w_out.size(), 0.0);
    grads->b_out.assign(kNumClasses, 0.0);
  }

  double weight_sum = 0.0;
  for (const auto& item : batch) weight_sum += item.weight;

  std::vector<ForwardState> states(B);
  LossParts parts;
  std::vector<std::array<double, kNumClasses>> dlogits(B, std::array<double, kNumClasses>{});

  for (std::size_t i = 0; i < B; ++i) {
    run_forward(params, *batch[i].x, train_mode, dropout_rng, &states[i]);
    const auto& st = states[i];

    double ce_i = 0.0, entropy = 0.0;
    for (int c = 0; c < kNumClasses; ++c) {
      ce_i -= batch[i].target.probs[c] * st.logp[c];
      entropy -= st.p[c] * st.logp[c];
    }
    if (weight_sum > 0.0) {
      parts.ce += batch[i].weight / weight_sum * ce_i;
      const double wi = batch[i].weight / weight_sum;
      for (int c = 0; c < kNumClasses; ++c) {
        dlogits[i][c] += wi * (st.p[c] - batch[i].target.probs[c]);
      }
    }
    parts.r_conf += (std::log(3.0) - entropy) / static_cast<double>(B);
    if (reg.lambda != 0.0) {
      // d(-H)/dlogit_k = p_k * (g_k - sum_c g_c p_c), g_c = ln p_c + 1
      double gbar = 0.0;
      std::array<double, kNumClasses> g;
      for (int c = 0; c < kNumClasses; ++c) {
        g[c] = st.logp[c] + 1.0;
        gbar += g[c] * st.p[c];
      }
      for (int c = 0; c < kNumClasses; ++c) {
        dlogits[i][c] += reg.lambda / static_cast<double>(B) * st.p[c] * (g[c] - gbar);
      }
    }
  }

  // Contrastive term over pairs of weighted (selected) samples. Distances use
  // unit representations, so d^2 = na + nb - 2u and only u carries gradient.
  std::vector<std::vector<double>> drhat;
  if (h_width > 0) drhat.assign(B, std::vector<double>(h_width, 0.0));
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < B; ++i) {
    if (batch[i].weight > 0.0) selected.push_back(i);
  }
  const std::size_t P = selected.size() >= 2 ? selected.size() * (selected.size() - 1) / 2 : 0;
  if (P > 0) {
    for (std::size_t a = 0; a < selected.size(); ++a) {
      for (std::size_t b = a + 1; b < selected.size(); ++b) {
        const std::size_t ia = selected[a], ib = selected[b];
        double u, na, nb;
        if (h_width > 0) {
          u = 0.0;
          for (uint32_t j = 0; j < h_width; ++j) u += states[ia].rhat[j] * states[ib].rhat[j];
          na = states[ia].rep_norm > kTinyNorm ? 1.0 : 0.0;
          nb = states[ib].rep_norm > kTinyNorm ? 1.0 : 0.0;
        } else {
          double norm_a = 0.0, norm_b = 0.0;
          for (const auto& [idx, v] : batch[ia].x->items) norm_a += v * v;
          for (const auto& [idx, v] : batch[ib].x->items) norm_b += v * v;
          norm_a = std::sqrt(norm_a);
          norm_b = std::sqrt(norm_b);
          na = norm_a > kTinyNorm ? 1.0 : 0.0;
          nb = norm_b > kTinyNorm ? 1.0 : 0.0;
          u = na > 0.0 && nb > 0.0 ? sparse_dot(*batch[ia].x, *batch[ib].x) / (norm_a * norm_b)
                                   : 0.0;
        }
        const double dsq = std::max(0.0, na + nb - 2.0 * u);
        const double d = std::sqrt(dsq);
        double term = 0.0, dterm_du = 0.0;
        if (batch[ia].hard == batch[ib].hard) {
          term = dsq;
          dterm_du = -2.0;
        } else if (d < reg.gamma) {
          term = (reg.gamma - d) * (reg.gamma - d);
          dterm_du = d > 1e-9 ? 2.0 * (reg.gamma - d) / d : 0.0;
        }
        parts.r_contrast += term / static_cast<double>(P);
        if (grads && h_width > 0 && reg.mu != 0.0 && dterm_du != 0.0) {
          const double coeff = reg.mu * dterm_du / static_cast<double>(P);
          for (uint32_t j = 0; j < h_width; ++j) {
            drhat[ia][j] += coeff * states[ib].rhat[j];
            drhat[ib][j] += coeff * states[ia].rhat[j];
          }
        }
      }
    }
  }

  if (grads) {
    const double drop_scale = 1.0 / (1.0 - params.dropout_rate);
    for (std::size_t i = 0; i < B; ++i) {
      const auto& st = states[i];
      for (int c = 0; c < kNumClasses; ++c) grads->b_out[c] += dlogits[i][c];
      if (h_width > 0) {
        std::vector<double> dh(h_width, 0.0);
        for (uint32_t j = 0; j < h_width; ++j) {
          double dhd = 0.0;
          for (int c = 0; c < kNumClasses; ++c) {
            grads->w_out[j * kNumClasses + c] += st.h_drop[j] * dlogits[i][c];
            dhd += params.w_out[j * kNumClasses + c] * dlogits[i][c];
          }
          const bool use_dropout = train_mode && params.dropout_rate > 0.0;
          dh[j] = use_dropout ? (st.keep[j] ? dhd * drop_scale : 0.0) : dhd;
        }
        // representation gradient bypasses dropout and the output layer
        if (reg.mu != 0.0 && st.rep_norm > kTinyNorm) {
          double radial = 0.0;
          for (uint32_t j = 0; j < h_width; ++j) radial += st.rhat[j] * drhat[i][j];
          for (uint32_t j = 0; j < h_width; ++j) {
            dh[j] += (drhat[i][j] - st.rhat[j] * radial) / st.rep_norm;
          }
        }
        std::vector<double> dpre(h_width);
        for (uint32_t j = 0; j < h_width; ++j) {
          dpre[j] = st.pre[j] > 0.0 ? dh[j] : 0.0;
          grads->b_hidden[j] += dpre[j];
        }
        for (const auto& [row, val] : batch[i].x->items) {
          auto [it, inserted] = grads->w_hidden.try_emplace(row);
          if (inserted) it->second.assign(h_width, 0.0);
          for (uint32_t j = 0; j < h_width; ++j) it->second[j] += val * dpre[j];
        }
      } else {
        for (const auto& [row, val] : batch[i].x->items) {
          const std::size_t base = static_cast<std::size_t>(row) * kNumClasses;
          for (int c = 0; c < kNumClasses; ++c) grads->w_out[base + c] += val * dlogits[i][c];
        }
      }
    }
  }

  if (l2 != 0.0) {
    double ssq = 0.0;
    for (const auto& [row, w] : params.w_hidden) {
      for (double v : w) ssq += v * v;
    }
    for (double v : params.w_out) ssq += v * v;
    parts.l2 = 0.5 * l2 * ssq;
    if (grads) {
      for (const auto& [row, w] : params.w_hidden) {
        auto [it, inserted] = grads->w_hidden.try_emplace(row);
        if (inserted) it->second.assign(h_width, 0.0);
        for (uint32_t j = 0; j < h_width; ++j) it->second[j] += l2 * w[j];
      }
      for (std::size_t i = 0; i < params.w_out.size(); ++i) grads->w_out[i] += l2 * params.w_out[i];
    }
  }

  parts.total = parts.ce + reg.lambda * parts.r_conf + reg.mu * parts.r_contrast + parts.l2;
  return parts;
}

void sgd_step(ClassifierParams& params, const Gradients& grads, double lr) {
  if (grads.b_hidden.size() != params.b_hidden.size() || grads.w_out.size() != params.w_out.size() ||
      grads.b_out.size() != params.b_out.size()) {
    raise(ErrCode::shape_mismatch, "gradient shapes do not match the parameters");
  }
  for (const auto& [row, g] : grads.w_hidden) {
    auto [it, inserted] = params.w_hidden.try_emplace(row);
    if (inserted) it->second.assign(params.hidden_width, 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) it->second[j] -= lr * g[j];
  }
  for (std::size_t j = 0; j < grads.b_hidden.size(); ++j) params.b_hidden[j] -= lr * grads.b_hidden[j];
  for (std::size_t i = 0; i < grads.w_out.size(); ++i) params.w_out[i] -= lr * grads.w_out[i];
  for (std::size_t c = 0; c < grads.b_out.size(); ++c) params.b_out[c] -= lr * grads.b_out[c];
}

void momentum_update(Gradients& velocity, double momentum, const Gradients& grads) {
  if (velocity.w_out.empty()) {
    velocity.b_hidden.assign(grads.b_hidden.size(), 0.0);
    velocity.w_out.assign(grads.w_out.size(), 0.0);
    velocity.b_out.assign(grads.b_out.size(), 0.0);
  }
  for (auto& [row, v] : velocity.w_hidden) {
    for (double& x : v) x *= momentum;
  }
  for (const auto& [row, g] : grads.w_hidden) {
    auto [it, inserted] = velocity.w_hidden.try_emplace(row);
    if (inserted) it->second.assign(g.size(), 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) it->second[j] += g[j];
  }
  for (std::size_t j = 0; j < grads.b_hidden.size(); ++j) {
    velocity.b_hidden[j] = momentum * velocity.b_hidden[j] + grads.b_hidden[j];
  }
  for (std::size_t i = 0; i < grads.w_out.size(); ++i) {
    velocity.w_out[i] = momentum * velocity.w_out[i] + grads.w_out[i];
  }
  for (std::size_t c = 0; c < grads.b_out.size(); ++c) {
    velocity.b_out[c] = momentum * velocity.b_out[c] + grads.b_out[c];
  }
}

std::string student_to_json(const ClassifierParams& params) {
  json j;
  j["format"] = "chatsent-student";
  j["version"] = 1;
  j["hash_seed"] = params.featurizer.hash_seed;
  j["input_dim"] = params.input_dim;
  j["hidden_width"] = params.hidden_width;
  j["dropout_rate"] = params.dropout_rate;
  j["b_hidden"] = params.b_hidden;
  j["w_out"] = params.w_out;
  j["b_out"] = params.b_out;
  json rows = json::array();
  for (const auto& [row, w] : params.w_hidden) {
    rows.push_back(json::array({row, w}));
  }
  j["w_hidden"] = rows;
  return j.dump() + "\n";
}

ClassifierParams student_from_json(const std::string& text, const std::string& origin) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) raise(ErrCode::schema_error, origin + ": invalid JSON");
  ClassifierParams p;
  try {
    if (j.at("format").get<std::string>() != "chatsent-student" || j.at("version").get<int>() != 1) {
      raise(ErrCode::schema_error, origin + ": unsupported checkpoint format");
    }
    p.featurizer.hash_seed = j.at("hash_seed").get<uint64_t>();
    p.input_dim = j.at("input_dim").get<uint32_t>();
    p.hidden_width = j.at("hidden_width").get<uint32_t>();
    p.dropout_rate = j.at("dropout_rate").get<double>();
    p.b_hidden = j.at("b_hidden").get<std::vector<double>>();
    p.w_out = j.at("w_out").get<std::vector<double>>();
    p.b_out = j.at("b_out").get<std::vector<double>>();
    for (const auto& entry : j.at("w_hidden")) {
      uint32_t row = entry.at(0).get<uint32_t>();
      auto w = entry.at(1).get<std::vector<double>>();
      if (w.size() != p.hidden_width || row >= p.input_dim) {
        raise(ErrCode::schema_error, origin + ": bad hidden row");
      }
      p.w_hidden.emplace(row, std::move(w));
    }
  } catch (const json::exception& e) {
    raise(ErrCode::schema_error, origin + ": " + e.what());
  }
  const std::size_t expect_out = p.hidden_width > 0
                                     ? static_cast<std::size_t>(p.hidden_width) * kNumClasses
                                     : static_cast<std::size_t>(p.input_dim) * kNumClasses;
  if (p.w_out.size() != expect_out || p.b_out.size() != kNumClasses ||
      p.b_hidden.size() != p.hidden_width || p.dropout_rate < 0.0 || p.dropout_rate >= 1.0) {
    raise(ErrCode::schema_error, origin + ": inconsistent checkpoint shapes");
  }
  return p;
}

void save_student(const ClassifierParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrCode::io_error, "cannot write checkpoint: " + path);
  out << student_to_json(params);
  if (!out) raise(ErrCode::io_error, "error writing checkpoint: " + path);
}

ClassifierParams load_student(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return student_from_json(ss.str(), path);
}

std::vector<FeatureVector> featurize_utterances(const std::vector<Utterance>& utterances,
                                                const FeaturizerConfig& config) {
  std::vector<FeatureVector> out;
  out.reserve(utterances.size());
  for (const auto& u : utterances) out.push_back(featurize(tokenize(u.text), config));
  return out;
}

}  // namespace chatsent
