#include "label_model.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "errors.hpp"
#include "synth.hpp"
#include "test_util.hpp"

using namespace chatsent;

namespace {

std::vector<LfVote> votes(std::initializer_list<LfVote> v) { return v; }

// Bayes by direct enumeration over y, independent of the implementation.
SoftLabel brute_force_posterior(const LabelModelParams& params, const std::vector<LfVote>& row) {
  SoftLabel out;
  double total = 0.0;
  for (int y = 0; y < kNumClasses; ++y) {
    double p = params.class_prior[y];
    for (std::size_t j = 0; j < row.size(); ++j) {
      p *= params.conditionals[j].p[y][vote_index(row[j])];
    }
    out.probs[y] = p;
    total += p;
  }
  for (int y = 0; y < kNumClasses; ++y) out.probs[y] /= total;
  return out;
}

LabelModelParams random_params(std::mt19937_64& rng, std::size_t n_lfs) {
  auto simplex = [&](double* p, int n) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = 1e-3 + static_cast<double>(rng() % 1000);
      sum += p[i];
    }
    for (int i = 0; i < n; ++i) p[i] /= sum;
  };
  LabelModelParams params;
  simplex(params.class_prior.data(), kNumClasses);
  for (std::size_t j = 0; j < n_lfs; ++j) {
    LfConditional c;
    c.lf_name = "lf" + std::to_string(j);
    for (int y = 0; y < kNumClasses; ++y) simplex(c.p[y].data(), kNumVotes);
    params.conditionals.push_back(std::move(c));
  }
  return params;
}

}  // namespace

TEST_CASE("majority_vote picks the plurality and falls back on ties") {
  CHECK(majority_vote(votes({LfVote::Positive, LfVote::Positive, LfVote::Negative, LfVote::Abstain,
                             LfVote::Abstain})) == SentimentLabel::Positive);
  CHECK(majority_vote(votes({LfVote::Abstain, LfVote::Abstain, LfVote::Abstain, LfVote::Abstain,
                             LfVote::Abstain})) == SentimentLabel::Neutral);
  CHECK(majority_vote(votes({LfVote::Positive, LfVote::Negative, LfVote::Abstain, LfVote::Abstain,
                             LfVote::Abstain})) == SentimentLabel::Neutral);
  CHECK(majority_vote(votes({LfVote::Positive, LfVote::Negative}), TieBreak::Negative) ==
        SentimentLabel::Negative);
}

TEST_CASE("posterior equals brute-force Bayes enumeration") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n_lfs = 1 + rng() % 4;
    auto params = random_params(rng, n_lfs);
    std::vector<LfVote> row;
    for (std::size_t j = 0; j < n_lfs; ++j) row.push_back(static_cast<LfVote>(int(rng() % 4) - 1));
    auto fast = posterior(params, row);
    auto slow = brute_force_posterior(params, row);
    for (int y = 0; y < kNumClasses; ++y) {
      CHECK(fast.probs[y] == doctest::Approx(slow.probs[y]).epsilon(1e-9));
    }
  }
}

TEST_CASE("posterior special cases") {
  std::mt19937_64 rng(3);
  auto params = random_params(rng, 1);
  params.class_prior = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  // near-identity conditionals on the vote columns
  for (int y = 0; y < kNumClasses; ++y) {
    params.conditionals[0].p[y] = {1e-6, 1e-6, 1e-6, 1e-6};
    params.conditionals[0].p[y][y + 1] = 1.0 - 3e-6;
  }
  auto soft = posterior(params, votes({LfVote::Positive}));
  CHECK(soft.probs[2] > 0.999);

  // abstain probability independent of y leaves the prior untouched
  LabelModelParams flat = random_params(rng, 2);
  for (int j = 0; j < 2; ++j) {
    for (int y = 0; y < kNumClasses; ++y) flat.conditionals[j].p[y] = {0.7, 0.1, 0.1, 0.1};
  }
  auto prior_only = posterior(flat, votes({LfVote::Abstain, LfVote::Abstain}));
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(prior_only.probs[y] == doctest::Approx(flat.class_prior[y]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(posterior(params, votes({LfVote::Abstain, LfVote::Abstain})), Error);
}

TEST_CASE("posterior is invariant to rescaling the joint") {
  std::mt19937_64 rng(7);
  auto params = random_params(rng, 3);
  auto scaled = params;
  for (auto& c : scaled.conditionals) {
    for (int y = 0; y < kNumClasses; ++y) {
      for (int v = 0; v < kNumVotes; ++v) c.p[y][v] *= 2.5;  // unnormalized on purpose
    }
  }
  std::vector<LfVote> row = {LfVote::Negative, LfVote::Abstain, LfVote::Positive};
  auto a = posterior(params, row);
  auto b = posterior(scaled, row);
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(a.probs[y] == doctest::Approx(b.probs[y]).epsilon(1e-12));
  }
}

TEST_CASE("posterior is invariant under column permutation") {
  std::mt19937_64 rng(9);
  auto params = random_params(rng, 3);
  std::vector<LfVote> row = {LfVote::Positive, LfVote::Negative, LfVote::Abstain};

  LabelModelParams permuted = params;
  std::swap(permuted.conditionals[0], permuted.conditionals[2]);
  std::vector<LfVote> permuted_row = {row[2], row[1], row[0]};

  auto a = posterior(params, row);
  auto b = posterior(permuted, permuted_row);
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(a.probs[y] == doctest::Approx(b.probs[y]).epsilon(1e-12));
  }
}

TEST_CASE("fit_em recovers known conditionals from sampled votes") {
  SynthSpec spec;
  spec.n_samples = 50000;
  spec.class_prior = {0.5, 0.3, 0.2};
  spec.lf_specs = {accuracy_lf("a", 0.8, 0.1), accuracy_lf("b", 0.7, 0.2),
                   accuracy_lf("c", 0.6, 0.0)};
  spec.seed = 99;
  auto [matrix, gold] = generate_matrix(spec);

  EmTrace trace;
  auto params = fit_em(matrix, {}, &trace);

  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(std::fabs(params.class_prior[y] - spec.class_prior[y]) < 0.02);
    for (std::size_t j = 0; j < spec.lf_specs.size(); ++j) {
      for (int v = 0; v < kNumVotes; ++v) {
        CHECK(std::fabs(params.conditionals[j].p[y][v] - spec.lf_specs[j].conditionals[y][v]) <
              0.02);
      }
    }
  }

  REQUIRE(trace.penalized_objective.size() >= 2);
  for (std::size_t i = 1; i < trace.penalized_objective.size(); ++i) {
    CHECK(trace.penalized_objective[i] >= trace.penalized_objective[i - 1] - 1e-9);
  }
}

TEST_CASE("fit_em fixed points and symmetry") {
  SUBCASE("single perfectly accurate LF converges to near-identity") {
    SynthSpec spec;
    spec.n_samples = 2000;
    spec.class_prior = {0.4, 0.3, 0.3};
    spec.lf_specs = {accuracy_lf("perfect", 1.0, 0.0)};
    spec.seed = 4;
    auto [matrix, gold] = generate_matrix(spec);
    auto params = fit_em(matrix);
    for (int y = 0; y < kNumClasses; ++y) {
      CHECK(params.conditionals[0].p[y][y + 1] > 0.99);
    }
  }

  SUBCASE("duplicated columns learn identical conditionals") {
    SynthSpec spec;
    spec.n_samples = 4000;
    spec.class_prior = {0.5, 0.25, 0.25};
    spec.lf_specs = {accuracy_lf("one", 0.75, 0.1)};
    spec.seed = 12;
    auto [matrix, gold] = generate_matrix(spec);

    LabelMatrix doubled;
    doubled.sample_ids = matrix.sample_ids;
    doubled.lf_names = {"one", "two"};
    doubled.votes.reserve(matrix.votes.size() * 2);
    for (int8_t v : matrix.votes) {
      doubled.votes.push_back(v);
      doubled.votes.push_back(v);
    }
    auto params = fit_em(doubled);
    for (int y = 0; y < kNumClasses; ++y) {
      for (int v = 0; v < kNumVotes; ++v) {
        CHECK(params.conditionals[0].p[y][v] ==
              doctest::Approx(params.conditionals[1].p[y][v]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("fit_em can hold the class prior fixed") {
  SynthSpec spec;
  spec.n_samples = 5000;
  spec.class_prior = {0.6, 0.25, 0.15};
  spec.lf_specs = {accuracy_lf("a", 0.75, 0.1), accuracy_lf("b", 0.65, 0.0)};
  spec.seed = 77;
  auto [matrix, gold] = generate_matrix(spec);

  EmConfig cfg;
  cfg.fixed_prior = {{1.0 / 3, 1.0 / 3, 1.0 / 3}};
  auto params = fit_em(matrix, cfg);
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(params.class_prior[y] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  }
  // conditionals still get learned
  CHECK(params.conditionals[0].p[0][1] > 0.5);

  EmConfig bad;
  bad.fixed_prior = {{0.9, 0.2, 0.1}};
  CHECK_THROWS_AS(fit_em(matrix, bad), Error);
}

TEST_CASE("fit_em rejects degenerate input") {
  LabelMatrix tiny;
  tiny.lf_names = {"a"};
  tiny.sample_ids = {{"s", 0}};
  tiny.votes = {int8_t(LfVote::Positive)};
  CHECK_THROWS_AS(fit_em(tiny), Error);

  // all votes positive: two classes get no mass at initialization
  LabelMatrix onehot;
  onehot.lf_names = {"a"};
  for (int i = 0; i < 4; ++i) {
    onehot.sample_ids.push_back({"s", i});
    onehot.votes.push_back(int8_t(LfVote::Positive));
  }
  EmConfig no_smoothing;
  no_smoothing.smoothing = false;
  CHECK_THROWS_AS(fit_em(onehot, no_smoothing), Error);
  CHECK_NOTHROW(fit_em(onehot));  // smoothing resolves it

  auto params = fit_em(onehot);
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(params.class_prior[y] >= 1e-6);
    for (int v = 0; v < kNumVotes; ++v) CHECK(params.conditionals[0].p[y][v] >= 1e-6);
  }
}

TEST_CASE("weak_label_dataset takes the posterior argmax with neutral-first ties") {
  SoftLabel tie;
  tie.probs = {0.25, 0.25, 0.5};
  CHECK(hard_label(tie) == SentimentLabel::Positive);
  tie.probs = {0.5, 0.5, 0.0};
  CHECK(hard_label(tie) == SentimentLabel::Neutral);
  tie.probs = {0.5, 0.2, 0.5};
  CHECK(hard_label(tie) == SentimentLabel::Negative);
  tie.probs = {0.2, 0.2, 0.6};
  CHECK(hard_label(tie) == SentimentLabel::Positive);

  std::mt19937_64 rng(31);
  auto params = random_params(rng, 2);
  LabelMatrix m;
  m.lf_names = {"lf0", "lf1"};
  m.sample_ids = {{"x", 0}, {"x", 1}};
  m.votes = {int8_t(LfVote::Positive), int8_t(LfVote::Abstain), int8_t(LfVote::Negative),
             int8_t(LfVote::Negative)};
  auto weak = weak_label_dataset(m, params);
  REQUIRE(weak.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    auto expect = brute_force_posterior(params, m.row(i));
    for (int y = 0; y < kNumClasses; ++y) {
      CHECK(weak[i].soft.probs[y] == doctest::Approx(expect.probs[y]).epsilon(1e-9));
    }
    CHECK(weak[i].hard == hard_label(weak[i].soft));
  }
}

TEST_CASE("weak_label_dataset aligns matrix columns to params by name") {
  std::mt19937_64 rng(41);
  auto params = random_params(rng, 2);
  params.conditionals[0].lf_name = "b";
  params.conditionals[1].lf_name = "a";

  LabelMatrix m;
  m.lf_names = {"a", "b"};
  m.sample_ids = {{"x", 0}};
  m.votes = {int8_t(LfVote::Positive), int8_t(LfVote::Negative)};

  auto weak = weak_label_dataset(m, params);
  auto direct = posterior(params, votes({LfVote::Negative, LfVote::Positive}));  // params order
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(weak[0].soft.probs[y] == doctest::Approx(direct.probs[y]).epsilon(1e-12));
  }

  m.lf_names = {"a", "zz"};
  CHECK_THROWS_AS(weak_label_dataset(m, params), Error);
}

TEST_CASE("params and weak labels serialize and reload") {
  std::mt19937_64 rng(55);
  auto params = random_params(rng, 3);
  testutil::TempDir tmp;
  save_params(params, tmp.file("p.json"));
  auto back = load_params(tmp.file("p.json"));
  REQUIRE(back.conditionals.size() == 3);
  for (int y = 0; y < kNumClasses; ++y) {
    CHECK(back.class_prior[y] == params.class_prior[y]);  // exact JSON round trip
  }

  std::vector<WeakLabel> weak = {{{"s", 0}, SoftLabel{{0.2, 0.3, 0.5}}, SentimentLabel::Positive},
                                 {{"s", 1}, SoftLabel{{1.0, 0.0, 0.0}}, SentimentLabel::Negative}};
  save_weak_labels(weak, tmp.file("w.jsonl"));
  auto loaded = load_weak_labels(tmp.file("w.jsonl"));
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].soft.probs[2] == 0.5);
  CHECK(loaded[1].hard == SentimentLabel::Negative);
  CHECK(loaded[0].sample_id == SampleId{"s", 0});
}
