#include "scorers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "scorer_fixture.hpp"
#include "test_util.hpp"

using namespace chatsent;

namespace {

Lexicons shipped_lexicons() {
  return load_lexicons(testutil::data_path("lexicons/valence.tsv"),
                       testutil::data_path("lexicons/rules.json"),
                       testutil::data_path("lexicons/polarity.json"),
                       testutil::data_path("domain_terms/domain_negative.txt"),
                       testutil::data_path("domain_terms/domain_positive.txt"));
}

}  // namespace

TEST_CASE("afinn_score sums valences with greedy phrase matching") {
  ValenceLexicon lex;
  lex.entries = {{"good", 3}, {"terrible", -3}};
  CHECK(afinn_score(tokenize("good good terrible"), lex).raw == 3.0);
  CHECK(afinn_score(tokenize("nothing matches"), lex).raw == 0.0);
  CHECK(afinn_score(tokenize("nothing matches"), lex).normalized == 0.0);

  // longest match wins and consumes its tokens
  ValenceLexicon phrases;
  phrases.entries = {{"fed", 1}, {"fed up", -3}, {"up", 1}};
  CHECK(afinn_score(tokenize("fed up"), phrases).raw == -3.0);
}

TEST_CASE("afinn_score is additive over match-disjoint concatenation") {
  auto lex = shipped_lexicons().valence;
  std::mt19937_64 rng(11);
  std::vector<std::string> words = {"good", "bad",  "ok",    "the", "awesome",
                                    "slow", "wait", "great", "x",   "terrible"};
  for (int trial = 0; trial < 50; ++trial) {
    auto sentence = [&] {
      std::string s;
      int n = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) {
        s += words[rng() % words.size()];
        s += ' ';
      }
      return s;
    };
    std::string a = sentence(), b = sentence();
    // single words only, so no phrase can span the boundary
    double lhs = afinn_score(tokenize(a + " " + b), lex).raw;
    double rhs = afinn_score(tokenize(a), lex).raw + afinn_score(tokenize(b), lex).raw;
    CHECK(lhs == rhs);
  }
}

TEST_CASE("vader_score closed-form compound for a single entry") {
  RuleLexicon lex;
  lex.entries = {{"good", 3.0}};
  auto score = vader_score(tokenize("good"), lex);
  CHECK(score.raw == doctest::Approx(3.0));
  CHECK(score.normalized == doctest::Approx(3.0 / std::sqrt(9.0 + 15.0)).epsilon(1e-12));
  CHECK(score.normalized == doctest::Approx(0.6123724356957945).epsilon(1e-9));

  CHECK(vader_score(tokenize("nothing here"), lex).normalized == 0.0);
}

TEST_CASE("vader compound stays in (-1, 1) and flips under lexicon negation") {
  auto rules = shipped_lexicons().rules;
  RuleLexicon negated = rules;
  for (auto& [term, v] : negated.entries) v = -v;

  std::mt19937_64 rng(5);
  std::vector<std::string> words;
  for (const auto& [term, v] : rules.entries) words.push_back(term);
  words.insert(words.end(), {"the", "is", "was", "very", "not"});

  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      text += words[rng() % words.size()];
      text += ' ';
    }
    auto seq = tokenize(text);
    auto a = vader_score(seq, rules);
    auto b = vader_score(seq, negated);
    CHECK(a.normalized > -1.0);
    CHECK(a.normalized < 1.0);
    // no caps/exclamation in these sentences, so the score is odd
    CHECK(a.normalized == doctest::Approx(-b.normalized).epsilon(1e-12));
  }
}

TEST_CASE("pattern_polarity averages, intensifies, and negates") {
  PolarityLexicon lex;
  lex.entries["great"] = {0.8, 1.0, false};
  lex.entries["very"] = {0.2, 1.3, true};
  CHECK(pattern_polarity(tokenize("great"), lex).normalized == doctest::Approx(0.8));
  CHECK(pattern_polarity(tokenize("not great"), lex).normalized == doctest::Approx(-0.4));
  CHECK(pattern_polarity(tokenize("very great"), lex).raw ==
        doctest::Approx(0.8 * 1.3).epsilon(1e-12));
  CHECK(pattern_polarity(tokenize("very great"), lex).normalized == 1.0);  // clamped
  CHECK(pattern_polarity(tokenize("nothing"), lex).normalized == 0.0);
}

TEST_CASE("pattern_polarity matches a brute-force enumeration") {
  auto lex = shipped_lexicons().polarity;
  std::mt19937_64 rng(17);
  std::vector<std::string> words = {"great", "good",  "bad",  "not",   "never", "no",
                                    "very",  "really", "the",  "was",   "slow",  "happy"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> toks;
    int n = 1 + static_cast<int>(rng() % 9);
    for (int i = 0; i < n; ++i) toks.push_back(words[rng() % words.size()]);
    std::string text;
    for (const auto& t : toks) {
      text += t;
      text += ' ';
    }

    // enumerate matched entries directly from the definition
    double total = 0.0;
    int matches = 0;
    for (int i = 0; i < n; ++i) {
      auto it = lex.entries.find(toks[i]);
      if (it == lex.entries.end() || it->second.is_intensifier) continue;
      double p = it->second.polarity;
      if (i > 0) {
        auto prev = lex.entries.find(toks[i - 1]);
        if (prev != lex.entries.end() && prev->second.is_intensifier) p *= prev->second.intensity;
      }
      for (int d = 1; d <= 2 && i - d >= 0; ++d) {
        if (toks[i - d] == "not" || toks[i - d] == "never" || toks[i - d] == "no") {
          p *= -0.5;
          break;
        }
      }
      total += p;
      ++matches;
    }
    double expected = matches ? total / matches : 0.0;
    expected = std::clamp(expected, -1.0, 1.0);
    CHECK(pattern_polarity(tokenize(text), lex).normalized == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("map_score uses strict inequalities") {
  ScoreThresholds t{0.1, -0.1, false};
  CHECK(map_score({0.0, -0.05}, t) == SentimentLabel::Neutral);
  CHECK(map_score({0.0, 0.1}, t) == SentimentLabel::Neutral);  // boundary -> neutral
  CHECK(map_score({0.0, 0.11}, t) == SentimentLabel::Positive);
  CHECK(map_score({0.0, -0.11}, t) == SentimentLabel::Negative);

  ScoreThresholds raw{0.0, 0.0, true};
  CHECK(map_score({-1.0, 0.9}, raw) == SentimentLabel::Negative);  // raw drives the label
  CHECK(map_score({0.0, 0.9}, raw) == SentimentLabel::Neutral);
}

TEST_CASE("map_score is monotone in the score") {
  ScoreThresholds t{0.2, -0.3, false};
  SentimentLabel prev = SentimentLabel::Negative;
  for (double x = -1.0; x <= 1.0; x += 0.01) {
    SentimentLabel cur = map_score({x, x}, t);
    CHECK(static_cast<int>(cur) >= static_cast<int>(prev));
    prev = cur;
  }
}

TEST_CASE("scorer fixture suite matches the frozen oracle") {
  auto lex = shipped_lexicons();
  for (const auto& c : scorer_fixture::cases()) {
    CAPTURE(c.text);
    auto seq = tokenize(c.text);
    auto a = afinn_score(seq, lex.valence);
    CHECK(a.raw == static_cast<double>(c.afinn_raw));
    CHECK(a.normalized == doctest::Approx(c.afinn_norm).epsilon(1e-9));
    auto v = vader_score(seq, lex.rules);
    CHECK(v.raw == doctest::Approx(c.vader_raw).epsilon(1e-9));
    CHECK(v.normalized == doctest::Approx(c.vader_compound).epsilon(1e-9));
    auto p = pattern_polarity(seq, lex.polarity);
    CHECK(p.normalized == doctest::Approx(c.pattern_polarity).epsilon(1e-9));
  }
}

TEST_CASE("scorers are deterministic") {
  auto lex = shipped_lexicons();
  auto seq = tokenize("really great work but slow");
  for (int i = 0; i < 3; ++i) {
    CHECK(vader_score(seq, lex.rules).normalized == vader_score(seq, lex.rules).normalized);
    CHECK(afinn_score(seq, lex.valence).raw == afinn_score(seq, lex.valence).raw);
  }
}
