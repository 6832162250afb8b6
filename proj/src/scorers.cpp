#include "scorers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace chatsent {

namespace {

constexpr double kNegationScalar = -0.74;
constexpr double kCapsIncrement = 0.733;
constexpr double kExclaimIncrement = 0.292;
constexpr int kMaxExclaims = 3;
constexpr double kCompoundAlpha = 15.0;
constexpr double kPatternNegationScalar = -0.5;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t begin, std::size_t n) {
  std::string out = tokens[begin];
  for (std::size_t k = 1; k < n; ++k) {
    out += ' ';
    out += tokens[begin + k];
  }
  return out;
}

// True when the sentence mixes all-caps and normally cased word tokens.
bool caps_differential(const TokenSequence& seq) {
  std::size_t upper = 0, alpha = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    bool has_alpha = std::any_of(seq.raw[i].begin(), seq.raw[i].end(), [](char c) {
      return std::isalpha(static_cast<unsigned char>(c)) != 0;
    });
    if (!has_alpha) continue;
    ++alpha;
    if (seq.is_upper[i]) ++upper;
  }
  return upper > 0 && upper < alpha;
}

}  // namespace

SentimentScore afinn_score(const TokenSequence& tokens, const ValenceLexicon& lex) {
  long long sum = 0;
  std::size_t matches = 0;
  std::size_t i = 0;
  const std::size_t n = tokens.size();
  while (i < n) {
    bool matched = false;
    for (std::size_t len = std::min<std::size_t>(3, n - i); len >= 1; --len) {
      auto it = lex.entries.find(join_tokens(tokens.tokens, i, len));
      if (it != lex.entries.end()) {
        sum += it->second;
        ++matches;
        i += len;
        matched = true;
        break;
      }
    }
    if (!matched) ++i;
  }
  SentimentScore score;
  score.raw = static_cast<double>(sum);
  score.normalized = matches == 0 ? 0.0 : clamp_unit(score.raw / (5.0 * static_cast<double>(matches)));
  return score;
}

SentimentScore vader_score(const TokenSequence& tokens, const RuleLexicon& lex) {
  const std::size_t n = tokens.size();
  const bool mixed_case = caps_differential(tokens);

  std::size_t but_pos = n;  // first "but", if any
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens.tokens[i] == "but") {
      but_pos = i;
      break;
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto it = lex.entries.find(tokens.tokens[i]);
    if (it == lex.entries.end()) continue;
    double v = it->second;
    const int s = sign_of(v);

    if (s != 0 && tokens.is_upper[i] && mixed_case) {
      v += s * kCapsIncrement;
    }
    if (s != 0) {
      for (std::size_t d = 1; d <= 2 && d <= i; ++d) {
        auto b = lex.boosters.find(tokens.tokens[i - d]);
        if (b != lex.boosters.end()) v += s * b->second;
      }
    }
    for (std::size_t d = 1; d <= 3 && d <= i; ++d) {
      if (lex.negators.count(tokens.tokens[i - d])) {
        v *= kNegationScalar;
        break;
      }
    }
    if (but_pos < n) {
      if (i < but_pos) v *= 0.5;
      else if (i > but_pos) v *= 1.5;
    }
    sum += v;
  }

  const int excl = std::min(tokens.exclamation_count, kMaxExclaims);
  if (excl > 0) sum += sign_of(sum) * kExclaimIncrement * excl;

  SentimentScore score;
  score.raw = sum;
  score.normalized = clamp_unit(sum / std::sqrt(sum * sum + kCompoundAlpha));
  return score;
}

SentimentScore pattern_polarity(const TokenSequence& tokens, const PolarityLexicon& lex) {
  static const char* kNegators[] = {"not", "never", "no"};

  double total = 0.0;
  std::size_t matches = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto it = lex.entries.find(tokens.tokens[i]);
    if (it == lex.entries.end() || it->second.is_intensifier) continue;
    double p = it->second.polarity;
    if (i > 0) {
      auto prev = lex.entries.find(tokens.tokens[i - 1]);
      if (prev != lex.entries.end() && prev->second.is_intensifier) {
        p *= prev->second.intensity;
      }
    }
    for (std::size_t d = 1; d <= 2 && d <= i; ++d) {
      const std::string& t = tokens.tokens[i - d];
      if (std::any_of(std::begin(kNegators), std::end(kNegators),
                      [&](const char* neg) { return t == neg; })) {
        p *= kPatternNegationScalar;
        break;
      }
    }
    total += p;
    ++matches;
  }

  SentimentScore score;
  score.raw = matches == 0 ? 0.0 : total / static_cast<double>(matches);
  score.normalized = clamp_unit(score.raw);
  return score;
}

SentimentLabel map_score(const SentimentScore& score, const ScoreThresholds& thresholds) {
  const double x = thresholds.on_raw ? score.raw : score.normalized;
  if (x < thresholds.neg_below) return SentimentLabel::Negative;
  if (x > thresholds.pos_above) return SentimentLabel::Positive;
  return SentimentLabel::Neutral;
}

}  // namespace chatsent
