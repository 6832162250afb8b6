#pragma once

#include <map>
#include <set>
#include <string>

#include "corpus.hpp"

namespace chatsent {

// Term sum lexicon: lowercase 1-3 word phrases mapped to integer valence in
// [-5, +5], zero excluded.
struct ValenceLexicon {
  std::map<std::string, int> entries;
};

struct PolarityEntry {
  double polarity = 0.0;       // in [-1, +1]
  double intensity = 1.0;      // multiplier applied to the following entry
  bool is_intensifier = false;
};

struct PolarityLexicon {
  std::map<std::string, PolarityEntry> entries;
};

// Rule lexicon: real valences in [-4, +4], booster increments with |v| < 1,
// and a negator word set.
struct RuleLexicon {
  std::map<std::string, double> entries;
  std::map<std::string, double> boosters;
  std::set<std::string> negators;
};

struct DomainTermList {
  SentimentLabel label = SentimentLabel::Negative;  // Positive or Negative only
  std::set<std::string> terms;                      // lowercase 1-3 word phrases
};

// Lowercase and collapse internal whitespace runs to single spaces.
std::string normalize_phrase(const std::string& phrase);

// TSV, one "term<TAB>integer" row per line.
ValenceLexicon load_valence_lexicon(const std::string& path);

// Plain text, one phrase per line, '#' starts a comment.
DomainTermList load_domain_terms(const std::string& path, SentimentLabel label);

// JSON {"entries": {...}, "boosters": {...}, "negators": [...]}; boosters and
// negators default to empty.
RuleLexicon load_rule_lexicon(const std::string& path);

// JSON {"entries": {...}} where each entry is either a bare polarity number
// or {"polarity": x, "intensity": y, "is_intensifier": b}. A "subjectivity"
// key is accepted and ignored.
PolarityLexicon load_polarity_lexicon(const std::string& path);

// The bundle the labeling functions run on.
struct Lexicons {
  ValenceLexicon valence;
  RuleLexicon rules;
  PolarityLexicon polarity;
  DomainTermList negative_terms;
  DomainTermList positive_terms;
};

Lexicons load_lexicons(const std::string& valence_path, const std::string& rules_path,
                       const std::string& polarity_path, const std::string& negative_terms_path,
                       const std::string& positive_terms_path);

}  // namespace chatsent
