#include "lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

namespace {

std::size_t word_count(const std::string& phrase) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : phrase) {
    if (c == ' ') {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++n;
    }
  }
  return n;
}

std::string line_ref(const std::string& path, std::size_t line_no) {
  return path + ": line " + std::to_string(line_no);
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open lexicon file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) raise(ErrCode::schema_error, path + ": invalid JSON");
  if (!j.is_object()) raise(ErrCode::schema_error, path + ": root is not an object");
  return j;
}

}  // namespace

std::string normalize_phrase(const std::string& phrase) {
  std::string out;
  out.reserve(phrase.size());
  bool pending_space = false;
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

ValenceLexicon load_valence_lexicon(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open lexicon file: " + path);

  ValenceLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) {
      raise(ErrCode::schema_error, line_ref(path, line_no) + ": expected term<TAB>score");
    }
    std::string term = normalize_phrase(line.substr(0, tab));
    std::string score_text = line.substr(tab + 1);
    if (term.empty() || word_count(term) > 3) {
      raise(ErrCode::out_of_range, line_ref(path, line_no) + ": term must be a 1-3 word phrase");
    }
    std::size_t pos = 0;
    long score = 0;
    bool ok = !score_text.empty();
    if (ok) {
      try {
        score = std::stol(score_text, &pos);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || pos != score_text.size()) {
      raise(ErrCode::non_integer_valence,
            line_ref(path, line_no) + ": non-integer valence '" + score_text + "'");
    }
    if (score < -5 || score > 5) {
      raise(ErrCode::out_of_range,
            line_ref(path, line_no) + ": valence " + std::to_string(score) + " outside [-5, 5]");
    }
    if (score == 0) {
      raise(ErrCode::zero_valence, line_ref(path, line_no) + ": zero valence for '" + term + "'");
    }
    if (!lex.entries.emplace(term, static_cast<int>(score)).second) {
      raise(ErrCode::duplicate_term, path + ": duplicate term '" + term + "'");
    }
  }
  return lex;
}

DomainTermList load_domain_terms(const std::string& path, SentimentLabel label) {
  if (label == SentimentLabel::Neutral) {
    raise(ErrCode::invalid_config, "domain term lists carry Positive or Negative labels only");
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open term list: " + path);

  DomainTermList list;
  list.label = label;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string term = normalize_phrase(line);
    if (term.empty()) continue;
    if (word_count(term) > 3) {
      raise(ErrCode::out_of_range, line_ref(path, line_no) + ": term must be a 1-3 word phrase");
    }
    list.terms.insert(term);
  }
  if (list.terms.empty()) raise(ErrCode::empty_list, path + ": no terms");
  return list;
}

RuleLexicon load_rule_lexicon(const std::string& path) {
  json j = parse_json_file(path);
  RuleLexicon lex;

  if (j.contains("entries")) {
    if (!j["entries"].is_object()) raise(ErrCode::schema_error, path + ": 'entries' must be an object");
    for (auto& [term, value] : j["entries"].items()) {
      if (!value.is_number()) raise(ErrCode::schema_error, path + ": entry '" + term + "' is not a number");
      double v = value.get<double>();
      if (v < -4.0 || v > 4.0) {
        raise(ErrCode::out_of_range, path + ": valence for '" + term + "' outside [-4, 4]");
      }
      std::string key = normalize_phrase(term);
      if (!lex.entries.emplace(key, v).second) {
        raise(ErrCode::duplicate_term, path + ": duplicate entry '" + key + "'");
      }
    }
  }
  if (j.contains("boosters")) {
    if (!j["boosters"].is_object()) raise(ErrCode::schema_error, path + ": 'boosters' must be an object");
    for (auto& [term, value] : j["boosters"].items()) {
      if (!value.is_number()) raise(ErrCode::schema_error, path + ": booster '" + term + "' is not a number");
      double v = value.get<double>();
      if (v <= -1.0 || v >= 1.0) {
        raise(ErrCode::out_of_range, path + ": booster increment for '" + term + "' must satisfy |v| < 1");
      }
      std::string key = normalize_phrase(term);
      if (!lex.boosters.emplace(key, v).second) {
        raise(ErrCode::duplicate_term, path + ": duplicate booster '" + key + "'");
      }
    }
  }
  if (j.contains("negators")) {
    if (!j["negators"].is_array()) raise(ErrCode::schema_error, path + ": 'negators' must be an array");
    for (const auto& item : j["negators"]) {
      if (!item.is_string()) raise(ErrCode::schema_error, path + ": negators must be strings");
      lex.negators.insert(normalize_phrase(item.get<std::string>()));
    }
  }
  return lex;
}

PolarityLexicon load_polarity_lexicon(const std::string& path) {
  json j = parse_json_file(path);
  if (!j.contains("entries") || !j["entries"].is_object()) {
    raise(ErrCode::schema_error, path + ": missing 'entries' object");
  }
  PolarityLexicon lex;
  for (auto& [term, value] : j["entries"].items()) {
    PolarityEntry entry;
    if (value.is_number()) {
      entry.polarity = value.get<double>();
    } else if (value.is_object()) {
      if (!value.contains("polarity") || !value["polarity"].is_number()) {
        raise(ErrCode::schema_error, path + ": entry '" + term + "' needs a numeric 'polarity'");
      }
      entry.polarity = value["polarity"].get<double>();
      if (value.contains("intensity")) {
        if (!value["intensity"].is_number()) {
          raise(ErrCode::schema_error, path + ": 'intensity' for '" + term + "' is not a number");
        }
        entry.intensity = value["intensity"].get<double>();
      }
      if (value.contains("is_intensifier")) {
        if (!value["is_intensifier"].is_boolean()) {
          raise(ErrCode::schema_error, path + ": 'is_intensifier' for '" + term + "' is not a boolean");
        }
        entry.is_intensifier = value["is_intensifier"].get<bool>();
      }
      // "subjectivity" is accepted but has no consumer.
    } else {
      raise(ErrCode::schema_error, path + ": entry '" + term + "' must be a number or object");
    }
    if (entry.polarity < -1.0 || entry.polarity > 1.0) {
      raise(ErrCode::out_of_range, path + ": polarity for '" + term + "' outside [-1, 1]");
    }
    if (entry.intensity < 0.0) {
      raise(ErrCode::out_of_range, path + ": intensity for '" + term + "' must be >= 0");
    }
    if (entry.is_intensifier && entry.intensity <= 0.0) {
      raise(ErrCode::schema_error, path + ": intensifier '" + term + "' needs intensity > 0");
    }
    std::string key = normalize_phrase(term);
    if (!lex.entries.emplace(key, entry).second) {
      raise(ErrCode::duplicate_term, path + ": duplicate entry '" + key + "'");
    }
  }
  return lex;
}

Lexicons load_lexicons(const std::string& valence_path, const std::string& rules_path,
                       const std::string& polarity_path, const std::string& negative_terms_path,
                       const std::string& positive_terms_path) {
  Lexicons lex;
  lex.valence = load_valence_lexicon(valence_path);
  lex.rules = load_rule_lexicon(rules_path);
  lex.polarity = load_polarity_lexicon(polarity_path);
  lex.negative_terms = load_domain_terms(negative_terms_path, SentimentLabel::Negative);
  lex.positive_terms = load_domain_terms(positive_terms_path, SentimentLabel::Positive);
  return lex;
}

}  // namespace chatsent
