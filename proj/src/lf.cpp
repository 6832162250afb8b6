#include "lf.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

std::vector<LabelingFunction> standard_lfs(const ThresholdSet& thresholds) {
  for (const auto* t : {&thresholds.pattern, &thresholds.afinn, &thresholds.vader}) {
    if (t->neg_below > t->pos_above) {
      raise(ErrCode::invalid_config, "thresholds require neg_below <= pos_above");
    }
  }
  std::vector<LabelingFunction> lfs;
  lfs.push_back({"pattern", ScorerLfConfig{ScorerKind::Pattern, thresholds.pattern}});
  lfs.push_back({"afinn", ScorerLfConfig{ScorerKind::Afinn, thresholds.afinn}});
  lfs.push_back({"vader", ScorerLfConfig{ScorerKind::Vader, thresholds.vader}});
  lfs.push_back({"domain_neg", DomainTermLfConfig{SentimentLabel::Negative}});
  lfs.push_back({"domain_pos", DomainTermLfConfig{SentimentLabel::Positive}});
  return lfs;
}

namespace {

bool any_phrase_match(const TokenSequence& tokens, const std::set<std::string>& terms) {
  const std::size_t n = tokens.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string phrase;
    for (std::size_t len = 1; len <= 3 && i + len <= n; ++len) {
      if (len == 1) {
        phrase = tokens.tokens[i];
      } else {
        phrase += ' ';
        phrase += tokens.tokens[i + len - 1];
      }
      if (terms.count(phrase)) return true;
    }
  }
  return false;
}

}  // namespace

LfVote apply_lf(const LabelingFunction& lf, const Lexicons& lexicons, const Utterance& utterance) {
  TokenSequence tokens = tokenize(utterance.text);
  if (const auto* scorer = std::get_if<ScorerLfConfig>(&lf.config)) {
    SentimentScore score;
    switch (scorer->scorer) {
      case ScorerKind::Pattern: score = pattern_polarity(tokens, lexicons.polarity); break;
      case ScorerKind::Afinn: score = afinn_score(tokens, lexicons.valence); break;
      case ScorerKind::Vader: score = vader_score(tokens, lexicons.rules); break;
    }
    return vote_from_label(map_score(score, scorer->thresholds));
  }
  const auto& domain = std::get<DomainTermLfConfig>(lf.config);
  const DomainTermList& terms = domain.label == SentimentLabel::Negative
                                    ? lexicons.negative_terms
                                    : lexicons.positive_terms;
  return any_phrase_match(tokens, terms.terms) ? vote_from_label(domain.label) : LfVote::Abstain;
}

std::vector<LfVote> LabelMatrix::row(std::size_t r) const {
  std::vector<LfVote> out(lf_names.size());
  for (std::size_t j = 0; j < lf_names.size(); ++j) out[j] = at(r, j);
  return out;
}

LabelMatrix build_label_matrix(const std::vector<LabelingFunction>& lfs, const Lexicons& lexicons,
                               const std::vector<Utterance>& utterances) {
  if (lfs.empty()) raise(ErrCode::empty_input, "no labeling functions");
  if (utterances.empty()) raise(ErrCode::empty_input, "no utterances");
  for (std::size_t a = 0; a < lfs.size(); ++a) {
    for (std::size_t b = a + 1; b < lfs.size(); ++b) {
      if (lfs[a].name == lfs[b].name) {
        raise(ErrCode::invalid_config, "duplicate labeling function name '" + lfs[a].name + "'");
      }
    }
  }

  LabelMatrix m;
  m.lf_names.reserve(lfs.size());
  for (const auto& lf : lfs) m.lf_names.push_back(lf.name);
  m.sample_ids.reserve(utterances.size());
  m.votes.resize(utterances.size() * lfs.size());
  for (std::size_t i = 0; i < utterances.size(); ++i) {
    m.sample_ids.push_back(utterances[i].id());
    for (std::size_t j = 0; j < lfs.size(); ++j) {
      m.votes[i * lfs.size() + j] =
          static_cast<int8_t>(apply_lf(lfs[j], lexicons, utterances[i]));
    }
  }
  return m;
}

namespace {

bool needs_csv_quotes(const std::string& field) {
  return field.find_first_of(",\"\n\r") != std::string::npos;
}

std::string csv_escape(const std::string& field) {
  if (!needs_csv_quotes(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV line honouring double-quoted fields.
std::vector<std::string> csv_split(const std::string& line, const std::string& where) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) raise(ErrCode::schema_error, where + ": unterminated quote");
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string matrix_to_csv(const LabelMatrix& matrix) {
  std::string out = "sample_id";
  for (const auto& name : matrix.lf_names) {
    out += ',';
    out += csv_escape(name);
  }
  out += '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    out += csv_escape(matrix.sample_ids[i].str());
    for (std::size_t j = 0; j < matrix.cols(); ++j) {
      out += ',';
      out += std::to_string(static_cast<int>(matrix.at(i, j)));
    }
    out += '\n';
  }
  return out;
}

void save_matrix_csv(const LabelMatrix& matrix, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrCode::io_error, "cannot write matrix file: " + path);
  out << matrix_to_csv(matrix);
  if (!out) raise(ErrCode::io_error, "error writing matrix file: " + path);
}

LabelMatrix load_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open matrix file: " + path);

  LabelMatrix m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = path + ": line " + std::to_string(line_no);
    auto fields = csv_split(line, where);
    if (line_no == 1) {
      if (fields.size() < 2 || fields[0] != "sample_id") {
        raise(ErrCode::schema_error, where + ": expected header sample_id,<lf names...>");
      }
      m.lf_names.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != m.lf_names.size() + 1) {
      raise(ErrCode::schema_error, where + ": wrong number of columns");
    }
    m.sample_ids.push_back(SampleId::parse(fields[0]));
    for (std::size_t j = 1; j < fields.size(); ++j) {
      int v = 0;
      try {
        std::size_t pos = 0;
        v = std::stoi(fields[j], &pos);
        if (pos != fields[j].size()) throw std::invalid_argument(fields[j]);
      } catch (const std::exception&) {
        raise(ErrCode::schema_error, where + ": vote is not an integer");
      }
      if (v < -1 || v > 2) raise(ErrCode::schema_error, where + ": vote outside {-1,0,1,2}");
      m.votes.push_back(static_cast<int8_t>(v));
    }
  }
  if (m.lf_names.empty()) raise(ErrCode::schema_error, path + ": missing header");
  if (m.sample_ids.empty()) raise(ErrCode::empty_input, path + ": matrix has no rows");
  return m;
}

LfDiagnostics diagnostics(const LabelMatrix& matrix,
                          const std::vector<std::optional<SentimentLabel>>* gold) {
  if (gold && gold->size() != matrix.rows()) {
    raise(ErrCode::length_mismatch, "gold labels do not align with the matrix rows");
  }
  LfDiagnostics d;
  d.n_samples = matrix.rows();
  const std::size_t n = matrix.rows();
  const std::size_t k = matrix.cols();
  for (std::size_t j = 0; j < k; ++j) {
    LfStats stats;
    stats.name = matrix.lf_names[j];
    std::size_t covered = 0, overlapped = 0, conflicted = 0, graded = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      LfVote v = matrix.at(i, j);
      if (v == LfVote::Abstain) continue;
      ++covered;
      bool other_votes = false, other_disagrees = false;
      for (std::size_t o = 0; o < k; ++o) {
        if (o == j) continue;
        LfVote w = matrix.at(i, o);
        if (w == LfVote::Abstain) continue;
        other_votes = true;
        if (w != v) other_disagrees = true;
      }
      if (other_votes) ++overlapped;
      if (other_disagrees) ++conflicted;
      if (gold && (*gold)[i]) {
        ++graded;
        if (label_from_vote(v) == *(*gold)[i]) ++correct;
      }
    }
    if (n > 0) stats.coverage = static_cast<double>(covered) / static_cast<double>(n);
    if (covered > 0) {
      stats.overlap = static_cast<double>(overlapped) / static_cast<double>(covered);
      stats.conflict = static_cast<double>(conflicted) / static_cast<double>(covered);
    }
    if (graded > 0) {
      stats.empirical_accuracy = static_cast<double>(correct) / static_cast<double>(graded);
    }
    d.lfs.push_back(std::move(stats));
  }
  return d;
}

std::string diagnostics_to_json(const LfDiagnostics& d) {
  json j;
  j["n_samples"] = d.n_samples;
  json lfs = json::object();
  for (const auto& s : d.lfs) {
    json e;
    e["coverage"] = s.coverage;
    e["overlap"] = s.overlap;
    e["conflict"] = s.conflict;
    if (s.empirical_accuracy) e["empirical_accuracy"] = *s.empirical_accuracy;
    lfs[s.name] = e;
  }
  j["lfs"] = lfs;
  return j.dump(2) + "\n";
}

}  // namespace chatsent
