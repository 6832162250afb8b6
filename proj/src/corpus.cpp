#include "corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace chatsent {

using nlohmann::json;

const char* to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Negative: return "negative";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Positive: return "positive";
  }
  return "?";
}

const char* to_string(Speaker speaker) {
  return speaker == Speaker::Customer ? "customer" : "agent";
}

const char* to_string(Resolution resolution) {
  switch (resolution) {
    case Resolution::Resolved: return "resolved";
    case Resolution::CustomerLeft: return "customer_left";
    case Resolution::AlternativeSolution: return "alternative_solution";
  }
  return "?";
}

SentimentLabel sentiment_from_string(const std::string& name) {
  if (name == "negative") return SentimentLabel::Negative;
  if (name == "neutral") return SentimentLabel::Neutral;
  if (name == "positive") return SentimentLabel::Positive;
  raise(ErrCode::schema_error, "unknown sentiment label: '" + name + "'");
}

Speaker speaker_from_string(const std::string& name) {
  if (name == "customer") return Speaker::Customer;
  if (name == "agent") return Speaker::Agent;
  raise(ErrCode::unknown_speaker, "unknown speaker: '" + name + "'");
}

Resolution resolution_from_string(const std::string& name) {
  if (name == "resolved") return Resolution::Resolved;
  if (name == "customer_left") return Resolution::CustomerLeft;
  if (name == "alternative_solution") return Resolution::AlternativeSolution;
  raise(ErrCode::schema_error, "unknown resolution: '" + name + "'");
}

std::string SampleId::str() const {
  return session_id + ":" + std::to_string(turn_index);
}

SampleId SampleId::parse(const std::string& text) {
  auto pos = text.rfind(':');
  if (pos == std::string::npos || pos + 1 == text.size()) {
    raise(ErrCode::schema_error, "malformed sample id: '" + text + "'");
  }
  SampleId id;
  id.session_id = text.substr(0, pos);
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      raise(ErrCode::schema_error, "malformed sample id: '" + text + "'");
    }
  }
  id.turn_index = std::stoi(text.substr(pos + 1));
  return id;
}

namespace {

bool is_space_codepoint(uint32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0xA0: case 0x1680: case 0x2028: case 0x2029: case 0x202F:
    case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes one UTF-8 code point; invalid bytes fall back to their byte value
// so tokenization stays total on arbitrary input.
uint32_t next_codepoint(const std::string& s, std::size_t i, std::size_t* len) {
  unsigned char b = static_cast<unsigned char>(s[i]);
  std::size_t n = 0;
  uint32_t cp = 0;
  if (b < 0x80) {
    *len = 1;
    return b;
  } else if ((b & 0xE0) == 0xC0) {
    n = 1;
    cp = b & 0x1F;
  } else if ((b & 0xF0) == 0xE0) {
    n = 2;
    cp = b & 0x0F;
  } else if ((b & 0xF8) == 0xF0) {
    n = 3;
    cp = b & 0x07;
  } else {
    *len = 1;
    return b;
  }
  if (i + n >= s.size()) {
    *len = 1;
    return b;
  }
  for (std::size_t k = 1; k <= n; ++k) {
    unsigned char c = static_cast<unsigned char>(s[i + k]);
    if ((c & 0xC0) != 0x80) {
      *len = 1;
      return b;
    }
    cp = (cp << 6) | (c & 0x3F);
  }
  *len = n + 1;
  return cp;
}

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool token_is_upper(const std::string& s) {
  bool has_alpha = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      has_alpha = true;
      if (!std::isupper(u)) return false;
    }
  }
  return has_alpha;
}

std::string trim_copy(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void emit_chunk(const std::string& chunk, std::vector<std::string>* out) {
  std::size_t begin = 0, end = chunk.size();
  std::vector<std::string> lead, trail;
  while (begin < end && is_ascii_punct(chunk[begin])) {
    lead.emplace_back(1, chunk[begin]);
    ++begin;
  }
  while (end > begin && is_ascii_punct(chunk[end - 1])) {
    trail.emplace_back(1, chunk[end - 1]);
    --end;
  }
  std::reverse(trail.begin(), trail.end());
  for (auto& t : lead) out->push_back(std::move(t));
  if (end > begin) out->push_back(chunk.substr(begin, end - begin));
  for (auto& t : trail) out->push_back(std::move(t));
}

}  // namespace

TokenSequence tokenize(const std::string& text, std::size_t max_tokens) {
  std::vector<std::string> raw;
  std::string chunk;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = 1;
    uint32_t cp = next_codepoint(text, i, &len);
    if (is_space_codepoint(cp)) {
      if (!chunk.empty()) {
        emit_chunk(chunk, &raw);
        chunk.clear();
      }
    } else {
      chunk.append(text, i, len);
    }
    i += len;
  }
  if (!chunk.empty()) emit_chunk(chunk, &raw);

  TokenSequence seq;
  seq.exclamation_count = 0;
  for (auto it = raw.rbegin(); it != raw.rend() && *it == "!"; ++it) {
    ++seq.exclamation_count;
  }
  if (raw.size() > max_tokens) raw.resize(max_tokens);
  seq.raw = std::move(raw);
  seq.tokens.reserve(seq.raw.size());
  seq.is_upper.reserve(seq.raw.size());
  for (const auto& t : seq.raw) {
    seq.tokens.push_back(ascii_lower(t));
    seq.is_upper.push_back(token_is_upper(t) ? 1 : 0);
  }
  return seq;
}

namespace {

struct SessionAccum {
  std::vector<Utterance> utterances;
  std::optional<Resolution> resolution;
};

Utterance parse_record(const json& j, std::size_t line_no, std::optional<Resolution>* resolution) {
  auto fail = [&](const std::string& what) -> void {
    raise(ErrCode::malformed_record,
          "line " + std::to_string(line_no) + ": " + what);
  };

  if (!j.is_object()) fail("record is not a JSON object");
  Utterance u;
  if (!j.contains("session_id") || !j["session_id"].is_string()) fail("missing string field 'session_id'");
  u.session_id = j["session_id"].get<std::string>();
  if (u.session_id.empty()) fail("empty session_id");
  if (!j.contains("turn_index") || !j["turn_index"].is_number_integer()) fail("missing integer field 'turn_index'");
  long long turn = j["turn_index"].get<long long>();
  if (turn < 0) fail("negative turn_index");
  u.turn_index = static_cast<int>(turn);
  if (!j.contains("speaker") || !j["speaker"].is_string()) fail("missing string field 'speaker'");
  try {
    u.speaker = speaker_from_string(j["speaker"].get<std::string>());
  } catch (const Error& e) {
    raise(ErrCode::unknown_speaker, "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!j.contains("text") || !j["text"].is_string()) fail("missing string field 'text'");
  u.text = j["text"].get<std::string>();
  if (trim_copy(u.text).empty()) {
    raise(ErrCode::empty_text, "line " + std::to_string(line_no) + ": empty text");
  }
  if (j.contains("gold_label") && !j["gold_label"].is_null()) {
    if (!j["gold_label"].is_string()) fail("gold_label must be a string");
    try {
      u.gold_label = sentiment_from_string(j["gold_label"].get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (j.contains("resolution") && !j["resolution"].is_null()) {
    if (!j["resolution"].is_string()) fail("resolution must be a string");
    try {
      *resolution = resolution_from_string(j["resolution"].get<std::string>());
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  return u;
}

}  // namespace

Corpus load_corpus_stream(std::istream& in, const std::string& origin) {
  std::map<std::string, SessionAccum> sessions;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim_copy(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      raise(ErrCode::malformed_record,
            origin + ": line " + std::to_string(line_no) + ": invalid JSON");
    }
    std::optional<Resolution> resolution;
    Utterance u = parse_record(j, line_no, &resolution);
    auto& acc = sessions[u.session_id];
    if (resolution) acc.resolution = resolution;  // last non-null wins
    acc.utterances.push_back(std::move(u));
  }

  Corpus corpus;
  corpus.reserve(sessions.size());
  for (auto& [sid, acc] : sessions) {
    std::sort(acc.utterances.begin(), acc.utterances.end(),
              [](const Utterance& a, const Utterance& b) { return a.turn_index < b.turn_index; });
    bool has_customer = false;
    for (std::size_t k = 0; k < acc.utterances.size(); ++k) {
      int turn = acc.utterances[k].turn_index;
      if (k > 0 && turn == acc.utterances[k - 1].turn_index) {
        raise(ErrCode::duplicate_turn,
              "session '" + sid + "': duplicate turn_index " + std::to_string(turn));
      }
      if (turn != static_cast<int>(k)) {
        raise(ErrCode::non_dense_turns,
              "session '" + sid + "': turn indexes are not dense from 0");
      }
      if (acc.utterances[k].speaker == Speaker::Customer) has_customer = true;
    }
    if (!has_customer) {
      raise(ErrCode::no_customer_utterance,
            "session '" + sid + "' has no customer utterance");
    }
    ChatSession session;
    session.session_id = sid;
    session.utterances = std::move(acc.utterances);
    session.resolution = acc.resolution;
    corpus.push_back(std::move(session));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path, CorpusFormat) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrCode::io_error, "cannot open corpus file: " + path);
  return load_corpus_stream(in, path);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& session : corpus) {
    for (std::size_t k = 0; k < session.utterances.size(); ++k) {
      const Utterance& u = session.utterances[k];
      json j;
      j["session_id"] = u.session_id;
      j["turn_index"] = u.turn_index;
      j["speaker"] = to_string(u.speaker);
      j["text"] = u.text;
      if (u.gold_label) j["gold_label"] = to_string(*u.gold_label);
      if (session.resolution && k + 1 == session.utterances.size()) {
        j["resolution"] = to_string(*session.resolution);
      }
      out += j.dump();
      out += '\n';
    }
  }
  return out;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrCode::io_error, "cannot write corpus file: " + path);
  out << corpus_to_jsonl(corpus);
  if (!out) raise(ErrCode::io_error, "error writing corpus file: " + path);
}

std::vector<Utterance> customer_utterances(const Corpus& corpus) {
  std::vector<Utterance> out;
  for (const auto& session : corpus) {
    for (const auto& u : session.utterances) {
      if (u.speaker == Speaker::Customer) out.push_back(u);
    }
  }
  return out;
}

std::size_t utterance_count(const Corpus& corpus) {
  std::size_t n = 0;
  for (const auto& session : corpus) n += session.utterances.size();
  return n;
}

}  // namespace chatsent
