#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chatsent {

enum class SentimentLabel : int { Negative = 0, Neutral = 1, Positive = 2 };
enum class Speaker { Customer, Agent };
enum class Resolution { Resolved, CustomerLeft, AlternativeSolution };

inline constexpr int kNumClasses = 3;

const char* to_string(SentimentLabel label);
const char* to_string(Speaker speaker);
const char* to_string(Resolution resolution);

// Throw schema_error on unknown names.
SentimentLabel sentiment_from_string(const std::string& name);
Speaker speaker_from_string(const std::string& name);
Resolution resolution_from_string(const std::string& name);

struct SampleId {
  std::string session_id;
  int turn_index = 0;

  auto operator<=>(const SampleId&) const = default;

  // Canonical string form "<session_id>:<turn_index>"; parsing splits at the
  // last colon, so session ids may themselves contain colons.
  std::string str() const;
  static SampleId parse(const std::string& text);
};

struct Utterance {
  std::string session_id;
  int turn_index = 0;
  Speaker speaker = Speaker::Customer;
  std::string text;
  std::optional<SentimentLabel> gold_label;

  SampleId id() const { return SampleId{session_id, turn_index}; }
};

struct ChatSession {
  std::string session_id;
  std::vector<Utterance> utterances;  // sorted by turn_index, dense from 0
  std::optional<Resolution> resolution;
};

using Corpus = std::vector<ChatSession>;

inline constexpr std::size_t kMaxTokens = 128;

struct TokenSequence {
  std::vector<std::string> tokens;  // lowercased (ASCII folding)
  std::vector<std::string> raw;     // original casing
  std::vector<char> is_upper;       // token has letters and all are uppercase
  int exclamation_count = 0;        // trailing '!' tokens of the sentence

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

// Deterministic rule tokenizer: splits on whitespace (ASCII plus common
// Unicode space code points), peels leading/trailing ASCII punctuation off
// each chunk into separate single-character tokens, and truncates to
// max_tokens. Total: never fails, empty input gives an empty sequence.
TokenSequence tokenize(const std::string& text, std::size_t max_tokens = kMaxTokens);

enum class CorpusFormat { Jsonl };

// One JSON object per line with keys session_id, turn_index, speaker, text,
// and optional gold_label / resolution. Sessions are grouped by session_id
// (lexicographic order) and validated: dense turn indexes from 0, at least
// one customer utterance, non-empty text.
Corpus load_corpus(const std::string& path, CorpusFormat format = CorpusFormat::Jsonl);
Corpus load_corpus_stream(std::istream& in, const std::string& origin);

// Canonical form: sessions sorted by id, utterances by turn, key-sorted
// compact records, session resolution written on the last utterance only.
std::string corpus_to_jsonl(const Corpus& corpus);
void write_corpus(const Corpus& corpus, const std::string& path);

std::vector<Utterance> customer_utterances(const Corpus& corpus);

std::size_t utterance_count(const Corpus& corpus);

}  // namespace chatsent
