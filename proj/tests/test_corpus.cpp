#include "corpus.hpp"

#include <cstdio>
#include <functional>
#include <sstream>

#include "doctest.h"
#include "errors.hpp"
#include "test_util.hpp"

using namespace chatsent;

namespace {

std::string record(const std::string& sid, int turn, const std::string& speaker,
                   const std::string& text) {
  return "{\"session_id\":\"" + sid + "\",\"turn_index\":" + std::to_string(turn) +
         ",\"speaker\":\"" + speaker + "\",\"text\":\"" + text + "\"}\n";
}

ErrCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrCode::io_error;
}

}  // namespace

TEST_CASE("load_corpus groups lines into sessions") {
  testutil::TempDir tmp;
  auto path = testutil::write_file(
      tmp.file("c.jsonl"), record("s1", 0, "customer", "hello") + record("s1", 1, "agent", "hi"));
  Corpus corpus = load_corpus(path);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].session_id == "s1");
  REQUIRE(corpus[0].utterances.size() == 2);
  CHECK(corpus[0].utterances[0].speaker == Speaker::Customer);
  CHECK(corpus[0].utterances[1].turn_index == 1);
}

TEST_CASE("load_corpus orders sessions lexicographically and turns densely") {
  testutil::TempDir tmp;
  auto path = testutil::write_file(tmp.file("c.jsonl"),
                                   record("s2", 1, "agent", "later") +
                                       record("s2", 0, "customer", "first") +
                                       record("s1", 0, "customer", "other session"));
  Corpus corpus = load_corpus(path);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].session_id == "s1");
  CHECK(corpus[1].utterances[0].text == "first");
}

TEST_CASE("load_corpus error paths") {
  testutil::TempDir tmp;
  auto load_text = [&](const std::string& text) {
    auto path = testutil::write_file(tmp.file("x.jsonl"), text);
    return [path] { load_corpus(path); };
  };

  CHECK(code_of(load_text(record("s", 0, "customer", "a") + record("s", 0, "agent", "b"))) ==
        ErrCode::duplicate_turn);
  CHECK(code_of(load_text(record("s", 0, "customer", "a") + record("s", 2, "agent", "b"))) ==
        ErrCode::non_dense_turns);
  CHECK(code_of(load_text(record("s", 0, "robot", "a"))) == ErrCode::unknown_speaker);
  CHECK(code_of(load_text("{not json\n")) == ErrCode::malformed_record);
  CHECK(code_of(load_text(record("s", 0, "customer", "   "))) == ErrCode::empty_text);
  CHECK(code_of(load_text(record("s", 0, "agent", "agent only"))) ==
        ErrCode::no_customer_utterance);
  CHECK(code_of([&] { load_corpus(tmp.file("missing.jsonl")); }) == ErrCode::io_error);
}

TEST_CASE("gold labels and resolution round through records") {
  testutil::TempDir tmp;
  std::string text =
      "{\"session_id\":\"s\",\"turn_index\":0,\"speaker\":\"customer\",\"text\":\"ok\","
      "\"gold_label\":\"positive\",\"resolution\":\"resolved\"}\n";
  Corpus corpus = load_corpus(testutil::write_file(tmp.file("c.jsonl"), text));
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].resolution == Resolution::Resolved);
  CHECK(corpus[0].utterances[0].gold_label == SentimentLabel::Positive);
}

TEST_CASE("resolution: last non-null record wins") {
  testutil::TempDir tmp;
  std::string text =
      "{\"session_id\":\"s\",\"turn_index\":0,\"speaker\":\"customer\",\"text\":\"a\","
      "\"resolution\":\"customer_left\"}\n"
      "{\"session_id\":\"s\",\"turn_index\":1,\"speaker\":\"agent\",\"text\":\"b\","
      "\"resolution\":\"resolved\"}\n";
  Corpus corpus = load_corpus(testutil::write_file(tmp.file("c.jsonl"), text));
  CHECK(corpus[0].resolution == Resolution::Resolved);
}

TEST_CASE("canonical write is idempotent") {
  testutil::TempDir tmp;
  // unsorted input, gold labels, resolution on a middle record
  std::string text =
      record("zz", 0, "customer", "hi") +
      "{\"session_id\":\"aa\",\"turn_index\":1,\"speaker\":\"agent\",\"text\":\"b\","
      "\"resolution\":\"resolved\"}\n" +
      record("aa", 0, "customer", "q");
  Corpus corpus = load_corpus(testutil::write_file(tmp.file("c.jsonl"), text));
  std::string once = corpus_to_jsonl(corpus);
  std::istringstream in(once);
  Corpus again = load_corpus_stream(in, "mem");
  CHECK(corpus_to_jsonl(again) == once);
  CHECK(once.find("\"resolution\":\"resolved\"") != std::string::npos);
}

TEST_CASE("customer_utterances filters and keeps order") {
  testutil::TempDir tmp;
  auto path = testutil::write_file(tmp.file("c.jsonl"),
                                   record("s", 0, "customer", "a") + record("s", 1, "agent", "b") +
                                       record("s", 2, "customer", "c"));
  Corpus corpus = load_corpus(path);
  auto customers = customer_utterances(corpus);
  REQUIRE(customers.size() == 2);
  CHECK(customers[0].turn_index == 0);
  CHECK(customers[1].turn_index == 2);
  CHECK(customer_utterances({}).empty());
}

TEST_CASE("customer count over a mixed synthetic corpus matches a brute-force tally") {
  testutil::TempDir tmp;
  std::string text;
  std::size_t expected = 0;
  for (int s = 0; s < 10; ++s) {
    int turns = 2 + s % 4;
    for (int t = 0; t < turns; ++t) {
      bool customer = (t % 2 == 0) || (s % 3 == 0);
      if (customer) ++expected;
      text += record("s" + std::to_string(s), t, customer ? "customer" : "agent", "w");
    }
  }
  Corpus corpus = load_corpus(testutil::write_file(tmp.file("c.jsonl"), text));
  CHECK(customer_utterances(corpus).size() == expected);
}

TEST_CASE("dev-split-sized corpus reports its counts") {
  // 37 sessions, 610 customer utterances spread over them plus agent turns.
  testutil::TempDir tmp;
  std::string text;
  int remaining = 610;
  for (int s = 0; s < 37; ++s) {
    int in_session = s < 36 ? 16 : remaining;  // 36*16 + 34 = 610
    remaining -= in_session;
    int turn = 0;
    char sid[16];
    std::snprintf(sid, sizeof(sid), "s%02d", s);
    for (int c = 0; c < in_session; ++c) {
      text += record(sid, turn++, "customer", "customer line");
      text += record(sid, turn++, "agent", "agent line");
    }
  }
  Corpus corpus = load_corpus(testutil::write_file(tmp.file("c.jsonl"), text));
  CHECK(corpus.size() == 37);
  CHECK(customer_utterances(corpus).size() == 610);
}

TEST_CASE("tokenize basics") {
  auto seq = tokenize("good bye");
  REQUIRE(seq.tokens == std::vector<std::string>{"good", "bye"});

  seq = tokenize("thats insane !");
  CHECK(seq.tokens == std::vector<std::string>{"thats", "insane", "!"});
  CHECK(seq.exclamation_count == 1);

  seq = tokenize("GREAT");
  REQUIRE(seq.size() == 1);
  CHECK(seq.is_upper[0] == 1);
  CHECK(seq.tokens[0] == "great");

  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t ").empty());
}

TEST_CASE("tokenize peels punctuation and counts trailing exclamations") {
  auto seq = tokenize("wow!!! ok (good), it's $80.");
  CHECK(seq.tokens == std::vector<std::string>{"wow", "!", "!", "!", "ok", "(", "good", ")", ",",
                                               "it's", "$", "80", "."});
  CHECK(seq.exclamation_count == 0);  // sentence does not end with '!'

  seq = tokenize("amazing!!");
  CHECK(seq.exclamation_count == 2);
  CHECK(seq.tokens.front() == "amazing");
}

TEST_CASE("tokenize splits on unicode spaces and stays total on junk bytes") {
  auto seq = tokenize("a\xc2\xa0"
                      "b");  // NBSP separates tokens
  REQUIRE(seq.size() == 2);
  CHECK(seq.tokens[0] == "a");
  CHECK(seq.tokens[1] == "b");

  std::string junk = "ok \xff\xfe done";
  auto total = tokenize(junk);
  CHECK(total.size() == 3);
}

TEST_CASE("tokenize truncates to max_tokens") {
  std::string text;
  for (int i = 0; i < 300; ++i) text += "w" + std::to_string(i) + " ";
  auto seq = tokenize(text);
  CHECK(seq.size() == kMaxTokens);
  auto seq8 = tokenize(text, 8);
  CHECK(seq8.size() == 8);
}

TEST_CASE("tokenize is deterministic") {
  const std::string text = "Mixed CASE with... punctuation!! and UNICODE\xc2\xa0space";
  auto a = tokenize(text);
  auto b = tokenize(text);
  CHECK(a.tokens == b.tokens);
  CHECK(a.raw == b.raw);
  CHECK(a.exclamation_count == b.exclamation_count);
}

TEST_CASE("sample id string form parses back") {
  SampleId id{"sess:with:colons", 17};
  CHECK(SampleId::parse(id.str()) == id);
  CHECK(SampleId::parse("a:0").session_id == "a");
  CHECK_THROWS_AS(SampleId::parse("no-colon"), Error);
  CHECK_THROWS_AS(SampleId::parse("a:x1"), Error);
}
