#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chatsent {

// Error categories follow the CLI / C API contract:
// configuration errors exit with 2, data and runtime errors with 3.
enum class ErrCode {
  // configuration / environment
  io_error,
  invalid_config,
  // corpus ingestion
  malformed_record,
  duplicate_turn,
  unknown_speaker,
  non_dense_turns,
  empty_text,
  no_customer_utterance,
  // lexicon loading
  non_integer_valence,
  out_of_range,
  duplicate_term,
  zero_valence,
  schema_error,
  empty_list,
  // matrices / label model
  empty_input,
  length_mismatch,
  degenerate_matrix,
  // student / trainer
  shape_mismatch,
  empty_batch,
  empty_training_set,
  no_selected_samples,
  // evaluation
  no_labeled_customer_utterance,
};

inline bool is_config_error(ErrCode c) {
  return c == ErrCode::io_error || c == ErrCode::invalid_config;
}

class Error : public std::runtime_error {
 public:
  Error(ErrCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrCode code() const noexcept { return code_; }

 private:
  ErrCode code_;
};

[[noreturn]] inline void raise(ErrCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace chatsent
