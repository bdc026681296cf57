#pragma once

// Language-model boundary: paraphrase generation and span/formula alignment
// checks. MockBackend is a deterministic offline stand-in (phrase table
// substitution and normalized text comparison); RemoteBackend speaks a small
// JSON-over-HTTP protocol.

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace nl2spatial {

struct ParaphraseRequest {
  std::string canonical;  // controlled-English text
  std::string formula;    // machine syntax, conditioning signal
  std::size_t k = 0;
};

struct AlignmentRequest {
  std::string span_text;
  std::string formula;  // machine syntax
};

struct CheckVerdict {
  bool accept = false;
  std::string reason;  // non-empty on rejection
};

class ParaphraseBackend {
public:
  virtual ~ParaphraseBackend() = default;
  virtual std::vector<std::string> paraphrase(const ParaphraseRequest& req) = 0;
};

class AlignmentChecker {
public:
  virtual ~AlignmentChecker() = default;
  virtual CheckVerdict check_alignment(const AlignmentRequest& req) = 0;
};

// Validates the request, forwards it and enforces "exactly k texts".
// Throws std::invalid_argument for an empty canonical, BackendUnavailable
// or BackendMalformedResponse from the backend.
std::vector<std::string> paraphrase_node(const ParaphraseRequest& req, ParaphraseBackend& backend);

// Throws std::invalid_argument for empty fields; guarantees a reason on rejection.
CheckVerdict check_alignment(const AlignmentRequest& req, AlignmentChecker& checker);

// Lowercase, punctuation replaced by spaces, whitespace collapsed. Keeps
// '_' and decimal points/signs attached to digits so identifiers and
// constants stay distinct.
std::string normalize_for_alignment(std::string_view text);

struct PhraseSynonyms {
  std::string_view phrase;  // lowercase; also matched with a leading capital
  std::vector<std::string_view> alternatives;
};

const std::vector<PhraseSynonyms>& mock_synonym_table();

// Stable 64-bit FNV-1a, independent of process and platform.
std::uint64_t stable_hash(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

class MockBackend final : public ParaphraseBackend, public AlignmentChecker {
public:
  // Number of paraphrase variants the checker also accepts.
  static constexpr std::size_t kAcceptedVariants = 4;

  std::vector<std::string> paraphrase(const ParaphraseRequest& req) override;

  // Accepts iff the normalized span equals the normalized canonical rendering
  // of the formula or one of its first kAcceptedVariants mock paraphrases.
  CheckVerdict check_alignment(const AlignmentRequest& req) override;

  // Variant `index` of `canonical`: every table phrase in the text is
  // replaced by the alternative picked by stable_hash(canonical, index, entry).
  static std::string variant(std::string_view canonical, std::size_t index);
};

class AcceptAllChecker final : public AlignmentChecker {
public:
  CheckVerdict check_alignment(const AlignmentRequest&) override { return {true, "accepted unconditionally"}; }
};

struct RemoteConfig {
  std::string url;    // http://host[:port][/path]
  std::string token;  // sent as "Authorization: Bearer <token>" when non-empty
  int retries = 2;
  std::chrono::milliseconds initial_backoff{100};
  std::chrono::milliseconds timeout{10000};

  // Reads NL2SPATIAL_LLM_URL and NL2SPATIAL_LLM_TOKEN; nullopt without a URL.
  static std::optional<RemoteConfig> from_env();
};

class RemoteBackend final : public ParaphraseBackend, public AlignmentChecker {
public:
  explicit RemoteBackend(RemoteConfig config);

  std::vector<std::string> paraphrase(const ParaphraseRequest& req) override;
  CheckVerdict check_alignment(const AlignmentRequest& req) override;

private:
  std::string post(const std::string& body);

  RemoteConfig config_;
  std::string base_;  // scheme://host:port
  std::string path_;
};

// Caps the number of concurrent in-flight requests to an underlying backend.
class BoundedBackend final : public ParaphraseBackend, public AlignmentChecker {
public:
  static constexpr std::ptrdiff_t kMaxLimit = 1024;

  BoundedBackend(ParaphraseBackend* paraphraser, AlignmentChecker* checker, std::ptrdiff_t limit = 4);

  std::vector<std::string> paraphrase(const ParaphraseRequest& req) override;
  CheckVerdict check_alignment(const AlignmentRequest& req) override;

private:
  struct Slot;

  ParaphraseBackend* paraphraser_;
  AlignmentChecker* checker_;
  std::counting_semaphore<kMaxLimit> slots_;
};

}  // namespace nl2spatial
