#include "nl2spatial/gateway.hpp"

#include <cctype>
#include <cstdlib>
#include <regex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "httplib.h"
#include "nl2spatial/errors.hpp"
#include "nl2spatial/renderer.hpp"
#include "nl2spatial/syntax.hpp"

namespace nl2spatial {

using nlohmann::json;

std::vector<std::string> paraphrase_node(const ParaphraseRequest& req, ParaphraseBackend& backend) {
  if (req.canonical.empty()) throw std::invalid_argument("paraphrase request needs a canonical text");
  if (req.k == 0) return {};
  auto texts = backend.paraphrase(req);
  if (texts.size() != req.k)
    throw BackendMalformedResponse("expected " + std::to_string(req.k) + " paraphrases, got " +
                                   std::to_string(texts.size()));
  return texts;
}

CheckVerdict check_alignment(const AlignmentRequest& req, AlignmentChecker& checker) {
  if (req.span_text.empty() || req.formula.empty())
    throw std::invalid_argument("alignment request needs span text and formula");
  auto v = checker.check_alignment(req);
  if (!v.accept && v.reason.empty()) v.reason = "rejected";
  return v;
}

std::string normalize_for_alignment(std::string_view text) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  std::string spaced;
  spaced.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    auto uc = static_cast<unsigned char>(c);
    if (uc >= 0x80 || std::isalnum(uc) || c == '_') {
      spaced += static_cast<char>(std::tolower(uc));
      continue;
    }
    bool next_digit = i + 1 < text.size() && digit(text[i + 1]);
    bool prev_digit = i > 0 && digit(text[i - 1]);
    if ((c == '.' && prev_digit && next_digit) || (c == '-' && next_digit)) {
      spaced += c;
      continue;
    }
    spaced += ' ';
  }
  return collapse_whitespace(spaced);
}

const std::vector<PhraseSynonyms>& mock_synonym_table() {
  static const std::vector<PhraseSynonyms> table = {
      {"is in contact with", {"touches", "is touching", "makes contact with"}},
      {"lies strictly inside", {"is strictly within", "is fully contained in"}},
      {"is at most", {"is no more than", "does not exceed"}},
      {"is at least", {"is no less than", "is not below"}},
      {"partially overlaps", {"partly overlaps", "overlaps part of"}},
      {"without containment", {"with neither containing the other"}},
      {"is strictly to the left of", {"is clearly left of", "sits strictly left of"}},
      {"is strictly to the right of", {"is clearly right of", "sits strictly right of"}},
      {"is strictly above", {"is clearly above", "sits strictly above"}},
      {"is strictly below", {"is clearly below", "sits strictly below"}},
      {"lies strictly between", {"sits strictly between"}},
      {"is aligned with that of", {"matches that of", "points the same way as that of"}},
      {"throughout", {"for the whole of", "during all of"}},
      {"sometime within", {"at some point within", "at least once within"}},
      {"it is not the case that", {"it is false that", "it does not hold that"}},
      {"until then", {"before that", "up to that point"}},
  };
  return table;
}

std::uint64_t stable_hash(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string MockBackend::variant(std::string_view canonical, std::size_t index) {
  const auto& table = mock_synonym_table();
  auto base = stable_hash(canonical);
  base = stable_hash("\x1f" + std::to_string(index), base);

  std::string out;
  out.reserve(canonical.size() + 16);
  std::size_t i = 0;
  while (i < canonical.size()) {
    std::size_t best = table.size();
    bool capital = false;
    for (std::size_t e = 0; e < table.size(); ++e) {
      auto phrase = table[e].phrase;
      auto rest = canonical.substr(i);
      if (rest.size() < phrase.size()) continue;
      bool lower = rest.starts_with(phrase);
      bool upper = !lower && std::toupper(static_cast<unsigned char>(rest[0])) == rest[0] &&
                   std::tolower(static_cast<unsigned char>(rest[0])) == phrase[0] &&
                   rest.substr(1).starts_with(phrase.substr(1));
      if ((lower || upper) && (best == table.size() || phrase.size() > table[best].phrase.size())) {
        best = e;
        capital = upper;
      }
    }
    if (best == table.size()) {
      out += canonical[i++];
      continue;
    }
    const auto& alts = table[best].alternatives;
    auto pick = stable_hash("\x1e" + std::to_string(best), base) % alts.size();
    std::string rep(alts[pick]);
    if (capital) rep[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rep[0])));
    out += rep;
    i += table[best].phrase.size();
  }
  return out;
}

std::vector<std::string> MockBackend::paraphrase(const ParaphraseRequest& req) {
  std::vector<std::string> out;
  out.reserve(req.k);
  for (std::size_t v = 0; v < req.k; ++v) out.push_back(variant(req.canonical, v));
  return out;
}

CheckVerdict MockBackend::check_alignment(const AlignmentRequest& req) {
  auto f = parse_formula(req.formula);
  auto canonical = render_canonical(f).text;
  auto span = normalize_for_alignment(req.span_text);
  if (span == normalize_for_alignment(canonical)) return {true, "span matches the canonical rendering"};
  for (std::size_t v = 0; v < kAcceptedVariants; ++v)
    if (span == normalize_for_alignment(variant(canonical, v)))
      return {true, "span matches paraphrase variant " + std::to_string(v)};
  return {false, "span text does not express " + req.formula};
}

std::optional<RemoteConfig> RemoteConfig::from_env() {
  const char* url = std::getenv("NL2SPATIAL_LLM_URL");
  if (!url || !*url) return std::nullopt;
  RemoteConfig c;
  c.url = url;
  if (const char* tok = std::getenv("NL2SPATIAL_LLM_TOKEN")) c.token = tok;
  return c;
}

RemoteBackend::RemoteBackend(RemoteConfig config) : config_(std::move(config)) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.url, m, kUrl)) throw std::invalid_argument("malformed backend URL: " + config_.url);
  base_ = m[1].str();
  path_ = m[2].matched ? m[2].str() : "/";
}

std::string RemoteBackend::post(const std::string& body) {
  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);

  auto backoff = config_.initial_backoff;
  std::string last_problem;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(base_);
    if (!client.is_valid()) throw BackendUnavailable("unsupported backend URL: " + config_.url);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_problem = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_problem = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300)
      throw BackendUnavailable("backend answered HTTP " + std::to_string(res->status));
    return res->body;
  }
  throw BackendUnavailable("backend unreachable after " + std::to_string(config_.retries + 1) +
                           " attempts (" + last_problem + ")");
}

std::vector<std::string> RemoteBackend::paraphrase(const ParaphraseRequest& req) {
  json body = {{"task", "paraphrase"}, {"canonical", req.canonical}, {"formula", req.formula}, {"k", req.k}};
  auto raw = post(body.dump());
  json doc = json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("texts") || !doc["texts"].is_array())
    throw BackendMalformedResponse("paraphrase response lacks a 'texts' array");
  std::vector<std::string> texts;
  for (const auto& t : doc["texts"]) {
    if (!t.is_string()) throw BackendMalformedResponse("paraphrase texts must be strings");
    texts.push_back(t.get<std::string>());
  }
  return texts;
}

CheckVerdict RemoteBackend::check_alignment(const AlignmentRequest& req) {
  json body = {{"task", "check"}, {"canonical", req.span_text}, {"formula", req.formula}};
  auto raw = post(body.dump());
  json doc = json::parse(raw, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("accept") || !doc["accept"].is_boolean())
    throw BackendMalformedResponse("check response lacks a boolean 'accept'");
  CheckVerdict v;
  v.accept = doc["accept"].get<bool>();
  if (auto r = doc.find("reason"); r != doc.end()) {
    if (!r->is_string()) throw BackendMalformedResponse("'reason' must be a string");
    v.reason = r->get<std::string>();
  }
  return v;
}

struct BoundedBackend::Slot {
  explicit Slot(std::counting_semaphore<kMaxLimit>& s) : sem(s) { sem.acquire(); }
  ~Slot() { sem.release(); }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;
  std::counting_semaphore<kMaxLimit>& sem;
};

BoundedBackend::BoundedBackend(ParaphraseBackend* paraphraser, AlignmentChecker* checker, std::ptrdiff_t limit)
    : paraphraser_(paraphraser), checker_(checker), slots_(limit) {
  if (limit < 1 || limit > kMaxLimit) throw std::invalid_argument("in-flight limit out of range");
}

std::vector<std::string> BoundedBackend::paraphrase(const ParaphraseRequest& req) {
  if (!paraphraser_) throw BackendUnavailable("no paraphrase backend configured");
  Slot slot(slots_);
  return paraphraser_->paraphrase(req);
}

CheckVerdict BoundedBackend::check_alignment(const AlignmentRequest& req) {
  if (!checker_) throw BackendUnavailable("no alignment checker configured");
  Slot slot(slots_);
  return checker_->check_alignment(req);
}

}  // namespace nl2spatial
