#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nl2spatial {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// formula syntax

class SyntaxError : public Error {
public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& detail = {})
      : Error(make_message(position, expected, detail)),
        position_(position),
        expected_(std::move(expected)) {}

  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  static std::string make_message(std::size_t position,
                                  const std::vector<std::string>& expected,
                                  const std::string& detail) {
    std::string msg = "syntax error at offset " + std::to_string(position);
    if (!expected.empty()) {
      msg += ": expected ";
      for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i) msg += " | ";
        msg += expected[i];
      }
    }
    if (!detail.empty()) msg += " (" + detail + ")";
    return msg;
  }

  std::size_t position_;
  std::vector<std::string> expected_;
};

class ArityError : public Error {
public:
  using Error::Error;
};

class IntervalError : public Error {
public:
  using Error::Error;
};

class DuplicateArgError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// scenes and monitoring

class UnknownIdentError : public Error {
public:
  using Error::Error;
};

class MissingHeadingError : public Error {
public:
  using Error::Error;
};

// Evaluation requested at a time index whose window runs past the trajectory.
class HorizonError : public Error {
public:
  using Error::Error;
};

// The formula's required horizon leaves no valid evaluation index.
class EmptyDomainError : public Error {
public:
  using Error::Error;
};

class TrajectoryParseError : public Error {
public:
  using Error::Error;
};

class SchemaError : public Error {
public:
  using Error::Error;
};

class InvariantError : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// controlled English

class NotCanonicalError : public Error {
public:
  NotCanonicalError(std::size_t position, const std::string& detail)
      : Error("not canonical at offset " + std::to_string(position) + ": " + detail),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

// ---------------------------------------------------------------------------
// HLT

class InconsistentLabelsError : public Error {
public:
  using Error::Error;
};

class MixedLateralTypesError : public Error {
public:
  using Error::Error;
};

class HltFormatError : public Error {
public:
  using Error::Error;
};

class ProposerFailure : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// gateway

class BackendUnavailable : public Error {
public:
  using Error::Error;
};

class BackendMalformedResponse : public Error {
public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// datagen

class InfeasibleSpecError : public Error {
public:
  using Error::Error;
};

class UniverseTooSmallError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace nl2spatial
