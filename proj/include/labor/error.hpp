#pragma once

#include <stdexcept>
#include <string>

namespace labor {

/// Base for hard failures. Skill rejections are not errors; they are
/// reported as data in SkillOutcome.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfTable : public Error {
 public:
  using Error::Error;
};

class UnknownVariant : public Error {
 public:
  using Error::Error;
};

class TranscriptFormatError : public Error {
 public:
  using Error::Error;
};

/// Raised by replay when a recomputed record differs from the recorded one.
class DivergenceError : public Error {
 public:
  DivergenceError(int round, const std::string& what)
      : Error("divergence at round " + std::to_string(round) + ": " + what), round_(round) {}

  int round() const { return round_; }

 private:
  int round_;
};

class BackendError : public Error {
 public:
  enum class Kind { Network, BudgetExceeded };

  BackendError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace labor
