#pragma once

#include <stdexcept>
#include <string>

namespace skt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  /// Machine-readable error name, e.g. "NoComplexBalance".
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

class ParseError : public Error {
public:
  ParseError(int line, const std::string& message)
      : Error("ParseError", "line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

class NoComplexBalance : public Error {
public:
  explicit NoComplexBalance(const std::string& message) : Error("NoComplexBalance", message) {}
};

class MassNotReachable : public Error {
public:
  explicit MassNotReachable(const std::string& message) : Error("MassNotReachable", message) {}
};

/// Neither the weak cross-diffusion condition nor detailed balance holds,
/// or the positivity hypotheses on a_{i0}, a_{ii} fail.
class DiffusionConditionError : public Error {
public:
  explicit DiffusionConditionError(const std::string& message)
      : Error("NeitherConditionHolds", message) {}
};

class StepFailed : public Error {
public:
  StepFailed(const std::string& message, double time) : Error("StepFailed", message), time_(time) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

class InsufficientDecayData : public Error {
public:
  explicit InsufficientDecayData(const std::string& message)
      : Error("InsufficientDecayData", message) {}
};

}  // namespace skt
