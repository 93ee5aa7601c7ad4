#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clevo {

// Stable error categories; the C API maps these one-to-one onto status codes.
enum class ErrorCode {
  invalid_argument = 1,
  numeric_domain,
  integration_failure,
  truncation,
  degenerate_state,
  flow_consistency,
  size_guard,
  io,
  domain,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

// Non-finite energies, gradients or observables; `component` is the offending
// parameter index (or npos when not attributable).
class NumericDomainError : public Error {
 public:
  NumericDomainError(const std::string& what, std::size_t component = npos)
      : Error(ErrorCode::numeric_domain, what), component_(component) {}
  std::size_t component() const noexcept { return component_; }
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t component_;
};

class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : Error(ErrorCode::integration_failure, what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

// Raised when one ensemble member fails; carries the member index.
class EnsembleMemberError : public IntegrationError {
 public:
  EnsembleMemberError(const std::string& what, double last_good_time, std::size_t member)
      : IntegrationError(what, last_good_time), member_(member) {}
  std::size_t member() const noexcept { return member_; }

 private:
  std::size_t member_;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::size_t required_cutoff)
      : Error(ErrorCode::truncation, what), required_cutoff_(required_cutoff) {}
  std::size_t required_cutoff() const noexcept { return required_cutoff_; }

 private:
  std::size_t required_cutoff_;
};

class DegenerateStateError : public Error {
 public:
  explicit DegenerateStateError(const std::string& what) : Error(ErrorCode::degenerate_state, what) {}
};

class FlowConsistencyError : public Error {
 public:
  explicit FlowConsistencyError(const std::string& what) : Error(ErrorCode::flow_consistency, what) {}
};

class SizeGuardError : public Error {
 public:
  explicit SizeGuardError(const std::string& what) : Error(ErrorCode::size_guard, what) {}
};

// Arguments outside an operation's mathematical domain (beta <= 0,
// unbalanced partitions for closed forms, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace clevo
