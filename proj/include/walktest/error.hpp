#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace walktest {

enum class ErrorKind {
  InvalidParameter,
  DegenerateGraph,
  NonMixingGraph,
  SizeExceeded,
  NumericFailure,
  GenerationFailure,
  Infeasible,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DegenerateGraph: return "degenerate-graph";
    case ErrorKind::NonMixingGraph: return "non-mixing-graph";
    case ErrorKind::SizeExceeded: return "size-exceeded";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::GenerationFailure: return "generation-failure";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Domain error carrying a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace walktest
