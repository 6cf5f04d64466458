#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace reebidx {

/// Failure categories surfaced by the toolkit. The CLI maps these to exit codes.
enum class ErrorKind {
  structural,        ///< malformed or self-inconsistent input data
  precondition,      ///< operation contract violated by the caller
  domain,            ///< argument outside the operation's domain
  resolution,        ///< numeric route cannot resolve the crossing structure
  precision,         ///< interval arithmetic cannot decide a comparison
  data_required,     ///< degenerate iterate lacks local homology data
  inference,         ///< inconsistent linear system while fitting invariants
  ambiguity,         ///< underdetermined inference
  bounded_search,    ///< search exhausted its bound without success
  not_representable, ///< requested closed form does not exist for the data
  construction,      ///< model fixture failed its build-time self check
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

inline void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) fail(kind, msg);
}

} // namespace reebidx
