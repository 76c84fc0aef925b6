#pragma once

#include <stdexcept>
#include <string>

namespace dynseq {

/// Position or length outside the valid range of a sequence.
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

/// select asked for an occurrence that does not exist.
struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation not allowed in the current state (e.g. a second pending copy).
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

struct InvalidHandleError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Input symbols or parameters that violate a constructor contract.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed serialized data.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A structural audit found a broken invariant. Only thrown by validate() hooks
/// and by the internal consistency checks of the maintenance scheduler.
struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

namespace detail {

inline void check_range(bool ok, const char* what) {
  if (!ok) throw RangeError(what);
}

}  // namespace detail
}  // namespace dynseq
