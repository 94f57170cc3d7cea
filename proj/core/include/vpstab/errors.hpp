#pragma once

#include <stdexcept>
#include <string>

namespace vpstab {

/// A Penrose contour sample landed on (or numerically at) the origin, so the
/// winding number is undefined; the configuration is a critical state.
class CriticalContourError : public std::runtime_error {
public:
  explicit CriticalContourError(const std::string& what) : std::runtime_error(what) {}
};

/// Root finding failed to converge; carries the Nyquist count that told us
/// how many roots should exist.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, int nyquist_count)
      : std::runtime_error(what), nyquist_count(nyquist_count) {}
  int nyquist_count;
};

/// An internal consistency check failed (signals a numerics bug, not bad input).
class InvariantViolationError : public std::logic_error {
public:
  explicit InvariantViolationError(const std::string& what) : std::logic_error(what) {}
};

/// A constructed test fixture failed its own verification.
class FixtureError : public std::runtime_error {
public:
  explicit FixtureError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vpstab
