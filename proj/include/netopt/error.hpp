#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netopt {

/// Input that violates a documented precondition or invariant
/// (self-loop, out-of-range cost, shape mismatch, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A dense computation was requested on a state space larger than the
/// configured cap.
class CapExceeded : public std::length_error {
 public:
  CapExceeded(const std::string& what, std::size_t requested, std::size_t cap)
      : std::length_error(what + " (requested " + std::to_string(requested) +
                          " states, cap " + std::to_string(cap) + ")"),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

/// Δβ ≥ 1: the curvature / tracking machinery does not apply.
class RegularityViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed text or JSON input. The message carries the location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace netopt
