#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace netopt {

/// Base action, 0-based internally (files use 1..q).
using Action = int;

/// One action per vertex, every entry in [0, q).
class ActionProfile {
 public:
  ActionProfile(std::vector<Action> actions, int q);

  std::size_t size() const noexcept { return actions_.size(); }
  int q() const noexcept { return q_; }
  Action operator[](std::size_t v) const { return actions_[v]; }
  std::span<const Action> actions() const noexcept { return actions_; }

  friend bool operator==(const ActionProfile&, const ActionProfile&) = default;

 private:
  std::vector<Action> actions_;
  int q_;
};

/// Number of coordinates in which x and y differ. Throws InvalidInput on
/// length mismatch.
std::size_t hamming(const ActionProfile& x, const ActionProfile& y);
std::size_t hamming(std::span<const Action> x, std::span<const Action> y);

/// Dense enumeration of {0..q-1}^n. Profile x has index Σ_v x_v q^v.
class ProfileSpace {
 public:
  static constexpr std::size_t kDefaultDenseCap = 65536;
  static constexpr std::size_t kDefaultOtCap = 256;

  /// Throws CapExceeded when q^n > cap.
  ProfileSpace(std::size_t num_vertices, int q, std::size_t cap = kDefaultDenseCap);

  /// q^n, or 0 if it overflows size_t.
  static std::size_t count(std::size_t num_vertices, int q) noexcept;

  std::size_t num_vertices() const noexcept { return n_; }
  int q() const noexcept { return q_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t index(std::span<const Action> x) const;
  void decode(std::size_t index, std::span<Action> out) const;
  ActionProfile profile(std::size_t index) const;

  Action digit(std::size_t index, std::size_t v) const noexcept {
    return static_cast<Action>((index / strides_[v]) % static_cast<std::size_t>(q_));
  }
  std::size_t with_digit(std::size_t index, std::size_t v, Action a) const noexcept {
    return index + (static_cast<std::size_t>(a) - static_cast<std::size_t>(digit(index, v))) * strides_[v];
  }
  std::size_t stride(std::size_t v) const noexcept { return strides_[v]; }

  std::size_t hamming(std::size_t i, std::size_t j) const noexcept;

 private:
  std::size_t n_;
  int q_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

}  // namespace netopt
