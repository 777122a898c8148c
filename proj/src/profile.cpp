#include "netopt/profile.hpp"

#include <limits>
#include <string>

#include "netopt/error.hpp"

namespace netopt {

ActionProfile::ActionProfile(std::vector<Action> actions, int q) : actions_(std::move(actions)), q_(q) {
  if (q < 1) throw InvalidInput("q must be positive");
  for (std::size_t v = 0; v < actions_.size(); ++v) {
    if (actions_[v] < 0 || actions_[v] >= q) {
      throw InvalidInput("action at vertex " + std::to_string(v + 1) + " outside 1.." + std::to_string(q));
    }
  }
}

std::size_t hamming(std::span<const Action> x, std::span<const Action> y) {
  if (x.size() != y.size()) throw InvalidInput("hamming: profiles have different lengths");
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += x[i] != y[i];
  return d;
}

std::size_t hamming(const ActionProfile& x, const ActionProfile& y) { return hamming(x.actions(), y.actions()); }

std::size_t ProfileSpace::count(std::size_t num_vertices, int q) noexcept {
  std::size_t size = 1;
  const auto qs = static_cast<std::size_t>(q);
  for (std::size_t v = 0; v < num_vertices; ++v) {
    if (size > std::numeric_limits<std::size_t>::max() / qs) return 0;
    size *= qs;
  }
  return size;
}

ProfileSpace::ProfileSpace(std::size_t num_vertices, int q, std::size_t cap) : n_(num_vertices), q_(q) {
  if (q < 1) throw InvalidInput("q must be positive");
  if (num_vertices == 0) throw InvalidInput("profile space needs at least one vertex");
  size_ = count(num_vertices, q);
  if (size_ == 0 || size_ > cap) {
    throw CapExceeded("profile space q^|V| exceeds the dense cap",
                      size_ == 0 ? std::numeric_limits<std::size_t>::max() : size_, cap);
  }
  strides_.resize(n_);
  std::size_t s = 1;
  for (std::size_t v = 0; v < n_; ++v) {
    strides_[v] = s;
    s *= static_cast<std::size_t>(q);
  }
}

std::size_t ProfileSpace::index(std::span<const Action> x) const {
  if (x.size() != n_) throw InvalidInput("profile length does not match the space");
  std::size_t idx = 0;
  for (std::size_t v = 0; v < n_; ++v) {
    if (x[v] < 0 || x[v] >= q_) throw InvalidInput("action out of range");
    idx += static_cast<std::size_t>(x[v]) * strides_[v];
  }
  return idx;
}

void ProfileSpace::decode(std::size_t index, std::span<Action> out) const {
  const auto qs = static_cast<std::size_t>(q_);
  for (std::size_t v = 0; v < n_; ++v) {
    out[v] = static_cast<Action>(index % qs);
    index /= qs;
  }
}

ActionProfile ProfileSpace::profile(std::size_t index) const {
  std::vector<Action> x(n_);
  decode(index, x);
  return ActionProfile(std::move(x), q_);
}

std::size_t ProfileSpace::hamming(std::size_t i, std::size_t j) const noexcept {
  const auto qs = static_cast<std::size_t>(q_);
  std::size_t d = 0;
  for (std::size_t v = 0; v < n_; ++v) {
    d += (i % qs) != (j % qs);
    i /= qs;
    j /= qs;
  }
  return d;
}

}  // namespace netopt
