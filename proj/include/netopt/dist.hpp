#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace netopt {

/// Finite probability distribution with a cached log-domain copy.
/// Invariant: probabilities are nonnegative and sum to 1 within 1e-12;
/// log_probs()[i] == log(probs()[i]) (-inf where the mass is zero).
class Dist {
 public:
  /// Accepts input within 1e-9 of normalized and renormalizes it.
  /// Negative, non-finite or farther-off input throws InvalidInput.
  static Dist from_probs(std::vector<double> probs);
  /// Normalizes exp(log_weights) with a max shift. Entries may be -inf.
  static Dist from_log_weights(std::vector<double> log_weights);
  static Dist uniform(std::size_t n);
  static Dist point_mass(std::size_t n, std::size_t at);

  std::size_t size() const noexcept { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const noexcept { return probs_; }
  std::span<const double> log_probs() const noexcept { return log_probs_; }

 private:
  Dist(std::vector<double> probs, std::vector<double> log_probs)
      : probs_(std::move(probs)), log_probs_(std::move(log_probs)) {}

  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

/// ln Σ exp(v_i), stable; -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// ⟨mu, f⟩.
double expectation(const Dist& mu, std::span<const double> f);

/// ln ⟨nu, exp(F)⟩.
double log_mgf(const Dist& nu, std::span<const double> f);

/// Gibbs tilt of `base` by the negative energy g: base·exp(g)/⟨base, exp(g)⟩.
struct GibbsSpec {
  Dist base;
  std::vector<double> neg_energy;
  double log_partition;  // ln⟨base, exp(g)⟩

  Dist realize() const;
};

/// Throws InvalidInput on size mismatch or non-finite energy.
GibbsSpec gibbs_spec(const Dist& base, std::span<const double> neg_energy);
Dist gibbs(const Dist& base, std::span<const double> neg_energy);

/// D(mu‖nu); +inf when supp(mu) ⊄ supp(nu).
double kl_divergence(const Dist& mu, const Dist& nu);
double tv_distance(const Dist& mu, const Dist& nu);
/// Natural-log entropy with 0 ln 0 = 0.
double shannon_entropy(const Dist& mu);

/// max - min. Throws InvalidInput on an empty input.
double span_seminorm(std::span<const double> values);
double sup_norm(std::span<const double> values);

}  // namespace netopt
