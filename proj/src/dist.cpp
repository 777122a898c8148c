#include "netopt/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netopt/error.hpp"

namespace netopt {

namespace {

constexpr double kNormTolerance = 1e-9;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> logs_of(const std::vector<double>& p) {
  std::vector<double> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = p[i] > 0.0 ? std::log(p[i]) : kNegInf;
  return out;
}

}  // namespace

Dist Dist::from_probs(std::vector<double> probs) {
  if (probs.empty()) throw InvalidInput("distribution must be nonempty");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw InvalidInput("probability " + std::to_string(i) + " is negative or non-finite");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw InvalidInput("probabilities sum to " + std::to_string(total) + ", not 1");
  }
  for (double& p : probs) p /= total;
  auto logs = logs_of(probs);
  return Dist(std::move(probs), std::move(logs));
}

Dist Dist::from_log_weights(std::vector<double> log_weights) {
  if (log_weights.empty()) throw InvalidInput("distribution must be nonempty");
  for (double w : log_weights) {
    if (std::isnan(w) || w == std::numeric_limits<double>::infinity()) {
      throw InvalidInput("log weight is NaN or +inf");
    }
  }
  const double lz = log_sum_exp(log_weights);
  if (!std::isfinite(lz)) throw InvalidInput("all log weights are -inf");
  std::vector<double> probs(log_weights.size());
  for (std::size_t i = 0; i < log_weights.size(); ++i) {
    log_weights[i] -= lz;
    probs[i] = std::exp(log_weights[i]);
  }
  return Dist(std::move(probs), std::move(log_weights));
}

Dist Dist::uniform(std::size_t n) {
  if (n == 0) throw InvalidInput("distribution must be nonempty");
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<double> lp(n, -std::log(static_cast<double>(n)));
  return Dist(std::move(p), std::move(lp));
}

Dist Dist::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw InvalidInput("point mass outside the support");
  std::vector<double> p(n, 0.0);
  p[at] = 1.0;
  auto lp = logs_of(p);
  return Dist(std::move(p), std::move(lp));
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kNegInf;
  const double m = *std::max_element(values.begin(), values.end());
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

double expectation(const Dist& mu, std::span<const double> f) {
  if (f.size() != mu.size()) throw InvalidInput("expectation: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += mu[i] * f[i];
  return s;
}

double log_mgf(const Dist& nu, std::span<const double> f) {
  if (f.size() != nu.size()) throw InvalidInput("log_mgf: size mismatch");
  std::vector<double> terms(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) terms[i] = nu.log_probs()[i] + f[i];
  return log_sum_exp(terms);
}

GibbsSpec gibbs_spec(const Dist& base, std::span<const double> neg_energy) {
  if (neg_energy.size() != base.size()) throw InvalidInput("gibbs: energy and base sizes differ");
  for (double g : neg_energy) {
    if (!std::isfinite(g)) throw InvalidInput("gibbs: non-finite energy");
  }
  const double lz = log_mgf(base, neg_energy);
  return GibbsSpec{base, std::vector<double>(neg_energy.begin(), neg_energy.end()), lz};
}

Dist GibbsSpec::realize() const {
  std::vector<double> lw(base.size());
  for (std::size_t i = 0; i < lw.size(); ++i) lw[i] = base.log_probs()[i] + neg_energy[i];
  return Dist::from_log_weights(std::move(lw));
}

Dist gibbs(const Dist& base, std::span<const double> neg_energy) { return gibbs_spec(base, neg_energy).realize(); }

double kl_divergence(const Dist& mu, const Dist& nu) {
  if (mu.size() != nu.size()) throw InvalidInput("kl: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) continue;
    if (nu[i] == 0.0) return std::numeric_limits<double>::infinity();
    s += mu[i] * (mu.log_probs()[i] - nu.log_probs()[i]);
  }
  return std::max(s, 0.0);
}

double tv_distance(const Dist& mu, const Dist& nu) {
  if (mu.size() != nu.size()) throw InvalidInput("tv: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::abs(mu[i] - nu[i]);
  return 0.5 * s;
}

double shannon_entropy(const Dist& mu) {
  double h = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > 0.0) h -= mu[i] * mu.log_probs()[i];
  }
  return h;
}

double span_seminorm(std::span<const double> values) {
  if (values.empty()) throw InvalidInput("span of an empty function");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double sup_norm(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace netopt
