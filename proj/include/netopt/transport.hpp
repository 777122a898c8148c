#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "netopt/dist.hpp"
#include "netopt/profile.hpp"

namespace netopt {

/// Joint distribution on a rows × cols grid, row-major.
struct Coupling {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> joint;

  double at(std::size_t i, std::size_t j) const { return joint[i * cols + j]; }
  std::vector<double> row_marginal() const;
  std::vector<double> col_marginal() const;
  /// Σ_{i≠j} joint(i, j); meaningful for square couplings on one space.
  double mismatch_probability() const;
};

/// Overlap coupling: min(mu, nu) on the diagonal, residuals coupled by their
/// normalized outer product. Achieves Pr[X ≠ Y] = TV(mu, nu).
Coupling optimal_tv_coupling(const Dist& mu, const Dist& nu);

struct TransportSolution {
  double cost = 0.0;
  Coupling plan;
  /// Dual certificate: u_i + v_j ≤ c_ij with Σ u_i a_i + Σ v_j b_j = cost.
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  std::size_t pivots = 0;
};

/// Exact balanced transportation problem, min Σ c_ij x_ij subject to row sums
/// `supply` and column sums `demand`, solved by the transportation (network)
/// simplex method with MODI potentials. `demand` is rescaled to the supply
/// total; totals that differ by more than 1e-9 relative throw InvalidInput.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const std::function<double(std::size_t, std::size_t)>& cost);

struct OtOptions {
  std::size_t cap = ProfileSpace::kDefaultOtCap;
};

/// W1 between two distributions over the profile space, Hamming ground cost.
/// Throws CapExceeded when the space is larger than options.cap; |V|·TV is
/// the available upper bound in that case.
double wasserstein1_hamming(const Dist& mu, const Dist& nu, const ProfileSpace& space,
                            OtOptions options = {});

/// Same, returning an optimal coupling on X × X and its dual certificate.
TransportSolution wasserstein1_hamming_plan(const Dist& mu, const Dist& nu, const ProfileSpace& space,
                                            OtOptions options = {});

/// Σ ρ_H(x, y) υ(x, y) for a coupling on X × X.
double hamming_transport_cost(const Coupling& coupling, const ProfileSpace& space);

}  // namespace netopt
