#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "netopt/centralized.hpp"
#include "netopt/glauber.hpp"
#include "netopt/transport.hpp"

namespace netopt {

/// Default slack on every "lhs ≤ rhs" comparison.
inline constexpr double kBoundTolerance = 1e-9;

/// (1 - Δβ)/|V|. Throws RegularityViolation when Δβ ≥ 1.
double kappa_star(double beta, std::size_t max_degree, std::size_t num_vertices);

/// β|V|²(Δ+1)/(t+1), the per-round bound on W1(π_t, π_{t+1}).
double delta_t(double beta, std::size_t num_vertices, std::size_t max_degree, std::size_t t);

/// (1-κ)^{t-1} w1_init + Σ_{s=1}^{t-1} (1-κ)^{t-1-s} δ_s, with deltas[s-1] = δ_s.
double tracking_bound(std::size_t t, double kappa, std::span<const double> deltas, double w1_init);

/// All tracking bounds for t = 1..horizon (same arguments, computed by the
/// recursion b_{t+1} = (1-κ) b_t + δ_t).
std::vector<double> tracking_bounds(std::size_t horizon, double kappa, std::span<const double> deltas,
                                    double w1_init);

/// 1 - max over Hamming-adjacent (x, y) of W1(ℙ(·|x), ℙ(·|y)); nullopt when
/// the space exceeds the exact-OT cap.
std::optional<double> ricci_estimate(const GlauberKernel& kernel, const ProfileSpace& space,
                                     OtOptions options = {});

/// p_t(u) = Σ_{s=1}^t u^{t-s}/s by compensated direct summation.
double p_poly(std::size_t t, double u);

/// T0: first t with p_{t+1}(u) < p_t(u); T1: first t ≥ T0 with K p_t(u) ≤ 1/4.
/// Throws InvalidInput unless 0 ≤ u < 1 and K > 0.
std::pair<std::size_t, std::size_t> compute_T0_T1(double K, double u);

struct ThmConstants {
  double kappa_star;
  double K;
  double theta;
  double theta_d;
  std::size_t T0;
  std::size_t T1;
};

/// Throws RegularityViolation when Δβ ≥ 1.
ThmConstants theorem_constants(const Instance& inst);

/// Decentralized (local-interaction) regret bound, as printed with
/// |V| ln(1/θ_d) for the default-measure term.
double decentralized_regret_bound(const ThmConstants& c, const Instance& inst, std::size_t T);

/// Exact max_{x≠y} |f(x) - f(y)| / ρ_H(x, y) by pair enumeration.
double lipschitz_constant(std::span<const double> table, const ProfileSpace& space);

/// One certified inequality: passed ⇔ lhs ≤ rhs + tolerance.
struct BoundReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double tolerance = kBoundTolerance;
  bool applicable = true;
  bool passed = true;
  nlohmann::json context = nlohmann::json::object();
};

BoundReport make_report(std::string name, double lhs, double rhs, double tolerance = kBoundTolerance,
                        nlohmann::json context = nlohmann::json::object());
BoundReport not_applicable(std::string name, std::string reason);

struct SuiteOptions {
  std::size_t kernel_checks_horizon = 50;  // detailed balance, invariance, curvature
  OtOptions ot;
};

/// Runs every bound and property check on one instance and schedule.
/// Curvature-dependent checks become not-applicable when Δβ ≥ 1;
/// W1-based checks when the space is above the OT cap.
std::vector<BoundReport> check_suite(const DenseProblem& problem, SuiteOptions options = {});

bool suite_passed(std::span<const BoundReport> reports);
nlohmann::json reports_to_json(std::span<const BoundReport> reports);
/// Fixed-width table, one report per line.
std::string reports_table(std::span<const BoundReport> reports);

}  // namespace netopt
