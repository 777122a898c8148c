#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netopt/cost.hpp"
#include "netopt/dist.hpp"
#include "netopt/profile.hpp"
#include "netopt/schedules.hpp"

namespace netopt {

/// ℓ(ν) = β⟨ν, f⟩ + D(ν‖μ0), with f given as a table over the profile space.
double instantaneous_loss(const Dist& nu, std::span<const double> f_table, double beta, const Dist& mu0);
double instantaneous_loss(const Dist& nu, const NetworkCost& f, const Instance& inst, const ProfileSpace& space);

/// One step of the proximal recursion with step γ_t = 1/t:
/// π_{t+1} ∝ (μ0^γ · π_t · exp(-γβ f_t))^{1/(1+γ)}.
Dist centralized_step_recursive(const Dist& pi_t, std::span<const double> f_table, std::size_t t,
                                const Dist& mu0, double beta);

/// π_{t+1} = μ0·exp(-β F_t)/Z̃, evaluated from the componentwise running average.
Dist centralized_strategy_closed_form(const RunningAvgCost& running_avg, const Instance& inst,
                                      const ProfileSpace& space);

/// Best fixed distribution in hindsight for Σ_t ℓ_t and its value.
struct Comparator {
  Dist minimizer;
  double value;
};

/// ν* = gibbs(μ0, -(β/T)Σ_t f_t), value -T ln⟨μ0, exp(-(β/T)Σ_t f_t)⟩.
/// `tables` holds f_1..f_T as profile tables; T ≥ 1.
Comparator best_static_comparator(std::span<const std::vector<double>> tables, const Dist& mu0, double beta);

/// Per-round losses, the comparator value of every prefix, and the
/// resulting cumulative regret; index k holds round / horizon k+1.
struct RegretLedger {
  std::vector<double> per_round_losses;
  std::vector<double> comparator_values;
  std::vector<double> cumulative_regret;
  std::vector<double> bound_values;  // empty when no bound applies

  std::size_t horizon() const noexcept { return per_round_losses.size(); }
  double regret_at(std::size_t T) const { return cumulative_regret.at(T - 1); }
};

/// Dense desk-scale view of an instance and its schedule: the profile space,
/// μ0 on it, and every f_t and F_t as tables.
class DenseProblem {
 public:
  /// Throws CapExceeded when q^|V| > dense_cap.
  DenseProblem(const Instance& inst, const CostSchedule& schedule,
               std::size_t dense_cap = ProfileSpace::kDefaultDenseCap);

  const Instance& instance() const noexcept { return inst_; }
  const CostSchedule& schedule() const noexcept { return schedule_; }
  const ProfileSpace& space() const noexcept { return space_; }
  const Dist& mu0() const noexcept { return mu0_; }
  std::size_t horizon() const noexcept { return f_tables_.size(); }

  /// f_t table, t in 1..T.
  const std::vector<double>& f_table(std::size_t t) const { return f_tables_.at(t - 1); }
  std::span<const std::vector<double>> f_tables() const noexcept { return f_tables_; }
  /// Componentwise F_t, t in 0..T.
  const RunningAvgCost& running_avg(std::size_t t) const { return running_.at(t); }

 private:
  Instance inst_;
  CostSchedule schedule_;
  ProfileSpace space_;
  Dist mu0_;
  std::vector<std::vector<double>> f_tables_;
  std::vector<RunningAvgCost> running_;
};

/// π_1..π_{T+1} via the closed form; pi(t) is 1-based.
class CentralizedTrajectory {
 public:
  explicit CentralizedTrajectory(const DenseProblem& problem);

  const Dist& pi(std::size_t t) const { return pis_.at(t - 1); }
  std::size_t last() const noexcept { return pis_.size(); }

 private:
  std::vector<Dist> pis_;
};

/// R_T for every prefix T with π_t from the closed form; bound_values from
/// centralized_regret_bound.
RegretLedger centralized_regret(const DenseProblem& problem, const CentralizedTrajectory& pis);
RegretLedger centralized_regret(const DenseProblem& problem);

/// Comparator value of every prefix T = 1..horizon.
std::vector<double> comparator_values(const DenseProblem& problem);

/// 2(β|V|(Δ+1))² ln(T+1) + |V| ln(1/θ_d).
double centralized_regret_bound(double beta, const NetworkGraph& g, double theta_d, std::size_t T);

/// 2(β|V|(Δ+1)/(t+1))², the per-step relative-entropy bound.
double kl_step_bound(double beta, const NetworkGraph& g, std::size_t t);

}  // namespace netopt
