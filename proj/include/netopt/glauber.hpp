#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "netopt/centralized.hpp"
#include "netopt/cost.hpp"
#include "netopt/dist.hpp"
#include "netopt/profile.hpp"
#include "netopt/schedules.hpp"

namespace netopt {

/// ∝ μ_{v,0}(a)·exp(-β F_v(a, x_∂v)), normalized in the log domain.
/// `boundary` follows the order of g.neighbors(v).
Dist local_conditional(const NetworkGraph& g, Vertex v, const RunningAvgCost& running_avg,
                       std::span<const Action> boundary, const DefaultMeasure& mu0, double beta);

/// One round of the Glauber dynamics: activate a uniform vertex and resample
/// it from its local conditional under F_{t-1}. The kernel keeps a pointer
/// to the graph, which must outlive it; everything else is owned.
class GlauberKernel {
 public:
  /// Boundary tables are precomputed for vertices with q^deg ≤ this.
  static constexpr std::size_t kDenseTableLimit = 4096;

  GlauberKernel(const NetworkGraph& g, const RunningAvgCost& running_avg, const DefaultMeasure& mu0,
                double beta);

  const NetworkGraph& graph() const noexcept { return *graph_; }
  int q() const noexcept { return q_; }

  /// Conditional of vertex v given the boundary read from `profile`.
  void conditional(Vertex v, std::span<const Action> profile, std::span<double> out) const;
  /// Conditional of vertex v at a profile given by its dense index.
  void conditional(Vertex v, const ProfileSpace& space, std::size_t x, std::span<double> out) const;

  /// Inverse-CDF draw for vertex v with u ∈ [0, 1). A u that lands exactly on
  /// a CDF boundary goes to the lower action; zero-mass actions are never drawn.
  Action sample(Vertex v, std::span<const Action> profile, double u) const;

  /// ℙ(·|x) as a dense distribution. Throws CapExceeded via the space.
  Dist kernel_row(const ProfileSpace& space, std::size_t x) const;
  /// ℙ(y|x) for one pair.
  double transition(const ProfileSpace& space, std::size_t x, std::size_t y) const;
  /// (ℙμ)(y) = Σ_x μ(x) ℙ(y|x).
  Dist apply(const ProfileSpace& space, const Dist& mu) const;

 private:
  void compute_row(Vertex v, std::span<const Action> boundary, std::span<double> out) const;

  const NetworkGraph* graph_;
  RunningAvgCost running_avg_;
  DefaultMeasure mu0_;
  double beta_;
  int q_;
  // Per-vertex table of conditionals indexed by boundary code Σ_k x_{u_k} q^k;
  // empty for vertices above kDenseTableLimit.
  std::vector<std::vector<double>> tables_;
};

/// ℙ_t for t ≥ 1 (built from F_{t-1}).
GlauberKernel kernel_for_round(const DenseProblem& problem, std::size_t t);

/// μ_0..μ_T with μ_t = ℙ_t μ_{t-1}; mu(t) is 0-based in t.
class DecentralizedTrajectory {
 public:
  explicit DecentralizedTrajectory(const DenseProblem& problem);

  const Dist& mu(std::size_t t) const { return mus_.at(t); }
  std::size_t horizon() const noexcept { return mus_.size() - 1; }

 private:
  std::vector<Dist> mus_;
};

/// Exact distribution evolution μ_0..μ_T (index t).
std::vector<Dist> evolve_exact(const DenseProblem& problem);

/// R^LI_T for every prefix, sharing the centralized comparator.
RegretLedger decentralized_regret(const DenseProblem& problem, const DecentralizedTrajectory& mus);
RegretLedger decentralized_regret(const DenseProblem& problem);

/// One realization of the protocol: X_0 ~ μ0, then per round one uniformly
/// activated vertex resamples from its local conditional.
struct SamplePath {
  std::uint64_t seed = 0;
  std::size_t num_vertices = 0;
  std::vector<Vertex> activations;  // U_1..U_T
  std::vector<Action> profiles;     // X_0..X_T, row-major (T+1) × |V|
  std::vector<double> costs;        // f_t(X_t), t = 1..T

  std::size_t horizon() const noexcept { return activations.size(); }
  std::span<const Action> profile(std::size_t t) const {
    return std::span<const Action>(profiles).subspan(t * num_vertices, num_vertices);
  }
};

/// Random streams of one replica. Replicas sharing `activation_stream`
/// share their activation sequence.
struct PathStreams {
  std::uint64_t activation_stream = 0;
  std::uint64_t action_stream = 1;
};

/// Running averages F_0..F_{T-1} used by the rounds 1..T of a schedule.
std::vector<RunningAvgCost> running_averages(const CostSchedule& schedule);

SamplePath simulate_path(const Instance& inst, const CostSchedule& schedule, std::uint64_t seed,
                         std::size_t T, PathStreams streams = {});

/// Trajectory CSV: t,U_t,x_1..x_n,cost with 1-based vertices and actions;
/// the t = 0 row leaves U_t and cost empty.
void write_trajectory_csv(std::ostream& out, const SamplePath& path);

struct MonteCarloOptions {
  std::size_t replicas = 1000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;  // rounds whose profile histogram is recorded
  std::size_t workers = 1;
  std::size_t histogram_cap = ProfileSpace::kDefaultDenseCap;
};

/// Replica r uses streams (2r, 2r+1) of the base seed. Results do not depend
/// on the worker count.
struct MonteCarloResult {
  std::vector<std::size_t> checkpoints;
  std::vector<std::vector<std::uint64_t>> counts;  // per checkpoint, over profile indices
  std::vector<double> mean_cost;                   // E f_t(X_t), t = 1..T
  std::size_t replicas = 0;

  /// Empirical distribution at checkpoint k.
  Dist empirical(std::size_t k) const;
};

/// Histograms are skipped (counts empty) when q^|V| exceeds histogram_cap.
MonteCarloResult run_replicas(const Instance& inst, const CostSchedule& schedule, std::size_t T,
                              const MonteCarloOptions& options);

}  // namespace netopt
