#include "netopt/centralized.hpp"

#include <cmath>
#include <string>

#include "netopt/error.hpp"

namespace netopt {

double instantaneous_loss(const Dist& nu, std::span<const double> f_table, double beta, const Dist& mu0) {
  return beta * expectation(nu, f_table) + kl_divergence(nu, mu0);
}

double instantaneous_loss(const Dist& nu, const NetworkCost& f, const Instance& inst, const ProfileSpace& space) {
  const auto table = tabulate(f, inst.graph, space);
  return instantaneous_loss(nu, table, inst.beta, inst.mu0.joint(space));
}

Dist centralized_step_recursive(const Dist& pi_t, std::span<const double> f_table, std::size_t t,
                                const Dist& mu0, double beta) {
  if (t == 0) throw InvalidInput("recursive step needs t >= 1");
  if (pi_t.size() != mu0.size() || f_table.size() != mu0.size()) {
    throw InvalidInput("recursive step: size mismatch");
  }
  const double gamma = 1.0 / static_cast<double>(t);
  std::vector<double> lw(mu0.size());
  for (std::size_t i = 0; i < lw.size(); ++i) {
    lw[i] = (gamma * mu0.log_probs()[i] + pi_t.log_probs()[i] - gamma * beta * f_table[i]) / (1.0 + gamma);
  }
  return Dist::from_log_weights(std::move(lw));
}

Dist centralized_strategy_closed_form(const RunningAvgCost& running_avg, const Instance& inst,
                                      const ProfileSpace& space) {
  auto g = tabulate(running_avg.avg, inst.graph, space);
  for (double& x : g) x *= -inst.beta;
  return gibbs(inst.mu0.joint(space), g);
}

Comparator best_static_comparator(std::span<const std::vector<double>> tables, const Dist& mu0, double beta) {
  if (tables.empty()) throw InvalidInput("comparator needs at least one round");
  const double T = static_cast<double>(tables.size());
  std::vector<double> g(mu0.size(), 0.0);
  for (const auto& f : tables) {
    if (f.size() != mu0.size()) throw InvalidInput("comparator: table size mismatch");
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += f[i];
  }
  for (double& x : g) x *= -beta / T;
  const GibbsSpec spec = gibbs_spec(mu0, g);
  return Comparator{spec.realize(), -T * spec.log_partition};
}

DenseProblem::DenseProblem(const Instance& inst, const CostSchedule& schedule, std::size_t dense_cap)
    : inst_(inst), schedule_(schedule), space_(inst.graph.num_vertices(), inst.q, dense_cap),
      mu0_(Dist::uniform(1)) {
  inst_.validate();
  if (!(schedule_.graph() == inst_.graph)) throw InvalidInput("schedule graph differs from the instance graph");
  if (schedule_.q() != inst_.q) throw InvalidInput("schedule alphabet differs from the instance q");
  mu0_ = inst_.mu0.joint(space_);
  f_tables_.reserve(schedule_.horizon());
  running_.reserve(schedule_.horizon() + 1);
  running_.push_back(RunningAvgCost::initial(inst_.graph, inst_.q));
  for (const NetworkCost& f : schedule_.costs()) {
    f_tables_.push_back(tabulate(f, inst_.graph, space_));
    running_.push_back(update_running_average(running_.back(), f));
  }
}

CentralizedTrajectory::CentralizedTrajectory(const DenseProblem& problem) {
  pis_.reserve(problem.horizon() + 1);
  for (std::size_t t = 0; t <= problem.horizon(); ++t) {
    pis_.push_back(centralized_strategy_closed_form(problem.running_avg(t), problem.instance(), problem.space()));
  }
}

std::vector<double> comparator_values(const DenseProblem& problem) {
  const Dist& mu0 = problem.mu0();
  const double beta = problem.instance().beta;
  std::vector<double> sum(mu0.size(), 0.0), g(mu0.size());
  std::vector<double> out;
  out.reserve(problem.horizon());
  for (std::size_t T = 1; T <= problem.horizon(); ++T) {
    const auto& f = problem.f_table(T);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += f[i];
    const double scale = -beta / static_cast<double>(T);
    for (std::size_t i = 0; i < sum.size(); ++i) g[i] = scale * sum[i];
    out.push_back(-static_cast<double>(T) * log_mgf(mu0, g));
  }
  return out;
}

RegretLedger centralized_regret(const DenseProblem& problem, const CentralizedTrajectory& pis) {
  const Instance& inst = problem.instance();
  RegretLedger ledger;
  ledger.comparator_values = comparator_values(problem);
  double cum = 0.0;
  for (std::size_t t = 1; t <= problem.horizon(); ++t) {
    const double loss = instantaneous_loss(pis.pi(t), problem.f_table(t), inst.beta, problem.mu0());
    ledger.per_round_losses.push_back(loss);
    cum += loss;
    ledger.cumulative_regret.push_back(cum - ledger.comparator_values[t - 1]);
    ledger.bound_values.push_back(centralized_regret_bound(inst.beta, inst.graph, inst.mu0.theta_d(), t));
  }
  return ledger;
}

RegretLedger centralized_regret(const DenseProblem& problem) {
  return centralized_regret(problem, CentralizedTrajectory(problem));
}

double centralized_regret_bound(double beta, const NetworkGraph& g, double theta_d, std::size_t T) {
  if (!(theta_d > 0.0 && theta_d <= 1.0)) throw InvalidInput("theta_d must lie in (0, 1]");
  const double n = static_cast<double>(g.num_vertices());
  const double c = beta * n * static_cast<double>(g.max_degree() + 1);
  return 2.0 * c * c * std::log(static_cast<double>(T) + 1.0) + n * std::log(1.0 / theta_d);
}

double kl_step_bound(double beta, const NetworkGraph& g, std::size_t t) {
  const double c = beta * static_cast<double>(g.num_vertices()) * static_cast<double>(g.max_degree() + 1) /
                   (static_cast<double>(t) + 1.0);
  return 2.0 * c * c;
}

}  // namespace netopt
