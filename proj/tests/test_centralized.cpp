#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "netopt/centralized.hpp"
#include "netopt/error.hpp"
#include "netopt/rng.hpp"
#include "oracles.hpp"

using namespace netopt;

namespace {

double total_loss(const Dist& nu, std::span<const std::vector<double>> tables, const Dist& mu0, double beta) {
  double s = 0.0;
  for (const auto& f : tables) s += instantaneous_loss(nu, f, beta, mu0);
  return s;
}

}  // namespace

TEST_CASE("loss of the default measure is beta times its expected cost") {
  const auto p = fixtures::path4_iid(1, 5);
  const double ell = instantaneous_loss(p.mu0(), p.f_table(1), 0.2, p.mu0());
  CHECK(ell == doctest::Approx(0.2 * expectation(p.mu0(), p.f_table(1))));
  CHECK(instantaneous_loss(p.mu0(), p.schedule().at(1), p.instance(), p.space()) == doctest::Approx(ell));
}

TEST_CASE("closed form matches the exp-domain oracle") {
  const auto p = fixtures::path4_iid(3, 20);
  const CentralizedTrajectory pis(p);
  CHECK(pis.last() == 21);
  CHECK(tv_distance(pis.pi(1), p.mu0()) == 0.0);
  std::vector<double> sum(16, 0.0);
  for (std::size_t t = 1; t <= 20; ++t) {
    const auto ref_f = oracle::cost_table(p.schedule().at(t), p.instance().graph, 2);
    for (std::size_t i = 0; i < 16; ++i) sum[i] += ref_f[i];
    std::vector<double> g(16);
    for (std::size_t i = 0; i < 16; ++i) g[i] = -0.2 * sum[i] / static_cast<double>(t + 1);
    const auto ref = oracle::gibbs(std::vector<double>(16, 1.0 / 16.0), g);
    for (std::size_t i = 0; i < 16; ++i) CHECK(pis.pi(t + 1)[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("recursive step reproduces the closed form") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p = fixtures::path4_iid(seed, 200);
    const CentralizedTrajectory pis(p);
    Dist pi = p.mu0();
    double worst = 0.0;
    for (std::size_t t = 1; t <= 200; ++t) {
      pi = centralized_step_recursive(pi, p.f_table(t), t, p.mu0(), 0.2);
      worst = std::max(worst, tv_distance(pi, pis.pi(t + 1)));
    }
    CHECK(worst <= 1e-10);
  }
  const auto p = fixtures::path4_iid(1, 2);
  CHECK_THROWS_AS(centralized_step_recursive(p.mu0(), p.f_table(1), 0, p.mu0(), 0.2), InvalidInput);
}

TEST_CASE("comparator is the minimizer of the cumulative loss") {
  const auto p = fixtures::path4_iid(4, 30);
  const auto comp = best_static_comparator(p.f_tables(), p.mu0(), 0.2);
  CHECK(total_loss(comp.minimizer, p.f_tables(), p.mu0(), 0.2) == doctest::Approx(comp.value).epsilon(1e-12));

  CounterRng rng(99, 0);
  for (int k = 0; k < 10000; ++k) {
    std::vector<double> w(16);
    double s = 0.0;
    for (double& x : w) s += (x = -std::log(1.0 - rng.uniform01()));
    for (double& x : w) x /= s;
    // Mix toward the minimizer sometimes to probe its neighborhood.
    if (k % 2 == 1) {
      const double lam = rng.uniform01() * 0.1;
      for (std::size_t i = 0; i < 16; ++i) w[i] = lam * w[i] + (1.0 - lam) * comp.minimizer[i];
    }
    REQUIRE(total_loss(Dist::from_probs(w), p.f_tables(), p.mu0(), 0.2) >= comp.value - 1e-12);
  }

  // First-order condition: β Σf + T ln(ν/μ0) is constant on the support.
  std::vector<double> grad(16, 0.0);
  for (const auto& f : p.f_tables()) {
    for (std::size_t i = 0; i < 16; ++i) grad[i] += 0.2 * f[i];
  }
  for (std::size_t i = 0; i < 16; ++i) grad[i] += 30.0 * std::log(comp.minimizer[i] / p.mu0()[i]);
  CHECK(span_seminorm(grad) <= 1e-10);

  const auto cv = comparator_values(p);
  CHECK(cv.back() == doctest::Approx(comp.value).epsilon(1e-12));
  CHECK(cv.front() == doctest::Approx(best_static_comparator(p.f_tables().subspan(0, 1), p.mu0(), 0.2).value));
}

TEST_CASE("regret bound constants") {
  const auto g = path_graph(4);
  // 2(0.2·4·3)² ln 100 + 4 ln 2
  CHECK(centralized_regret_bound(0.2, g, 0.5, 99) ==
        doctest::Approx(11.52 * std::log(100.0) + 4.0 * std::log(2.0)).epsilon(1e-14));
  CHECK(centralized_regret_bound(0.2, g, 0.5, 99) == doctest::Approx(55.824).epsilon(1e-4));
  CHECK(kl_step_bound(0.2, g, 9) == doctest::Approx(0.1152).epsilon(1e-14));
  // β = 0: constant in T.
  CHECK(centralized_regret_bound(0.0, g, 0.5, 1) == centralized_regret_bound(0.0, g, 0.5, 1000));
  // Doubling |V| at fixed Δ and β quadruples the leading coefficient.
  const auto g8 = path_graph(8);
  const double lead4 = centralized_regret_bound(0.2, g, 1.0, 10) / std::log(11.0);
  const double lead8 = centralized_regret_bound(0.2, g8, 1.0, 10) / std::log(11.0);
  CHECK(lead8 == doctest::Approx(4.0 * lead4));
}

TEST_CASE("centralized regret stays below its bound") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = fixtures::path4_iid(seed, 200);
    const auto ledger = centralized_regret(p);
    REQUIRE(ledger.horizon() == 200);
    for (std::size_t T = 1; T <= 200; ++T) CHECK(ledger.regret_at(T) <= ledger.bound_values[T - 1]);
  }
}

TEST_CASE("zero schedule has zero loss and regret") {
  const auto inst = fixtures::path4();
  const DenseProblem p(inst, zero_schedule(inst.graph, 2, 20));
  const auto ledger = centralized_regret(p);
  for (std::size_t T = 1; T <= 20; ++T) {
    CHECK(ledger.per_round_losses[T - 1] == 0.0);
    CHECK(std::abs(ledger.regret_at(T)) <= 1e-15);
  }
}

TEST_CASE("dense problem checks") {
  const auto inst = fixtures::path4();
  CHECK_THROWS_AS(DenseProblem(inst, generate_iid(path_graph(3), 2, 5, 1)), InvalidInput);
  CHECK_THROWS_AS(DenseProblem(inst, generate_iid(inst.graph, 2, 5, 1), 8), CapExceeded);
  const DenseProblem p(inst, generate_iid(inst.graph, 2, 5, 1));
  CHECK(p.running_avg(0).t == 0);
  CHECK(p.running_avg(5).t == 5);
  CHECK_THROWS(p.f_table(6));
}
