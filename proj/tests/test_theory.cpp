#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "netopt/error.hpp"
#include "netopt/theory.hpp"
#include "oracles.hpp"

using namespace netopt;

TEST_CASE("curvature and step constants") {
  CHECK(kappa_star(0.2, 2, 4) == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(kappa_star(0.0, 7, 5) == doctest::Approx(0.2));
  CHECK_THROWS_AS(kappa_star(0.5, 2, 4), RegularityViolation);
  CHECK_THROWS_AS(kappa_star(0.6, 2, 4), RegularityViolation);

  CHECK(delta_t(0.2, 4, 2, 3) == doctest::Approx(2.4).epsilon(1e-15));
  CHECK(delta_t(0.0, 4, 2, 3) == 0.0);
  CHECK(delta_t(0.2, 4, 2, 100) < delta_t(0.2, 4, 2, 99));
  CHECK_THROWS_AS(delta_t(0.2, 4, 2, 0), InvalidInput);
}

TEST_CASE("tracking bound") {
  const std::vector<double> deltas{2.0, 1.0, 0.5, 0.25};
  CHECK(tracking_bound(1, 0.15, deltas, 0.7) == 0.7);
  // (0.85)^2 0.7 + 0.85·2 + 1
  CHECK(tracking_bound(3, 0.15, deltas, 0.7) == doctest::Approx(0.85 * 0.85 * 0.7 + 0.85 * 2.0 + 1.0));
  const auto all = tracking_bounds(5, 0.15, deltas, 0.7);
  for (std::size_t t = 1; t <= 5; ++t) CHECK(all[t - 1] == doctest::Approx(tracking_bound(t, 0.15, deltas, 0.7)));

  // Constant δ: the series tends to δ/κ.
  const std::vector<double> flat(5000, 0.3);
  CHECK(tracking_bound(5000, 0.15, flat, 0.0) == doctest::Approx(0.3 / 0.15).epsilon(1e-12));
  CHECK_THROWS_AS(tracking_bound(0, 0.15, deltas, 0.0), InvalidInput);
  CHECK_THROWS_AS(tracking_bound(7, 0.15, deltas, 0.0), InvalidInput);
}

TEST_CASE("p_t polynomial") {
  for (double u : {0.0, 0.3, 0.9}) CHECK(p_poly(1, u) == 1.0);
  for (std::size_t t = 1; t < 50; ++t) CHECK(p_poly(t, 0.0) == doctest::Approx(1.0 / static_cast<double>(t)));
  CHECK(p_poly(2, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  // High-precision direct sums.
  CHECK(p_poly(100, 0.85) == doctest::Approx(0.071029000911591707425).epsilon(1e-14));
  CHECK(p_poly(10, 0.5) == doctest::Approx(0.23174603174603174603).epsilon(1e-14));
  CHECK(p_poly(1000, 0.9) == doctest::Approx(0.010091760631588168081).epsilon(1e-13));
  CHECK(p_poly(7, 0.3) == doctest::Approx(0.22225114285714285714).epsilon(1e-14));
  for (std::size_t t = 1; t < 200; ++t) {
    CHECK(p_poly(t, 0.7) >= 1.0 / static_cast<double>(t));
    CHECK(std::abs(p_poly(t + 1, 0.7) - (0.7 * p_poly(t, 0.7) + 1.0 / static_cast<double>(t + 1))) <= 1e-14);
  }
}

TEST_CASE("T0 and T1") {
  CHECK(compute_T0_T1(1.0, 0.0) == std::pair<std::size_t, std::size_t>{1, 4});
  const auto [T0, T1] = compute_T0_T1(9.6, 0.85);
  CHECK(T0 == 4);
  CHECK(T1 == 262);
  CHECK(9.6 * p_poly(T1, 0.85) <= 0.25);
  CHECK(9.6 * p_poly(T1 - 1, 0.85) > 0.25);
  CHECK(compute_T0_T1(9.6, 0.5) == std::pair<std::size_t, std::size_t>{2, 78});
  CHECK_THROWS_AS(compute_T0_T1(1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(compute_T0_T1(0.0, 0.5), InvalidInput);
}

TEST_CASE("theorem constants and the decentralized bound") {
  const auto inst = fixtures::path4();
  const auto c = theorem_constants(inst);
  CHECK(c.kappa_star == doctest::Approx(0.15));
  CHECK(c.K == doctest::Approx(9.6));
  CHECK(c.theta_d == 0.5);
  CHECK(c.theta == doctest::Approx(1.0 / 16.0));
  CHECK(c.T0 == 4);
  CHECK(c.T1 == 262);
  // 40-digit evaluations of the printed formula.
  CHECK(decentralized_regret_bound(c, inst, 1) == doctest::Approx(2899.935108479952297).epsilon(1e-13));
  CHECK(decentralized_regret_bound(c, inst, 200) == doctest::Approx(8621.752193052529101).epsilon(1e-13));

  // β = 0: only the KL-tracking, burn-in and default-measure terms remain.
  const auto flat = fixtures::path4(0.0);
  const auto c0 = theorem_constants(flat);
  CHECK(c0.K == 4.0);
  const double lq = std::log(8.0);
  const double T = 50.0;
  const double expected = 4.0 * 4.0 * (4.0 * lq + std::log(T)) * std::log(T + 1.0) +
                          static_cast<double>(c0.T1) * 4.0 * lq + 4.0 * std::log(2.0);
  CHECK(decentralized_regret_bound(c0, flat, 50) == doctest::Approx(expected).epsilon(1e-13));

  const Instance hot{path_graph(4), 2, DefaultMeasure::uniform(4, 2), 0.5};
  CHECK_THROWS_AS(theorem_constants(hot), RegularityViolation);
}

TEST_CASE("lipschitz constant: packed enumeration against the naive one") {
  for (const auto& [n, q] : std::vector<std::pair<std::size_t, int>>{{4, 2}, {3, 3}, {3, 5}, {2, 4}}) {
    const auto g = path_graph(n);
    const auto sched = generate_iid(g, q, 3, 9);
    const ProfileSpace space(n, q);
    for (const auto& f : sched.costs()) {
      const auto table = tabulate(f, g, space);
      double naive = 0.0;
      for (std::size_t i = 0; i < space.size(); ++i) {
        for (std::size_t j = 0; j < space.size(); ++j) {
          if (i != j) naive = std::max(naive, std::abs(table[i] - table[j]) / oracle::hamming(i, j, n, q));
        }
      }
      CHECK(lipschitz_constant(table, space) == doctest::Approx(naive).epsilon(1e-15));
    }
  }
}

TEST_CASE("ricci estimate") {
  // ψ ≡ 0: the estimate is at least 1/|V|.
  const auto g = path_graph(4);
  std::vector<double> phi{0.3, -0.2, 0.1, 0.4, -1.0, 1.0, 0.0, 0.5};
  const RunningAvgCost F{4, NetworkCost(4, 3, 2, phi, std::vector<double>(12, 0.0))};
  const ProfileSpace space(4, 2);
  const GlauberKernel free_kernel(g, F, DefaultMeasure::uniform(4, 2), 0.9);
  CHECK(*ricci_estimate(free_kernel, space) >= 0.25 - 1e-12);

  const auto p = fixtures::path4_iid(12, 10);
  const auto k = kernel_for_round(p, 10);
  CHECK(*ricci_estimate(k, space) >= 0.15 - 1e-10);

  const auto big = fixtures::path4_iid(12, 3);
  CHECK(!ricci_estimate(kernel_for_round(big, 2), space, OtOptions{8}).has_value());
}

TEST_CASE("reports") {
  const auto r = make_report("x", 1.0, 1.0 - 5e-10);
  CHECK(r.passed);
  CHECK(r.margin == doctest::Approx(-5e-10));
  CHECK(!make_report("x", 1.0, 0.9).passed);
  const auto na = not_applicable("curv", "because");
  CHECK(!na.applicable);
  CHECK(na.passed);
  const std::vector<BoundReport> reports{r, na};
  const auto j = reports_to_json(reports);
  CHECK(j.size() == 2);
  CHECK(j[1]["lhs"].is_null());
  CHECK(reports_table(reports).find("n/a (because)") != std::string::npos);
}

TEST_CASE("suite: zero schedule, random schedule, irregular instance") {
  const auto inst = fixtures::path4();
  const DenseProblem zero(inst, zero_schedule(inst.graph, 2, 20));
  const auto zr = check_suite(zero);
  CHECK(suite_passed(zr));
  for (const auto& r : zr) {
    if (r.name == "centralized_regret" || r.name == "decentralized_regret") CHECK(std::abs(r.lhs) <= 1e-12);
  }

  const auto p = fixtures::path4_iid(3, 60);
  const auto reports = check_suite(p);
  for (const auto& r : reports) {
    INFO(r.name, " lhs=", r.lhs, " rhs=", r.rhs);
    CHECK(r.passed);
    CHECK(r.applicable);
  }

  const Instance hot{path_graph(4), 2, DefaultMeasure::uniform(4, 2), 0.6};
  const DenseProblem hp(hot, generate_iid(hot.graph, 2, 30, 1));
  const auto hr = check_suite(hp);
  CHECK(suite_passed(hr));
  std::size_t na = 0;
  for (const auto& r : hr) na += !r.applicable;
  CHECK(na == 6);
}
