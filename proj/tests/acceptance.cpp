// Acceptance run on the canonical desk-scale instance: path graph on 4
// vertices, q = 2, uniform default measure, beta = 0.2, T = 200, twenty i.i.d.
// schedules (seeds 1..20) and five shock schedules (seeds 101..105).
// Prints one PASS/FAIL line per criterion; exit status 0 iff all pass.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include "commands.hpp"
#include "netopt/centralized.hpp"
#include "netopt/glauber.hpp"
#include "netopt/schedules.hpp"
#include "netopt/theory.hpp"
#include "netopt/transport.hpp"

using namespace netopt;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kT = 200;
constexpr double kBeta = 0.2;

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
  std::printf("AC%-2d %s  %s: %s\n", id, ok ? "PASS" : "FAIL", title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

struct Case {
  std::string label;
  DenseProblem problem;
  CentralizedTrajectory pis;
  DecentralizedTrajectory mus;
};

Instance canonical() { return Instance{path_graph(4), 2, DefaultMeasure::uniform(4, 2), kBeta}; }

std::vector<Case> build_cases() {
  const Instance inst = canonical();
  std::vector<Case> cases;
  cases.reserve(25);
  auto add = [&](std::string label, const CostSchedule& s) {
    DenseProblem p(inst, s);
    CentralizedTrajectory pis(p);
    DecentralizedTrajectory mus(p);
    cases.push_back(Case{std::move(label), std::move(p), std::move(pis), std::move(mus)});
  };
  for (std::uint64_t seed = 1; seed <= 20; ++seed) add("iid:" + std::to_string(seed), generate_iid(inst.graph, 2, kT, seed));
  for (std::uint64_t seed = 101; seed <= 105; ++seed) {
    add("shocks:" + std::to_string(seed), generate_shocks(inst.graph, 2, kT, seed, 25));
  }
  return cases;
}

void ac1_detailed_balance(const std::vector<Case>& cases) {
  double worst = 0.0;
  for (const Case& c : cases) {
    const ProfileSpace& sp = c.problem.space();
    for (std::size_t t = 1; t <= 50; ++t) {
      const GlauberKernel k = kernel_for_round(c.problem, t);
      const auto pi = c.pis.pi(t).probs();
      std::vector<Dist> rows;
      for (std::size_t x = 0; x < sp.size(); ++x) rows.push_back(k.kernel_row(sp, x));
      for (std::size_t x = 0; x < sp.size(); ++x) {
        for (std::size_t y = 0; y < sp.size(); ++y) {
          worst = std::max(worst, std::abs(pi[x] * rows[x].probs()[y] - pi[y] * rows[y].probs()[x]));
        }
      }
    }
  }
  report(1, worst <= 1e-12, "detailed balance",
         "max |pi(x)P(y|x) - pi(y)P(x|y)| = " + sci(worst) + " <= 1e-12 over 16x16 pairs, t <= 50, 25 schedules");
}

void ac2_invariance(const std::vector<Case>& cases) {
  double worst = 0.0;
  for (const Case& c : cases) {
    for (std::size_t t = 1; t <= 50; ++t) {
      const GlauberKernel k = kernel_for_round(c.problem, t);
      worst = std::max(worst, tv_distance(k.apply(c.problem.space(), c.pis.pi(t)), c.pis.pi(t)));
    }
  }
  report(2, worst <= 1e-12, "invariance", "max TV(P_t pi_t, pi_t) = " + sci(worst) + " <= 1e-12, t <= 50");
}

void ac3_equivalence(const std::vector<Case>& cases) {
  double worst = 0.0;
  for (const Case& c : cases) {
    const DenseProblem& p = c.problem;
    Dist rec = p.mu0();
    for (std::size_t t = 1; t <= kT; ++t) {
      const Dist closed = t == 1 ? p.mu0()
                                 : centralized_strategy_closed_form(p.running_avg(t - 1), p.instance(), p.space());
      worst = std::max(worst, tv_distance(rec, closed));
      rec = centralized_step_recursive(rec, p.f_table(t), t, p.mu0(), kBeta);
    }
  }
  report(3, worst <= 1e-10, "strategy equivalence",
         "max TV(recursive, closed form) = " + sci(worst) + " <= 1e-10, t <= 200");
}

void ac4_kl_step(const std::vector<Case>& cases) {
  const Instance inst = canonical();
  double worst = -1e300, at9 = 0.0;
  bool ok = true;
  for (const Case& c : cases) {
    for (std::size_t t = 1; t <= kT; ++t) {
      const double kl = kl_divergence(c.pis.pi(t), c.pis.pi(t + 1));
      const double bound = kl_step_bound(kBeta, inst.graph, t);
      ok &= kl <= bound;
      worst = std::max(worst, kl - bound);
      if (t == 9) at9 = std::max(at9, kl);
    }
  }
  const double b9 = kl_step_bound(kBeta, inst.graph, 9);
  ok &= std::abs(b9 - 0.1152) <= 1e-12 && at9 <= b9;
  report(4, ok, "KL step bound",
         "max (D(pi_t||pi_t+1) - bound) = " + sci(worst) + "; t=9 bound " + sci(b9) + " (0.1152), measured max " +
             sci(at9));
}

void ac5_centralized_regret(const std::vector<Case>& cases) {
  double worst = -1e300;
  bool ok = true;
  for (const Case& c : cases) {
    const RegretLedger r = centralized_regret(c.problem, c.pis);
    for (std::size_t T = 1; T <= kT; ++T) {
      ok &= r.regret_at(T) <= r.bound_values[T - 1];
      worst = std::max(worst, r.regret_at(T) - r.bound_values[T - 1]);
    }
  }
  const double b99 = centralized_regret_bound(kBeta, path_graph(4), 0.5, 99);
  ok &= std::abs(b99 - 55.82) <= 0.005;
  report(5, ok, "centralized regret bound",
         "max (R_T - bound) = " + sci(worst) + " over T <= 200; bound at T=99 is " + std::to_string(b99));
}

void ac6_gibbs_inequalities() {
  std::mt19937_64 gen(20261016);
  std::uniform_int_distribution<std::size_t> size(2, 64);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = size(gen);
    const double scale = std::exp(std::log(0.01) + unit(gen) * std::log(1000.0));
    std::vector<double> w(n), g(n), h(n), diff(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = unit(gen) + 1e-3;
      g[i] = scale * (2.0 * unit(gen) - 1.0);
      h[i] = scale * (2.0 * unit(gen) - 1.0);
      diff[i] = g[i] - h[i];
    }
    double z = 0.0;
    for (double x : w) z += x;
    for (double& x : w) x /= z;
    const Dist base = Dist::from_probs(w);
    const Dist mg = gibbs(base, g), mh = gibbs(base, h);
    const double s = span_seminorm(diff);
    const double sg = span_seminorm(g);
    worst = std::min(worst, s * s / 8.0 - kl_divergence(mg, mh));
    worst = std::min(worst, s / 4.0 - tv_distance(mg, mh));
    worst = std::min(worst, expectation(base, g) + sg * sg / 8.0 - log_mgf(base, g));
  }
  report(6, worst >= -1e-12, "Gibbs perturbation and Hoeffding",
         "min slack " + sci(worst) + " >= -1e-12 over 1000 triples, supports 2..64");
}

void ac7_curvature(const std::vector<Case>& cases) {
  double worst = 1.0;
  for (const Case& c : cases) {
    for (std::size_t t = 1; t <= 50; ++t) {
      const auto k = ricci_estimate(kernel_for_round(c.problem, t), c.problem.space());
      worst = std::min(worst, k.value_or(-1.0));
    }
  }
  const double max_w1 = 1.0 - worst;
  report(7, max_w1 <= 0.85 + 1e-10, "curvature",
         "max W1 between adjacent kernel rows = " + std::to_string(max_w1) + " <= 0.85 + 1e-10, t <= 50");
}

void ac8_ac9_tracking_and_regret(const std::vector<Case>& cases) {
  const Instance inst = canonical();
  const ThmConstants k = theorem_constants(inst);
  std::vector<double> deltas;
  for (std::size_t t = 1; t <= kT; ++t) deltas.push_back(delta_t(kBeta, 4, 2, t));
  const std::vector<double> tracking = tracking_bounds(kT, k.kappa_star, deltas, 0.0);
  double w_worst = -1e300, r_worst = -1e300, tv_worst = -1e300;
  bool w_ok = true, r_ok = true, tv_ok = true;
  for (const Case& c : cases) {
    const RegretLedger li = decentralized_regret(c.problem, c.mus);
    for (std::size_t t = 1; t <= kT; ++t) {
      const double w1 = wasserstein1_hamming(c.mus.mu(t), c.pis.pi(t), c.problem.space());
      w_ok &= w1 <= tracking[t - 1];
      w_worst = std::max(w_worst, w1 - tracking[t - 1]);
      const double bound = decentralized_regret_bound(k, inst, t);
      r_ok &= li.regret_at(t) <= bound;
      r_worst = std::max(r_worst, li.regret_at(t) - bound);
      const double tv = tv_distance(c.pis.pi(t), c.mus.mu(t));
      const double tvb = k.K * p_poly(t, 1.0 - k.kappa_star);
      tv_ok &= tv <= tvb;
      tv_worst = std::max(tv_worst, tv - tvb);
    }
  }
  report(8, w_ok, "W1 tracking", "max (W1(mu_t, pi_t) - tracking bound) = " + sci(w_worst) + ", t <= 200");
  report(9, r_ok && tv_ok, "decentralized regret bound",
         "max (R^LI_T - bound) = " + sci(r_worst) + "; max (TV - K p_t(1-kappa*)) = " + sci(tv_worst));
}

void ac10_p_poly() {
  bool identity = true, decrease = true, reach = true;
  double worst_identity = 0.0;
  std::string firsts;
  for (double u : {0.1, 0.3, 0.5, 0.7, 0.85, 0.9}) {
    const std::size_t T0 = compute_T0_T1(1.0, u).first;
    double prev = p_poly(1, u);
    for (std::size_t t = 1; t < 10000; ++t) {
      const double next = p_poly(t + 1, u);
      const double err = std::abs(next - (u * prev + 1.0 / static_cast<double>(t + 1)));
      worst_identity = std::max(worst_identity, err);
      identity &= err <= 1e-14;
      if (t >= T0) decrease &= next < prev;
      prev = next;
    }
    // Threshold search by the recurrence, far past 1e5.
    double p = 0.0;
    std::size_t first = 0;
    for (std::size_t t = 1; t <= 100000000; ++t) {
      p = u * p + 1.0 / static_cast<double>(t);
      if (p <= 1e-6) {
        first = t;
        break;
      }
    }
    reach &= first != 0 && first < 100000;
    firsts += (firsts.empty() ? "" : ", ") + std::string("u=") + std::to_string(u).substr(0, 4) + ":" +
              (first ? std::to_string(first) : std::string(">1e8"));
  }
  report(10, identity && decrease && reach, "p_t(u) properties",
         std::string("recurrence max err ") + sci(worst_identity) + (identity ? " ok" : " BAD") +
             "; strict decrease from T0 to 1e4 " + (decrease ? "ok" : "BAD") +
             "; first t with p_t <= 1e-6 [" + firsts + "] must be < 1e5" +
             (reach ? "" : " (unattainable: p_t(u) >= 1/t, so p_t <= 1e-6 needs t >= 1e6)"));
}

void ac11_cost_bounds() {
  std::mt19937_64 gen(911);
  std::uniform_int_distribution<std::size_t> nv(2, 8);
  std::uniform_int_distribution<int> qd(2, 3);
  std::bernoulli_distribution coin(0.5);
  double sup_slack = 1e300, lip_slack = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = nv(gen);
    const int q = qd(gen);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        if (coin(gen)) edges.emplace_back(u, v);
      }
    }
    const NetworkGraph g(n, edges);
    const NetworkCost f = generate_iid(g, q, 1, gen()).at(1);
    const ProfileSpace space(n, q);
    const std::vector<double> table = tabulate(f, g, space);
    const double cap = static_cast<double>(n * (g.max_degree() + 1));
    sup_slack = std::min(sup_slack, cap - sup_norm(table));
    lip_slack = std::min(lip_slack, 2.0 * cap - lipschitz_constant(table, space));
  }
  report(11, sup_slack >= 0.0 && lip_slack >= 0.0, "cost sup-norm and Lipschitz",
         "min slack sup " + sci(sup_slack) + ", Lipschitz " + sci(lip_slack) + " over 1000 random costs (|V| <= 8, q <= 3)");
}

void ac12_monte_carlo(const std::vector<Case>& cases) {
  double tv_worst = 0.0, w_worst = 0.0, gap_worst = 0.0;
  const std::vector<std::size_t> checkpoints{5, 20, 50};
  MonteCarloOptions opts;
  opts.replicas = 100000;
  opts.checkpoints = checkpoints;
  opts.workers = std::max(1u, std::thread::hardware_concurrency());
  for (const Case& c : cases) {
    opts.seed = 7;
    const MonteCarloResult mc = run_replicas(c.problem.instance(), c.problem.schedule(), 50, opts);
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      const std::size_t t = checkpoints[k];
      const Dist emp = mc.empirical(k);
      const ProfileSpace& sp = c.problem.space();
      tv_worst = std::max(tv_worst, tv_distance(emp, c.mus.mu(t)));
      w_worst = std::max(w_worst, wasserstein1_hamming(emp, c.mus.mu(t), sp));
      gap_worst = std::max(gap_worst, std::abs(wasserstein1_hamming(emp, c.pis.pi(t), sp) -
                                               wasserstein1_hamming(c.mus.mu(t), c.pis.pi(t), sp)));
    }
  }
  report(12, tv_worst <= 0.02 && w_worst <= 0.08 && gap_worst <= 0.08, "Monte Carlo vs exact",
         "1e5 replicas, t in {5,20,50}: max TV " + sci(tv_worst) + " <= 0.02, max W1(emp, mu_t) " + sci(w_worst) +
             ", max |W1(emp,pi_t) - W1(mu_t,pi_t)| " + sci(gap_worst) + " <= 0.08");
}

void ac13_sublinear(const std::vector<Case>& cases) {
  std::vector<double> avg(4, 0.0);
  for (std::size_t i = 0; i < 20; ++i) {
    const RegretLedger li = decentralized_regret(cases[i].problem, cases[i].mus);
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t T = 50 * (k + 1);
      avg[k] += li.regret_at(T) / static_cast<double>(T) / 20.0;
    }
  }
  bool ok = true;
  std::string vals;
  for (std::size_t k = 0; k < 4; ++k) {
    if (k > 0) ok &= avg[k] < avg[k - 1];
    vals += (k ? ", " : "") + sci(avg[k]);
  }
  report(13, ok, "sublinear regret", "mean R^LI_T/T at T = 50,100,150,200: " + vals);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void ac14_determinism() {
  const fs::path root = fs::temp_directory_path() / ("netopt_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::ostringstream sink;
  bool ok = true;
  std::string detail;
  for (const char* mode : {"exact", "montecarlo"}) {
    std::vector<std::string> files;
    for (const char* run : {"a", "b"}) {
      const fs::path dir = root / mode / run;
      std::vector<std::string> args{"netopt", "simulate", "--mode", mode, "--seed", "7", "--T", "200",
                                    "--replicas", "5000", "--workers", run[0] == 'a' ? "1" : "3",
                                    "--output-dir", dir.string()};
      if (std::string(mode) == "exact") args.push_back("--trajectory");
      const int rc = netopt::cli::run(args, sink, sink);
      ok &= rc == 0;
      const bool exact = std::string(mode) == "exact";
      files.push_back(slurp(dir / (exact ? "rounds.csv" : "montecarlo.csv")) +
                      slurp(dir / (exact ? "trajectory.csv" : "checkpoints.csv")));
    }
    ok &= !files[0].empty() && files[0] == files[1];
    detail += std::string(detail.empty() ? "" : ", ") + mode + (files[0] == files[1] ? " identical" : " DIFFER") + " (" +
              std::to_string(files[0].size()) + " bytes)";
  }
  fs::remove_all(root);
  report(14, ok, "determinism", "two simulate runs with seed 7: " + detail);
}

}  // namespace

int main() {
  const std::vector<Case> cases = build_cases();
  ac1_detailed_balance(cases);
  ac2_invariance(cases);
  ac3_equivalence(cases);
  ac4_kl_step(cases);
  ac5_centralized_regret(cases);
  ac6_gibbs_inequalities();
  ac7_curvature(cases);
  ac8_ac9_tracking_and_regret(cases);
  ac10_p_poly();
  ac11_cost_bounds();
  ac12_monte_carlo(cases);
  ac13_sublinear(cases);
  ac14_determinism();
  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
