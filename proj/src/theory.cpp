#include "netopt/theory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>

#include "netopt/error.hpp"

namespace netopt {

using nlohmann::json;

double kappa_star(double beta, std::size_t max_degree, std::size_t num_vertices) {
  if (num_vertices == 0) throw InvalidInput("kappa_star needs at least one vertex");
  if (!(beta >= 0.0)) throw InvalidInput("beta must be nonnegative");
  const double db = static_cast<double>(max_degree) * beta;
  if (db >= 1.0) {
    throw RegularityViolation("regularity condition violated: max_degree * beta = " + std::to_string(db) +
                              " >= 1");
  }
  return (1.0 - db) / static_cast<double>(num_vertices);
}

double delta_t(double beta, std::size_t num_vertices, std::size_t max_degree, std::size_t t) {
  if (t == 0) throw InvalidInput("delta_t needs t >= 1");
  const double n = static_cast<double>(num_vertices);
  return beta * n * n * static_cast<double>(max_degree + 1) / (static_cast<double>(t) + 1.0);
}

double tracking_bound(std::size_t t, double kappa, std::span<const double> deltas, double w1_init) {
  if (t == 0) throw InvalidInput("tracking bound needs t >= 1");
  if (!(kappa > 0.0 && kappa < 1.0)) throw InvalidInput("kappa must lie in (0, 1)");
  if (deltas.size() + 1 < t) throw InvalidInput("tracking bound needs delta_1..delta_{t-1}");
  const double r = 1.0 - kappa;
  double b = std::pow(r, static_cast<double>(t - 1)) * w1_init;
  for (std::size_t s = 1; s < t; ++s) b += std::pow(r, static_cast<double>(t - 1 - s)) * deltas[s - 1];
  return b;
}

std::vector<double> tracking_bounds(std::size_t horizon, double kappa, std::span<const double> deltas,
                                    double w1_init) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw InvalidInput("kappa must lie in (0, 1)");
  if (horizon > 0 && deltas.size() + 1 < horizon) throw InvalidInput("tracking bounds need more deltas");
  std::vector<double> out;
  out.reserve(horizon);
  double b = w1_init;
  for (std::size_t t = 1; t <= horizon; ++t) {
    if (t > 1) b = (1.0 - kappa) * b + deltas[t - 2];
    out.push_back(b);
  }
  return out;
}

namespace {

// Conditional probabilities cond[x][v][a] of one kernel at every profile.
std::vector<double> all_conditionals(const GlauberKernel& kernel, const ProfileSpace& space) {
  const std::size_t n = space.num_vertices();
  const auto qs = static_cast<std::size_t>(space.q());
  std::vector<double> cond(space.size() * n * qs);
  std::vector<Action> x(n);
  for (std::size_t i = 0; i < space.size(); ++i) {
    space.decode(i, x);
    for (Vertex v = 0; v < n; ++v) {
      kernel.conditional(v, x, std::span<double>(cond).subspan((i * n + v) * qs, qs));
    }
  }
  return cond;
}

}  // namespace

std::optional<double> ricci_estimate(const GlauberKernel& kernel, const ProfileSpace& space, OtOptions options) {
  if (space.size() > options.cap) return std::nullopt;
  std::vector<Dist> rows;
  rows.reserve(space.size());
  for (std::size_t x = 0; x < space.size(); ++x) rows.push_back(kernel.kernel_row(space, x));
  double worst = 0.0;
  for (std::size_t x = 0; x < space.size(); ++x) {
    for (Vertex v = 0; v < space.num_vertices(); ++v) {
      for (Action a = space.digit(x, v) + 1; a < space.q(); ++a) {
        const std::size_t y = space.with_digit(x, v, a);
        worst = std::max(worst, wasserstein1_hamming(rows[x], rows[y], space, options));
      }
    }
  }
  return 1.0 - worst;
}

double p_poly(std::size_t t, double u) {
  if (t == 0) throw InvalidInput("p_t needs t >= 1");
  // s runs from t down to 1 so the power u^{t-s} is built incrementally.
  double sum = 0.0, comp = 0.0, power = 1.0;
  for (std::size_t s = t; s >= 1; --s) {
    const double y = power / static_cast<double>(s) - comp;
    const double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
    power *= u;
    if (power == 0.0) break;
  }
  return sum;
}

std::pair<std::size_t, std::size_t> compute_T0_T1(double K, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw InvalidInput("compute_T0_T1 needs 0 <= u < 1");
  if (!(K > 0.0) || !std::isfinite(K)) throw InvalidInput("compute_T0_T1 needs K > 0");
  constexpr std::size_t kMaxSteps = 1'000'000'000;
  std::size_t t = 1;
  double p = 1.0;
  std::size_t T0 = 0;
  while (true) {
    const double next = u * p + 1.0 / static_cast<double>(t + 1);
    if (T0 == 0 && next < p) T0 = t;
    if (T0 != 0 && K * p <= 0.25) return {T0, t};
    p = next;
    if (++t > kMaxSteps) throw InvalidInput("T1 not reached within 1e9 steps (u too close to 1)");
  }
}

ThmConstants theorem_constants(const Instance& inst) {
  inst.validate();
  const std::size_t n = inst.graph.num_vertices();
  const std::size_t delta = inst.graph.max_degree();
  ThmConstants c{};
  c.kappa_star = kappa_star(inst.beta, delta, n);
  const double nd = static_cast<double>(n);
  c.K = std::max(nd, inst.beta * nd * nd * static_cast<double>(delta + 1));
  c.theta = inst.mu0.theta();
  c.theta_d = inst.mu0.theta_d();
  std::tie(c.T0, c.T1) = compute_T0_T1(c.K, 1.0 - c.kappa_star);
  return c;
}

double decentralized_regret_bound(const ThmConstants& c, const Instance& inst, std::size_t T) {
  if (T == 0) throw InvalidInput("regret bound needs T >= 1");
  const double n = static_cast<double>(inst.graph.num_vertices());
  const double d1 = static_cast<double>(inst.graph.max_degree() + 1);
  const double db = static_cast<double>(inst.graph.max_degree()) * inst.beta;
  if (db >= 1.0) throw RegularityViolation("regularity condition violated: max_degree * beta >= 1");
  const double b = inst.beta;
  const double q = static_cast<double>(inst.q);
  const double Td = static_cast<double>(T);
  const double lnT1 = std::log(Td + 1.0);
  const double log_q2 = std::log(q * q / c.theta_d);
  const double tracking = (n / (1.0 - db)) * (2.0 * b * b * n * n * n * d1 * d1 + c.K * (n * log_q2 + std::log(Td))) * lnT1;
  const double centralized = 2.0 * (b * n * d1) * (b * n * d1) * lnT1;
  const double burn_in = static_cast<double>(c.T1) * n * log_q2;
  const double first_step = 2.0 * b * n * n * n * d1 / (1.0 - db);
  return tracking + centralized + burn_in + first_step + n * std::log(1.0 / c.theta_d);
}

double lipschitz_constant(std::span<const double> table, const ProfileSpace& space) {
  if (table.size() != space.size()) throw InvalidInput("lipschitz: table does not match the space");
  const std::size_t N = space.size();
  const std::size_t n = space.num_vertices();
  const unsigned bits = std::bit_width(static_cast<unsigned>(std::max(space.q() - 1, 1)));
  double best = 0.0;
  if (n * bits <= 64) {
    // Pack each profile into bit fields; Hamming distance is the number of
    // nonzero fields of the xor.
    std::vector<std::uint64_t> code(N, 0);
    std::uint64_t low = 0;
    for (std::size_t v = 0; v < n; ++v) low |= std::uint64_t{1} << (v * bits);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t v = 0; v < n; ++v) code[i] |= static_cast<std::uint64_t>(space.digit(i, v)) << (v * bits);
    }
    std::vector<double> inv(n + 1, 0.0);
    for (std::size_t d = 1; d <= n; ++d) inv[d] = 1.0 / static_cast<double>(d);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = i + 1; j < N; ++j) {
        const std::uint64_t z = code[i] ^ code[j];
        std::uint64_t m = z;
        for (unsigned k = 1; k < bits; ++k) m |= z >> k;
        const auto d = static_cast<std::size_t>(std::popcount(m & low));
        best = std::max(best, std::abs(table[i] - table[j]) * inv[d]);
      }
    }
    return best;
  }
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = i + 1; j < N; ++j) {
      best = std::max(best, std::abs(table[i] - table[j]) / static_cast<double>(space.hamming(i, j)));
    }
  }
  return best;
}

BoundReport make_report(std::string name, double lhs, double rhs, double tolerance, json context) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.tolerance = tolerance;
  r.applicable = true;
  r.passed = lhs <= rhs + tolerance;
  r.context = std::move(context);
  return r;
}

BoundReport not_applicable(std::string name, std::string reason) {
  BoundReport r;
  r.name = std::move(name);
  r.lhs = std::numeric_limits<double>::quiet_NaN();
  r.rhs = std::numeric_limits<double>::quiet_NaN();
  r.margin = std::numeric_limits<double>::quiet_NaN();
  r.applicable = false;
  r.passed = true;
  r.context = json{{"reason", std::move(reason)}};
  return r;
}

namespace {

// Tracks the worst (smallest) margin of a family of "lhs ≤ rhs" checks.
class Worst {
 public:
  explicit Worst(std::string name, double tolerance = kBoundTolerance)
      : name_(std::move(name)), tolerance_(tolerance) {}

  void add(double lhs, double rhs, json context) {
    ++count_;
    if (has_nan_) return;
    const bool nan = std::isnan(lhs) || std::isnan(rhs);
    if (nan || !seen_ || rhs - lhs < rhs_ - lhs_) {
      seen_ = true;
      has_nan_ = nan;
      lhs_ = lhs;
      rhs_ = rhs;
      context_ = std::move(context);
    }
  }

  BoundReport report(json extra = json::object()) const {
    if (!seen_) return not_applicable(name_, "no instances to check");
    json ctx = context_;
    ctx["checked"] = count_;
    for (auto it = extra.begin(); it != extra.end(); ++it) ctx[it.key()] = it.value();
    BoundReport r = make_report(name_, lhs_, rhs_, tolerance_, std::move(ctx));
    if (has_nan_) r.passed = false;
    return r;
  }

 private:
  std::string name_;
  double tolerance_;
  bool seen_ = false;
  bool has_nan_ = false;
  double lhs_ = 0.0;
  double rhs_ = 0.0;
  json context_;
  std::size_t count_ = 0;
};

std::vector<double> difference(std::span<const double> a, std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

std::vector<BoundReport> check_suite(const DenseProblem& problem, SuiteOptions options) {
  const Instance& inst = problem.instance();
  const ProfileSpace& space = problem.space();
  const std::size_t T = problem.horizon();
  const std::size_t n = inst.graph.num_vertices();
  const std::size_t delta = inst.graph.max_degree();
  const double nd = static_cast<double>(n);
  const double d1 = static_cast<double>(delta + 1);
  const double beta = inst.beta;
  const bool regular = static_cast<double>(delta) * beta < 1.0;
  const bool ot_ok = space.size() <= options.ot.cap;
  const std::size_t H = std::min(options.kernel_checks_horizon, T + 1);
  const json base_ctx{{"num_vertices", n}, {"max_degree", delta}, {"q", inst.q}, {"beta", beta}, {"T", T}};

  std::vector<BoundReport> out;
  const CentralizedTrajectory pis(problem);
  const DecentralizedTrajectory mus(problem);

  // Kernel structure: detailed balance, invariance, curvature.
  {
    Worst balance("detailed_balance", 1e-12), invariance("invariance", 1e-12), curvature("curvature", 1e-10);
    const double kstar = regular ? kappa_star(beta, delta, n) : 0.0;
    const auto qs = static_cast<std::size_t>(inst.q);
    for (std::size_t t = 1; t <= H; ++t) {
      const GlauberKernel kernel = kernel_for_round(problem, t);
      const Dist& pi = pis.pi(t);
      const auto cond = all_conditionals(kernel, space);
      double worst = 0.0;
      for (std::size_t x = 0; x < space.size(); ++x) {
        for (Vertex v = 0; v < n; ++v) {
          const Action xv = space.digit(x, v);
          for (Action a = 0; a < inst.q; ++a) {
            if (a == xv) continue;
            const std::size_t y = space.with_digit(x, v, a);
            const double fwd = pi[x] * cond[(x * n + v) * qs + static_cast<std::size_t>(a)] / nd;
            const double bwd = pi[y] * cond[(y * n + v) * qs + static_cast<std::size_t>(xv)] / nd;
            worst = std::max(worst, std::abs(fwd - bwd));
          }
        }
      }
      balance.add(worst, 0.0, json{{"t", t}});
      invariance.add(tv_distance(kernel.apply(space, pi), pi), 0.0, json{{"t", t}});
      if (regular && ot_ok) {
        const auto kappa_hat = ricci_estimate(kernel, space, options.ot);
        curvature.add(1.0 - *kappa_hat, 1.0 - kstar, json{{"t", t}, {"kappa_hat", *kappa_hat}});
      }
    }
    out.push_back(balance.report(base_ctx));
    out.push_back(invariance.report(base_ctx));
    if (!regular) {
      out.push_back(not_applicable("curvature", "max_degree * beta >= 1"));
    } else if (!ot_ok) {
      out.push_back(not_applicable("curvature", "profile space above the exact-OT cap"));
    } else {
      out.push_back(curvature.report(base_ctx));
    }
  }

  // Centralized strategy.
  {
    Worst equivalence("strategy_equivalence", 1e-10), kl_step("kl_step"), span_step("span_step"),
        gibbs_kl("gibbs_kl_perturbation"), gibbs_tv("gibbs_tv_perturbation"), pinsker("pinsker"),
        hoeffding("hoeffding_lemma"), w1_step("w1_step");
    Dist rec = problem.mu0();
    std::vector<double> prev_avg(space.size(), 0.0);
    for (std::size_t t = 1; t <= T; ++t) {
      if (t > 1) equivalence.add(tv_distance(rec, pis.pi(t)), 0.0, json{{"t", t}});
      rec = centralized_step_recursive(rec, problem.f_table(t), t, problem.mu0(), beta);

      const Dist& a = pis.pi(t);
      const Dist& b = pis.pi(t + 1);
      const double kl = kl_divergence(a, b);
      kl_step.add(kl, kl_step_bound(beta, inst.graph, t), json{{"t", t}});

      const auto avg = tabulate(problem.running_avg(t).avg, inst.graph, space);
      const double s = span_seminorm(difference(avg, prev_avg));
      span_step.add(s, 4.0 * nd * d1 / (static_cast<double>(t) + 1.0), json{{"t", t}});
      gibbs_kl.add(kl, beta * beta * s * s / 8.0, json{{"t", t}});
      const double tv = tv_distance(a, b);
      gibbs_tv.add(tv, beta * s / 4.0, json{{"t", t}});
      pinsker.add(tv, std::sqrt(kl / 2.0), json{{"t", t}});
      prev_avg = avg;

      std::vector<double> F(problem.f_table(t));
      for (double& x : F) x *= -beta;
      const double fs = span_seminorm(F);
      hoeffding.add(log_mgf(a, F), expectation(a, F) + fs * fs / 8.0, json{{"t", t}});

      if (ot_ok) {
        w1_step.add(wasserstein1_hamming(a, b, space, options.ot), delta_t(beta, n, delta, t), json{{"t", t}});
      }
    }
    if (T >= 1) {
      equivalence.add(tv_distance(rec, pis.pi(T + 1)), 0.0, json{{"t", T + 1}});
    }
    for (const Worst* w : {&equivalence, &kl_step, &span_step, &gibbs_kl, &gibbs_tv, &pinsker, &hoeffding}) {
      out.push_back(w->report(base_ctx));
    }
    out.push_back(ot_ok ? w1_step.report(base_ctx)
                        : not_applicable("w1_step", "profile space above the exact-OT cap"));
  }

  const RegretLedger central = centralized_regret(problem, pis);
  const RegretLedger li = decentralized_regret(problem, mus);
  {
    Worst regret("centralized_regret");
    for (std::size_t k = 1; k <= T; ++k) regret.add(central.regret_at(k), central.bound_values[k - 1], json{{"T", k}});
    out.push_back(regret.report(base_ctx));
  }

  // Tracking of the centralized strategy by the Glauber dynamics.
  {
    Worst decomposition("regret_decomposition"), kl_diff("kl_difference"), entropy("entropy_continuity"),
        sandwich_lo("tv_le_w1"), sandwich_hi("w1_le_n_tv");
    double loss_gap = 0.0;
    const double theta_d = inst.mu0.theta_d();
    const double log_states = std::log(static_cast<double>(space.size()));
    std::vector<double> w1(T + 1, 0.0), tv(T + 1, 0.0);
    for (std::size_t t = 1; t <= T; ++t) {
      const Dist& mu = mus.mu(t);
      const Dist& pi = pis.pi(t);
      loss_gap += li.per_round_losses[t - 1] - central.per_round_losses[t - 1];
      decomposition.add(std::abs(li.regret_at(t) - (central.regret_at(t) + loss_gap)), 0.0, json{{"T", t}});

      tv[t] = tv_distance(mu, pi);
      const double hdiff = std::abs(shannon_entropy(pi) - shannon_entropy(mu));
      kl_diff.add(kl_divergence(mu, problem.mu0()) - kl_divergence(pi, problem.mu0()),
                  hdiff + tv[t] * nd * std::log(1.0 / theta_d), json{{"t", t}});
      if (tv[t] > 0.0 && tv[t] <= 0.25) {
        entropy.add(hdiff, 2.0 * (tv[t] * log_states + tv[t] * std::log(1.0 / tv[t])), json{{"t", t}});
      }
      if (ot_ok) {
        w1[t] = wasserstein1_hamming(mu, pi, space, options.ot);
        sandwich_lo.add(tv[t], w1[t], json{{"t", t}});
        sandwich_hi.add(w1[t], nd * tv[t], json{{"t", t}});
      }
    }
    out.push_back(decomposition.report(base_ctx));
    out.push_back(kl_diff.report(base_ctx));
    out.push_back(entropy.report(base_ctx));
    if (ot_ok) {
      out.push_back(sandwich_lo.report(base_ctx));
      out.push_back(sandwich_hi.report(base_ctx));
    } else {
      out.push_back(not_applicable("tv_le_w1", "profile space above the exact-OT cap"));
      out.push_back(not_applicable("w1_le_n_tv", "profile space above the exact-OT cap"));
    }

    if (!regular) {
      for (const char* name : {"w1_tracking", "tv_tracking", "corollary1_generic", "corollary1_exact",
                               "decentralized_regret"}) {
        out.push_back(not_applicable(name, "max_degree * beta >= 1"));
      }
    } else {
      const ThmConstants c = theorem_constants(inst);
      std::vector<double> deltas;
      std::size_t large_delta = 0;
      for (std::size_t s = 1; s <= T; ++s) {
        deltas.push_back(delta_t(beta, n, delta, s));
        large_delta += deltas.back() >= 1.0;
      }
      const auto bounds = tracking_bounds(T, c.kappa_star, deltas, 0.0);
      Worst w1_track("w1_tracking"), tv_track("tv_tracking"), cor_generic("corollary1_generic"),
          cor_exact("corollary1_exact"), thm("decentralized_regret");
      for (std::size_t t = 1; t <= T; ++t) {
        tv_track.add(tv[t], c.K * p_poly(t, 1.0 - c.kappa_star), json{{"t", t}});
        if (ot_ok) w1_track.add(w1[t], bounds[t - 1], json{{"t", t}});
        const double gap = std::abs(expectation(mus.mu(t), problem.f_table(t)) - expectation(pis.pi(t), problem.f_table(t)));
        cor_generic.add(gap, 2.0 * nd * d1 * bounds[t - 1], json{{"t", t}});
        cor_exact.add(gap, lipschitz_constant(problem.f_table(t), space) * bounds[t - 1], json{{"t", t}});
        thm.add(li.regret_at(t), decentralized_regret_bound(c, inst, t), json{{"T", t}});
      }
      const json consts{{"kappa_star", c.kappa_star}, {"K", c.K}, {"T0", c.T0}, {"T1", c.T1},
                        {"rounds_with_delta_ge_1", large_delta}};
      json ctx = base_ctx;
      ctx.update(consts);
      out.push_back(ot_ok ? w1_track.report(ctx) : not_applicable("w1_tracking", "profile space above the exact-OT cap"));
      out.push_back(tv_track.report(ctx));
      out.push_back(cor_generic.report(ctx));
      out.push_back(cor_exact.report(ctx));
      out.push_back(thm.report(ctx));
    }
  }

  // Sup norm and Lipschitz constant of every cost of the schedule.
  {
    Worst sup("cost_sup_norm"), lip("cost_lipschitz");
    for (std::size_t t = 1; t <= T; ++t) {
      sup.add(sup_norm(problem.f_table(t)), nd * d1, json{{"t", t}});
      lip.add(lipschitz_constant(problem.f_table(t), space), 2.0 * nd * d1, json{{"t", t}});
    }
    out.push_back(sup.report(base_ctx));
    out.push_back(lip.report(base_ctx));
  }
  return out;
}

bool suite_passed(std::span<const BoundReport> reports) {
  return std::all_of(reports.begin(), reports.end(), [](const BoundReport& r) { return r.passed; });
}

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json reports_to_json(std::span<const BoundReport> reports) {
  json arr = json::array();
  for (const BoundReport& r : reports) {
    arr.push_back({{"name", r.name},
                   {"lhs", number_or_null(r.lhs)},
                   {"rhs", number_or_null(r.rhs)},
                   {"margin", number_or_null(r.margin)},
                   {"tolerance", r.tolerance},
                   {"applicable", r.applicable},
                   {"passed", r.passed},
                   {"context", r.context}});
  }
  return arr;
}

std::string reports_table(std::span<const BoundReport> reports) {
  std::ostringstream os;
  os << std::left << std::setw(26) << "check" << std::right << std::setw(16) << "lhs" << std::setw(16) << "rhs"
     << std::setw(16) << "margin" << "  status\n";
  os << std::scientific << std::setprecision(6);
  for (const BoundReport& r : reports) {
    os << std::left << std::setw(26) << r.name << std::right;
    if (!r.applicable) {
      os << std::setw(16) << "-" << std::setw(16) << "-" << std::setw(16) << "-" << "  n/a ("
         << r.context.value("reason", "") << ")\n";
      continue;
    }
    os << std::setw(16) << r.lhs << std::setw(16) << r.rhs << std::setw(16) << r.margin << "  "
       << (r.passed ? "PASS" : "FAIL") << '\n';
  }
  return os.str();
}

}  // namespace netopt
