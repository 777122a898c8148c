#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "netopt/centralized.hpp"
#include "netopt/error.hpp"
#include "netopt/glauber.hpp"
#include "netopt/schedules.hpp"
#include "netopt/theory.hpp"
#include "netopt/transport.hpp"

namespace netopt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

template <class T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key \"" + key + "\" has the wrong type: " + j.dump());
  }
}

std::size_t get_count(const json& j, const std::string& key) {
  if (!j.is_number_unsigned()) throw ConfigError("config key \"" + key + "\" must be a nonnegative integer");
  return j.get<std::size_t>();
}

void apply_json(ExperimentConfig& c, const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    if (k == "graph") c.graph = get_as<std::string>(v, k);
    else if (k == "q") c.q = static_cast<int>(get_count(v, k));
    else if (k == "beta") c.beta = get_as<double>(v, k);
    else if (k == "T") c.T = get_count(v, k);
    else if (k == "mu0") c.mu0 = get_as<std::string>(v, k);
    else if (k == "mode") c.mode = get_as<std::string>(v, k);
    else if (k == "replicas") c.replicas = get_count(v, k);
    else if (k == "seed") c.seed = get_as<std::uint64_t>(v, k);
    else if (k == "schedule") c.schedule = get_as<std::string>(v, k);
    else if (k == "generator") c.generator = get_as<std::string>(v, k);
    else if (k == "amplitude") c.amplitude = get_as<double>(v, k);
    else if (k == "epoch_mean") c.epoch_mean = get_count(v, k);
    else if (k == "checkpoints") c.checkpoints = get_as<std::vector<std::size_t>>(v, k);
    else if (k == "output_dir") c.output_dir = get_as<std::string>(v, k);
    else if (k == "dense_cap") c.dense_cap = get_count(v, k);
    else if (k == "ot_cap") c.ot_cap = get_count(v, k);
    else if (k == "allow_large") c.allow_large = get_as<bool>(v, k);
    else if (k == "workers") c.workers = get_count(v, k);
    else if (k == "trajectory") c.trajectory = get_as<bool>(v, k);
    else throw ConfigError("unknown config key \"" + k + "\"");
  }
}

void check_config(const ExperimentConfig& c) {
  if (c.q < 1) throw ConfigError("q must be at least 1");
  if (!(c.beta >= 0.0) || !std::isfinite(c.beta)) throw ConfigError("beta must be a finite nonnegative number");
  if (c.T < 1) throw ConfigError("T must be at least 1");
  if (c.mode != "exact" && c.mode != "montecarlo") throw ConfigError("mode must be exact or montecarlo");
  if (c.mode == "montecarlo" && c.replicas < 1) throw ConfigError("replicas must be at least 1 in montecarlo mode");
  if (c.generator != "iid" && c.generator != "shocks") throw ConfigError("generator must be iid or shocks");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (!c.allow_large && c.dense_cap > ProfileSpace::kDefaultDenseCap) {
    throw ConfigError("dense_cap above " + std::to_string(ProfileSpace::kDefaultDenseCap) +
                      " needs --allow-large (memory grows with the state count)");
  }
  if (!c.allow_large && c.ot_cap > ProfileSpace::kDefaultOtCap) {
    throw ConfigError("ot_cap above " + std::to_string(ProfileSpace::kDefaultOtCap) +
                      " needs --allow-large (transport memory grows quadratically)");
  }
}

NetworkGraph resolve_graph(const std::string& spec) {
  for (const char* kind : {"path:", "cycle:"}) {
    if (spec.rfind(kind, 0) == 0) {
      std::size_t n = 0;
      const std::string rest = spec.substr(std::string(kind).size());
      const auto res = std::from_chars(rest.data(), rest.data() + rest.size(), n);
      if (res.ec != std::errc() || res.ptr != rest.data() + rest.size() || n == 0) {
        throw ConfigError("bad graph spec \"" + spec + "\"");
      }
      return std::string(kind) == "path:" ? path_graph(n) : cycle_graph(n);
    }
  }
  return load_graph(spec);
}

DefaultMeasure resolve_mu0(const std::string& spec, std::size_t n, int q) {
  if (spec == "uniform") return DefaultMeasure::uniform(n, q);
  std::ifstream in(spec);
  if (!in) throw ConfigError("cannot open default-measure file " + spec);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto pos = line.find_first_not_of(" \t\r");
    if (pos == std::string::npos || line[pos] == '#') continue;
    std::istringstream ls(line);
    ls.imbue(std::locale::classic());
    std::vector<double> row;
    double x = 0.0;
    while (ls >> x) row.push_back(x);
    if (!ls.eof()) throw ParseError(spec + ":" + std::to_string(lineno) + ": expected numbers");
    if (row.size() != static_cast<std::size_t>(q)) {
      throw ParseError(spec + ":" + std::to_string(lineno) + ": expected " + std::to_string(q) + " probabilities");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != n) {
    throw ParseError(spec + ": expected " + std::to_string(n) + " rows, found " + std::to_string(rows.size()));
  }
  return DefaultMeasure(std::move(rows));
}

struct Setup {
  ExperimentConfig config;
  Instance instance;
  CostSchedule schedule;
};

CostSchedule resolve_schedule(const ExperimentConfig& c, const Instance& inst) {
  if (c.schedule.empty()) {
    return c.generator == "iid" ? generate_iid(inst.graph, inst.q, c.T, c.seed, c.amplitude)
                                : generate_shocks(inst.graph, inst.q, c.T, c.seed, c.epoch_mean);
  }
  CostSchedule s = load_schedule(c.schedule);
  if (!(s.graph() == inst.graph)) throw InvalidInput(c.schedule + ": schedule graph hash differs from the instance graph");
  if (s.q() != inst.q) throw InvalidInput(c.schedule + ": schedule uses q = " + std::to_string(s.q()));
  if (s.horizon() < c.T) {
    throw InvalidInput(c.schedule + ": schedule has " + std::to_string(s.horizon()) + " rounds, T = " +
                       std::to_string(c.T));
  }
  return s.prefix(c.T);
}

Setup make_setup(const ExperimentConfig& c) {
  check_config(c);
  NetworkGraph g = resolve_graph(c.graph);
  DefaultMeasure mu0 = resolve_mu0(c.mu0, g.num_vertices(), c.q);
  Instance inst{std::move(g), c.q, std::move(mu0), c.beta};
  inst.validate();
  CostSchedule sched = resolve_schedule(c, inst);
  return Setup{c, std::move(inst), std::move(sched)};
}

fs::path prepare_output(const ExperimentConfig& c) {
  fs::path dir(c.output_dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("write failed for " + path.string());
}

bool regular(const Instance& inst) { return static_cast<double>(inst.graph.max_degree()) * inst.beta < 1.0; }

json constants_json(const Instance& inst) {
  json j{{"num_vertices", inst.graph.num_vertices()},
         {"max_degree", inst.graph.max_degree()},
         {"q", inst.q},
         {"beta", inst.beta},
         {"theta_d", inst.mu0.theta_d()},
         {"theta", inst.mu0.theta()},
         {"regular", regular(inst)}};
  if (regular(inst)) {
    const ThmConstants c = theorem_constants(inst);
    j["kappa_star"] = c.kappa_star;
    j["K"] = c.K;
    j["T0"] = c.T0;
    j["T1"] = c.T1;
  }
  return j;
}

int simulate_exact(const Setup& s, std::ostream& out, std::ostream& err) {
  const ExperimentConfig& c = s.config;
  const DenseProblem problem(s.instance, s.schedule, c.dense_cap);
  const Instance& inst = problem.instance();
  const std::size_t T = problem.horizon();
  const std::size_t n = inst.graph.num_vertices();
  const std::size_t delta = inst.graph.max_degree();
  const bool reg = regular(inst);
  const bool ot = problem.space().size() <= c.ot_cap;
  if (!reg) {
    err << "warning: max_degree * beta = " << static_cast<double>(delta) * inst.beta
        << " >= 1; curvature columns left blank\n";
  }
  if (!ot) err << "warning: profile space above the exact-OT cap; w1_mu_pi left blank\n";

  const CentralizedTrajectory pis(problem);
  const DecentralizedTrajectory mus(problem);
  const RegretLedger central = centralized_regret(problem, pis);
  const RegretLedger li = decentralized_regret(problem, mus);
  std::optional<ThmConstants> consts;
  if (reg) consts = theorem_constants(inst);

  std::vector<double> deltas;
  for (std::size_t t = 1; t <= T; ++t) deltas.push_back(delta_t(inst.beta, n, delta, t));
  std::vector<double> tracking;
  if (consts) tracking = tracking_bounds(T, consts->kappa_star, deltas, 0.0);

  std::string csv =
      "t,loss_centralized,loss_decentralized,cum_regret_centralized,cum_regret_LI,bound_centralized,"
      "bound_decentralized,w1_mu_pi,tv_mu_pi,kl_step_centralized,kappa_star,delta_t\n";
  bool central_ok = true, li_ok = true, tracking_ok = true;
  double max_tv = 0.0, max_w1 = ot ? 0.0 : kNaN;
  for (std::size_t t = 1; t <= T; ++t) {
    const double w1 = ot ? wasserstein1_hamming(mus.mu(t), pis.pi(t), problem.space(), OtOptions{c.ot_cap}) : kNaN;
    const double tv = tv_distance(mus.mu(t), pis.pi(t));
    const double bound_li = consts ? decentralized_regret_bound(*consts, inst, t) : kNaN;
    central_ok &= central.regret_at(t) <= central.bound_values[t - 1] + kBoundTolerance;
    if (consts) {
      li_ok &= li.regret_at(t) <= bound_li + kBoundTolerance;
      if (ot) tracking_ok &= w1 <= tracking[t - 1] + kBoundTolerance;
    }
    max_tv = std::max(max_tv, tv);
    if (ot) max_w1 = std::max(max_w1, w1);
    csv += std::to_string(t);
    for (double x : {central.per_round_losses[t - 1], li.per_round_losses[t - 1], central.regret_at(t),
                     li.regret_at(t), central.bound_values[t - 1], bound_li, w1, tv,
                     kl_divergence(pis.pi(t), pis.pi(t + 1)), consts ? consts->kappa_star : kNaN, deltas[t - 1]}) {
      csv += ',';
      csv += fmt(x);
    }
    csv += '\n';
  }
  const fs::path dir = prepare_output(c);
  write_text(dir / "rounds.csv", csv);

  json summary{{"mode", "exact"},
               {"T", T},
               {"config", c.to_json()},
               {"schedule", {{"generator", s.schedule.provenance().generator},
                             {"seed", s.schedule.provenance().seed},
                             {"shocks", count_shocks(problem.schedule())}}},
               {"constants", constants_json(inst)},
               {"final", {{"cum_regret_centralized", central.regret_at(T)},
                          {"cum_regret_LI", li.regret_at(T)},
                          {"bound_centralized", central.bound_values.back()},
                          {"bound_decentralized", consts ? num(decentralized_regret_bound(*consts, inst, T)) : json(nullptr)},
                          {"max_tv_mu_pi", max_tv},
                          {"max_w1_mu_pi", num(max_w1)}}},
               {"bound_domination",
                {{"centralized", central_ok},
                 {"decentralized", consts ? json(li_ok) : json(nullptr)},
                 {"w1_tracking", consts && ot ? json(tracking_ok) : json(nullptr)}}}};
  write_text(dir / "summary.json", summary.dump(2) + "\n");

  if (c.trajectory) {
    const SamplePath path = simulate_path(inst, problem.schedule(), c.seed, T);
    std::ostringstream os;
    write_trajectory_csv(os, path);
    write_text(dir / "trajectory.csv", os.str());
  }
  out << "wrote " << (dir / "rounds.csv").string() << " and summary.json (T=" << T
      << ", R_T=" << fmt(central.regret_at(T)) << ", R^LI_T=" << fmt(li.regret_at(T)) << ")\n";
  return kExitOk;
}

int simulate_montecarlo(const Setup& s, std::ostream& out, std::ostream&) {
  const ExperimentConfig& c = s.config;
  const Instance& inst = s.instance;
  const std::size_t T = s.schedule.horizon();
  std::vector<std::size_t> checkpoints;
  for (std::size_t k : c.checkpoints) {
    if (k <= T) checkpoints.push_back(k);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  MonteCarloOptions opts;
  opts.replicas = c.replicas;
  opts.seed = c.seed;
  opts.checkpoints = checkpoints;
  opts.workers = c.workers;
  opts.histogram_cap = c.dense_cap;
  const MonteCarloResult res = run_replicas(inst, s.schedule, T, opts);

  const fs::path dir = prepare_output(c);
  std::string csv = "t,mean_cost,cum_mean_cost\n";
  double cum = 0.0;
  for (std::size_t t = 1; t <= T; ++t) {
    cum += res.mean_cost[t - 1];
    csv += std::to_string(t) + "," + fmt(res.mean_cost[t - 1]) + "," + fmt(cum) + "\n";
  }
  write_text(dir / "montecarlo.csv", csv);

  json summary{{"mode", "montecarlo"},
               {"T", T},
               {"replicas", c.replicas},
               {"config", c.to_json()},
               {"constants", constants_json(inst)},
               {"final", {{"cum_mean_cost", cum}}}};
  const std::size_t states = ProfileSpace::count(inst.graph.num_vertices(), inst.q);
  if (states != 0 && states <= c.dense_cap && !checkpoints.empty()) {
    const DenseProblem problem(inst, s.schedule, c.dense_cap);
    const auto exact = evolve_exact(problem);
    const CentralizedTrajectory pis(problem);
    const bool ot = states <= c.ot_cap;
    const OtOptions oto{c.ot_cap};
    std::string ck = "t,tv_empirical_exact,w1_empirical_exact,w1_empirical_pi,w1_exact_pi\n";
    json rows = json::array();
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      const std::size_t t = checkpoints[k];
      const Dist emp = res.empirical(k);
      const double tv = tv_distance(emp, exact[t]);
      double w_ee = kNaN, w_ep = kNaN, w_xp = kNaN;
      if (ot && t >= 1) {
        w_ee = wasserstein1_hamming(emp, exact[t], problem.space(), oto);
        w_ep = wasserstein1_hamming(emp, pis.pi(t), problem.space(), oto);
        w_xp = wasserstein1_hamming(exact[t], pis.pi(t), problem.space(), oto);
      }
      ck += std::to_string(t) + "," + fmt(tv) + "," + fmt(w_ee) + "," + fmt(w_ep) + "," + fmt(w_xp) + "\n";
      rows.push_back({{"t", t}, {"tv_empirical_exact", tv}, {"w1_empirical_exact", num(w_ee)},
                      {"w1_gap", num(std::abs(w_ep - w_xp))}});
    }
    write_text(dir / "checkpoints.csv", ck);
    summary["exact_comparison"] = rows;
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  out << "wrote " << (dir / "montecarlo.csv").string() << " and summary.json (" << c.replicas
      << " replicas, T=" << T << ")\n";
  return kExitOk;
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  const Setup s = make_setup(c);
  return c.mode == "exact" ? simulate_exact(s, out, err) : simulate_montecarlo(s, out, err);
}

int cmd_verify(const ExperimentConfig& c, std::ostream& out, std::ostream&) {
  const Setup s = make_setup(c);
  const DenseProblem problem(s.instance, s.schedule, c.dense_cap);
  SuiteOptions opts;
  opts.ot = OtOptions{c.ot_cap};
  const auto reports = check_suite(problem, opts);
  const bool ok = suite_passed(reports);
  out << reports_table(reports);
  out << (ok ? "suite passed\n" : "suite FAILED\n");
  const fs::path dir = prepare_output(c);
  json doc{{"passed", ok}, {"config", c.to_json()}, {"reports", reports_to_json(reports)}};
  write_text(dir / "verify.json", doc.dump(2) + "\n");
  return ok ? kExitOk : kExitSuiteFailed;
}

int cmd_bounds(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  check_config(c);
  NetworkGraph g = resolve_graph(c.graph);
  DefaultMeasure mu0 = resolve_mu0(c.mu0, g.num_vertices(), c.q);
  const Instance inst{std::move(g), c.q, std::move(mu0), c.beta};
  inst.validate();
  const std::size_t n = inst.graph.num_vertices();
  const std::size_t delta = inst.graph.max_degree();
  const bool reg = regular(inst);
  std::optional<ThmConstants> consts;
  if (reg) consts = theorem_constants(inst);

  out << "# num_vertices=" << n << " max_degree=" << delta << " q=" << inst.q << " beta=" << fmt(inst.beta)
      << " theta_d=" << fmt(inst.mu0.theta_d()) << '\n';
  if (consts) {
    out << "# kappa_star=" << fmt(consts->kappa_star) << " K=" << fmt(consts->K) << " T0=" << consts->T0
        << " T1=" << consts->T1 << '\n';
  } else {
    out << "# regularity condition violated (max_degree * beta >= 1): decentralized columns omitted\n";
    err << "notice: max_degree * beta >= 1, decentralized bound columns omitted\n";
  }
  std::vector<double> deltas;
  for (std::size_t t = 1; t <= c.T; ++t) deltas.push_back(delta_t(inst.beta, n, delta, t));
  std::vector<double> tracking;
  if (consts) tracking = tracking_bounds(c.T, consts->kappa_star, deltas, 0.0);

  out << "t,bound_centralized,kl_step,delta_t";
  if (consts) out << ",tracking_bound,tv_bound,bound_decentralized";
  out << '\n';
  for (std::size_t t = 1; t <= c.T; ++t) {
    out << t << ',' << fmt(centralized_regret_bound(inst.beta, inst.graph, inst.mu0.theta_d(), t)) << ','
        << fmt(kl_step_bound(inst.beta, inst.graph, t)) << ',' << fmt(deltas[t - 1]);
    if (consts) {
      out << ',' << fmt(tracking[t - 1]) << ',' << fmt(consts->K * p_poly(t, 1.0 - consts->kappa_star)) << ','
          << fmt(decentralized_regret_bound(*consts, inst, t));
    }
    out << '\n';
  }
  return kExitOk;
}

int cmd_gen(const ExperimentConfig& c, const std::string& out_path, std::ostream& out) {
  ExperimentConfig gc = c;
  gc.schedule.clear();
  const Setup s = make_setup(gc);
  const fs::path path = out_path.empty() ? prepare_output(c) / "schedule.json" : fs::path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_schedule(s.schedule, path);
  out << "wrote " << path.string() << " (" << s.schedule.provenance().generator << ", T=" << s.schedule.horizon()
      << ", seed=" << s.schedule.provenance().seed << ", shocks=" << count_shocks(s.schedule) << ")\n";
  return kExitOk;
}

// Brute-force recomputation by enumeration over profiles, bypassing the
// tabulated fast paths.
std::vector<double> brute_pi(const Setup& s, const ProfileSpace& space, std::size_t t) {
  const Instance& inst = s.instance;
  std::vector<double> w(space.size());
  double z = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const ActionProfile x = space.profile(i);
    double sum = 0.0;
    for (std::size_t r = 1; r < t; ++r) sum += evaluate_cost(s.schedule.at(r), x, inst.graph);
    double prior = 1.0;
    for (Vertex v = 0; v < inst.graph.num_vertices(); ++v) prior *= inst.mu0.vertex(v)[static_cast<std::size_t>(x[v])];
    w[i] = prior * std::exp(-inst.beta * sum / static_cast<double>(t));
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

std::vector<double> brute_mu(const Setup& s, const DenseProblem& problem, std::size_t t) {
  const ProfileSpace& space = problem.space();
  std::vector<double> mu(problem.mu0().probs().begin(), problem.mu0().probs().end());
  for (std::size_t r = 1; r <= t; ++r) {
    const GlauberKernel k = kernel_for_round(problem, r);
    std::vector<double> next(space.size(), 0.0);
    for (std::size_t x = 0; x < space.size(); ++x) {
      for (std::size_t y = 0; y < space.size(); ++y) next[y] += mu[x] * k.transition(space, x, y);
    }
    mu = std::move(next);
  }
  (void)s;
  return mu;
}

double brute_loss(const Setup& s, const std::vector<double>& nu, const ProfileSpace& space, std::size_t t,
                  const std::vector<double>& mu0) {
  double cost = 0.0, kl = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (nu[i] == 0.0) continue;
    cost += nu[i] * evaluate_cost(s.schedule.at(t), space.profile(i), s.instance.graph);
    kl += nu[i] * std::log(nu[i] / mu0[i]);
  }
  return s.instance.beta * cost + kl;
}

double brute_comparator(const Setup& s, const ProfileSpace& space, std::size_t T, const std::vector<double>& mu0) {
  double z = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    double sum = 0.0;
    for (std::size_t r = 1; r <= T; ++r) sum += evaluate_cost(s.schedule.at(r), space.profile(i), s.instance.graph);
    z += mu0[i] * std::exp(-s.instance.beta * sum / static_cast<double>(T));
  }
  return -static_cast<double>(T) * std::log(z);
}

int cmd_oracle(const ExperimentConfig& c, const std::string& quantity, std::size_t t, std::ostream& out) {
  const Setup s = make_setup(c);
  const DenseProblem problem(s.instance, s.schedule, c.dense_cap);
  const ProfileSpace& space = problem.space();
  const std::size_t T = problem.horizon();
  if (t < 1 || t > T) throw ConfigError("--t must lie in 1..T");
  const std::vector<double> mu0 = brute_pi(s, space, 1);
  json doc{{"quantity", quantity}, {"t", t}};
  auto regret = [&](bool local) {
    double total = 0.0;
    for (std::size_t r = 1; r <= t; ++r) {
      total += brute_loss(s, local ? brute_mu(s, problem, r) : brute_pi(s, space, r), space, r, mu0);
    }
    return total - brute_comparator(s, space, t, mu0);
  };
  if (quantity == "pi") {
    doc["distribution"] = brute_pi(s, space, t);
  } else if (quantity == "mu") {
    doc["distribution"] = brute_mu(s, problem, t);
  } else if (quantity == "tv") {
    const auto a = brute_mu(s, problem, t), b = brute_pi(s, space, t);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    doc["value"] = d / 2.0;
  } else if (quantity == "w1") {
    const auto sol = wasserstein1_hamming_plan(Dist::from_probs(brute_mu(s, problem, t)),
                                               Dist::from_probs(brute_pi(s, space, t)), space, OtOptions{c.ot_cap});
    double dual = 0.0;
    const auto a = brute_mu(s, problem, t), b = brute_pi(s, space, t);
    for (std::size_t i = 0; i < space.size(); ++i) dual += sol.row_potential[i] * a[i] + sol.col_potential[i] * b[i];
    doc["value"] = sol.cost;
    doc["dual_value"] = dual;
  } else if (quantity == "kl_step") {
    const auto a = brute_pi(s, space, t), b = brute_pi(s, space, t + 1);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] > 0.0) d += a[i] * std::log(a[i] / b[i]);
    }
    doc["value"] = d;
  } else if (quantity == "regret_centralized") {
    doc["value"] = regret(false);
  } else if (quantity == "regret_LI") {
    doc["value"] = regret(true);
  } else if (quantity == "comparator") {
    doc["value"] = brute_comparator(s, space, t, mu0);
  } else if (quantity == "lipschitz") {
    double best = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const ActionProfile x = space.profile(i);
      const double fx = evaluate_cost(s.schedule.at(t), x, s.instance.graph);
      for (std::size_t j = i + 1; j < space.size(); ++j) {
        const ActionProfile y = space.profile(j);
        best = std::max(best, std::abs(fx - evaluate_cost(s.schedule.at(t), y, s.instance.graph)) /
                                  static_cast<double>(hamming(x, y)));
      }
    }
    doc["value"] = best;
  } else if (quantity == "ricci") {
    const auto k = ricci_estimate(kernel_for_round(problem, t), space, OtOptions{c.ot_cap});
    if (!k) throw CapExceeded("ricci estimate", space.size(), c.ot_cap);
    doc["value"] = *k;
  } else {
    throw ConfigError("unknown quantity \"" + quantity +
                      "\" (pi, mu, tv, w1, kl_step, regret_centralized, regret_LI, comparator, lipschitz, ricci)");
  }
  out << doc.dump(2) << '\n';
  return kExitOk;
}

// Raw command-line values; only options the user actually passed are
// layered over the config file.
struct RawOptions {
  std::string config;
  ExperimentConfig values;
  std::string out_path;
  std::string quantity;
  std::size_t oracle_t = 1;
  std::map<std::string, CLI::Option*> set;
};

void add_common(CLI::App* app, RawOptions& raw) {
  ExperimentConfig& v = raw.values;
  auto& m = raw.set;
  app->add_option("--config", raw.config, "JSON config file (CLI flags take precedence)");
  m["graph"] = app->add_option("--graph", v.graph, "graph file, or path:N / cycle:N");
  m["q"] = app->add_option("--q", v.q, "actions per vertex");
  m["beta"] = app->add_option("--beta", v.beta, "inverse temperature");
  m["T"] = app->add_option("--T", v.T, "horizon");
  m["mu0"] = app->add_option("--mu0", v.mu0, "uniform, or a file with one probability row per vertex");
  m["seed"] = app->add_option("--seed", v.seed, "seed for generated schedules and sampling");
  m["schedule"] = app->add_option("--schedule", v.schedule, "schedule file (otherwise generated)");
  m["generator"] = app->add_option("--generator", v.generator, "iid | shocks");
  m["amplitude"] = app->add_option("--amplitude", v.amplitude, "iid entry amplitude in (0, 1]");
  m["epoch_mean"] = app->add_option("--epoch-mean", v.epoch_mean, "mean shock epoch length");
  m["output_dir"] = app->add_option("--output-dir", v.output_dir, "directory for output files");
  m["dense_cap"] = app->add_option("--dense-cap", v.dense_cap, "largest q^|V| for dense computation");
  m["ot_cap"] = app->add_option("--ot-cap", v.ot_cap, "largest q^|V| for exact transport");
  m["allow_large"] = app->add_flag("--allow-large", v.allow_large, "acknowledge caps above the defaults");
  m["workers"] = app->add_option("--workers", v.workers, "worker threads (default from NETOPT_WORKERS)");
}

json overrides(const RawOptions& raw) {
  const ExperimentConfig& v = raw.values;
  const json all = v.to_json();
  json o = json::object();
  for (const auto& [key, opt] : raw.set) {
    if (opt->count() > 0) o[key] = all.at(key);
  }
  return o;
}

ExperimentConfig resolve(const RawOptions& raw) {
  ExperimentConfig c;
  if (const char* env = std::getenv("NETOPT_WORKERS"); env != nullptr && *env != '\0') {
    std::size_t w = 0;
    const auto res = std::from_chars(env, env + std::char_traits<char>::length(env), w);
    if (res.ec != std::errc() || *res.ptr != '\0' || w == 0) throw ConfigError("NETOPT_WORKERS must be a positive integer");
    c.workers = w;
  }
  if (!raw.config.empty()) {
    std::ifstream in(raw.config);
    if (!in) throw ConfigError("cannot open config file " + raw.config);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(raw.config + ": " + e.what());
    }
    apply_json(c, doc);
  }
  apply_json(c, overrides(raw));
  return c;
}

}  // namespace

json ExperimentConfig::to_json() const {
  return json{{"graph", graph},         {"q", q},
              {"beta", beta},           {"T", T},
              {"mu0", mu0},             {"mode", mode},
              {"replicas", replicas},   {"seed", seed},
              {"schedule", schedule},   {"generator", generator},
              {"amplitude", amplitude}, {"epoch_mean", epoch_mean},
              {"checkpoints", checkpoints}, {"output_dir", output_dir},
              {"dense_cap", dense_cap}, {"ot_cap", ot_cap},
              {"allow_large", allow_large}, {"workers", workers},
              {"trajectory", trajectory}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online optimization on networks: centralized and Glauber strategies, regret and bound checks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  RawOptions sim_raw, ver_raw, bnd_raw, gen_raw, orc_raw;
  CLI::App* sim = app.add_subcommand("simulate", "run an experiment and write per-round metrics");
  add_common(sim, sim_raw);
  sim_raw.set["mode"] = sim->add_option("--mode", sim_raw.values.mode, "exact | montecarlo");
  sim_raw.set["replicas"] = sim->add_option("--replicas", sim_raw.values.replicas, "montecarlo replicas");
  sim_raw.set["checkpoints"] = sim->add_option("--checkpoints", sim_raw.values.checkpoints, "montecarlo histogram rounds");
  sim_raw.set["trajectory"] = sim->add_flag("--trajectory", sim_raw.values.trajectory, "also dump one sample path");

  CLI::App* ver = app.add_subcommand("verify", "run every bound check; exit 2 if any fails");
  add_common(ver, ver_raw);
  CLI::App* bnd = app.add_subcommand("bounds", "print the bound constants and curves as CSV");
  add_common(bnd, bnd_raw);
  CLI::App* gen = app.add_subcommand("gen", "generate a cost schedule file");
  add_common(gen, gen_raw);
  gen->add_option("--out", gen_raw.out_path, "schedule file (default <output-dir>/schedule.json)");
  CLI::App* orc = app.add_subcommand("oracle", "brute-force recompute of one quantity");
  add_common(orc, orc_raw);
  orc->add_option("--quantity", orc_raw.quantity, "pi, mu, tv, w1, kl_step, regret_centralized, regret_LI, comparator, lipschitz, ricci")
      ->required();
  orc->add_option("--t", orc_raw.oracle_t, "round (1..T)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(resolve(sim_raw), out, err);
    if (ver->parsed()) return cmd_verify(resolve(ver_raw), out, err);
    if (bnd->parsed()) return cmd_bounds(resolve(bnd_raw), out, err);
    if (gen->parsed()) return cmd_gen(resolve(gen_raw), gen_raw.out_path, out);
    if (orc->parsed()) return cmd_oracle(resolve(orc_raw), orc_raw.quantity, orc_raw.oracle_t, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "; raise the cap with --allow-large, or use --mode montecarlo\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace netopt::cli
