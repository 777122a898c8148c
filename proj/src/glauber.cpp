#include "netopt/glauber.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "netopt/error.hpp"
#include "netopt/rng.hpp"

namespace netopt {

namespace {

void conditional_into(const NetworkGraph& g, Vertex v, const NetworkCost& avg, std::span<const Action> boundary,
                      std::span<const double> mu_v, double beta, std::span<double> out) {
  const auto q = static_cast<Action>(mu_v.size());
  double m = -std::numeric_limits<double>::infinity();
  for (Action a = 0; a < q; ++a) {
    out[a] = std::log(mu_v[a]) - beta * local_cost(avg, g, v, a, boundary);
    m = std::max(m, out[a]);
  }
  double z = 0.0;
  for (Action a = 0; a < q; ++a) {
    out[a] = std::exp(out[a] - m);
    z += out[a];
  }
  for (Action a = 0; a < q; ++a) out[a] /= z;
}

std::size_t pow_size(std::size_t base, std::size_t exp, std::size_t limit) {
  std::size_t r = 1;
  for (std::size_t k = 0; k < exp; ++k) {
    if (r > limit / base) return limit + 1;
    r *= base;
  }
  return r;
}

}  // namespace

Dist local_conditional(const NetworkGraph& g, Vertex v, const RunningAvgCost& running_avg,
                       std::span<const Action> boundary, const DefaultMeasure& mu0, double beta) {
  running_avg.avg.check_shape(g);
  if (boundary.size() != g.degree(v)) throw InvalidInput("boundary length does not match the degree");
  for (Action a : boundary) {
    if (a < 0 || a >= mu0.q()) throw InvalidInput("boundary action out of range");
  }
  std::vector<double> out(static_cast<std::size_t>(mu0.q()));
  conditional_into(g, v, running_avg.avg, boundary, mu0.vertex(v), beta, out);
  return Dist::from_probs(std::move(out));
}

GlauberKernel::GlauberKernel(const NetworkGraph& g, const RunningAvgCost& running_avg, const DefaultMeasure& mu0,
                             double beta)
    : graph_(&g), running_avg_(running_avg), mu0_(mu0), beta_(beta), q_(mu0.q()) {
  running_avg_.avg.check_shape(g);
  if (mu0_.num_vertices() != g.num_vertices() || running_avg_.avg.q() != q_) {
    throw InvalidInput("kernel: default measure, cost and graph disagree");
  }
  const auto qs = static_cast<std::size_t>(q_);
  tables_.resize(g.num_vertices());
  std::vector<Action> boundary;
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    const std::size_t deg = g.degree(v);
    const std::size_t configs = pow_size(qs, deg, kDenseTableLimit);
    if (configs > kDenseTableLimit) continue;
    tables_[v].resize(configs * qs);
    boundary.assign(deg, 0);
    for (std::size_t code = 0; code < configs; ++code) {
      std::size_t c = code;
      for (std::size_t k = 0; k < deg; ++k) {
        boundary[k] = static_cast<Action>(c % qs);
        c /= qs;
      }
      compute_row(v, boundary, std::span<double>(tables_[v]).subspan(code * qs, qs));
    }
  }
}

void GlauberKernel::compute_row(Vertex v, std::span<const Action> boundary, std::span<double> out) const {
  conditional_into(*graph_, v, running_avg_.avg, boundary, mu0_.vertex(v), beta_, out);
}

void GlauberKernel::conditional(Vertex v, std::span<const Action> profile, std::span<double> out) const {
  const auto qs = static_cast<std::size_t>(q_);
  const auto nbrs = graph_->neighbors(v);
  if (!tables_[v].empty()) {
    std::size_t code = 0, stride = 1;
    for (const Neighbor& nb : nbrs) {
      code += static_cast<std::size_t>(profile[nb.vertex]) * stride;
      stride *= qs;
    }
    const double* row = tables_[v].data() + code * qs;
    std::copy(row, row + qs, out.begin());
    return;
  }
  std::vector<Action> boundary;
  boundary.reserve(nbrs.size());
  for (const Neighbor& nb : nbrs) boundary.push_back(profile[nb.vertex]);
  compute_row(v, boundary, out);
}

void GlauberKernel::conditional(Vertex v, const ProfileSpace& space, std::size_t x, std::span<double> out) const {
  std::vector<Action> profile(space.num_vertices());
  space.decode(x, profile);
  conditional(v, profile, out);
}

Action GlauberKernel::sample(Vertex v, std::span<const Action> profile, double u) const {
  std::vector<double> p(static_cast<std::size_t>(q_));
  conditional(v, profile, p);
  double c = 0.0;
  Action last = 0;
  for (Action a = 0; a < q_; ++a) {
    if (p[a] <= 0.0) continue;
    c += p[a];
    last = a;
    if (u <= c) return a;
  }
  return last;
}

Dist GlauberKernel::kernel_row(const ProfileSpace& space, std::size_t x) const {
  const std::size_t n = space.num_vertices();
  std::vector<double> row(space.size(), 0.0);
  std::vector<Action> profile(n);
  std::vector<double> p(static_cast<std::size_t>(q_));
  space.decode(x, profile);
  const double w = 1.0 / static_cast<double>(n);
  for (Vertex v = 0; v < n; ++v) {
    conditional(v, profile, p);
    for (Action a = 0; a < q_; ++a) row[space.with_digit(x, v, a)] += w * p[a];
  }
  return Dist::from_probs(std::move(row));
}

double GlauberKernel::transition(const ProfileSpace& space, std::size_t x, std::size_t y) const {
  const std::size_t d = space.hamming(x, y);
  if (d >= 2) return 0.0;
  const std::size_t n = space.num_vertices();
  std::vector<Action> profile(n);
  std::vector<double> p(static_cast<std::size_t>(q_));
  space.decode(x, profile);
  double s = 0.0;
  for (Vertex v = 0; v < n; ++v) {
    const Action target = space.digit(y, v);
    if (d == 1 && target == profile[v]) continue;
    conditional(v, profile, p);
    s += p[target];
  }
  return s / static_cast<double>(n);
}

Dist GlauberKernel::apply(const ProfileSpace& space, const Dist& mu) const {
  if (mu.size() != space.size() || space.num_vertices() != graph_->num_vertices() || space.q() != q_) {
    throw InvalidInput("kernel application: distribution does not match the space");
  }
  const std::size_t n = space.num_vertices();
  std::vector<double> out(space.size(), 0.0);
  std::vector<Action> profile(n);
  std::vector<double> p(static_cast<std::size_t>(q_));
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t x = 0; x < space.size(); ++x) {
    if (mu[x] == 0.0) continue;
    space.decode(x, profile);
    const double mass = w * mu[x];
    for (Vertex v = 0; v < n; ++v) {
      conditional(v, profile, p);
      for (Action a = 0; a < q_; ++a) out[space.with_digit(x, v, a)] += mass * p[a];
    }
  }
  double total = 0.0;
  for (double m : out) total += m;
  for (double& m : out) m /= total;
  return Dist::from_probs(std::move(out));
}

GlauberKernel kernel_for_round(const DenseProblem& problem, std::size_t t) {
  if (t == 0 || t > problem.horizon() + 1) throw InvalidInput("kernel round out of range");
  const Instance& inst = problem.instance();
  return GlauberKernel(inst.graph, problem.running_avg(t - 1), inst.mu0, inst.beta);
}

std::vector<Dist> evolve_exact(const DenseProblem& problem) {
  std::vector<Dist> mus;
  mus.reserve(problem.horizon() + 1);
  mus.push_back(problem.mu0());
  for (std::size_t t = 1; t <= problem.horizon(); ++t) {
    mus.push_back(kernel_for_round(problem, t).apply(problem.space(), mus.back()));
  }
  return mus;
}

DecentralizedTrajectory::DecentralizedTrajectory(const DenseProblem& problem) : mus_(evolve_exact(problem)) {}

RegretLedger decentralized_regret(const DenseProblem& problem, const DecentralizedTrajectory& mus) {
  const Instance& inst = problem.instance();
  RegretLedger ledger;
  ledger.comparator_values = comparator_values(problem);
  double cum = 0.0;
  for (std::size_t t = 1; t <= problem.horizon(); ++t) {
    const double loss = instantaneous_loss(mus.mu(t), problem.f_table(t), inst.beta, problem.mu0());
    ledger.per_round_losses.push_back(loss);
    cum += loss;
    ledger.cumulative_regret.push_back(cum - ledger.comparator_values[t - 1]);
  }
  return ledger;
}

RegretLedger decentralized_regret(const DenseProblem& problem) {
  return decentralized_regret(problem, DecentralizedTrajectory(problem));
}

std::vector<RunningAvgCost> running_averages(const CostSchedule& schedule) {
  std::vector<RunningAvgCost> out;
  out.reserve(schedule.horizon());
  if (schedule.horizon() == 0) return out;
  out.push_back(RunningAvgCost::initial(schedule.graph(), schedule.q()));
  for (std::size_t t = 1; t < schedule.horizon(); ++t) {
    out.push_back(update_running_average(out.back(), schedule.at(t)));
  }
  return out;
}

namespace {

// State of one replica: its profile and its two random streams.
struct Walker {
  std::vector<Action> x;
  CounterRng activation;
  CounterRng action;

  Walker(const Instance& inst, std::uint64_t seed, PathStreams streams)
      : x(inst.graph.num_vertices()), activation(seed, streams.activation_stream),
        action(seed, streams.action_stream) {
    for (Vertex v = 0; v < x.size(); ++v) {
      const auto row = inst.mu0.vertex(v);
      const double u = action.uniform01();
      double c = 0.0;
      Action pick = static_cast<Action>(row.size()) - 1;
      for (std::size_t a = 0; a < row.size(); ++a) {
        c += row[a];
        if (u <= c) {
          pick = static_cast<Action>(a);
          break;
        }
      }
      x[v] = pick;
    }
  }

  Vertex step(const GlauberKernel& kernel) {
    const auto v = static_cast<Vertex>(activation.below(x.size()));
    x[v] = kernel.sample(v, x, action.uniform01());
    return v;
  }
};

std::vector<GlauberKernel> kernels_for(const Instance& inst, const CostSchedule& schedule, std::size_t T) {
  if (T > schedule.horizon()) throw InvalidInput("horizon longer than the schedule");
  std::vector<GlauberKernel> kernels;
  kernels.reserve(T);
  RunningAvgCost avg = RunningAvgCost::initial(inst.graph, inst.q);
  for (std::size_t t = 1; t <= T; ++t) {
    kernels.emplace_back(inst.graph, avg, inst.mu0, inst.beta);
    avg = update_running_average(avg, schedule.at(t));
  }
  return kernels;
}

void check_schedule(const Instance& inst, const CostSchedule& schedule) {
  inst.validate();
  if (!(schedule.graph() == inst.graph) || schedule.q() != inst.q) {
    throw InvalidInput("schedule does not match the instance");
  }
}

}  // namespace

SamplePath simulate_path(const Instance& inst, const CostSchedule& schedule, std::uint64_t seed, std::size_t T,
                         PathStreams streams) {
  check_schedule(inst, schedule);
  const auto kernels = kernels_for(inst, schedule, T);
  const std::size_t n = inst.graph.num_vertices();
  SamplePath path;
  path.seed = seed;
  path.num_vertices = n;
  path.profiles.reserve((T + 1) * n);
  Walker w(inst, seed, streams);
  path.profiles.insert(path.profiles.end(), w.x.begin(), w.x.end());
  for (std::size_t t = 1; t <= T; ++t) {
    path.activations.push_back(w.step(kernels[t - 1]));
    path.profiles.insert(path.profiles.end(), w.x.begin(), w.x.end());
    path.costs.push_back(evaluate_cost(schedule.at(t), ActionProfile(w.x, inst.q), inst.graph));
  }
  return path;
}

namespace {

void append_double(std::string& out, double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, res.ptr);
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const SamplePath& path) {
  std::string line = "t,U_t";
  for (std::size_t v = 1; v <= path.num_vertices; ++v) line += ",x_" + std::to_string(v);
  line += ",cost\n";
  out << line;
  for (std::size_t t = 0; t <= path.horizon(); ++t) {
    line = std::to_string(t) + ",";
    if (t > 0) line += std::to_string(path.activations[t - 1] + 1);
    for (Action a : path.profile(t)) line += "," + std::to_string(a + 1);
    line += ",";
    if (t > 0) append_double(line, path.costs[t - 1]);
    line += '\n';
    out << line;
  }
}

Dist MonteCarloResult::empirical(std::size_t k) const {
  const auto& c = counts.at(k);
  if (c.empty()) throw InvalidInput("no histogram was recorded");
  std::vector<double> p(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) p[i] = static_cast<double>(c[i]) / static_cast<double>(replicas);
  return Dist::from_probs(std::move(p));
}

MonteCarloResult run_replicas(const Instance& inst, const CostSchedule& schedule, std::size_t T,
                              const MonteCarloOptions& options) {
  check_schedule(inst, schedule);
  if (options.replicas == 0) throw InvalidInput("replicas must be at least 1");
  for (std::size_t c : options.checkpoints) {
    if (c > T) throw InvalidInput("checkpoint " + std::to_string(c) + " beyond the horizon");
  }
  const auto kernels = kernels_for(inst, schedule, T);
  const std::size_t n = inst.graph.num_vertices();
  const std::size_t states = ProfileSpace::count(n, inst.q);
  const bool histograms = states != 0 && states <= options.histogram_cap;
  std::vector<std::size_t> strides(n, 1);
  for (std::size_t v = 1; v < n; ++v) strides[v] = strides[v - 1] * static_cast<std::size_t>(inst.q);

  // Fixed-size blocks, summed in block order, keep the floating-point
  // result independent of the worker count.
  constexpr std::size_t kBlock = 256;
  const std::size_t blocks = (options.replicas + kBlock - 1) / kBlock;
  const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, blocks));
  const std::size_t ck = options.checkpoints.size();
  std::vector<std::vector<double>> block_cost(blocks, std::vector<double>(T, 0.0));
  std::vector<std::vector<std::vector<std::uint64_t>>> worker_counts(
      workers, std::vector<std::vector<std::uint64_t>>(ck, std::vector<std::uint64_t>(histograms ? states : 0, 0)));

  auto record = [&](std::vector<std::vector<std::uint64_t>>& counts, const std::vector<Action>& x, std::size_t t) {
    if (!histograms) return;
    std::size_t idx = 0;
    for (Vertex v = 0; v < n; ++v) idx += static_cast<std::size_t>(x[v]) * strides[v];
    for (std::size_t k = 0; k < ck; ++k) {
      if (options.checkpoints[k] == t) ++counts[k][idx];
    }
  };

  auto run_block = [&](std::size_t b, std::vector<std::vector<std::uint64_t>>& counts) {
    const std::size_t end = std::min(options.replicas, (b + 1) * kBlock);
    for (std::size_t r = b * kBlock; r < end; ++r) {
      Walker w(inst, options.seed, PathStreams{2 * r, 2 * r + 1});
      record(counts, w.x, 0);
      for (std::size_t t = 1; t <= T; ++t) {
        w.step(kernels[t - 1]);
        record(counts, w.x, t);
        block_cost[b][t - 1] += evaluate_cost(schedule.at(t), ActionProfile(w.x, inst.q), inst.graph);
      }
    }
  };

  if (workers == 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b, worker_counts[0]);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t k = 0; k < workers; ++k) {
      pool.emplace_back([&, k] {
        for (std::size_t b = k; b < blocks; b += workers) run_block(b, worker_counts[k]);
      });
    }
    for (auto& th : pool) th.join();
  }

  MonteCarloResult result;
  result.checkpoints = options.checkpoints;
  result.replicas = options.replicas;
  result.counts.assign(ck, std::vector<std::uint64_t>(histograms ? states : 0, 0));
  for (const auto& wc : worker_counts) {
    for (std::size_t k = 0; k < ck; ++k) {
      for (std::size_t i = 0; i < wc[k].size(); ++i) result.counts[k][i] += wc[k][i];
    }
  }
  result.mean_cost.assign(T, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t t = 0; t < T; ++t) result.mean_cost[t] += block_cost[b][t];
  }
  for (double& c : result.mean_cost) c /= static_cast<double>(options.replicas);
  return result;
}

}  // namespace netopt
