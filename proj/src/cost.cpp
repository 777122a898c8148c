#include "netopt/cost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netopt/error.hpp"

namespace netopt {

DefaultMeasure::DefaultMeasure(std::vector<std::vector<double>> per_vertex) : rows_(std::move(per_vertex)) {
  if (rows_.empty()) throw InvalidInput("default measure needs at least one vertex");
  const std::size_t q = rows_.front().size();
  if (q == 0) throw InvalidInput("default measure needs at least one action");
  for (std::size_t v = 0; v < rows_.size(); ++v) {
    auto& row = rows_[v];
    if (row.size() != q) throw InvalidInput("default measure rows have different lengths");
    double total = 0.0;
    for (double p : row) {
      if (!std::isfinite(p) || p <= 0.0) {
        throw InvalidInput("default measure at vertex " + std::to_string(v + 1) + " must be strictly positive");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw InvalidInput("default measure at vertex " + std::to_string(v + 1) + " does not sum to 1");
    }
    for (double& p : row) p /= total;
  }
}

DefaultMeasure DefaultMeasure::uniform(std::size_t num_vertices, int q) {
  if (q < 1) throw InvalidInput("q must be positive");
  return DefaultMeasure(std::vector<std::vector<double>>(
      num_vertices, std::vector<double>(static_cast<std::size_t>(q), 1.0 / q)));
}

Dist DefaultMeasure::vertex_dist(Vertex v) const {
  return Dist::from_probs(std::vector<double>(rows_.at(v).begin(), rows_.at(v).end()));
}

double DefaultMeasure::theta_d() const {
  double m = 1.0;
  for (const auto& row : rows_) m = std::min(m, *std::min_element(row.begin(), row.end()));
  return m;
}

double DefaultMeasure::theta() const {
  double p = 1.0;
  for (const auto& row : rows_) p *= *std::min_element(row.begin(), row.end());
  return p;
}

Dist DefaultMeasure::joint(const ProfileSpace& space) const {
  if (space.num_vertices() != num_vertices() || space.q() != q()) {
    throw InvalidInput("default measure does not match the profile space");
  }
  std::vector<double> lw(space.size(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t v = 0; v < num_vertices(); ++v) {
      lw[i] += std::log(rows_[v][static_cast<std::size_t>(space.digit(i, v))]);
    }
  }
  return Dist::from_log_weights(std::move(lw));
}

NetworkCost::NetworkCost(std::size_t num_vertices, std::size_t num_edges, int q, std::vector<double> phi,
                         std::vector<double> psi)
    : n_(num_vertices), m_(num_edges), q_(q), phi_(std::move(phi)), psi_(std::move(psi)) {
  if (q < 1) throw InvalidInput("q must be positive");
  if (phi_.size() != n_ * qs()) throw InvalidInput("vertex cost has the wrong size");
  if (psi_.size() != m_ * qs() * qs()) throw InvalidInput("edge cost has the wrong size");
  for (std::size_t i = 0; i < phi_.size(); ++i) {
    if (!(phi_[i] >= -1.0 && phi_[i] <= 1.0)) {
      throw InvalidInput("vertex cost at vertex " + std::to_string(i / qs() + 1) + " is outside [-1,1]");
    }
  }
  for (std::size_t i = 0; i < psi_.size(); ++i) {
    if (!(psi_[i] >= -1.0 && psi_[i] <= 1.0)) {
      throw InvalidInput("edge cost on edge " + std::to_string(i / (qs() * qs()) + 1) + " is outside [-1,1]");
    }
  }
}

NetworkCost NetworkCost::zero(std::size_t num_vertices, std::size_t num_edges, int q) {
  const auto qs = static_cast<std::size_t>(q);
  return NetworkCost(num_vertices, num_edges, q, std::vector<double>(num_vertices * qs, 0.0),
                     std::vector<double>(num_edges * qs * qs, 0.0));
}

double NetworkCost::psi_at(const NetworkGraph& g, std::size_t e, Vertex v, Action a_v, Action a_u) const {
  return g.edges()[e].u == v ? psi(e, a_v, a_u) : psi(e, a_u, a_v);
}

void NetworkCost::check_shape(const NetworkGraph& g) const {
  if (n_ != g.num_vertices() || m_ != g.num_edges()) {
    throw InvalidInput("cost shape does not match the graph");
  }
}

double evaluate_cost(const NetworkCost& f, const ActionProfile& x, const NetworkGraph& g) {
  f.check_shape(g);
  if (x.size() != g.num_vertices() || x.q() != f.q()) throw InvalidInput("profile does not match the cost");
  double s = 0.0;
  for (Vertex v = 0; v < g.num_vertices(); ++v) s += f.phi(v, x[v]);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) s += f.psi(e, x[edges[e].u], x[edges[e].v]);
  return s;
}

double local_cost(const NetworkCost& f, const NetworkGraph& g, Vertex v, Action a,
                  std::span<const Action> boundary) {
  const auto nbrs = g.neighbors(v);
  if (boundary.size() != nbrs.size()) throw InvalidInput("boundary length does not match the degree");
  double s = f.phi(v, a);
  for (std::size_t k = 0; k < nbrs.size(); ++k) s += f.psi_at(g, nbrs[k].edge, v, a, boundary[k]);
  return s;
}

double local_cost_in_profile(const NetworkCost& f, const NetworkGraph& g, Vertex v, Action a,
                             std::span<const Action> profile) {
  double s = f.phi(v, a);
  for (const Neighbor& nb : g.neighbors(v)) s += f.psi_at(g, nb.edge, v, a, profile[nb.vertex]);
  return s;
}

std::vector<double> tabulate(const NetworkCost& f, const NetworkGraph& g, const ProfileSpace& space) {
  f.check_shape(g);
  if (space.num_vertices() != g.num_vertices() || space.q() != f.q()) {
    throw InvalidInput("profile space does not match the cost");
  }
  std::vector<double> out(space.size());
  std::vector<Action> x(space.num_vertices());
  const auto edges = g.edges();
  for (std::size_t i = 0; i < space.size(); ++i) {
    space.decode(i, x);
    double s = 0.0;
    for (Vertex v = 0; v < x.size(); ++v) s += f.phi(v, x[v]);
    for (std::size_t e = 0; e < edges.size(); ++e) s += f.psi(e, x[edges[e].u], x[edges[e].v]);
    out[i] = s;
  }
  return out;
}

RunningAvgCost update_running_average(const RunningAvgCost& prev, const NetworkCost& f) {
  if (f.num_vertices() != prev.avg.num_vertices() || f.num_edges() != prev.avg.num_edges() ||
      f.q() != prev.avg.q()) {
    throw InvalidInput("running average: cost shape mismatch");
  }
  const double t = static_cast<double>(prev.t + 1);
  const double w_new = 1.0 / (t + 1.0);
  const double w_old = t / (t + 1.0);
  auto blend = [&](std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::clamp(w_new * b[i] + w_old * a[i], -1.0, 1.0);
    return out;
  };
  return RunningAvgCost{prev.t + 1,
                        NetworkCost(f.num_vertices(), f.num_edges(), f.q(), blend(prev.avg.phi_values(), f.phi_values()),
                                    blend(prev.avg.psi_values(), f.psi_values()))};
}

void Instance::validate() const {
  if (q < 1) throw InvalidInput("q must be positive");
  if (mu0.num_vertices() != graph.num_vertices()) throw InvalidInput("default measure size differs from |V|");
  if (mu0.q() != q) throw InvalidInput("default measure alphabet differs from q");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be a finite nonnegative number");
}

}  // namespace netopt
