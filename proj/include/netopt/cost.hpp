#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "netopt/dist.hpp"
#include "netopt/graph.hpp"
#include "netopt/profile.hpp"

namespace netopt {

/// Per-vertex default ("status quo") distributions μ_{v,0}. The network
/// default is their product. Every entry must be strictly positive.
class DefaultMeasure {
 public:
  /// Rows within 1e-9 of normalized are renormalized; otherwise InvalidInput.
  explicit DefaultMeasure(std::vector<std::vector<double>> per_vertex);
  static DefaultMeasure uniform(std::size_t num_vertices, int q);

  std::size_t num_vertices() const noexcept { return rows_.size(); }
  int q() const noexcept { return static_cast<int>(rows_.front().size()); }
  std::span<const double> vertex(Vertex v) const { return rows_[v]; }
  Dist vertex_dist(Vertex v) const;

  /// min over v, a of μ_{v,0}(a).
  double theta_d() const;
  /// min over profiles of the product measure, Π_v min_a μ_{v,0}(a).
  double theta() const;

  Dist joint(const ProfileSpace& space) const;

 private:
  std::vector<std::vector<double>> rows_;
};

/// f(x) = Σ_v φ_v(x_v) + Σ_{u<v, uv∈E} ψ_uv(x_u, x_v). Entries in [-1, 1].
/// ψ for edge e = (u, v), u < v, is stored row-major as psi[e][x_u][x_v].
class NetworkCost {
 public:
  /// phi: n*q values (vertex-major), psi: m*q*q values (edge-major).
  /// Throws InvalidInput on a size mismatch or an entry outside [-1, 1].
  NetworkCost(std::size_t num_vertices, std::size_t num_edges, int q, std::vector<double> phi,
              std::vector<double> psi);
  static NetworkCost zero(std::size_t num_vertices, std::size_t num_edges, int q);
  static NetworkCost zero(const NetworkGraph& g, int q) { return zero(g.num_vertices(), g.num_edges(), q); }

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return m_; }
  int q() const noexcept { return q_; }

  double phi(Vertex v, Action a) const { return phi_[v * qs() + static_cast<std::size_t>(a)]; }
  /// Edge cost in stored orientation: a_low is the action of edges()[e].u.
  double psi(std::size_t e, Action a_low, Action a_high) const {
    return psi_[(e * qs() + static_cast<std::size_t>(a_low)) * qs() + static_cast<std::size_t>(a_high)];
  }
  /// Symmetric access: the action of `v` and of its neighbor `u` along edge e.
  double psi_at(const NetworkGraph& g, std::size_t e, Vertex v, Action a_v, Action a_u) const;

  std::span<const double> phi_values() const noexcept { return phi_; }
  std::span<const double> psi_values() const noexcept { return psi_; }

  /// Throws InvalidInput unless the cost is shaped for g.
  void check_shape(const NetworkGraph& g) const;

  friend bool operator==(const NetworkCost&, const NetworkCost&) = default;

 private:
  std::size_t qs() const noexcept { return static_cast<std::size_t>(q_); }

  std::size_t n_;
  std::size_t m_;
  int q_;
  std::vector<double> phi_;
  std::vector<double> psi_;
};

double evaluate_cost(const NetworkCost& f, const ActionProfile& x, const NetworkGraph& g);

/// φ_v(a) + Σ_{u∈∂v} ψ_uv(x_u, a). `boundary` lists x_u in the order of
/// g.neighbors(v); a wrong length throws InvalidInput.
double local_cost(const NetworkCost& f, const NetworkGraph& g, Vertex v, Action a,
                  std::span<const Action> boundary);

/// Same, reading the boundary from a full profile.
double local_cost_in_profile(const NetworkCost& f, const NetworkGraph& g, Vertex v, Action a,
                             std::span<const Action> profile);

/// f(x) for every x of the space, in index order.
std::vector<double> tabulate(const NetworkCost& f, const NetworkGraph& g, const ProfileSpace& space);

/// F_t = (1/(t+1)) Σ_{s≤t} f_s, stored componentwise; F_0 = 0.
struct RunningAvgCost {
  std::size_t t = 0;
  NetworkCost avg;

  static RunningAvgCost initial(const NetworkGraph& g, int q) { return {0, NetworkCost::zero(g, q)}; }
};

/// F_t = f_t/(t+1) + t·F_{t-1}/(t+1).
RunningAvgCost update_running_average(const RunningAvgCost& prev, const NetworkCost& f);

/// Network, action alphabet, default measure and inverse temperature.
struct Instance {
  NetworkGraph graph;
  int q;
  DefaultMeasure mu0;
  double beta;

  /// Throws InvalidInput if the pieces disagree on |V| or q, or beta < 0.
  void validate() const;
};

}  // namespace netopt
