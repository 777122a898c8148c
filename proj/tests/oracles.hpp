// Brute-force reference implementations used only by the tests. They avoid
// the library's own code paths on purpose: adjacency matrices instead of
// neighbor lists, exp-domain normalization instead of log-sum-exp, global
// conditionals instead of local ones, shortest-path augmentation instead of
// the transportation simplex.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "netopt/cost.hpp"
#include "netopt/graph.hpp"

namespace oracle {

inline std::vector<int> digits(std::size_t idx, std::size_t n, int q) {
  std::vector<int> x(n);
  for (std::size_t v = 0; v < n; ++v) {
    x[v] = static_cast<int>(idx % static_cast<std::size_t>(q));
    idx /= static_cast<std::size_t>(q);
  }
  return x;
}

inline int hamming(std::size_t a, std::size_t b, std::size_t n, int q) {
  const auto x = digits(a, n, q), y = digits(b, n, q);
  int d = 0;
  for (std::size_t v = 0; v < n; ++v) d += x[v] != y[v];
  return d;
}

// f(x) summed over all vertex pairs of an adjacency matrix.
inline double cost(const netopt::NetworkCost& f, const netopt::NetworkGraph& g, const std::vector<int>& x) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<long>> edge_id(n, std::vector<long>(n, -1));
  for (std::size_t e = 0; e < g.edges().size(); ++e) edge_id[g.edges()[e].u][g.edges()[e].v] = static_cast<long>(e);
  double s = 0.0;
  for (std::size_t v = 0; v < n; ++v) s += f.phi_values()[v * static_cast<std::size_t>(f.q()) + static_cast<std::size_t>(x[v])];
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (edge_id[u][v] >= 0) s += f.psi(static_cast<std::size_t>(edge_id[u][v]), x[u], x[v]);
    }
  }
  return s;
}

inline std::vector<double> cost_table(const netopt::NetworkCost& f, const netopt::NetworkGraph& g, int q) {
  std::size_t N = 1;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) N *= static_cast<std::size_t>(q);
  std::vector<double> out(N);
  for (std::size_t i = 0; i < N; ++i) out[i] = cost(f, g, digits(i, g.num_vertices(), q));
  return out;
}

// base * exp(g), normalized directly.
inline std::vector<double> gibbs(const std::vector<double>& base, const std::vector<double>& g) {
  std::vector<double> w(base.size());
  double z = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = base[i] * std::exp(g[i]);
    z += w[i];
  }
  for (double& x : w) x /= z;
  return w;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
  }
  return s;
}

inline double tv(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s / 2.0;
}

// Dense heat-bath kernel built from the conditionals of a full joint
// distribution pi: P(y|x) = (1/n) Σ_v pi(y) / Σ_b pi(x with x_v = b) over the
// v for which y agrees with x off v.
inline std::vector<std::vector<double>> heat_bath_matrix(const std::vector<double>& pi, std::size_t n, int q) {
  const std::size_t N = pi.size();
  std::vector<std::vector<double>> P(N, std::vector<double>(N, 0.0));
  for (std::size_t x = 0; x < N; ++x) {
    const auto xd = digits(x, n, q);
    std::size_t stride = 1;
    for (std::size_t v = 0; v < n; ++v) {
      const std::size_t base = x - static_cast<std::size_t>(xd[v]) * stride;
      double z = 0.0;
      for (int b = 0; b < q; ++b) z += pi[base + static_cast<std::size_t>(b) * stride];
      for (int b = 0; b < q; ++b) {
        const std::size_t y = base + static_cast<std::size_t>(b) * stride;
        P[x][y] += pi[y] / z / static_cast<double>(n);
      }
      stride *= static_cast<std::size_t>(q);
    }
  }
  return P;
}

// Min-cost transport by successive shortest augmenting paths (Bellman-Ford
// on the residual bipartite network).
inline double min_cost_transport(std::vector<double> supply, std::vector<double> demand,
                                 const std::vector<std::vector<double>>& c) {
  const std::size_t m = supply.size(), n = demand.size();
  std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
  const double eps = 1e-15;
  double total = 0.0;
  for (double s : supply) total += s;
  const double inf = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100000; ++iter) {
    // Nodes: 0..m-1 supply, m..m+n-1 demand. Source edges to supply rows with
    // remaining supply; sink edges from demand with remaining demand.
    std::vector<double> dist(m + n, inf);
    std::vector<long> pred(m + n, -1);
    for (std::size_t i = 0; i < m; ++i) {
      if (supply[i] > eps) dist[i] = 0.0;
    }
    for (std::size_t round = 0; round < m + n; ++round) {
      bool changed = false;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          if (dist[i] < inf && dist[i] + c[i][j] < dist[m + j] - 1e-13) {
            dist[m + j] = dist[i] + c[i][j];
            pred[m + j] = static_cast<long>(i);
            changed = true;
          }
          if (flow[i][j] > eps && dist[m + j] < inf && dist[m + j] - c[i][j] < dist[i] - 1e-13) {
            dist[i] = dist[m + j] - c[i][j];
            pred[i] = static_cast<long>(m + j);
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    std::size_t best = m + n;
    for (std::size_t j = 0; j < n; ++j) {
      if (demand[j] > eps && dist[m + j] < inf && (best == m + n || dist[m + j] < dist[best])) best = m + j;
    }
    if (best == m + n) break;
    // Bottleneck along the path.
    double push = demand[best - m];
    std::size_t node = best;
    while (pred[node] >= 0) {
      const auto p = static_cast<std::size_t>(pred[node]);
      if (node < m) push = std::min(push, flow[node][p - m]);
      node = p;
    }
    push = std::min(push, supply[node]);
    node = best;
    while (pred[node] >= 0) {
      const auto p = static_cast<std::size_t>(pred[node]);
      if (node >= m) {
        flow[p][node - m] += push;
      } else {
        flow[node][p - m] -= push;
      }
      node = p;
    }
    supply[node] -= push;
    demand[best - m] -= push;
  }
  double cost = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost += c[i][j] * flow[i][j];
  }
  (void)total;
  return cost;
}

// W1 under the Hamming metric by transporting all of mu onto all of nu.
inline double w1_hamming(const std::vector<double>& mu, const std::vector<double>& nu, std::size_t n, int q) {
  const std::size_t N = mu.size();
  std::vector<std::vector<double>> c(N, std::vector<double>(N));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 0; j < N; ++j) c[i][j] = hamming(i, j, n, q);
  }
  return min_cost_transport(mu, nu, c);
}

}  // namespace oracle
