#include "netopt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "netopt/error.hpp"

namespace netopt {

std::vector<double> Coupling::row_marginal() const {
  std::vector<double> out(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[i] += at(i, j);
  }
  return out;
}

std::vector<double> Coupling::col_marginal() const {
  std::vector<double> out(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) out[j] += at(i, j);
  }
  return out;
}

double Coupling::mismatch_probability() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (i != j) s += at(i, j);
    }
  }
  return s;
}

Coupling optimal_tv_coupling(const Dist& mu, const Dist& nu) {
  if (mu.size() != nu.size()) throw InvalidInput("coupling: size mismatch");
  const std::size_t n = mu.size();
  Coupling c{n, n, std::vector<double>(n * n, 0.0)};
  std::vector<double> ra(n), rb(n);
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = std::min(mu[i], nu[i]);
    c.joint[i * n + i] = m;
    ra[i] = mu[i] - m;
    rb[i] = nu[i] - m;
    residual += ra[i];
  }
  if (residual > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (ra[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) c.joint[i * n + j] += ra[i] * rb[j] / residual;
    }
  }
  return c;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Transportation simplex on a dense m x n cost matrix. The basis is a
// spanning tree on the m + n row/column nodes with m + n - 1 cells, some of
// which may carry zero flow.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand, std::vector<double> cost)
      : m_(supply.size()), n_(demand.size()), a_(std::move(supply)), b_(std::move(demand)), c_(std::move(cost)),
        flow_(m_ * n_, 0.0), basic_(m_ * n_, 0), u_(m_), v_(n_) {}

  void solve() {
    northwest_corner();
    double scale = 0.0;
    for (double x : c_) scale = std::max(scale, std::abs(x));
    const double eps = 1e-12 * std::max(1.0, scale);
    std::size_t degenerate_run = 0;
    const std::size_t max_pivots = 50 * (m_ + n_) * (m_ + n_) + 1000;
    while (true) {
      compute_potentials();
      const std::size_t enter = degenerate_run > kBlandAfter ? price_bland(eps) : price_dantzig(eps);
      if (enter == kNone) break;
      if (++pivots_ > max_pivots) throw std::runtime_error("transport simplex did not converge");
      const double theta = pivot(enter);
      degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    }
  }

  std::size_t pivots() const noexcept { return pivots_; }
  const std::vector<double>& flow() const noexcept { return flow_; }
  const std::vector<double>& u() const noexcept { return u_; }
  const std::vector<double>& v() const noexcept { return v_; }

 private:
  static constexpr std::size_t kBlandAfter = 50;

  void northwest_corner() {
    std::vector<double> ra = a_, rb = b_;
    std::size_t i = 0, j = 0;
    while (true) {
      const double x = std::min(ra[i], rb[j]);
      set_basic(i, j, std::max(x, 0.0));
      ra[i] -= x;
      rb[j] -= x;
      if (i + 1 == m_ && j + 1 == n_) break;
      if (i + 1 == m_) {
        ++j;
      } else if (j + 1 == n_) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void set_basic(std::size_t i, std::size_t j, double x) {
    basic_[i * n_ + j] = 1;
    flow_[i * n_ + j] = x;
  }

  void compute_potentials() {
    // BFS from row 0 along basic cells. Nodes 0..m-1 are rows, m.. are columns.
    rows_cells_.assign(m_, {});
    cols_cells_.assign(n_, {});
    for (std::size_t k = 0; k < m_ * n_; ++k) {
      if (!basic_[k]) continue;
      rows_cells_[k / n_].push_back(k % n_);
      cols_cells_[k % n_].push_back(k / n_);
    }
    std::vector<char> row_done(m_, 0), col_done(n_, 0);
    std::vector<std::size_t> queue;
    queue.reserve(m_ + n_);
    u_[0] = 0.0;
    row_done[0] = 1;
    queue.push_back(0);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::size_t node = queue[h];
      if (node < m_) {
        for (std::size_t j : rows_cells_[node]) {
          if (col_done[j]) continue;
          v_[j] = c_[node * n_ + j] - u_[node];
          col_done[j] = 1;
          queue.push_back(m_ + j);
        }
      } else {
        const std::size_t j = node - m_;
        for (std::size_t i : cols_cells_[j]) {
          if (row_done[i]) continue;
          u_[i] = c_[i * n_ + j] - v_[j];
          row_done[i] = 1;
          queue.push_back(i);
        }
      }
    }
  }

  std::size_t price_dantzig(double eps) const {
    std::size_t best = kNone;
    double best_rc = -eps;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        const std::size_t k = i * n_ + j;
        if (basic_[k]) continue;
        const double rc = c_[k] - u_[i] - v_[j];
        if (rc < best_rc) {
          best_rc = rc;
          best = k;
        }
      }
    }
    return best;
  }

  std::size_t price_bland(double eps) const {
    for (std::size_t k = 0; k < m_ * n_; ++k) {
      if (!basic_[k] && c_[k] - u_[k / n_] - v_[k % n_] < -eps) return k;
    }
    return kNone;
  }

  // Adds `enter` to the basis, pushes flow around the cycle it closes and
  // drops the blocking cell. Returns the amount pushed.
  double pivot(std::size_t enter) {
    const std::size_t i0 = enter / n_;
    const std::size_t j0 = enter % n_;
    // Tree path from column j0 to row i0.
    std::vector<std::size_t> parent_cell(m_ + n_, kNone);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{m_ + j0};
    seen[m_ + j0] = 1;
    for (std::size_t h = 0; h < queue.size() && !seen[i0]; ++h) {
      const std::size_t node = queue[h];
      if (node < m_) {
        for (std::size_t j : rows_cells_[node]) {
          if (seen[m_ + j]) continue;
          seen[m_ + j] = 1;
          parent_cell[m_ + j] = node * n_ + j;
          queue.push_back(m_ + j);
        }
      } else {
        const std::size_t j = node - m_;
        for (std::size_t i : cols_cells_[j]) {
          if (seen[i]) continue;
          seen[i] = 1;
          parent_cell[i] = i * n_ + j;
          queue.push_back(i);
        }
      }
    }
    // Walk back from row i0; cells alternate -, +, -, ... starting at row i0.
    std::vector<std::size_t> cycle;
    std::size_t node = i0;
    while (node != m_ + j0) {
      const std::size_t k = parent_cell[node];
      cycle.push_back(k);
      node = node < m_ ? m_ + k % n_ : k / n_;
    }
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = kNone;
    for (std::size_t s = 0; s < cycle.size(); s += 2) {
      if (flow_[cycle[s]] < theta || (flow_[cycle[s]] == theta && cycle[s] < leave)) {
        theta = flow_[cycle[s]];
        leave = cycle[s];
      }
    }
    for (std::size_t s = 0; s < cycle.size(); ++s) {
      flow_[cycle[s]] += s % 2 == 0 ? -theta : theta;
      if (flow_[cycle[s]] < 0.0) flow_[cycle[s]] = 0.0;
    }
    flow_[enter] = theta;
    basic_[enter] = 1;
    basic_[leave] = 0;
    flow_[leave] = 0.0;
    return theta;
  }

  std::size_t m_;
  std::size_t n_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<std::vector<std::size_t>> rows_cells_;
  std::vector<std::vector<std::size_t>> cols_cells_;
  std::size_t pivots_ = 0;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const std::function<double(std::size_t, std::size_t)>& cost) {
  if (supply.empty() || demand.empty()) throw InvalidInput("transport: empty marginal");
  double sa = 0.0, sb = 0.0;
  for (double x : supply) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("transport: supply must be nonnegative");
    sa += x;
  }
  for (double x : demand) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("transport: demand must be nonnegative");
    sb += x;
  }
  if (std::abs(sa - sb) > 1e-9 * std::max({1.0, sa, sb})) {
    throw InvalidInput("transport: supply total " + std::to_string(sa) + " differs from demand total " +
                       std::to_string(sb));
  }
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  std::vector<double> b(demand.begin(), demand.end());
  if (sb > 0.0) {
    for (double& x : b) x *= sa / sb;
  }
  std::vector<double> c(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] = cost(i, j);
      if (!std::isfinite(c[i * n + j])) throw InvalidInput("transport: non-finite cost");
    }
  }
  TransportSimplex simplex(std::vector<double>(supply.begin(), supply.end()), std::move(b), c);
  simplex.solve();

  TransportSolution sol;
  sol.plan = Coupling{m, n, simplex.flow()};
  sol.row_potential = simplex.u();
  sol.col_potential = simplex.v();
  sol.pivots = simplex.pivots();
  for (std::size_t k = 0; k < m * n; ++k) sol.cost += c[k] * sol.plan.joint[k];
  return sol;
}

namespace {

void check_ot_inputs(const Dist& mu, const Dist& nu, const ProfileSpace& space, const OtOptions& options) {
  if (mu.size() != space.size() || nu.size() != space.size()) {
    throw InvalidInput("W1: distributions do not match the profile space");
  }
  if (space.size() > options.cap) throw CapExceeded("exact optimal transport", space.size(), options.cap);
}

}  // namespace

TransportSolution wasserstein1_hamming_plan(const Dist& mu, const Dist& nu, const ProfileSpace& space,
                                            OtOptions options) {
  check_ot_inputs(mu, nu, space, options);
  // For a metric cost the mass min(mu, nu) stays put, so only the positive
  // and negative parts of mu - nu have to move.
  const std::size_t N = space.size();
  std::vector<std::size_t> src, dst;
  std::vector<double> supply, demand;
  for (std::size_t x = 0; x < N; ++x) {
    const double d = mu[x] - nu[x];
    if (d > 0.0) {
      src.push_back(x);
      supply.push_back(d);
    } else if (d < 0.0) {
      dst.push_back(x);
      demand.push_back(-d);
    }
  }
  TransportSolution out;
  out.plan = Coupling{N, N, std::vector<double>(N * N, 0.0)};
  for (std::size_t x = 0; x < N; ++x) out.plan.joint[x * N + x] = std::min(mu[x], nu[x]);
  out.row_potential.assign(N, 0.0);
  out.col_potential.assign(N, 0.0);
  if (src.empty() || dst.empty()) return out;

  const TransportSolution reduced = solve_transport(supply, demand, [&](std::size_t i, std::size_t j) {
    return static_cast<double>(space.hamming(src[i], dst[j]));
  });
  out.pivots = reduced.pivots;
  for (std::size_t i = 0; i < src.size(); ++i) {
    for (std::size_t j = 0; j < dst.size(); ++j) out.plan.joint[src[i] * N + dst[j]] += reduced.plan.at(i, j);
  }
  out.cost = reduced.cost;
  // Lift the reduced duals to a 1-Lipschitz potential on all of X via the
  // c-transform phi(x) = min_j (rho(x, y_j) - v_j).
  for (std::size_t x = 0; x < N; ++x) {
    double phi = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < dst.size(); ++j) {
      phi = std::min(phi, static_cast<double>(space.hamming(x, dst[j])) - reduced.col_potential[j]);
    }
    out.row_potential[x] = phi;
    out.col_potential[x] = -phi;
  }
  return out;
}

double wasserstein1_hamming(const Dist& mu, const Dist& nu, const ProfileSpace& space, OtOptions options) {
  return wasserstein1_hamming_plan(mu, nu, space, options).cost;
}

double hamming_transport_cost(const Coupling& coupling, const ProfileSpace& space) {
  if (coupling.rows != space.size() || coupling.cols != space.size()) {
    throw InvalidInput("coupling does not live on the profile space");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < coupling.rows; ++i) {
    for (std::size_t j = 0; j < coupling.cols; ++j) {
      const double w = coupling.at(i, j);
      if (w != 0.0) s += w * static_cast<double>(space.hamming(i, j));
    }
  }
  return s;
}

}  // namespace netopt
