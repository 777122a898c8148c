#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "netopt/cost.hpp"
#include "netopt/graph.hpp"

namespace netopt {

struct ScheduleProvenance {
  std::string generator;  // "iid", "shocks", "manual", ...
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();

  friend bool operator==(const ScheduleProvenance&, const ScheduleProvenance&) = default;
};

/// Nonreactive cost sequence f_1..f_T, fixed in advance, for one graph.
class CostSchedule {
 public:
  /// Every cost must be shaped for `graph` and use alphabet q.
  CostSchedule(NetworkGraph graph, int q, std::vector<NetworkCost> costs, ScheduleProvenance provenance);

  std::size_t horizon() const noexcept { return costs_.size(); }
  int q() const noexcept { return q_; }
  const NetworkGraph& graph() const noexcept { return graph_; }
  const ScheduleProvenance& provenance() const noexcept { return provenance_; }
  const std::vector<NetworkCost>& costs() const noexcept { return costs_; }
  /// f_t for t in 1..T.
  const NetworkCost& at(std::size_t t) const;

  /// Schedule restricted to rounds 1..T.
  CostSchedule prefix(std::size_t T) const;

  friend bool operator==(const CostSchedule&, const CostSchedule&) = default;

 private:
  NetworkGraph graph_;
  int q_;
  std::vector<NetworkCost> costs_;
  ScheduleProvenance provenance_;
};

/// Every φ and ψ entry i.i.d. uniform on [-amplitude, amplitude].
/// amplitude must lie in (0, 1].
CostSchedule generate_iid(const NetworkGraph& g, int q, std::size_t T, std::uint64_t seed,
                          double amplitude = 1.0);

/// Piecewise-constant schedule: epoch lengths are geometric on {1, 2, ...}
/// with the given mean; each epoch holds one fresh i.i.d. cost (amplitude 1).
CostSchedule generate_shocks(const NetworkGraph& g, int q, std::size_t T, std::uint64_t seed,
                             std::size_t epoch_mean);

/// All-zero costs.
CostSchedule zero_schedule(const NetworkGraph& g, int q, std::size_t T);

/// Number of rounds t ≥ 2 with f_t ≠ f_{t-1}.
std::size_t count_shocks(const CostSchedule& s);

/// JSON schedule format (see README). Reals are written with enough digits
/// to round-trip exactly.
nlohmann::json schedule_to_json(const CostSchedule& s);
CostSchedule schedule_from_json(const nlohmann::json& doc);
void save_schedule(const CostSchedule& s, const std::filesystem::path& path);
/// Throws ParseError (malformed or truncated file, with location) or
/// InvalidInput (out-of-range cost, graph hash mismatch).
CostSchedule load_schedule(const std::filesystem::path& path);

}  // namespace netopt
