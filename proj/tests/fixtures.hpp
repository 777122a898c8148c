#pragma once

#include "netopt/centralized.hpp"
#include "netopt/cost.hpp"
#include "netopt/graph.hpp"
#include "netopt/schedules.hpp"

namespace fixtures {

// Path 1-2-3-4, two actions, uniform defaults.
inline netopt::Instance path4(double beta = 0.2) {
  return netopt::Instance{netopt::path_graph(4), 2, netopt::DefaultMeasure::uniform(4, 2), beta};
}

inline netopt::DenseProblem path4_iid(std::uint64_t seed, std::size_t T, double beta = 0.2) {
  const auto inst = path4(beta);
  return netopt::DenseProblem(inst, netopt::generate_iid(inst.graph, inst.q, T, seed));
}

}  // namespace fixtures
