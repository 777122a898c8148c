#include "netopt/schedules.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "netopt/error.hpp"
#include "netopt/rng.hpp"

namespace netopt {

using nlohmann::json;

CostSchedule::CostSchedule(NetworkGraph graph, int q, std::vector<NetworkCost> costs, ScheduleProvenance provenance)
    : graph_(std::move(graph)), q_(q), costs_(std::move(costs)), provenance_(std::move(provenance)) {
  if (q < 1) throw InvalidInput("q must be positive");
  for (std::size_t t = 0; t < costs_.size(); ++t) {
    if (costs_[t].q() != q_ || costs_[t].num_vertices() != graph_.num_vertices() ||
        costs_[t].num_edges() != graph_.num_edges()) {
      throw InvalidInput("cost of round " + std::to_string(t + 1) + " is not shaped for the schedule graph");
    }
  }
}

const NetworkCost& CostSchedule::at(std::size_t t) const {
  if (t == 0 || t > costs_.size()) {
    throw InvalidInput("round " + std::to_string(t) + " outside 1.." + std::to_string(costs_.size()));
  }
  return costs_[t - 1];
}

CostSchedule CostSchedule::prefix(std::size_t T) const {
  if (T > costs_.size()) throw InvalidInput("prefix longer than the schedule");
  return CostSchedule(graph_, q_, std::vector<NetworkCost>(costs_.begin(), costs_.begin() + static_cast<long>(T)),
                      provenance_);
}

namespace {

NetworkCost random_cost(const NetworkGraph& g, int q, CounterRng& rng, double amplitude) {
  const auto qs = static_cast<std::size_t>(q);
  std::vector<double> phi(g.num_vertices() * qs), psi(g.num_edges() * qs * qs);
  for (double& x : phi) x = rng.uniform(-amplitude, amplitude);
  for (double& x : psi) x = rng.uniform(-amplitude, amplitude);
  return NetworkCost(g.num_vertices(), g.num_edges(), q, std::move(phi), std::move(psi));
}

}  // namespace

CostSchedule generate_iid(const NetworkGraph& g, int q, std::size_t T, std::uint64_t seed, double amplitude) {
  if (!(amplitude > 0.0 && amplitude <= 1.0)) throw InvalidInput("amplitude must lie in (0, 1]");
  if (q < 1) throw InvalidInput("q must be positive");
  CounterRng rng(seed, 0);
  std::vector<NetworkCost> costs;
  costs.reserve(T);
  for (std::size_t t = 0; t < T; ++t) costs.push_back(random_cost(g, q, rng, amplitude));
  return CostSchedule(g, q, std::move(costs), {"iid", seed, json{{"amplitude", amplitude}}});
}

CostSchedule generate_shocks(const NetworkGraph& g, int q, std::size_t T, std::uint64_t seed,
                             std::size_t epoch_mean) {
  if (epoch_mean == 0) throw InvalidInput("epoch mean must be at least 1");
  if (q < 1) throw InvalidInput("q must be positive");
  CounterRng cost_rng(seed, 0);
  CounterRng length_rng(seed, 1);
  const double p = 1.0 / static_cast<double>(epoch_mean);
  std::vector<NetworkCost> costs;
  costs.reserve(T);
  while (costs.size() < T) {
    std::size_t len = 1;
    if (p < 1.0) {
      const double u = 1.0 - length_rng.uniform01();  // (0, 1]
      len += static_cast<std::size_t>(std::floor(std::log(u) / std::log1p(-p)));
    }
    const NetworkCost f = random_cost(g, q, cost_rng, 1.0);
    for (std::size_t k = 0; k < len && costs.size() < T; ++k) costs.push_back(f);
  }
  return CostSchedule(g, q, std::move(costs), {"shocks", seed, json{{"epoch_mean", epoch_mean}}});
}

CostSchedule zero_schedule(const NetworkGraph& g, int q, std::size_t T) {
  return CostSchedule(g, q, std::vector<NetworkCost>(T, NetworkCost::zero(g, q)), {"zero", 0, json::object()});
}

std::size_t count_shocks(const CostSchedule& s) {
  std::size_t k = 0;
  for (std::size_t t = 1; t < s.horizon(); ++t) k += !(s.costs()[t] == s.costs()[t - 1]);
  return k;
}

json schedule_to_json(const CostSchedule& s) {
  const NetworkGraph& g = s.graph();
  const auto qs = static_cast<std::size_t>(s.q());
  json edges = json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u + 1, e.v + 1});
  json costs = json::array();
  for (const NetworkCost& f : s.costs()) {
    json phi = json::array();
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
      phi.push_back(std::vector<double>(f.phi_values().begin() + static_cast<long>(v * qs),
                                        f.phi_values().begin() + static_cast<long>((v + 1) * qs)));
    }
    json psi = json::array();
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      json rows = json::array();
      for (std::size_t a = 0; a < qs; ++a) {
        const auto begin = f.psi_values().begin() + static_cast<long>((e * qs + a) * qs);
        rows.push_back(std::vector<double>(begin, begin + static_cast<long>(qs)));
      }
      psi.push_back(std::move(rows));
    }
    costs.push_back({{"phi", std::move(phi)}, {"psi", std::move(psi)}});
  }
  return json{{"format", "netopt-schedule"},
              {"version", 1},
              {"graph", {{"num_vertices", g.num_vertices()}, {"edges", std::move(edges)}, {"hash", g.hash()}}},
              {"q", s.q()},
              {"horizon", s.horizon()},
              {"provenance",
               {{"generator", s.provenance().generator},
                {"seed", s.provenance().seed},
                {"params", s.provenance().params}}},
              {"costs", std::move(costs)}};
}

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing field \"" + key + "\"");
  return obj.at(key);
}

std::vector<double> real_row(const json& row, std::size_t len, const std::string& where) {
  if (!row.is_array() || row.size() != len) {
    throw ParseError(where + ": expected an array of " + std::to_string(len) + " numbers");
  }
  std::vector<double> out;
  out.reserve(len);
  for (std::size_t i = 0; i < len; ++i) {
    if (!row[i].is_number()) throw ParseError(where + "[" + std::to_string(i) + "]: not a number");
    out.push_back(row[i].get<double>());
  }
  return out;
}

}  // namespace

CostSchedule schedule_from_json(const json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "netopt-schedule") {
    throw ParseError("schedule: not a netopt-schedule document");
  }
  const json& gj = field(doc, "graph", "schedule");
  const json& nj = field(gj, "num_vertices", "graph");
  if (!nj.is_number_unsigned() || nj.get<std::size_t>() == 0) {
    throw ParseError("graph.num_vertices: expected a positive integer");
  }
  std::vector<std::pair<std::size_t, std::size_t>> edge_list;
  const json& ej = field(gj, "edges", "graph");
  if (!ej.is_array()) throw ParseError("graph.edges: expected an array");
  for (std::size_t k = 0; k < ej.size(); ++k) {
    const json& e = ej[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      throw ParseError("graph.edges[" + std::to_string(k) + "]: expected [u, v]");
    }
    edge_list.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  NetworkGraph g = build_graph(nj.get<std::size_t>(), edge_list);
  if (gj.contains("hash") && gj.at("hash") != g.hash()) {
    throw InvalidInput("schedule graph hash " + gj.at("hash").dump() + " does not match its edge list");
  }

  const json& qj = field(doc, "q", "schedule");
  if (!qj.is_number_integer() || qj.get<long long>() < 1) throw ParseError("q: expected a positive integer");
  const int q = qj.get<int>();
  const auto qs = static_cast<std::size_t>(q);

  ScheduleProvenance prov;
  if (doc.contains("provenance")) {
    const json& pj = doc.at("provenance");
    prov.generator = pj.value("generator", "");
    prov.seed = pj.value("seed", std::uint64_t{0});
    prov.params = pj.value("params", json::object());
  }

  const json& cj = field(doc, "costs", "schedule");
  if (!cj.is_array()) throw ParseError("costs: expected an array");
  if (doc.contains("horizon") && doc.at("horizon") != cj.size()) {
    throw ParseError("schedule truncated: horizon " + doc.at("horizon").dump() + " but " +
                     std::to_string(cj.size()) + " costs");
  }
  std::vector<NetworkCost> costs;
  costs.reserve(cj.size());
  for (std::size_t t = 0; t < cj.size(); ++t) {
    const std::string where = "costs[" + std::to_string(t) + "]";
    const json& phij = field(cj[t], "phi", where);
    const json& psij = field(cj[t], "psi", where);
    if (!phij.is_array() || phij.size() != g.num_vertices()) {
      throw ParseError(where + ".phi: expected " + std::to_string(g.num_vertices()) + " rows");
    }
    if (!psij.is_array() || psij.size() != g.num_edges()) {
      throw ParseError(where + ".psi: expected " + std::to_string(g.num_edges()) + " matrices");
    }
    std::vector<double> phi, psi;
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      auto row = real_row(phij[v], qs, where + ".phi[" + std::to_string(v) + "]");
      phi.insert(phi.end(), row.begin(), row.end());
    }
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      const std::string ew = where + ".psi[" + std::to_string(e) + "]";
      if (!psij[e].is_array() || psij[e].size() != qs) throw ParseError(ew + ": expected a q x q matrix");
      for (std::size_t a = 0; a < qs; ++a) {
        auto row = real_row(psij[e][a], qs, ew + "[" + std::to_string(a) + "]");
        psi.insert(psi.end(), row.begin(), row.end());
      }
    }
    try {
      costs.emplace_back(g.num_vertices(), g.num_edges(), q, std::move(phi), std::move(psi));
    } catch (const InvalidInput& e) {
      throw InvalidInput(where + ": " + e.what());
    }
  }
  return CostSchedule(std::move(g), q, std::move(costs), std::move(prov));
}

void save_schedule(const CostSchedule& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write schedule to " + path.string());
  out << schedule_to_json(s).dump(1) << '\n';
  if (!out) throw InvalidInput("write failed for " + path.string());
}

CostSchedule load_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schedule file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  try {
    return schedule_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

}  // namespace netopt
