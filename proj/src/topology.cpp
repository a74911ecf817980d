#include "wpts/topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace wpts {

ConflictGraph make_conflict_graph(
    int n_aps, const std::vector<std::pair<int, int>>& edges) {
  if (n_aps < 1) throw std::invalid_argument("conflict graph needs at least one AP");
  ConflictGraph g;
  g.n_aps = n_aps;
  g.adj = Eigen::MatrixXi::Zero(n_aps, n_aps);
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= n_aps || b >= n_aps)
      throw std::invalid_argument("edge endpoint out of range");
    if (a == b) throw std::invalid_argument("self-loop in conflict graph");
    g.adj(a, b) = 1;
    g.adj(b, a) = 1;
  }
  return g;
}

Topology make_topology(ConflictGraph graph,
                       std::vector<std::vector<int>> stations,
                       std::vector<std::vector<int>> sensors) {
  const int n = graph.n_aps;
  if (static_cast<int>(stations.size()) != n ||
      static_cast<int>(sensors.size()) != n)
    throw std::invalid_argument("association lists must cover every AP");

  Topology topo;
  topo.graph = std::move(graph);
  topo.stations = std::move(stations);
  topo.sensors = std::move(sensors);

  auto build_owner_map = [n](std::vector<std::vector<int>>& lists,
                             const char* kind) {
    std::size_t total = 0;
    for (auto& l : lists) {
      std::sort(l.begin(), l.end());
      total += l.size();
    }
    std::vector<int> owner(total, -1);
    for (int a = 0; a < n; ++a) {
      for (int id : lists[a]) {
        if (id < 0 || id >= static_cast<int>(total) || owner[id] != -1)
          throw std::invalid_argument(std::string(kind) +
                                      " ids must be dense and owned once");
        owner[id] = a;
      }
    }
    return owner;
  };

  for (const auto& l : topo.stations)
    if (l.empty())
      throw std::invalid_argument("every AP needs at least one station");

  topo.station_ap = build_owner_map(topo.stations, "station");
  topo.sensor_ap = build_owner_map(topo.sensors, "sensor");
  return topo;
}

Topology build_random_topology(int n_aps, double edge_prob, int max_stations,
                               int max_sensors, Rng& rng) {
  if (n_aps < 1) throw std::invalid_argument("n_aps must be >= 1");
  if (max_stations < 1)
    throw std::invalid_argument("every AP needs at least one station");
  if (edge_prob < 0.0 || edge_prob > 1.0)
    throw std::invalid_argument("edge_prob must lie in [0, 1]");

  ConflictGraph g;
  g.n_aps = n_aps;
  g.adj = Eigen::MatrixXi::Zero(n_aps, n_aps);
  for (int a = 0; a < n_aps; ++a)
    for (int b = a + 1; b < n_aps; ++b)
      if (rng.bernoulli(edge_prob)) {
        g.adj(a, b) = 1;
        g.adj(b, a) = 1;
      }

  std::vector<std::vector<int>> stations(n_aps), sensors(n_aps);
  int next_station = 0;
  for (int a = 0; a < n_aps; ++a) {
    const int count = 1 + rng.uniform_int(max_stations);
    for (int i = 0; i < count; ++i) stations[a].push_back(next_station++);
  }
  int next_sensor = 0;
  for (int a = 0; a < n_aps; ++a) {
    const int count = max_sensors > 0 ? rng.uniform_int(max_sensors + 1) : 0;
    for (int i = 0; i < count; ++i) sensors[a].push_back(next_sensor++);
  }
  return make_topology(std::move(g), std::move(stations), std::move(sensors));
}

bool is_independent(const ConflictGraph& graph, const TransmissionSet& set) {
  if (set.size() != graph.n_aps)
    throw std::invalid_argument("set must be indexed over the graph's APs");
  // adj has zero diagonal, so the quadratic form counts conflicting active
  // pairs (twice).
  return set.dot(graph.adj * set) == 0;
}

bool is_maximal_independent(const ConflictGraph& graph,
                            const TransmissionSet& set) {
  if (!is_independent(graph, set)) return false;
  const Eigen::VectorXi hits = graph.adj * set;  // conflicts per AP
  for (int a = 0; a < graph.n_aps; ++a)
    if (set(a) == 0 && hits(a) == 0) return false;
  return true;
}

namespace {

bool contains_column(const std::vector<TransmissionSet>& sets,
                     const TransmissionSet& candidate) {
  for (const auto& s : sets)
    if (s == candidate) return true;
  return false;
}

TransmissionSetMatrix to_matrix(const std::vector<TransmissionSet>& sets,
                                int n_aps) {
  TransmissionSetMatrix m(n_aps, static_cast<int>(sets.size()));
  for (int c = 0; c < m.cols(); ++c) m.col(c) = sets[c];
  return m;
}

}  // namespace

TransmissionSetMatrix enumerate_transmission_sets(const ConflictGraph& graph) {
  const int n = graph.n_aps;
  if (n < 1) throw std::invalid_argument("graph is empty");

  std::vector<TransmissionSet> found;
  for (int start = 0; start < n; ++start) {
    TransmissionSet set = TransmissionSet::Zero(n);
    set(start) = 1;
    for (int a = 0; a < n; ++a) {
      if (set(a)) continue;
      bool clash = false;
      for (int b = 0; b < n && !clash; ++b)
        if (set(b) && graph.conflict(a, b)) clash = true;
      if (!clash) set(a) = 1;
    }
    if (!contains_column(found, set)) found.push_back(set);
  }
  return to_matrix(found, n);
}

TransmissionSetMatrix enumerate_all_maximal_sets(const ConflictGraph& graph) {
  const int n = graph.n_aps;
  if (n < 1) throw std::invalid_argument("graph is empty");
  if (n > 20)
    throw std::invalid_argument(
        "exhaustive enumeration is limited to 20 APs; use the greedy "
        "enumerator");

  std::vector<TransmissionSet> found;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    TransmissionSet set(n);
    for (int a = 0; a < n; ++a) set(a) = (mask >> a) & 1u;
    if (is_maximal_independent(graph, set)) found.push_back(set);
  }
  return to_matrix(found, n);
}

}  // namespace wpts
