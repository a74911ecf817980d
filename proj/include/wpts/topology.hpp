#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "wpts/random.hpp"

namespace wpts {

/// Binary AP-activation vector: entry a is 1 when AP a transmits.
using TransmissionSet = Eigen::VectorXi;

/// Columns are distinct transmission sets, i.e. the action space.
using TransmissionSetMatrix = Eigen::MatrixXi;

/// Interference relation between APs. Vertices are AP ids 0..n_aps-1; an
/// edge marks a pair that cannot transmit in the same slot.
struct ConflictGraph {
  int n_aps = 0;
  Eigen::MatrixXi adj;  // symmetric 0/1, zero diagonal

  bool conflict(int a, int b) const { return adj(a, b) != 0; }
};

ConflictGraph make_conflict_graph(int n_aps,
                                  const std::vector<std::pair<int, int>>& edges);

/// A WLAN instance: the conflict graph plus the station and sensor
/// association lists. Station and sensor ids are global, dense within their
/// kind, and each belongs to exactly one AP. Immutable after construction.
struct Topology {
  ConflictGraph graph;
  std::vector<std::vector<int>> stations;  // per AP, ascending station ids
  std::vector<std::vector<int>> sensors;   // per AP, ascending sensor ids
  std::vector<int> station_ap;             // owner AP per station id
  std::vector<int> sensor_ap;              // owner AP per sensor id

  int n_aps() const { return graph.n_aps; }
  int n_stations() const { return static_cast<int>(station_ap.size()); }
  int n_sensors() const { return static_cast<int>(sensor_ap.size()); }
};

/// Validates association lists (dense ids, single ownership) and fills the
/// reverse maps. Throws std::invalid_argument on ill-formed input.
Topology make_topology(ConflictGraph graph,
                       std::vector<std::vector<int>> stations,
                       std::vector<std::vector<int>> sensors);

/// Random instance: each AP pair is an edge with probability edge_prob, each
/// AP gets a uniform count in [1, max_stations] stations and
/// [0, max_sensors] sensors. Deterministic for a given rng state.
Topology build_random_topology(int n_aps, double edge_prob, int max_stations,
                               int max_sensors, Rng& rng);

/// True iff no conflict edge joins two activated APs.
bool is_independent(const ConflictGraph& graph, const TransmissionSet& set);

/// True iff independent and no inactive AP can be activated without breaking
/// independence.
bool is_maximal_independent(const ConflictGraph& graph,
                            const TransmissionSet& set);

/// Greedy enumeration, one pass per starting AP: seed the set with the start,
/// scan the remaining APs in ascending id order, add every AP that conflicts
/// with no member, keep the result if new. At most n_aps distinct sets, in
/// discovery order.
TransmissionSetMatrix enumerate_transmission_sets(const ConflictGraph& graph);

/// Exhaustive enumeration of all maximal independent sets (subset scan;
/// graphs up to 20 APs). Columns ordered by ascending activation bitmask.
TransmissionSetMatrix enumerate_all_maximal_sets(const ConflictGraph& graph);

}  // namespace wpts
