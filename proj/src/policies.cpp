#include "wpts/policies.hpp"

#include <stdexcept>

#include "wpts/errors.hpp"

namespace wpts {

PolicyKind parse_policy(const std::string& name) {
  if (name == "maxweight") return PolicyKind::kMaxWeight;
  if (name == "maxqueue") return PolicyKind::kMaxQueue;
  if (name == "maxcsi") return PolicyKind::kMaxCsi;
  if (name == "random") return PolicyKind::kRandom;
  throw ConfigError("unknown policy: " + name);
}

std::string policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMaxWeight: return "maxweight";
    case PolicyKind::kMaxQueue: return "maxqueue";
    case PolicyKind::kMaxCsi: return "maxcsi";
    case PolicyKind::kRandom: return "random";
  }
  throw std::logic_error("unreachable");
}

int select_station(PolicyKind kind, const std::vector<int>& stations,
                   const Eigen::VectorXi& queues, const Eigen::VectorXd& rates,
                   Rng& rng) {
  if (stations.empty())
    throw std::invalid_argument("cannot select from an empty station list");
  if (kind == PolicyKind::kRandom)
    return stations[rng.uniform_int(static_cast<int>(stations.size()))];

  int best_station = stations.front();
  double best_score = -1.0;
  for (int j : stations) {
    double score = 0.0;
    switch (kind) {
      case PolicyKind::kMaxWeight: score = queues(j) * rates(j); break;
      case PolicyKind::kMaxQueue: score = queues(j); break;
      case PolicyKind::kMaxCsi: score = rates(j); break;
      case PolicyKind::kRandom: break;
    }
    if (score > best_score) {
      best_score = score;
      best_station = j;
    }
  }
  return best_station;
}

Eigen::VectorXi select_stations(PolicyKind kind, const SystemModel& model,
                                const SystemState& state, Rng& rng) {
  const Topology& topo = model.topology;
  const Eigen::VectorXd rates = station_rates(model, state);
  Eigen::VectorXi selection(topo.n_aps());
  for (int ap = 0; ap < topo.n_aps(); ++ap)
    selection(ap) =
        select_station(kind, topo.stations[ap], state.queues, rates, rng);
  return selection;
}

std::map<int, int> select_all(PolicyKind kind, const SystemModel& model,
                              const SystemState& state,
                              const TransmissionSet& action, Rng& rng) {
  const Topology& topo = model.topology;
  if (action.size() != topo.n_aps())
    throw std::invalid_argument("action must cover every AP");
  if (!is_independent(topo.graph, action))
    throw std::invalid_argument("transmission set has conflicting APs");
  const Eigen::VectorXd rates = station_rates(model, state);
  std::map<int, int> selection;
  for (int ap = 0; ap < topo.n_aps(); ++ap)
    if (action(ap) != 0)
      selection[ap] =
          select_station(kind, topo.stations[ap], state.queues, rates, rng);
  return selection;
}

}  // namespace wpts
