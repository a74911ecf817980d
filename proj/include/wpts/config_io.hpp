#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "wpts/dynamics.hpp"
#include "wpts/mdp.hpp"
#include "wpts/policies.hpp"

namespace wpts {

struct ChannelConfig {
  Eigen::VectorXd station_values;  // packets/slot per chain state
  std::optional<Eigen::MatrixXd> station_transition;  // default: uniform
  Eigen::VectorXd sensor_values;   // uJ/packet per chain state
  std::optional<Eigen::MatrixXd> sensor_transition;
};

// One entry broadcasts to every queue; otherwise one entry per queue.
struct ArrivalConfig {
  std::vector<double> prob{0.5};
  std::vector<int> batch{1};
};

enum class SetEnumerator { kGreedy, kExhaustive };

struct ExperimentConfig {
  // A fixed instance wins over the generator parameters below it.
  std::optional<Topology> topology;
  int n_aps = 4;
  double edge_prob = 0.5;
  int max_stations = 3;
  int max_sensors = 2;
  SetEnumerator set_enumerator = SetEnumerator::kGreedy;

  ChannelConfig channels;
  ArrivalConfig arrivals;
  MdpConfig mdp;
  std::optional<int> queue_cap;
  bool slot_fill_energy = false;

  int runs = 5;
  std::vector<PolicyKind> policies;
  std::vector<double> arrival_sweep;
  std::vector<double> interference_sweep;
  std::vector<int> gap_horizons;
  int gap_seeds = 10;
};

// Topology files hold {"n_aps", "edges", "stations", "sensors"}.
Topology load_topology(const std::string& path);
void save_topology(const Topology& topology, const std::string& path);

// Reads the JSON config (sections: topology, channels, arrivals, mdp,
// dynamics, experiment). Topology file references resolve relative to the
// config's directory. Unreadable files raise IoError; malformed content
// raises ConfigError.
ExperimentConfig load_config(const std::string& path);

ChannelChain make_chain_from(const Eigen::VectorXd& values,
                             const std::optional<Eigen::MatrixXd>& transition);
ArrivalProcess make_arrivals_for(const ArrivalConfig& cfg, int n_queues);

// Chains, arrivals, and bounds assembled for one concrete topology.
SystemModel make_model(const ExperimentConfig& cfg, Topology topology);

}  // namespace wpts
