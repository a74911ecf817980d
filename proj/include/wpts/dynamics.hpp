#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "wpts/random.hpp"
#include "wpts/stochastics.hpp"
#include "wpts/topology.hpp"

namespace wpts {

// Joint state of one decision slot: per-station backlogs (indexed by global
// station id) and the channel chain state of every station and sensor link.
struct SystemState {
  Eigen::VectorXi queues;
  Eigen::VectorXi station_channels;
  Eigen::VectorXi sensor_channels;

  bool operator==(const SystemState& other) const {
    return queues.size() == other.queues.size() &&
           station_channels.size() == other.station_channels.size() &&
           sensor_channels.size() == other.sensor_channels.size() &&
           queues == other.queues &&
           station_channels == other.station_channels &&
           sensor_channels == other.sensor_channels;
  }
  bool operator!=(const SystemState& other) const { return !(*this == other); }
};

struct RewardWeights {
  double data_weight = 1.0;
  double energy_weight = 0.01;
};

struct SystemModel {
  Topology topology;
  StochasticModel stochastics;
  std::optional<int> queue_cap;   // no value = unbounded queues
  bool slot_fill_energy = false;  // credit a full slot of packets to sensors
};

struct SlotResult {
  Eigen::VectorXi sent;              // per AP
  int total_sent = 0;
  double energy_uj = 0.0;            // summed over sensors
  Eigen::VectorXd sensor_energy_uj;  // per sensor
  Eigen::VectorXi next_queues;
  int dropped = 0;
};

// One Monte-Carlo draw of the exogenous part of a slot: queues hold the
// post-arrival, pre-service backlog so any action can still be applied on
// top, channels hold the next chain states.
struct OutcomeSample {
  SystemState state;
  double weight = 1.0;
};

int transmit_count(int queue, double rate);

double reward(const RewardWeights& weights, const SlotResult& result);

// Backlog summed over one AP's stations.
int total_queue(const Topology& topology, const SystemState& state, int ap);

// Per-station link rates (packets per slot, unfloored) at the given state.
Eigen::VectorXd station_rates(const SystemModel& model,
                              const SystemState& state);

// Zero queues, channel states drawn uniformly (station links in station id
// order, then sensor links).
SystemState initial_state(const SystemModel& model, Rng& rng);

// Applies one decision slot to the endogenous part of the state. `action` is
// a 0/1 column over APs and must be independent in the conflict graph;
// `selection` maps each active AP to one of its own stations (entries for
// idle APs are ignored). Service is taken from the pre-arrival backlog, then
// arrivals are added and bounded queues clip, counting drops.
SlotResult step_slot(const SystemModel& model, const SystemState& state,
                     const TransmissionSet& action,
                     const Eigen::VectorXi& selection,
                     const Eigen::VectorXi& arrivals);

// Draws arrivals (queue order) and next channel states (station links, then
// sensor links) into preallocated vectors. Every caller advancing a slot
// consumes the same number of draws in the same order, which keeps paired
// runs aligned. Both rngs may alias the same source.
void sample_exogenous(const SystemModel& model, const SystemState& state,
                      Rng& arrival_rng, Rng& channel_rng,
                      Eigen::VectorXi& arrivals, Eigen::VectorXi& station_next,
                      Eigen::VectorXi& sensor_next);

// n equally weighted exogenous draws from `state`.
std::vector<OutcomeSample> sample_outcomes(const SystemModel& model,
                                           const SystemState& state, int n,
                                           Rng& rng);

}  // namespace wpts
