#include "wpts/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpts {

int transmit_count(int queue, double rate) {
  const int capacity = static_cast<int>(std::floor(rate));
  return std::max(0, std::min(queue, capacity));
}

double reward(const RewardWeights& weights, const SlotResult& result) {
  return weights.data_weight * result.total_sent +
         weights.energy_weight * result.energy_uj;
}

int total_queue(const Topology& topology, const SystemState& state, int ap) {
  if (ap < 0 || ap >= topology.n_aps())
    throw std::invalid_argument("AP id out of range");
  int total = 0;
  for (int j : topology.stations[ap]) total += state.queues(j);
  return total;
}

Eigen::VectorXd station_rates(const SystemModel& model,
                              const SystemState& state) {
  const auto& values = model.stochastics.station_chain.values;
  Eigen::VectorXd rates(state.station_channels.size());
  for (Eigen::Index j = 0; j < rates.size(); ++j)
    rates(j) = values(state.station_channels(j));
  return rates;
}

SystemState initial_state(const SystemModel& model, Rng& rng) {
  SystemState state;
  state.queues = Eigen::VectorXi::Zero(model.topology.n_stations());
  state.station_channels.resize(model.topology.n_stations());
  state.sensor_channels.resize(model.topology.n_sensors());
  const int n_station_states = model.stochastics.station_chain.n_states();
  const int n_sensor_states = model.stochastics.sensor_chain.n_states();
  for (Eigen::Index j = 0; j < state.station_channels.size(); ++j)
    state.station_channels(j) =
        static_cast<int>(rng.uniform_int(n_station_states));
  for (Eigen::Index s = 0; s < state.sensor_channels.size(); ++s)
    state.sensor_channels(s) =
        static_cast<int>(rng.uniform_int(n_sensor_states));
  return state;
}

SlotResult step_slot(const SystemModel& model, const SystemState& state,
                     const TransmissionSet& action,
                     const Eigen::VectorXi& selection,
                     const Eigen::VectorXi& arrivals) {
  const Topology& topo = model.topology;
  const int n_aps = topo.n_aps();
  if (action.size() != n_aps || selection.size() != n_aps)
    throw std::invalid_argument("action and selection must cover every AP");
  if (arrivals.size() != state.queues.size())
    throw std::invalid_argument("arrivals must cover every station queue");
  if (!is_independent(topo.graph, action))
    throw std::invalid_argument("transmission set has conflicting APs");

  SlotResult result;
  result.sent = Eigen::VectorXi::Zero(n_aps);
  result.sensor_energy_uj = Eigen::VectorXd::Zero(topo.n_sensors());
  result.next_queues = state.queues + arrivals;

  const auto& station_values = model.stochastics.station_chain.values;
  const auto& sensor_values = model.stochastics.sensor_chain.values;
  for (int ap = 0; ap < n_aps; ++ap) {
    if (action(ap) == 0) continue;
    const int chosen = selection(ap);
    if (chosen < 0 || chosen >= state.queues.size() ||
        topo.station_ap[chosen] != ap)
      throw std::invalid_argument("selection must pick a station of its AP");
    const double rate = station_values(state.station_channels(chosen));
    const int sent = transmit_count(state.queues(chosen), rate);
    result.sent(ap) = sent;
    result.total_sent += sent;
    result.next_queues(chosen) -= sent;

    const int energized =
        model.slot_fill_energy
            ? std::max(0, static_cast<int>(std::floor(rate)))
            : sent;
    for (int s : topo.sensors[ap]) {
      const double e = sensor_values(state.sensor_channels(s)) * energized;
      result.sensor_energy_uj(s) += e;
      result.energy_uj += e;
    }
  }

  if (model.queue_cap) {
    const int cap = *model.queue_cap;
    for (Eigen::Index j = 0; j < result.next_queues.size(); ++j) {
      if (result.next_queues(j) > cap) {
        result.dropped += result.next_queues(j) - cap;
        result.next_queues(j) = cap;
      }
    }
  }
  return result;
}

void sample_exogenous(const SystemModel& model, const SystemState& state,
                      Rng& arrival_rng, Rng& channel_rng,
                      Eigen::VectorXi& arrivals, Eigen::VectorXi& station_next,
                      Eigen::VectorXi& sensor_next) {
  const ArrivalProcess& proc = model.stochastics.arrivals;
  arrivals.resize(proc.n_queues());
  for (int j = 0; j < proc.n_queues(); ++j)
    arrivals(j) = arrival_rng.bernoulli(proc.prob(j)) ? proc.batch(j) : 0;
  station_next.resize(state.station_channels.size());
  for (Eigen::Index l = 0; l < station_next.size(); ++l)
    station_next(l) = step_channel(model.stochastics.station_chain,
                                   state.station_channels(l), channel_rng);
  sensor_next.resize(state.sensor_channels.size());
  for (Eigen::Index l = 0; l < sensor_next.size(); ++l)
    sensor_next(l) = step_channel(model.stochastics.sensor_chain,
                                  state.sensor_channels(l), channel_rng);
}

std::vector<OutcomeSample> sample_outcomes(const SystemModel& model,
                                           const SystemState& state, int n,
                                           Rng& rng) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  std::vector<OutcomeSample> samples;
  samples.reserve(n);
  Eigen::VectorXi arrivals, station_next, sensor_next;
  for (int i = 0; i < n; ++i) {
    sample_exogenous(model, state, rng, rng, arrivals, station_next,
                     sensor_next);
    OutcomeSample sample;
    sample.state.queues = state.queues + arrivals;
    sample.state.station_channels = station_next;
    sample.state.sensor_channels = sensor_next;
    sample.weight = 1.0 / n;
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace wpts
