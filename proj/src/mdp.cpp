#include "wpts/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "wpts/errors.hpp"

namespace wpts {

std::int64_t StateSpace::queue_index(const Eigen::VectorXi& queues) const {
  std::int64_t idx = 0;
  for (int j = 0; j < n_queues; ++j) idx = idx * queue_radix + queues(j);
  return idx;
}

std::int64_t StateSpace::channel_index(
    const Eigen::VectorXi& station_channels,
    const Eigen::VectorXi& sensor_channels) const {
  std::int64_t idx = 0;
  for (int l = 0; l < n_queues; ++l)
    idx = idx * station_radix + station_channels(l);
  for (int l = 0; l < n_sensor_links; ++l)
    idx = idx * sensor_radix + sensor_channels(l);
  return idx;
}

std::int64_t StateSpace::index_of(const SystemState& state) const {
  return queue_index(state.queues) * n_channel_combos +
         channel_index(state.station_channels, state.sensor_channels);
}

void StateSpace::decode(std::int64_t index, SystemState& state) const {
  state.queues.resize(n_queues);
  state.station_channels.resize(n_queues);
  state.sensor_channels.resize(n_sensor_links);
  std::int64_t cidx = index % n_channel_combos;
  std::int64_t qidx = index / n_channel_combos;
  for (int l = n_sensor_links - 1; l >= 0; --l) {
    state.sensor_channels(l) = static_cast<int>(cidx % sensor_radix);
    cidx /= sensor_radix;
  }
  for (int l = n_queues - 1; l >= 0; --l) {
    state.station_channels(l) = static_cast<int>(cidx % station_radix);
    cidx /= station_radix;
  }
  for (int j = n_queues - 1; j >= 0; --j) {
    state.queues(j) = static_cast<int>(qidx % queue_radix);
    qidx /= queue_radix;
  }
}

SystemState StateSpace::state_at(std::int64_t index) const {
  SystemState state;
  decode(index, state);
  return state;
}

StateSpace make_state_space(const SystemModel& model,
                            std::int64_t max_states) {
  if (!model.queue_cap)
    throw ConfigError("state enumeration needs bounded queues (set q_max)");
  if (*model.queue_cap < 0) throw ConfigError("q_max must be >= 0");

  StateSpace space;
  space.n_queues = model.topology.n_stations();
  space.n_sensor_links = model.topology.n_sensors();
  space.queue_radix = *model.queue_cap + 1;
  space.station_radix = model.stochastics.station_chain.n_states();
  space.sensor_radix = model.stochastics.sensor_chain.n_states();

  auto grow = [max_states](std::int64_t acc, int radix) {
    acc *= radix;
    if (acc > max_states)
      throw CapExceededError("state space exceeds " +
                             std::to_string(max_states) + " states");
    return acc;
  };
  for (int j = 0; j < space.n_queues; ++j)
    space.n_queue_combos = grow(space.n_queue_combos, space.queue_radix);
  for (int l = 0; l < space.n_queues; ++l)
    space.n_channel_combos = grow(space.n_channel_combos, space.station_radix);
  for (int l = 0; l < space.n_sensor_links; ++l)
    space.n_channel_combos = grow(space.n_channel_combos, space.sensor_radix);
  if (space.n_queue_combos > max_states / space.n_channel_combos)
    throw CapExceededError("state space exceeds " +
                           std::to_string(max_states) + " states");
  return space;
}

std::vector<SystemState> enumerate_state_space(const StateSpace& space) {
  std::vector<SystemState> states;
  states.reserve(space.size());
  for (std::int64_t i = 0; i < space.size(); ++i)
    states.push_back(space.state_at(i));
  return states;
}

namespace {

struct ArrivalCombo {
  Eigen::VectorXi arrivals;
  double prob = 1.0;
};

// Expands the product of per-queue two-point arrival laws. Queues with
// probability exactly 0 or 1 contribute no branch.
std::vector<ArrivalCombo> enumerate_arrival_combos(const ArrivalProcess& proc,
                                                   int max_combos) {
  Eigen::VectorXi base = Eigen::VectorXi::Zero(proc.n_queues());
  std::vector<int> branching;
  for (int j = 0; j < proc.n_queues(); ++j) {
    if (proc.prob(j) >= 1.0)
      base(j) = proc.batch(j);
    else if (proc.prob(j) > 0.0)
      branching.push_back(j);
  }
  if (branching.size() >= 31 ||
      (1 << branching.size()) > max_combos)
    throw CapExceededError("arrival expansion exceeds " +
                           std::to_string(max_combos) + " outcomes");

  std::vector<ArrivalCombo> combos;
  combos.reserve(1u << branching.size());
  for (std::uint32_t mask = 0; mask < (1u << branching.size()); ++mask) {
    ArrivalCombo combo{base, 1.0};
    for (std::size_t b = 0; b < branching.size(); ++b) {
      const int j = branching[b];
      if (mask >> b & 1u) {
        combo.arrivals(j) = proc.batch(j);
        combo.prob *= proc.prob(j);
      } else {
        combo.prob *= 1.0 - proc.prob(j);
      }
    }
    combos.push_back(std::move(combo));
  }
  return combos;
}

struct SelectionCombo {
  Eigen::VectorXi selection;
  double prob = 1.0;
};

// Product of the per-AP uniform station choices; every combination is
// equally likely.
std::vector<SelectionCombo> random_selection_combos(const Topology& topo,
                                                    std::int64_t max_combos) {
  std::int64_t total = 1;
  for (const auto& list : topo.stations) {
    total *= static_cast<std::int64_t>(list.size());
    if (total > max_combos)
      throw CapExceededError("selection expansion exceeds " +
                             std::to_string(max_combos) + " combinations");
  }
  std::vector<SelectionCombo> combos(total);
  for (std::int64_t code = 0; code < total; ++code) {
    SelectionCombo& combo = combos[code];
    combo.selection.resize(topo.n_aps());
    combo.prob = 1.0 / static_cast<double>(total);
    std::int64_t c = code;
    for (int ap = topo.n_aps() - 1; ap >= 0; --ap) {
      const auto& list = topo.stations[ap];
      combo.selection(ap) = list[c % list.size()];
      c /= list.size();
    }
  }
  return combos;
}

// Mixed-radix index of the clipped post-slot queues.
inline std::int64_t next_queue_index(const StateSpace& space,
                                     const Eigen::VectorXi& queues,
                                     const Eigen::VectorXi& arrivals,
                                     const Eigen::VectorXi& departures) {
  const int cap = space.queue_radix - 1;
  std::int64_t idx = 0;
  for (int j = 0; j < space.n_queues; ++j) {
    int v = queues(j) + arrivals(j) - departures(j);
    if (v > cap) v = cap;
    if (v < 0) v = 0;
    idx = idx * space.queue_radix + v;
  }
  return idx;
}

// In-place expectation over one channel digit: rows of `table` are channel
// combos, and the digit occupies `radix` slices of the given stride.
void contract_channel_axis(Eigen::MatrixXd& table, std::int64_t stride,
                           int radix, const Eigen::MatrixXd& transition) {
  if (radix == 1) return;
  const std::int64_t nc = table.rows();
  const std::int64_t block = stride * radix;
  Eigen::MatrixXd temp(radix, table.cols());
  for (std::int64_t base = 0; base < nc; base += block)
    for (std::int64_t inner = 0; inner < stride; ++inner) {
      for (int d = 0; d < radix; ++d)
        temp.row(d) = table.row(base + inner + d * stride);
      for (int d = 0; d < radix; ++d)
        table.row(base + inner + d * stride) = transition.row(d) * temp;
    }
}

// E[V(q', C') | C = c] for every (c, q'), starting from V as an
// n_channel x n_queue matrix and contracting one link at a time.
Eigen::MatrixXd contract_channels(const SystemModel& model,
                                  const StateSpace& space,
                                  const Eigen::MatrixXd& value_matrix) {
  Eigen::MatrixXd w = value_matrix;
  std::int64_t sensor_block = 1;
  for (int l = 0; l < space.n_sensor_links; ++l) sensor_block *= space.sensor_radix;

  std::int64_t stride = sensor_block;
  for (int l = space.n_queues - 1; l >= 0; --l) {
    contract_channel_axis(w, stride, space.station_radix,
                          model.stochastics.station_chain.transition);
    stride *= space.station_radix;
  }
  stride = 1;
  for (int l = space.n_sensor_links - 1; l >= 0; --l) {
    contract_channel_axis(w, stride, space.sensor_radix,
                          model.stochastics.sensor_chain.transition);
    stride *= space.sensor_radix;
  }
  return w;
}

void decode_queue_digits(const StateSpace& space, std::int64_t qidx,
                         Eigen::VectorXi& queues) {
  for (int j = space.n_queues - 1; j >= 0; --j) {
    queues(j) = static_cast<int>(qidx % space.queue_radix);
    qidx /= space.queue_radix;
  }
}

void decode_channel_digits(const StateSpace& space, std::int64_t cidx,
                           Eigen::VectorXi& station_channels,
                           Eigen::VectorXi& sensor_channels) {
  for (int l = space.n_sensor_links - 1; l >= 0; --l) {
    sensor_channels(l) = static_cast<int>(cidx % space.sensor_radix);
    cidx /= space.sensor_radix;
  }
  for (int l = space.n_queues - 1; l >= 0; --l) {
    station_channels(l) = static_cast<int>(cidx % space.station_radix);
    cidx /= space.station_radix;
  }
}

// Per-state scratch shared by both value iterations.
struct BackupScratch {
  Eigen::VectorXd rates;         // per station, unfloored
  Eigen::VectorXi rate_floor;    // per station, service capacity
  Eigen::VectorXd ap_eps;        // per AP, summed uJ/packet over its sensors
  Eigen::VectorXi departures;    // per station
  Eigen::VectorXi selection;     // per AP
  Eigen::VectorXd action_score;  // per action, selection-averaged

  void init(const Topology& topo, int n_actions) {
    rates.resize(topo.n_stations());
    rate_floor.resize(topo.n_stations());
    ap_eps.resize(topo.n_aps());
    departures = Eigen::VectorXi::Zero(topo.n_stations());
    selection.resize(topo.n_aps());
    action_score.resize(n_actions);
  }
};

// Rates and per-AP energy factors at the current channel digits.
void fill_channel_scratch(const SystemModel& model, const SystemState& state,
                          BackupScratch& scratch) {
  const auto& sv = model.stochastics.station_chain.values;
  const auto& ev = model.stochastics.sensor_chain.values;
  const Topology& topo = model.topology;
  for (int j = 0; j < topo.n_stations(); ++j) {
    scratch.rates(j) = sv(state.station_channels(j));
    scratch.rate_floor(j) =
        std::max(0, static_cast<int>(std::floor(scratch.rates(j))));
  }
  for (int ap = 0; ap < topo.n_aps(); ++ap) {
    double eps = 0.0;
    for (int s : topo.sensors[ap]) eps += ev(state.sensor_channels(s));
    scratch.ap_eps(ap) = eps;
  }
}

// Slot reward and departures of (queues, selection, action); arrivals do not
// enter because service draws on the pre-arrival backlog.
double apply_action(const SystemModel& model, const RewardWeights& weights,
                    const TransmissionSetMatrix& actions, int action_index,
                    const Eigen::VectorXi& queues,
                    const Eigen::VectorXi& selection, BackupScratch& scratch) {
  scratch.departures.setZero();
  double reward = 0.0;
  const Topology& topo = model.topology;
  for (int ap = 0; ap < topo.n_aps(); ++ap) {
    if (actions(ap, action_index) == 0) continue;
    const int chosen = selection(ap);
    const int sent = std::min(queues(chosen), scratch.rate_floor(chosen));
    scratch.departures(chosen) = sent;
    const int energized =
        model.slot_fill_energy ? scratch.rate_floor(chosen) : sent;
    reward += weights.data_weight * sent +
              weights.energy_weight * scratch.ap_eps(ap) * energized;
  }
  return reward;
}

void fill_deterministic_selection(PolicyKind rule, const Topology& topo,
                                  const Eigen::VectorXi& queues,
                                  const Eigen::VectorXd& rates, Rng& rng,
                                  Eigen::VectorXi& selection) {
  for (int ap = 0; ap < topo.n_aps(); ++ap)
    selection(ap) =
        select_station(rule, topo.stations[ap], queues, rates, rng);
}

void validate_backup_inputs(const SystemModel& model, const MdpConfig& cfg,
                            const StateSpace& space,
                            const TransmissionSetMatrix& actions) {
  if (cfg.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (cfg.discount < 0.0 || cfg.discount > 1.0)
    throw ConfigError("discount must lie in [0, 1]");
  if (actions.rows() != model.topology.n_aps() || actions.cols() < 1)
    throw std::invalid_argument("action matrix must cover every AP");
  for (int a = 0; a < actions.cols(); ++a)
    if (!is_independent(model.topology.graph, actions.col(a)))
      throw std::invalid_argument("action matrix has a conflicting set");
  if (space.n_queues != model.topology.n_stations() ||
      space.n_sensor_links != model.topology.n_sensors() ||
      space.station_radix != model.stochastics.station_chain.n_states() ||
      space.sensor_radix != model.stochastics.sensor_chain.n_states() ||
      !model.queue_cap || space.queue_radix != *model.queue_cap + 1)
    throw std::invalid_argument("state space does not match the model");
}

}  // namespace

ValueTable exact_value_iteration(const SystemModel& model,
                                 const MdpConfig& cfg, const StateSpace& space,
                                 const TransmissionSetMatrix& actions,
                                 PolicyKind rule) {
  validate_backup_inputs(model, cfg, space, actions);
  const std::int64_t n = space.size();
  const std::int64_t nq = space.n_queue_combos;
  const std::int64_t nc = space.n_channel_combos;
  const int n_actions = static_cast<int>(actions.cols());

  ValueTable table;
  table.horizon = cfg.horizon;
  table.values = Eigen::MatrixXd::Zero(n, cfg.horizon + 1);
  table.best_action = Eigen::MatrixXi::Zero(n, cfg.horizon);

  const auto arrival_combos =
      enumerate_arrival_combos(model.stochastics.arrivals, 4096);
  std::vector<SelectionCombo> selection_combos;
  if (rule == PolicyKind::kRandom)
    selection_combos = random_selection_combos(model.topology, 4096);

  Rng no_draws(0);  // deterministic rules never consume randomness
  BackupScratch scratch;
  scratch.init(model.topology, n_actions);
  SystemState state;
  space.decode(0, state);  // sizes the buffers

  for (int t = cfg.horizon - 1; t >= 0; --t) {
    const Eigen::Map<const Eigen::MatrixXd> value_matrix(
        table.values.col(t + 1).data(), nc, nq);
    const Eigen::MatrixXd w =
        contract_channels(model, space, value_matrix).transpose();  // nq x nc

    for (std::int64_t cidx = 0; cidx < nc; ++cidx) {
      decode_channel_digits(space, cidx, state.station_channels,
                            state.sensor_channels);
      fill_channel_scratch(model, state, scratch);
      const double* wcol = w.col(cidx).data();

      for (std::int64_t qidx = 0; qidx < nq; ++qidx) {
        decode_queue_digits(space, qidx, state.queues);
        const std::int64_t i = qidx * nc + cidx;

        double value = 0.0;
        scratch.action_score.setZero();
        auto backup_one_selection = [&](const Eigen::VectorXi& selection,
                                        double prob) {
          double best = -std::numeric_limits<double>::infinity();
          for (int a = 0; a < n_actions; ++a) {
            const double reward =
                apply_action(model, cfg.weights, actions, a, state.queues,
                             selection, scratch);
            double continuation = 0.0;
            for (const ArrivalCombo& combo : arrival_combos)
              continuation +=
                  combo.prob *
                  wcol[next_queue_index(space, state.queues, combo.arrivals,
                                        scratch.departures)];
            const double score = reward + cfg.discount * continuation;
            scratch.action_score(a) += prob * score;
            if (score > best) best = score;
          }
          value += prob * best;
        };

        if (rule == PolicyKind::kRandom) {
          for (const SelectionCombo& combo : selection_combos)
            backup_one_selection(combo.selection, combo.prob);
        } else {
          fill_deterministic_selection(rule, model.topology, state.queues,
                                       scratch.rates, no_draws,
                                       scratch.selection);
          backup_one_selection(scratch.selection, 1.0);
        }

        table.values(i, t) = value;
        int best_a = 0;
        for (int a = 1; a < n_actions; ++a)
          if (scratch.action_score(a) > scratch.action_score(best_a))
            best_a = a;
        table.best_action(i, t) = best_a;
      }
    }
  }
  return table;
}

ValueTable approx_value_iteration(const SystemModel& model,
                                  const MdpConfig& cfg,
                                  const StateSpace& space,
                                  const TransmissionSetMatrix& actions,
                                  PolicyKind rule, std::uint64_t seed) {
  validate_backup_inputs(model, cfg, space, actions);
  if (cfg.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const std::int64_t n = space.size();
  const std::int64_t nc = space.n_channel_combos;
  const int n_actions = static_cast<int>(actions.cols());
  const int n_queues = space.n_queues;

  ValueTable table;
  table.horizon = cfg.horizon;
  table.values = Eigen::MatrixXd::Zero(n, cfg.horizon + 1);
  table.best_action = Eigen::MatrixXi::Zero(n, cfg.horizon);

  std::vector<SelectionCombo> selection_combos;
  if (rule == PolicyKind::kRandom)
    selection_combos = random_selection_combos(model.topology, 4096);

  Rng no_draws(0);
  BackupScratch scratch;
  scratch.init(model.topology, n_actions);
  SystemState state;

  // One bucket per distinct arrival pattern; the batch sizes are fixed per
  // queue, so the pattern is the set of queues that received anything.
  struct Bucket {
    Eigen::VectorXi arrivals;
    std::vector<std::int64_t> next_channel;
  };
  std::vector<Bucket> buckets;
  std::map<std::uint64_t, int> bucket_of;
  const bool patterns_fit = n_queues <= 63;

  Eigen::VectorXi arrivals, station_next, sensor_next;

  for (int t = cfg.horizon - 1; t >= 0; --t) {
    const double* vnext = table.values.col(t + 1).data();
    for (std::int64_t i = 0; i < n; ++i) {
      space.decode(i, state);
      fill_channel_scratch(model, state, scratch);
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t),
                          static_cast<std::uint64_t>(i)));

      buckets.clear();
      bucket_of.clear();
      for (int s = 0; s < cfg.n_samples; ++s) {
        sample_exogenous(model, state, rng, rng, arrivals, station_next,
                         sensor_next);
        const std::int64_t next_cidx =
            space.channel_index(station_next, sensor_next);
        int slot;
        if (patterns_fit) {
          std::uint64_t key = 0;
          for (int j = 0; j < n_queues; ++j)
            if (arrivals(j) > 0) key |= std::uint64_t{1} << j;
          auto [it, inserted] =
              bucket_of.try_emplace(key, static_cast<int>(buckets.size()));
          if (inserted) buckets.push_back({arrivals, {}});
          slot = it->second;
        } else {
          buckets.push_back({arrivals, {}});
          slot = static_cast<int>(buckets.size()) - 1;
        }
        buckets[slot].next_channel.push_back(next_cidx);
      }

      double value = 0.0;
      scratch.action_score.setZero();
      auto backup_one_selection = [&](const Eigen::VectorXi& selection,
                                      double prob) {
        double best = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < n_actions; ++a) {
          const double reward =
              apply_action(model, cfg.weights, actions, a, state.queues,
                           selection, scratch);
          double continuation = 0.0;
          for (const Bucket& bucket : buckets) {
            const std::int64_t base =
                nc * next_queue_index(space, state.queues, bucket.arrivals,
                                      scratch.departures);
            for (const std::int64_t c : bucket.next_channel)
              continuation += vnext[base + c];
          }
          const double score =
              reward + cfg.discount * continuation / cfg.n_samples;
          scratch.action_score(a) += prob * score;
          if (score > best) best = score;
        }
        value += prob * best;
      };

      if (rule == PolicyKind::kRandom) {
        for (const SelectionCombo& combo : selection_combos)
          backup_one_selection(combo.selection, combo.prob);
      } else {
        fill_deterministic_selection(rule, model.topology, state.queues,
                                     scratch.rates, no_draws,
                                     scratch.selection);
        backup_one_selection(scratch.selection, 1.0);
      }

      table.values(i, t) = value;
      int best_a = 0;
      for (int a = 1; a < n_actions; ++a)
        if (scratch.action_score(a) > scratch.action_score(best_a)) best_a = a;
      table.best_action(i, t) = best_a;
    }
  }
  return table;
}

namespace {

double approx_state_value(const SystemModel& model, const MdpConfig& cfg,
                          const TransmissionSetMatrix& actions,
                          PolicyKind rule, const SystemState& state, int depth,
                          Rng& rng);

double approx_action_value(const SystemModel& model, const MdpConfig& cfg,
                           const TransmissionSetMatrix& actions,
                           PolicyKind rule, const SystemState& state,
                           const Eigen::VectorXi& selection, int action_index,
                           int depth, Rng& rng) {
  const Topology& topo = model.topology;
  const auto& sv = model.stochastics.station_chain.values;
  const auto& ev = model.stochastics.sensor_chain.values;

  double reward = 0.0;
  std::vector<std::pair<int, int>> sent_list;
  for (int ap = 0; ap < topo.n_aps(); ++ap) {
    if (actions(ap, action_index) == 0) continue;
    const int chosen = selection(ap);
    const double rate = sv(state.station_channels(chosen));
    const int sent = transmit_count(state.queues(chosen), rate);
    const int energized =
        model.slot_fill_energy
            ? std::max(0, static_cast<int>(std::floor(rate)))
            : sent;
    double eps = 0.0;
    for (int s : topo.sensors[ap]) eps += ev(state.sensor_channels(s));
    reward += cfg.weights.data_weight * sent +
              cfg.weights.energy_weight * eps * energized;
    if (sent > 0) sent_list.emplace_back(chosen, sent);
  }
  if (depth <= 1 || cfg.discount == 0.0) return reward;

  double sum = 0.0;
  Eigen::VectorXi arrivals, station_next, sensor_next;
  SystemState next;
  for (int s = 0; s < cfg.n_samples; ++s) {
    sample_exogenous(model, state, rng, rng, arrivals, station_next,
                     sensor_next);
    next.queues = state.queues + arrivals;
    for (const auto& [j, count] : sent_list) next.queues(j) -= count;
    if (model.queue_cap)
      next.queues = next.queues.cwiseMin(*model.queue_cap);
    next.station_channels = station_next;
    next.sensor_channels = sensor_next;
    sum += approx_state_value(model, cfg, actions, rule, next, depth - 1, rng);
  }
  return reward + cfg.discount * sum / cfg.n_samples;
}

double approx_state_value(const SystemModel& model, const MdpConfig& cfg,
                          const TransmissionSetMatrix& actions,
                          PolicyKind rule, const SystemState& state, int depth,
                          Rng& rng) {
  if (depth <= 0) return 0.0;
  const Eigen::VectorXi selection = select_stations(rule, model, state, rng);
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < actions.cols(); ++a)
    best = std::max(best, approx_action_value(model, cfg, actions, rule,
                                              state, selection, a, depth,
                                              rng));
  return best;
}

}  // namespace

PlanValue approx_value(const SystemModel& model, const MdpConfig& cfg,
                       const TransmissionSetMatrix& actions, PolicyKind rule,
                       const SystemState& state, int depth, Rng& rng) {
  if (depth < 1) throw std::invalid_argument("lookahead depth must be >= 1");
  if (cfg.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const double nodes =
      std::pow(static_cast<double>(actions.cols()), depth) *
      std::pow(static_cast<double>(cfg.n_samples), depth - 1);
  if (nodes > 5e7)
    throw CapExceededError("lookahead would evaluate about " +
                           std::to_string(nodes) + " nodes");

  PlanValue plan;
  plan.selection = select_stations(rule, model, state, rng);
  plan.value = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < actions.cols(); ++a) {
    const double v = approx_action_value(model, cfg, actions, rule, state,
                                         plan.selection, a, depth, rng);
    if (v > plan.value) {
      plan.value = v;
      plan.action_index = a;
    }
  }
  return plan;
}

Eigen::VectorXd exact_action_values(const SystemModel& model,
                                    const MdpConfig& cfg,
                                    const StateSpace& space,
                                    const TransmissionSetMatrix& actions,
                                    const ValueTable& table, int stage,
                                    const SystemState& state,
                                    const Eigen::VectorXi& selection) {
  if (stage < 0 || stage >= table.horizon)
    throw std::invalid_argument("stage outside the table's horizon");
  const std::int64_t nc = space.n_channel_combos;
  const auto arrival_combos =
      enumerate_arrival_combos(model.stochastics.arrivals, 4096);

  // Joint law of the next channel combo given the current one, built one
  // link at a time (least significant digits appended last).
  Eigen::VectorXd channel_prob = Eigen::VectorXd::Ones(1);
  auto extend = [&channel_prob](const Eigen::MatrixXd& transition, int from) {
    const Eigen::Index k = transition.cols();
    Eigen::VectorXd grown(channel_prob.size() * k);
    for (Eigen::Index i = 0; i < channel_prob.size(); ++i)
      for (Eigen::Index d = 0; d < k; ++d)
        grown(i * k + d) = channel_prob(i) * transition(from, d);
    channel_prob = std::move(grown);
  };
  for (int l = 0; l < space.n_queues; ++l)
    extend(model.stochastics.station_chain.transition,
           state.station_channels(l));
  for (int l = 0; l < space.n_sensor_links; ++l)
    extend(model.stochastics.sensor_chain.transition,
           state.sensor_channels(l));

  const double* vnext = table.values.col(stage + 1).data();
  BackupScratch scratch;
  scratch.init(model.topology, static_cast<int>(actions.cols()));
  fill_channel_scratch(model, state, scratch);

  Eigen::VectorXd out(actions.cols());
  for (int a = 0; a < actions.cols(); ++a) {
    const double reward = apply_action(model, cfg.weights, actions, a,
                                       state.queues, selection, scratch);
    double continuation = 0.0;
    for (const ArrivalCombo& combo : arrival_combos) {
      const std::int64_t base =
          nc * next_queue_index(space, state.queues, combo.arrivals,
                                scratch.departures);
      continuation +=
          combo.prob *
          channel_prob.dot(Eigen::Map<const Eigen::VectorXd>(vnext + base, nc));
    }
    out(a) = reward + cfg.discount * continuation;
  }
  return out;
}

namespace {

ScheduleResult roll_forward(
    const SystemModel& model, const MdpConfig& cfg,
    const TransmissionSetMatrix& actions, const SystemState& start,
    Rng& arrival_rng, Rng& channel_rng,
    const std::function<void(int, const SystemState&, PlanValue&)>& decide) {
  ScheduleResult result;
  result.steps.reserve(cfg.horizon);
  SystemState state = start;
  double discount_pow = 1.0;
  Eigen::VectorXi arrivals, station_next, sensor_next;

  for (int t = 0; t < cfg.horizon; ++t) {
    PlanValue plan;
    decide(t, state, plan);

    sample_exogenous(model, state, arrival_rng, channel_rng, arrivals,
                     station_next, sensor_next);
    ScheduleStep step;
    step.action_index = plan.action_index;
    step.selection = plan.selection;
    step.slot = step_slot(model, state, actions.col(plan.action_index),
                          plan.selection, arrivals);
    step.reward = reward(cfg.weights, step.slot);
    result.total_reward += discount_pow * step.reward;
    discount_pow *= cfg.discount;

    state.queues = step.slot.next_queues;
    state.station_channels = station_next;
    state.sensor_channels = sensor_next;
    result.steps.push_back(std::move(step));
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace

ScheduleResult plan_schedule(const SystemModel& model, const MdpConfig& cfg,
                             const TransmissionSetMatrix& actions,
                             PolicyKind rule, const SystemState& start,
                             Rng& arrival_rng, Rng& channel_rng,
                             Rng& decision_rng) {
  if (cfg.horizon < 0) throw ConfigError("horizon must be >= 0");
  if (cfg.lookahead < 1) throw ConfigError("lookahead must be >= 1");
  return roll_forward(
      model, cfg, actions, start, arrival_rng, channel_rng,
      [&](int t, const SystemState& state, PlanValue& plan) {
        if (actions.cols() == 1) {
          // nothing to choose between; the slot still needs a selection
          plan.action_index = 0;
          plan.selection = select_stations(rule, model, state, decision_rng);
          return;
        }
        const int depth = std::min(cfg.lookahead, cfg.horizon - t);
        plan = approx_value(model, cfg, actions, rule, state, depth,
                            decision_rng);
      });
}

ScheduleResult plan_schedule(const SystemModel& model, const MdpConfig& cfg,
                             const StateSpace& space,
                             const TransmissionSetMatrix& actions,
                             PolicyKind rule, const SystemState& start,
                             const ValueTable& table, Rng& arrival_rng,
                             Rng& channel_rng, Rng& decision_rng) {
  if (table.horizon != cfg.horizon)
    throw std::invalid_argument("table horizon does not match the config");
  return roll_forward(
      model, cfg, actions, start, arrival_rng, channel_rng,
      [&](int t, const SystemState& state, PlanValue& plan) {
        plan.selection = select_stations(rule, model, state, decision_rng);
        const Eigen::VectorXd scores = exact_action_values(
            model, cfg, space, actions, table, t, state, plan.selection);
        plan.action_index = 0;
        for (int a = 1; a < scores.size(); ++a)
          if (scores(a) > scores(plan.action_index)) plan.action_index = a;
        plan.value = scores(plan.action_index);
      });
}

std::optional<double> compute_gap(double exact_value, double approx_value) {
  if (!(exact_value > 0.0)) return std::nullopt;
  return 100.0 * std::abs(approx_value - exact_value) / exact_value;
}

void write_value_table_csv(const ValueTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "stage,state,value,best_action\n";
  char line[128];
  for (int t = 0; t <= table.horizon; ++t)
    for (std::int64_t i = 0; i < table.values.rows(); ++i) {
      const int action = t < table.horizon ? table.best_action(i, t) : -1;
      std::snprintf(line, sizeof(line), "%d,%lld,%.10g,%d\n", t,
                    static_cast<long long>(i), table.values(i, t), action);
      out << line;
    }
  if (!out.flush()) throw IoError("failed writing " + path);
}

}  // namespace wpts
