#include "wpts/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>

#include "wpts/errors.hpp"

namespace wpts {

Topology resolve_topology(const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.topology) return *cfg.topology;
  Rng rng(derive_seed(seed, kTopologyStream));
  return build_random_topology(cfg.n_aps, cfg.edge_prob, cfg.max_stations,
                               cfg.max_sensors, rng);
}

TransmissionSetMatrix enumerate_actions(const ExperimentConfig& cfg,
                                        const ConflictGraph& graph) {
  return cfg.set_enumerator == SetEnumerator::kExhaustive
             ? enumerate_all_maximal_sets(graph)
             : enumerate_transmission_sets(graph);
}

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double population_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double sum = 0.0;
  for (double x : xs) sum += (x - m) * (x - m);
  return std::sqrt(sum / static_cast<double>(xs.size()));
}

void append_number(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  out += buf;
}

}  // namespace

RunMetrics run_simulation(const ExperimentConfig& cfg, PolicyKind policy,
                          std::uint64_t seed) {
  const Topology topology = resolve_topology(cfg, seed);
  const SystemModel model = make_model(cfg, topology);
  const TransmissionSetMatrix actions = enumerate_actions(cfg, topology.graph);

  Rng channel_rng(derive_seed(seed, kChannelStream));
  Rng arrival_rng(derive_seed(seed, kArrivalStream));
  Rng decision_rng(derive_seed(seed, kDecisionStream));

  const SystemState start = initial_state(model, channel_rng);
  const ScheduleResult rollout =
      plan_schedule(model, cfg.mdp, actions, policy, start, arrival_rng,
                    channel_rng, decision_rng);

  RunMetrics metrics;
  metrics.slots = static_cast<int>(rollout.steps.size());
  metrics.sensor_energy_uj = Eigen::VectorXd::Zero(topology.n_sensors());
  double backlog_sum = 0.0;
  for (const ScheduleStep& step : rollout.steps) {
    backlog_sum += static_cast<double>(step.slot.next_queues.sum()) /
                   static_cast<double>(topology.n_aps());
    metrics.total_energy_uj += step.slot.energy_uj;
    metrics.sensor_energy_uj += step.slot.sensor_energy_uj;
    metrics.total_sent += step.slot.total_sent;
    metrics.dropped += step.slot.dropped;
  }
  if (metrics.slots > 0)
    metrics.mean_queue = backlog_sum / static_cast<double>(metrics.slots);
  return metrics;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "arrival") return SweepAxis::kArrival;
  if (name == "interference") return SweepAxis::kInterference;
  throw ConfigError("unknown sweep axis \"" + name +
                    "\" (expected arrival or interference)");
}

std::string axis_name(SweepAxis axis) {
  return axis == SweepAxis::kArrival ? "arrival" : "interference";
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                std::uint64_t base_seed) {
  const std::vector<double>& values = axis == SweepAxis::kArrival
                                          ? cfg.arrival_sweep
                                          : cfg.interference_sweep;
  if (axis == SweepAxis::kInterference && cfg.topology)
    throw ConfigError(
        "the interference sweep regenerates the topology per edge "
        "probability and cannot run with a fixed topology");

  auto sweep_point = [&cfg, axis, base_seed,
                      &values](int axis_idx) -> std::vector<SweepRow> {
    ExperimentConfig point = cfg;
    const double value = values[axis_idx];
    if (axis == SweepAxis::kArrival)
      point.arrivals.prob = {value};
    else
      point.edge_prob = value;

    std::vector<SweepRow> rows;
    for (PolicyKind policy : cfg.policies) {
      std::vector<double> queues, energies;
      for (int r = 0; r < cfg.runs; ++r) {
        const std::uint64_t run_seed =
            derive_seed(base_seed, static_cast<std::uint64_t>(axis_idx),
                        static_cast<std::uint64_t>(r));
        const RunMetrics m = run_simulation(point, policy, run_seed);
        queues.push_back(m.mean_queue);
        energies.push_back(m.total_energy_uj);
      }
      rows.push_back({axis, value, policy, mean_of(queues),
                      population_stddev(queues), mean_of(energies),
                      population_stddev(energies), cfg.runs});
    }
    return rows;
  };

  std::vector<std::future<std::vector<SweepRow>>> futures;
  futures.reserve(values.size());
  for (int i = 0; i < static_cast<int>(values.size()); ++i)
    futures.push_back(std::async(std::launch::async, sweep_point, i));
  std::vector<SweepRow> rows;
  for (auto& f : futures)
    for (SweepRow& row : f.get()) rows.push_back(row);
  return rows;
}

std::vector<GapRow> run_gap_study(const ExperimentConfig& cfg,
                                  std::uint64_t base_seed,
                                  std::vector<GapDetail>* detail) {
  const Topology topology = resolve_topology(cfg, base_seed);
  const SystemModel model = make_model(cfg, topology);
  const TransmissionSetMatrix actions = enumerate_actions(cfg, topology.graph);
  const StateSpace space = make_state_space(model);
  // Zero queues occupy the lowest queue index, so the start distribution is
  // uniform over the first block of channel combos.
  const std::int64_t start_block = space.n_channel_combos;

  std::vector<GapRow> rows;
  for (int horizon : cfg.gap_horizons) {
    if (horizon < 0) throw ConfigError("gap horizons must be >= 0");
    for (PolicyKind policy : cfg.policies) {
      MdpConfig mdp = cfg.mdp;
      mdp.horizon = horizon;
      const ValueTable exact =
          exact_value_iteration(model, mdp, space, actions, policy);
      const double exact_value = exact.values.col(0).head(start_block).mean();

      std::vector<std::future<double>> futures;
      futures.reserve(cfg.gap_seeds);
      for (int s = 0; s < cfg.gap_seeds; ++s) {
        const std::uint64_t avi_seed =
            derive_seed(base_seed, kGapStream, static_cast<std::uint64_t>(s));
        futures.push_back(std::async(std::launch::async, [&, avi_seed] {
          const ValueTable approx = approx_value_iteration(
              model, mdp, space, actions, policy, avi_seed);
          return approx.values.col(0).head(start_block).mean();
        }));
      }

      std::vector<double> seed_values, seed_gaps;
      for (auto& f : futures) {
        const double v = f.get();
        seed_values.push_back(v);
        if (const auto gap = compute_gap(exact_value, v))
          seed_gaps.push_back(*gap);
      }
      const double gap_pct = seed_gaps.empty()
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : mean_of(seed_gaps);
      rows.push_back({horizon, policy, exact_value, mean_of(seed_values),
                      gap_pct, cfg.gap_seeds});
      if (detail)
        detail->push_back(
            {horizon, policy, exact_value, seed_values, seed_gaps});
    }
  }
  return rows;
}

std::string run_csv(
    const std::vector<std::pair<PolicyKind, RunMetrics>>& rows) {
  std::string out = "policy,mean_queue,energy_uJ,sent,dropped,slots\n";
  for (const auto& [policy, m] : rows) {
    out += policy_name(policy);
    out += ',';
    append_number(out, m.mean_queue);
    out += ',';
    append_number(out, m.total_energy_uj);
    out += ',';
    out += std::to_string(m.total_sent);
    out += ',';
    out += std::to_string(m.dropped);
    out += ',';
    out += std::to_string(m.slots);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "axis,axis_value,policy,mean_queue,std_queue,mean_energy_uJ,"
      "std_energy_uJ,runs\n";
  for (const SweepRow& row : rows) {
    out += axis_name(row.axis);
    out += ',';
    append_number(out, row.axis_value);
    out += ',';
    out += policy_name(row.policy);
    out += ',';
    append_number(out, row.mean_queue);
    out += ',';
    append_number(out, row.std_queue);
    out += ',';
    append_number(out, row.mean_energy_uj);
    out += ',';
    append_number(out, row.std_energy_uj);
    out += ',';
    out += std::to_string(row.runs);
    out += '\n';
  }
  return out;
}

std::string gap_csv(const std::vector<GapRow>& rows) {
  std::string out = "horizon,policy,exact_value,approx_value,gap_pct,seeds\n";
  for (const GapRow& row : rows) {
    out += std::to_string(row.horizon);
    out += ',';
    out += policy_name(row.policy);
    out += ',';
    append_number(out, row.exact_value);
    out += ',';
    append_number(out, row.approx_value);
    out += ',';
    append_number(out, row.gap_pct);
    out += ',';
    out += std::to_string(row.seeds);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out.flush()) throw IoError("failed writing " + path);
}

ExperimentConfig quick_profile() {
  ExperimentConfig cfg;
  cfg.n_aps = 4;
  cfg.edge_prob = 0.5;
  cfg.max_stations = 3;
  cfg.max_sensors = 2;
  cfg.channels.station_values = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0);
  cfg.channels.sensor_values = Eigen::VectorXd::LinSpaced(10, 10.0, 100.0);
  cfg.arrivals.prob = {0.5};
  cfg.arrivals.batch = {1};
  cfg.mdp.horizon = 2000;
  cfg.mdp.discount = 1.0;
  cfg.mdp.n_samples = 100;
  cfg.mdp.lookahead = 1;
  cfg.mdp.weights = {1.0, 0.01};
  cfg.runs = 5;
  cfg.policies = {PolicyKind::kMaxWeight, PolicyKind::kMaxQueue,
                  PolicyKind::kMaxCsi, PolicyKind::kRandom};
  cfg.arrival_sweep = {0.2, 0.5, 0.8};
  cfg.interference_sweep = {0.2, 0.5, 0.9};
  return cfg;
}

Topology small_scenario_topology() {
  return make_topology(make_conflict_graph(2, {{0, 1}}), {{0, 1}, {2, 3}},
                       {{0}, {1}});
}

ExperimentConfig small_scenario_config() {
  ExperimentConfig cfg;
  cfg.topology = small_scenario_topology();
  cfg.channels.station_values = Eigen::VectorXd::LinSpaced(2, 1.0, 2.0);
  cfg.channels.sensor_values = Eigen::VectorXd::LinSpaced(2, 50.0, 100.0);
  cfg.arrivals.prob = {0.5};
  cfg.arrivals.batch = {1, 2, 1, 2};
  cfg.queue_cap = 2;
  cfg.mdp.horizon = 6;
  cfg.mdp.discount = 1.0;
  cfg.mdp.n_samples = 1000;
  cfg.mdp.lookahead = 1;
  cfg.mdp.weights = {1.0, 0.01};
  cfg.runs = 5;
  cfg.policies = {PolicyKind::kMaxWeight, PolicyKind::kMaxQueue,
                  PolicyKind::kMaxCsi, PolicyKind::kRandom};
  cfg.gap_horizons = {1, 2, 4, 6};
  cfg.gap_seeds = 10;
  return cfg;
}

}  // namespace wpts
