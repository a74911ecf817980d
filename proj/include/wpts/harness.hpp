#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wpts/config_io.hpp"
#include "wpts/mdp.hpp"

namespace wpts {

// Aggregates of one simulated trajectory.
struct RunMetrics {
  double mean_queue = 0.0;  // time average of total backlog / n_aps, post-slot
  double total_energy_uj = 0.0;
  Eigen::VectorXd sensor_energy_uj;  // per sensor, summed over the run
  long long total_sent = 0;
  long long dropped = 0;
  int slots = 0;
};

// The configured fixed topology, or one generated from the seed's topology
// stream.
Topology resolve_topology(const ExperimentConfig& cfg, std::uint64_t seed);

// The action space of `graph` under the configured set enumerator.
TransmissionSetMatrix enumerate_actions(const ExperimentConfig& cfg,
                                        const ConflictGraph& graph);

// One trajectory of cfg.mdp.horizon slots under `policy`, planned with the
// receding-horizon lookahead. The topology comes from the config when fixed
// and from the seed's topology stream otherwise; arrivals, channels, and
// decisions run on separate streams, so trajectories with the same seed
// share every exogenous draw and differ only through the policy.
RunMetrics run_simulation(const ExperimentConfig& cfg, PolicyKind policy,
                          std::uint64_t seed);

enum class SweepAxis { kArrival, kInterference };

// Accepts "arrival" or "interference".
SweepAxis parse_axis(const std::string& name);
std::string axis_name(SweepAxis axis);

struct SweepRow {
  SweepAxis axis = SweepAxis::kArrival;
  double axis_value = 0.0;
  PolicyKind policy = PolicyKind::kMaxWeight;
  double mean_queue = 0.0;
  double std_queue = 0.0;
  double mean_energy_uj = 0.0;
  double std_energy_uj = 0.0;
  int runs = 0;
};

// cfg.runs simulations per (axis value, policy). Run r of every policy
// shares one seed, derived from (base_seed, axis index, r), so the policies
// face identical workloads. The arrival axis overrides the arrival
// probability; the interference axis overrides the conflict edge probability
// and therefore needs a generated topology. Spreads are population standard
// deviations over runs; energy is the per-run harvested total.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg, SweepAxis axis,
                                std::uint64_t base_seed);

struct GapRow {
  int horizon = 0;
  PolicyKind policy = PolicyKind::kMaxWeight;
  double exact_value = 0.0;
  double approx_value = 0.0;  // mean over seeds
  double gap_pct = 0.0;       // mean over seeds
  int seeds = 0;
};

// Per-seed values behind one GapRow, for distribution-level checks.
struct GapDetail {
  int horizon = 0;
  PolicyKind policy = PolicyKind::kMaxWeight;
  double exact_value = 0.0;
  std::vector<double> per_seed_value;
  std::vector<double> per_seed_gap;
};

// For every configured gap horizon and policy: exact value iteration next to
// gap_seeds sampled value iterations, each evaluated at the start
// distribution (zero queues, channel states uniform). Needs bounded queues
// small enough to enumerate.
std::vector<GapRow> run_gap_study(const ExperimentConfig& cfg,
                                  std::uint64_t base_seed,
                                  std::vector<GapDetail>* detail = nullptr);

// CSV layouts are fixed; numbers are formatted with %.6g.
std::string run_csv(const std::vector<std::pair<PolicyKind, RunMetrics>>& rows);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string gap_csv(const std::vector<GapRow>& rows);

// Throws IoError when the file cannot be written.
void write_text_file(const std::string& path, const std::string& text);

// Four generated APs with default chains; smoke-test scale.
ExperimentConfig quick_profile();

// Two conflicting APs, two stations and one sensor each, queues capped at
// two packets: 5184 joint states, small enough for exact value iteration.
Topology small_scenario_topology();
ExperimentConfig small_scenario_config();

}  // namespace wpts
