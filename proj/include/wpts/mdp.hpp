#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpts/dynamics.hpp"
#include "wpts/policies.hpp"

namespace wpts {

struct MdpConfig {
  int horizon = 1;      // number of decision slots
  double discount = 1.0;
  int n_samples = 100;  // Monte-Carlo outcomes per sampled backup
  int lookahead = 1;    // receding-horizon planning depth, 1 = myopic
  RewardWeights weights;
};

// Mixed-radix index over the joint (queues, channels) space. Queue digits
// come first (station id 0 most significant), then station link states, then
// sensor link states: index = queue_index * n_channel_combos + channel_index.
// Only defined for bounded queues.
struct StateSpace {
  int n_queues = 0;
  int n_sensor_links = 0;
  int queue_radix = 1;    // queue cap + 1
  int station_radix = 1;  // station chain states
  int sensor_radix = 1;   // sensor chain states
  std::int64_t n_queue_combos = 1;
  std::int64_t n_channel_combos = 1;

  std::int64_t size() const { return n_queue_combos * n_channel_combos; }

  std::int64_t queue_index(const Eigen::VectorXi& queues) const;
  std::int64_t channel_index(const Eigen::VectorXi& station_channels,
                             const Eigen::VectorXi& sensor_channels) const;
  std::int64_t index_of(const SystemState& state) const;

  // Inverse of index_of; `decode` reuses the caller's buffers.
  SystemState state_at(std::int64_t index) const;
  void decode(std::int64_t index, SystemState& state) const;
};

// Throws ConfigError for unbounded queues and CapExceededError when the
// space would exceed `max_states`.
StateSpace make_state_space(const SystemModel& model,
                            std::int64_t max_states = 10'000'000);

std::vector<SystemState> enumerate_state_space(const StateSpace& space);

// Stagewise values over an enumerated space. Column t holds the value of
// every state with t slots already elapsed; column `horizon` is the zero
// terminal. best_action(i, t) is a column index into the action matrix,
// chosen by selection-averaged score when the selection rule is random.
struct ValueTable {
  int horizon = 0;
  Eigen::MatrixXd values;       // size() x (horizon + 1)
  Eigen::MatrixXi best_action;  // size() x horizon
};

// Backward induction with exact expectations. Selections enter before the
// max over transmission sets: a deterministic rule contributes its single
// selection, the random rule averages the max over all per-AP selection
// products. Expectation over next channel states is contracted one link at a
// time; arrivals are expanded combinatorially (capped).
ValueTable exact_value_iteration(const SystemModel& model,
                                 const MdpConfig& cfg, const StateSpace& space,
                                 const TransmissionSetMatrix& actions,
                                 PolicyKind rule);

// Same recursion with the exogenous expectation replaced by n_samples
// Monte-Carlo outcomes per (stage, state), all outcomes shared across
// selections and actions. The per-backup generator is derived from
// (seed, stage, state), so results do not depend on evaluation order.
ValueTable approx_value_iteration(const SystemModel& model,
                                  const MdpConfig& cfg,
                                  const StateSpace& space,
                                  const TransmissionSetMatrix& actions,
                                  PolicyKind rule, std::uint64_t seed);

struct PlanValue {
  double value = 0.0;
  int action_index = -1;
  Eigen::VectorXi selection;
};

// Depth-limited sampled lookahead from one state: pick the selection by the
// rule, score every transmission set by immediate reward plus the discounted
// mean over n_samples sampled continuations, recurse to `depth` slots. Depth
// 1 never samples. The rng drives both sampling and any random selections.
// Throws CapExceededError when the recursion would be unreasonably large.
PlanValue approx_value(const SystemModel& model, const MdpConfig& cfg,
                       const TransmissionSetMatrix& actions, PolicyKind rule,
                       const SystemState& state, int depth, Rng& rng);

// Exact q-values of every transmission set at one state and realized
// selection, against the continuation stored in `table` for the given stage.
Eigen::VectorXd exact_action_values(const SystemModel& model,
                                    const MdpConfig& cfg,
                                    const StateSpace& space,
                                    const TransmissionSetMatrix& actions,
                                    const ValueTable& table, int stage,
                                    const SystemState& state,
                                    const Eigen::VectorXi& selection);

struct ScheduleStep {
  int action_index = -1;
  Eigen::VectorXi selection;
  SlotResult slot;
  double reward = 0.0;  // undiscounted slot reward
};

struct ScheduleResult {
  std::vector<ScheduleStep> steps;
  double total_reward = 0.0;  // discounted sum
  SystemState final_state;
};

// Rolls the system forward for cfg.horizon slots, replanning each slot with
// approx_value at depth min(lookahead, slots left). Exogenous draws come
// from the arrival and channel streams; selections and planner sampling from
// the decision stream.
ScheduleResult plan_schedule(const SystemModel& model, const MdpConfig& cfg,
                             const TransmissionSetMatrix& actions,
                             PolicyKind rule, const SystemState& start,
                             Rng& arrival_rng, Rng& channel_rng,
                             Rng& decision_rng);

// Same roll-forward, but each slot's set maximizes the exact q-values under
// `table` at the realized selection. cfg.horizon must match table.horizon.
ScheduleResult plan_schedule(const SystemModel& model, const MdpConfig& cfg,
                             const StateSpace& space,
                             const TransmissionSetMatrix& actions,
                             PolicyKind rule, const SystemState& start,
                             const ValueTable& table, Rng& arrival_rng,
                             Rng& channel_rng, Rng& decision_rng);

// Relative deviation of an approximate value from the exact one, in percent.
// Empty unless the exact value is positive.
std::optional<double> compute_gap(double exact_value, double approx_value);

// Rows `stage,state,value,best_action` for every stage and state;
// best_action is -1 at the terminal stage. Throws IoError on write failure.
void write_value_table_csv(const ValueTable& table, const std::string& path);

}  // namespace wpts
