#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "wpts/dynamics.hpp"
#include "wpts/random.hpp"

namespace wpts {

// Station selection rules. Each AP picks which of its stations to serve;
// which APs transmit at all is decided separately.
enum class PolicyKind { kMaxWeight, kMaxQueue, kMaxCsi, kRandom };

// Accepts "maxweight", "maxqueue", "maxcsi", "random".
PolicyKind parse_policy(const std::string& name);
std::string policy_name(PolicyKind kind);

// Picks one station out of `stations` (global ids). Deterministic rules break
// ties towards the lowest station id; the random rule draws uniformly.
int select_station(PolicyKind kind, const std::vector<int>& stations,
                   const Eigen::VectorXi& queues, const Eigen::VectorXd& rates,
                   Rng& rng);

// Selection for every AP at once, in AP order. The random rule consumes one
// draw per AP.
Eigen::VectorXi select_stations(PolicyKind kind, const SystemModel& model,
                                const SystemState& state, Rng& rng);

// Selection restricted to the APs activated by `action`; idle APs are absent
// from the map and consume no randomness.
std::map<int, int> select_all(PolicyKind kind, const SystemModel& model,
                              const SystemState& state,
                              const TransmissionSet& action, Rng& rng);

}  // namespace wpts
