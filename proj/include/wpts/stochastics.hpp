#pragma once

#include <Eigen/Dense>

#include "wpts/random.hpp"

namespace wpts {

/// Finite-state Markov chain driving one kind of link. State values carry the
/// link semantics: packets/slot for AP->station links, microjoules per
/// transmitted packet for AP->sensor links. The definition is immutable; the
/// per-link state index lives in SystemState.
struct ChannelChain {
  Eigen::VectorXd values;
  Eigen::MatrixXd transition;  // row-stochastic

  int n_states() const { return static_cast<int>(values.size()); }
};

/// Chain with the given transition matrix. Validates shape, non-negative
/// values, and row sums within 1e-9 of one.
ChannelChain make_chain(Eigen::VectorXd values, Eigen::MatrixXd transition);

/// Chain where every state moves to every state with equal probability.
ChannelChain make_uniform_chain(const Eigen::VectorXd& values);

/// Samples the successor of `state` from its transition row.
int step_channel(const ChannelChain& chain, int state, Rng& rng);

/// Bernoulli batch arrivals, one component per queue (global station order):
/// queue j receives batch(j) packets with probability prob(j), else none.
/// Mean rate per queue is prob(j) * batch(j).
struct ArrivalProcess {
  Eigen::VectorXd prob;
  Eigen::VectorXi batch;

  int n_queues() const { return static_cast<int>(prob.size()); }
};

ArrivalProcess make_bernoulli_arrivals(int n_queues, double prob, int batch = 1);
ArrivalProcess make_bernoulli_arrivals(Eigen::VectorXd prob, Eigen::VectorXi batch);

/// One independent draw per queue.
Eigen::VectorXi sample_arrivals(const ArrivalProcess& proc, Rng& rng);

/// The random processes of one system: a chain profile per link kind plus the
/// arrival process. Station links all follow station_chain, sensor links all
/// follow sensor_chain; each link keeps its own state index.
struct StochasticModel {
  ChannelChain station_chain;
  ChannelChain sensor_chain;
  ArrivalProcess arrivals;
};

}  // namespace wpts
