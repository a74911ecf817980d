#include "wpts/stochastics.hpp"

#include <cmath>
#include <stdexcept>

namespace wpts {

ChannelChain make_chain(Eigen::VectorXd values, Eigen::MatrixXd transition) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("channel chain needs at least one state");
  if (transition.rows() != n || transition.cols() != n)
    throw std::invalid_argument("transition matrix shape must match the value list");
  if ((values.array() < 0.0).any())
    throw std::invalid_argument("channel state values must be non-negative");
  for (int r = 0; r < n; ++r) {
    if ((transition.row(r).array() < 0.0).any())
      throw std::invalid_argument("transition probabilities must be non-negative");
    if (std::abs(transition.row(r).sum() - 1.0) > 1e-9)
      throw std::invalid_argument("transition rows must sum to 1");
  }
  return ChannelChain{std::move(values), std::move(transition)};
}

ChannelChain make_uniform_chain(const Eigen::VectorXd& values) {
  const int n = static_cast<int>(values.size());
  if (n < 1) throw std::invalid_argument("channel chain needs at least one state");
  return make_chain(values, Eigen::MatrixXd::Constant(n, n, 1.0 / n));
}

int step_channel(const ChannelChain& chain, int state, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  const int n = chain.n_states();
  for (int next = 0; next < n; ++next) {
    cumulative += chain.transition(state, next);
    if (u < cumulative) return next;
  }
  return n - 1;  // guards rounding at the top of the CDF
}

ArrivalProcess make_bernoulli_arrivals(int n_queues, double prob, int batch) {
  return make_bernoulli_arrivals(Eigen::VectorXd::Constant(n_queues, prob),
                                 Eigen::VectorXi::Constant(n_queues, batch));
}

ArrivalProcess make_bernoulli_arrivals(Eigen::VectorXd prob,
                                       Eigen::VectorXi batch) {
  if (prob.size() != batch.size())
    throw std::invalid_argument("arrival prob and batch lists must align");
  if ((prob.array() < 0.0).any() || (prob.array() > 1.0).any())
    throw std::invalid_argument("arrival probabilities must lie in [0, 1]");
  if ((batch.array() < 1).any())
    throw std::invalid_argument("arrival batch sizes must be >= 1");
  return ArrivalProcess{std::move(prob), std::move(batch)};
}

Eigen::VectorXi sample_arrivals(const ArrivalProcess& proc, Rng& rng) {
  const int n = proc.n_queues();
  Eigen::VectorXi arrivals(n);
  for (int j = 0; j < n; ++j)
    arrivals(j) = rng.bernoulli(proc.prob(j)) ? proc.batch(j) : 0;
  return arrivals;
}

}  // namespace wpts
