#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "wpts/stochastics.hpp"

using namespace wpts;

TEST_CASE("chain construction validates values and rows") {
  Eigen::VectorXd values(2);
  values << 1.0, 2.0;
  Eigen::MatrixXd tr(2, 2);
  tr << 0.7, 0.3, 0.4, 0.6;
  const ChannelChain chain = make_chain(values, tr);
  CHECK(chain.n_states() == 2);
  CHECK(chain.values(1) == 2.0);

  CHECK_THROWS_AS(make_chain(Eigen::VectorXd(), tr), std::invalid_argument);
  CHECK_THROWS_AS(make_chain(values, Eigen::MatrixXd::Identity(3, 3)),
                  std::invalid_argument);

  Eigen::VectorXd negative(2);
  negative << -1.0, 2.0;
  CHECK_THROWS_AS(make_chain(negative, tr), std::invalid_argument);

  Eigen::MatrixXd bad_row = tr;
  bad_row(0, 0) = 0.6;  // row sums to 0.9
  CHECK_THROWS_AS(make_chain(values, bad_row), std::invalid_argument);

  Eigen::MatrixXd negative_prob = tr;
  negative_prob(0, 0) = -0.1;
  negative_prob(0, 1) = 1.1;
  CHECK_THROWS_AS(make_chain(values, negative_prob), std::invalid_argument);

  // a row-sum wobble inside the tolerance is accepted
  Eigen::MatrixXd wobble = tr;
  wobble(0, 0) += 5e-10;
  CHECK_NOTHROW(make_chain(values, wobble));
}

TEST_CASE("uniform chain fills equal transition rows") {
  const ChannelChain ten =
      make_uniform_chain(Eigen::VectorXd::LinSpaced(10, 10.0, 100.0));
  CHECK(ten.transition.rows() == 10);
  CHECK((ten.transition.array() == 0.1).all());

  const ChannelChain single =
      make_uniform_chain(Eigen::VectorXd::Constant(1, 5.0));
  CHECK(single.transition(0, 0) == 1.0);

  const ChannelChain pair =
      make_uniform_chain(Eigen::VectorXd::LinSpaced(2, 1.0, 2.0));
  CHECK((pair.transition.array() == 0.5).all());
}

TEST_CASE("deterministic transitions step where they point") {
  Eigen::VectorXd values(2);
  values << 3.0, 7.0;

  Rng rng(5);
  const ChannelChain stay = make_chain(values, Eigen::MatrixXd::Identity(2, 2));
  for (int i = 0; i < 100; ++i) {
    CHECK(step_channel(stay, 0, rng) == 0);
    CHECK(step_channel(stay, 1, rng) == 1);
  }

  Eigen::MatrixXd absorb(2, 2);
  absorb << 0.0, 1.0, 0.0, 1.0;
  const ChannelChain sink = make_chain(values, absorb);
  for (int i = 0; i < 100; ++i) CHECK(step_channel(sink, 0, rng) == 1);
}

TEST_CASE("transition frequencies match the row at 1e5 samples") {
  const double tol = 0.01;
  const int n_samples = 100000;

  const ChannelChain uniform =
      make_uniform_chain(Eigen::VectorXd::LinSpaced(4, 1.0, 4.0));
  Rng rng(2024);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < n_samples; ++i) counts(step_channel(uniform, 2, rng))++;
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(counts(k) / n_samples - 0.25) < tol);

  Eigen::VectorXd values(2);
  values << 1.0, 2.0;
  Eigen::MatrixXd tr(2, 2);
  tr << 0.8, 0.2, 0.3, 0.7;
  const ChannelChain skew = make_chain(values, tr);
  for (int from = 0; from < 2; ++from) {
    int hits = 0;
    Rng local(91 + from);
    for (int i = 0; i < n_samples; ++i)
      hits += step_channel(skew, from, local) == 1;
    CHECK(std::abs(static_cast<double>(hits) / n_samples - tr(from, 1)) < tol);
  }
}

TEST_CASE("empirical law is close already at 1e3 samples") {
  // total variation sanity bound, coarse on purpose
  Eigen::VectorXd values(3);
  values << 1.0, 2.0, 3.0;
  Eigen::MatrixXd tr(3, 3);
  tr << 0.5, 0.25, 0.25, 0.1, 0.6, 0.3, 0.2, 0.2, 0.6;
  const ChannelChain chain = make_chain(values, tr);

  Rng rng(7);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(3);
  const int n = 1000;
  for (int i = 0; i < n; ++i) counts(step_channel(chain, 1, rng))++;
  const double tv =
      0.5 * (counts / n - tr.row(1).transpose()).cwiseAbs().sum();
  CHECK(tv <= 0.05);
}

TEST_CASE("arrival process validation") {
  CHECK_NOTHROW(make_bernoulli_arrivals(3, 0.5, 2));
  CHECK_THROWS_AS(make_bernoulli_arrivals(3, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_bernoulli_arrivals(3, 1.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_bernoulli_arrivals(3, 0.5, 0), std::invalid_argument);

  Eigen::VectorXd prob(2);
  prob << 0.5, 0.25;
  Eigen::VectorXi batch(3);
  batch << 1, 2, 3;
  CHECK_THROWS_AS(make_bernoulli_arrivals(prob, batch),
                  std::invalid_argument);
}

TEST_CASE("arrival draws hit only the configured support") {
  Eigen::VectorXd prob(3);
  prob << 0.0, 1.0, 0.5;
  Eigen::VectorXi batch(3);
  batch << 1, 2, 3;
  const ArrivalProcess proc = make_bernoulli_arrivals(prob, batch);

  Rng rng(13);
  int nonzero = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXi a = sample_arrivals(proc, rng);
    CHECK(a(0) == 0);
    CHECK(a(1) == 2);
    CHECK((a(2) == 0 || a(2) == 3));
    nonzero += a(2) != 0;
  }
  CHECK(std::abs(static_cast<double>(nonzero) / n - 0.5) < 0.01);
}

TEST_CASE("draws are reproducible and streams are decoupled") {
  const ChannelChain chain =
      make_uniform_chain(Eigen::VectorXd::LinSpaced(5, 1.0, 5.0));

  Rng a(derive_seed(42, kChannelStream));
  Rng b(derive_seed(42, kChannelStream));
  std::vector<int> trace_a, trace_b;
  int state_a = 0, state_b = 0;
  for (int i = 0; i < 200; ++i) {
    state_a = step_channel(chain, state_a, a);
    state_b = step_channel(chain, state_b, b);
    trace_a.push_back(state_a);
    trace_b.push_back(state_b);
  }
  CHECK(trace_a == trace_b);

  CHECK(derive_seed(42, kChannelStream) != derive_seed(42, kArrivalStream));
  CHECK(derive_seed(42, kChannelStream) != derive_seed(43, kChannelStream));
  CHECK(derive_seed(42, kArrivalStream, 1) !=
        derive_seed(42, kArrivalStream, 2));
}
