#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "warehouse/mlp.hpp"
#include "warehouse/rng.hpp"

using namespace warehouse;

TEST(Mlp, ParameterCountDefaultShape) {
  EXPECT_EQ(Mlp::parameter_count({64, 64, 64, 4}), 8580u);
  EXPECT_EQ(Mlp({64, 64, 64, 4}, 1).size(), 8580u);
}

TEST(Mlp, SingleLinearLayer) {
  EXPECT_EQ(Mlp({2, 4}, 1).size(), 12u);
  EXPECT_EQ(Mlp({2, 4}, 1).n_layers(), 1u);
}

TEST(Mlp, ParameterCountArbitraryDims) {
  const std::vector<std::vector<std::size_t>> shapes = {{1, 1}, {3, 5, 2}, {7, 1, 9, 4}, {10, 20, 30, 40, 4}};
  for (const auto& d : shapes) {
    std::size_t expected = 0;
    for (std::size_t l = 0; l + 1 < d.size(); ++l) expected += d[l] * d[l + 1] + d[l + 1];
    EXPECT_EQ(Mlp(d, 3).size(), expected);
  }
}

TEST(Mlp, EmptyDimsRejected) {
  EXPECT_THROW(Mlp({}, 1), std::invalid_argument);
  EXPECT_THROW(Mlp({4}, 1), std::invalid_argument);
}

TEST(Mlp, SeededInitIsReproducibleAndBounded) {
  const Mlp a({64, 64, 64, 4}, 42), b({64, 64, 64, 4}, 42), c({64, 64, 64, 4}, 43);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  for (std::size_t l = 0; l < a.n_layers(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(a.dims()[l] + a.dims()[l + 1]));
    for (std::size_t o = 0; o < a.dims()[l + 1]; ++o) {
      EXPECT_EQ(a.bias(l, o), 0.0);
      for (std::size_t i = 0; i < a.dims()[l]; ++i) EXPECT_LE(std::abs(a.weight(l, o, i)), limit);
    }
  }
}

TEST(Mlp, ZeroNetworkOutputsZero) {
  const Mlp net = Mlp::zeros({64, 64, 64, 4});
  const auto q = net.forward(std::vector<double>(64, 0.7));
  EXPECT_EQ(q, std::vector<double>(4, 0.0));
}

TEST(Mlp, LinearLayerPicksWeightColumn) {
  Mlp net = Mlp::zeros({3, 4});
  std::vector<double> p(net.size(), 0.0);
  // weights [out][in]; column 0 holds 1..4
  for (std::size_t o = 0; o < 4; ++o) {
    for (std::size_t i = 0; i < 3; ++i) p[o * 3 + i] = static_cast<double>(10 * i + o + 1);
  }
  net.set_parameters(p);
  EXPECT_EQ(net.forward(std::vector<double>{1.0, 0.0, 0.0}), (std::vector<double>{1, 2, 3, 4}));
}

TEST(Mlp, ForwardRejectsWrongInputSize) {
  const Mlp net({4, 8, 4}, 1);
  EXPECT_THROW(net.forward(std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST(Mlp, ForwardIsPureAndFinite) {
  const Mlp net({64, 64, 64, 4}, 5);
  std::vector<double> x(64);
  for (std::size_t i = 0; i < 64; ++i) x[i] = (i % 3 == 0) ? 0.0 : 1.0;
  const auto before = std::vector<double>(net.parameters().begin(), net.parameters().end());
  const auto q1 = net.forward(x);
  const auto q2 = net.forward(x);
  EXPECT_EQ(q1, q2);
  for (double v : q1) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(std::equal(before.begin(), before.end(), net.parameters().begin()));
}

TEST(Mlp, BackwardAtMinimumIsZero) {
  const Mlp net({4, 8, 4}, 9);
  const std::vector<double> x{0.1, -0.4, 0.8, 0.3};
  ForwardCache cache;
  const auto q = net.forward(x, &cache);
  const auto g = net.backward(cache, Action::Left, q[2]);
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(Mlp, BackwardScalesWithError) {
  const Mlp net({4, 8, 4}, 9);
  const std::vector<double> x{0.1, -0.4, 0.8, 0.3};
  ForwardCache cache;
  const auto q = net.forward(x, &cache);
  const auto g1 = net.backward(cache, Action::Down, q[1] + 0.5);
  const auto g2 = net.backward(cache, Action::Down, q[1] + 1.0);
  const std::size_t b = net.bias_offset(1) + 1;
  EXPECT_NEAR(g2[b], 2.0 * g1[b], 1e-15);
  EXPECT_DOUBLE_EQ(g1[b], -1.0);  // dL/dq = -2 (y - q)
  // other output units get nothing
  for (std::size_t o : {0u, 2u, 3u}) EXPECT_EQ(g1[net.bias_offset(1) + o], 0.0);
}

TEST(Mlp, StaleCacheDetected) {
  Mlp net({4, 8, 4}, 9);
  const std::vector<double> x{0.1, -0.4, 0.8, 0.3};
  ForwardCache cache;
  net.forward(x, &cache);
  AdamState st(net.size());
  adam_step(net, std::vector<double>(net.size(), 1.0), st, 0.01);
  EXPECT_THROW(net.backward(cache, Action::Up, 0.0), StaleCacheError);
  const Mlp other({4, 8, 4}, 9);
  ForwardCache foreign;
  other.forward(x, &foreign);
  EXPECT_THROW(net.backward(foreign, Action::Up, 0.0), StaleCacheError);
}

TEST(FiniteDifference, QuadraticOneParameter) {
  // q = w * x with x = 1.5, loss (y - q)^2, dL/dw = -2 (y - w x) x
  Mlp net = Mlp::zeros({1, 4});
  std::vector<double> p(net.size(), 0.0);
  p[0] = 0.3;
  net.set_parameters(p);
  const std::vector<double> x{1.5};
  const auto fd = finite_difference_gradients(net, x, Action::Up, 2.0, 1e-4);
  EXPECT_NEAR(fd[0], -2.0 * (2.0 - 0.45) * 1.5, 1e-8);
}

TEST(FiniteDifference, RejectsNonPositiveStep) {
  const Mlp net({2, 4}, 1);
  EXPECT_THROW(finite_difference_gradients(net, std::vector<double>{1, 2}, Action::Up, 0.0, 0.0),
               std::invalid_argument);
}

TEST(FiniteDifference, MatchesBackwardOnSeededNets) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Mlp net({4, 8, 4}, seed);
    Rng rng(seed + 1000);
    std::vector<double> x(4);
    for (double& v : x) v = rng.uniform() * 2.0 - 1.0;
    const Action a = action_from_index(seed % 4);
    const double y = rng.uniform() * 4.0 - 2.0;
    ForwardCache cache;
    net.forward(x, &cache);
    const auto analytic = net.backward(cache, a, y);
    const auto numeric = finite_difference_gradients(net, x, a, y, 1e-5);
    EXPECT_LT(gradient_relative_error(analytic, numeric), 1e-4) << "seed " << seed;
  }
}

TEST(Adam, FirstStepOnScalar) {
  std::vector<double> p{0.0};
  AdamState st(1);
  adam_step(p, std::vector<double>{1.0}, st, 0.0025);
  EXPECT_EQ(st.t, 1u);
  EXPECT_NEAR(p[0], -0.0025 / (1.0 + 1e-8), 1e-12);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  std::vector<double> p{0.5, -1.0, 2.0};
  const auto before = p;
  AdamState st(3);
  adam_step(p, std::vector<double>(3, 0.0), st, 0.0025);
  EXPECT_EQ(p, before);
}

TEST(Adam, SecondStepHandComputed) {
  const double lr = 0.0025, b1 = 0.9, b2 = 0.999, eps = 1e-8, g = 0.7;
  std::vector<double> p{1.0};
  AdamState st(1);
  adam_step(p, std::vector<double>{g}, st, lr);
  const double step1 = 1.0 - p[0];
  const double after1 = p[0];
  adam_step(p, std::vector<double>{g}, st, lr);
  const double step2 = after1 - p[0];

  const double m1 = (1 - b1) * g, v1 = (1 - b2) * g * g;
  const double e1 = lr * (m1 / (1 - b1)) / (std::sqrt(v1 / (1 - b2)) + eps);
  const double m2 = b1 * m1 + (1 - b1) * g, v2 = b2 * v1 + (1 - b2) * g * g;
  const double e2 = lr * (m2 / (1 - b1 * b1)) / (std::sqrt(v2 / (1 - b2 * b2)) + eps);
  EXPECT_NEAR(step1, e1, 1e-15);
  EXPECT_NEAR(step2, e2, 1e-15);
  EXPECT_LE(std::abs(step2), std::abs(step1) + 1e-12);
}

TEST(Adam, OneStepReducesLoss) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Mlp net({4, 8, 4}, seed);
    const std::vector<double> x{0.2, 0.9, -0.3, 0.5};
    const double y = 1.0;
    ForwardCache cache;
    net.forward(x, &cache);
    const auto g = net.backward(cache, Action::Right, y);
    bool nonzero = false;
    for (double v : g) nonzero |= v != 0.0;
    if (!nonzero) continue;
    const double before = net.loss(x, Action::Right, y);
    AdamState st(net.size());
    adam_step(net, g, st, 0.0025);
    EXPECT_LT(net.loss(x, Action::Right, y), before) << "seed " << seed;
  }
}

TEST(Mlp, SnapshotRoundTrip) {
  const Mlp net({6, 5, 4}, 77);
  const auto path = std::filesystem::temp_directory_path() / "wh_params_roundtrip.txt";
  net.save(path);
  EXPECT_TRUE(Mlp::load(path) == net);
  std::filesystem::remove(path);
}
