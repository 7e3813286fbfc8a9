#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <limits>

#include "fd_gradient.hpp"
#include "grad_instances.hpp"
#include "sentishape/error.hpp"
#include "sentishape/qnetwork.hpp"

using namespace sshape;

namespace {

const NetworkShape kSmall{12, 5, 7, 6, 4};

}  // namespace

TEST(EncodeState, ZeroParamsGiveZeroState) {
  const auto p = QParams::zeros(kSmall);
  EXPECT_TRUE(encode_state(p, std::vector<int>{2, 3, 4}).isZero(0.0));
  EXPECT_TRUE(q_values_for(p, std::vector<int>{5}).isZero(0.0));
}

TEST(EncodeState, ShapeIndependentOfLength) {
  const auto p = QParams::random({20, 8, 64, 16, 5}, 1);
  for (std::size_t len : {1u, 3u, 40u}) {
    EXPECT_EQ(encode_state(p, std::vector<int>(len, 7)).size(), 64);
  }
  EXPECT_EQ(q_values_for(p, std::vector<int>{1, 2}).size(), 5);
}

TEST(EncodeState, MeanPoolsTheStepOutputs) {
  // the mean over a prefix-extended sequence relates to the shorter means:
  // n*mean_n - (n-1)*mean_{n-1} is the n-th output, which for n=1 is the mean itself
  const auto p = QParams::random(kSmall, 2, 0.5);
  const std::vector<int> seq{3, 8, 1, 5};
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(kSmall.hidden_dim);
  for (std::size_t n = 1; n <= seq.size(); ++n) {
    const Eigen::VectorXd mean = encode_state(p, std::span<const int>(seq.data(), n));
    const Eigen::VectorXd h_n = static_cast<double>(n) * mean - static_cast<double>(n - 1) * prev;
    // LSTM outputs are o * tanh(c), so strictly inside (-1, 1)
    EXPECT_LT(h_n.cwiseAbs().maxCoeff(), 1.0);
    prev = mean;
  }
}

TEST(EncodeState, OrderMatters) {
  const auto p = QParams::random(kSmall, 3, 0.5);
  EXPECT_FALSE(encode_state(p, std::vector<int>{2, 3, 4}).isApprox(encode_state(p, std::vector<int>{4, 3, 2})));
}

TEST(EncodeState, RejectsBadInput) {
  const auto p = QParams::random(kSmall, 4);
  EXPECT_THROW(encode_state(p, std::vector<int>{}), UsageError);
  EXPECT_THROW(encode_state(p, std::vector<int>{12}), UsageError);
  EXPECT_THROW(encode_state(p, std::vector<int>{-1}), UsageError);
  EXPECT_THROW(q_values(p, Eigen::VectorXd::Zero(3)), UsageError);
}

TEST(QValues, OutputBiasShiftsEveryAction) {
  auto p = QParams::random(kSmall, 5, 0.5);
  const std::vector<int> seq{2, 9};
  const Eigen::VectorXd q0 = q_values_for(p, seq);
  p.b_out.array() += 3.25;
  const Eigen::VectorXd q1 = q_values_for(p, seq);
  EXPECT_TRUE((q1 - q0).isApproxToConstant(3.25, 1e-12));
  EXPECT_EQ(argmax_lowest(q0), argmax_lowest(q1));
}

TEST(TdTarget, Examples) {
  EXPECT_DOUBLE_EQ(td_target(1, false, 0.9, 2), 2.8);
  EXPECT_DOUBLE_EQ(td_target(1, true, 0.9, 2), 1.0);
  EXPECT_DOUBLE_EQ(td_target(0.5, false, 0, 7), 0.5);
  EXPECT_EQ(td_target(0.25, true, 0.9, std::numeric_limits<double>::quiet_NaN()), 0.25);
  EXPECT_EQ(td_target(0.25, true, 0.9, 1e300), 0.25);
}

TEST(SelectAction, GreedyWithLowestIndexTies) {
  Rng rng(1);
  EXPECT_EQ(select_action(Eigen::Vector3d(1, 3, 2), 0.0, rng), 1);
  EXPECT_EQ(select_action(Eigen::Vector3d(2, 2, 1), 0.0, rng), 0);
  EXPECT_EQ(select_action(Eigen::Vector3d(2, 2, 1).array() + 100.0, 0.0, rng), 0);
}

TEST(SelectAction, UniformAtEpsilonOne) {
  Rng rng(2);
  std::array<int, 4> counts{};
  constexpr int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(select_action(Eigen::Vector4d(0, 9, 0, 0), 1.0, rng))];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.25, 0.01);
}

TEST(Gradient, MatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = oracle::make_grad_instance(seed);
    const auto r = oracle::check_gradient(g.params, g.target, g.batch, 0.9);
    EXPECT_EQ(r.checked, g.params.parameter_count());
    EXPECT_LT(r.max_rel_error, 1e-4) << "seed " << seed;
  }
}

TEST(Gradient, MatchesFiniteDifferencesOnLongerSequences) {
  const auto g = oracle::make_grad_instance(99, 3, 12);
  EXPECT_LT(oracle::check_gradient(g.params, g.target, g.batch, 0.5).max_rel_error, 1e-4);
}

TEST(Gradient, BatchOrderDoesNotMatter) {
  const auto g = oracle::make_grad_instance(7);
  auto reversed = g.batch;
  std::reverse(reversed.begin(), reversed.end());
  const auto a = loss_and_gradient(g.params, g.target, g.batch, 0.9);
  const auto b = loss_and_gradient(g.params, g.target, reversed, 0.9);
  EXPECT_NEAR(a.loss, b.loss, 1e-14);
  EXPECT_TRUE(a.gradient.w_recurrent.isApprox(b.gradient.w_recurrent, 1e-12));
}

TEST(TrainStep, OverfitsOneBatch) {
  const NetworkShape shape{10, 8, 16, 16, 3};
  auto g = oracle::make_grad_instance(3, 6, 5);
  g.target = QParams::random(shape, 77, 0.5);
  QParams p = QParams::random(shape, 4, 0.5);
  const double initial = td_loss(p, g.target, g.batch, 0.9);
  double prev = initial;
  int decreases = 0;
  for (int i = 0; i < 200; ++i) {
    auto r = train_step(p, g.target, g.batch, 0.9, 0.1);
    p = std::move(r.params);
    const double now = td_loss(p, g.target, g.batch, 0.9);
    decreases += now < prev;
    prev = now;
  }
  EXPECT_GE(decreases, 190);
  EXPECT_LT(prev, 0.01 * initial);
}

TEST(TrainStep, ZeroLearningRateIsANoOp) {
  const auto g = oracle::make_grad_instance(4);
  const auto r1 = train_step(g.params, g.target, g.batch, 0.9, 0.0);
  const auto r2 = train_step(r1.params, g.target, g.batch, 0.9, 0.0);
  EXPECT_EQ(r1.params, g.params);
  EXPECT_EQ(r1.loss, r2.loss);
}

TEST(TrainStep, NonFiniteLossIsANumericalError) {
  auto g = oracle::make_grad_instance(5);
  g.batch[0].reward = std::numeric_limits<double>::infinity();
  EXPECT_THROW(train_step(g.params, g.target, g.batch, 0.9, 0.1), NumericalError);
  g = oracle::make_grad_instance(5);
  g.params.w_out(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(train_step(g.params, g.target, g.batch, 0.9, 0.1), NumericalError);
}

TEST(Params, RandomInitIsBoundedAndSeeded) {
  const auto a = QParams::random(kSmall, 8), b = QParams::random(kSmall, 8);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, QParams::random(kSmall, 9));
  a.for_each_group([](const char*, const auto& m) { EXPECT_LE(m.cwiseAbs().maxCoeff(), 0.08); });
  EXPECT_EQ(a.shape(), kSmall);
  EXPECT_TRUE(a.all_finite());
}

TEST(Params, CheckpointRoundTrip) {
  const auto p = QParams::random(kSmall, 10, 0.3);
  EXPECT_EQ(params_from_json(params_to_json(p)), p);
  const auto path = std::filesystem::temp_directory_path() / "sshape_params.json";
  save_params(path, p);
  EXPECT_EQ(load_params(path), p);
  std::filesystem::remove(path);
  EXPECT_THROW(params_from_json("{\"version\":2}"), FormatError);
}
