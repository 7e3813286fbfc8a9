#include <gtest/gtest.h>

#include "sentishape/error.hpp"
#include "sentishape/learner.hpp"

using namespace sshape;

namespace {

const NetworkShape kShape{8, 4, 6, 5, 2};

AgentConfig small_config() {
  AgentConfig c;
  c.batch_size = 4;
  c.target_update = 3;
  c.learning_rate = 0.05;
  return c;
}

ReplayEntry transition(int i) {
  return {{2 + i % 6}, i % 2, i % 5 == 0 ? 1.0 : 0.0, {2 + (i + 1) % 6}, i % 7 == 6};
}

}  // namespace

TEST(EpsilonSchedule, LinearThenFlat) {
  const EpsilonSchedule e;
  EXPECT_DOUBLE_EQ(e.at(0, 1000), 1.0);
  EXPECT_DOUBLE_EQ(e.at(250, 1000), 0.525);
  EXPECT_DOUBLE_EQ(e.at(500, 1000), 0.05);
  EXPECT_DOUBLE_EQ(e.at(999, 1000), 0.05);
  EXPECT_DOUBLE_EQ((EpsilonSchedule{0.8, 0.8, 0.5}.at(123, 1000)), 0.8);
  EXPECT_DOUBLE_EQ((EpsilonSchedule{1.0, 0.1, 0.0}.at(0, 1000)), 0.1);
}

TEST(AgentConfig, DefaultsAndValidation) {
  AgentConfig c;
  EXPECT_EQ(c.gamma, 0.9);
  EXPECT_EQ(c.learning_rate, 1e-3);
  EXPECT_EQ(c.batch_size, 32u);
  EXPECT_EQ(c.replay_capacity, 10000u);
  EXPECT_EQ(c.rho, 0.25);
  EXPECT_EQ(c.embed_dim, 32);
  EXPECT_EQ(c.hidden_dim, 64);
  EXPECT_EQ(c.mlp_dim, 64);
  EXPECT_EQ(c.target_update, 500);
  EXPECT_NO_THROW(c.validate());
  c.gamma = 1.1;
  EXPECT_THROW(c.validate(), ConfigError);
  c.gamma = 0.9;
  c.rho = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.rho = 0.25;
  c.epsilon.start = -0.1;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(EncodeObservation, ClipsAndFallsBack) {
  const auto v = Vocabulary::build({{"a", "b", "c"}}, 1);
  EXPECT_EQ(encode_observation(v, "a b c a b c", 4), (IdSequence{2, 3, 4, 2}));
  EXPECT_EQ(encode_observation(v, "", 4), (IdSequence{Vocabulary::kUnk}));
}

TEST(Learner, TrainsOnlyOnceTheBufferHoldsABatch) {
  Learner l(kShape, small_config(), 1);
  for (int i = 0; i < 3; ++i) EXPECT_FALSE(l.observe(transition(i)));
  EXPECT_TRUE(l.observe(transition(3)));
  EXPECT_EQ(l.train_steps(), 1);
  EXPECT_EQ(l.env_steps(), 4);
}

TEST(Learner, TrainEverySkipsSteps) {
  AgentConfig c = small_config();
  c.train_every = 3;
  Learner l(kShape, c, 1);
  for (int i = 0; i < 12; ++i) l.observe(transition(i));
  // steps 6, 9 and 12 train (step 3 is below the batch size)
  EXPECT_EQ(l.train_steps(), 3);
}

TEST(Learner, TargetIsFrozenBetweenSyncs) {
  Learner l(kShape, small_config(), 2);
  QParams frozen = l.target_params();
  for (int i = 0; i < 40; ++i) {
    l.observe(transition(i));
    if (l.train_steps() > 0 && l.train_steps() % 3 == 0) {
      EXPECT_EQ(l.target_params(), l.params());
      frozen = l.target_params();
    } else {
      EXPECT_EQ(l.target_params(), frozen);
    }
  }
  EXPECT_NE(l.params(), QParams::random(kShape, mix_seed(2, 1)));
}

TEST(Learner, ZeroOutputLayerTiesToTheFirstAction) {
  AgentConfig c = small_config();
  c.zero_output_layer = true;
  Learner l(kShape, c, 3);
  EXPECT_TRUE(l.q(std::vector<int>{2, 3}).isZero(0.0));
  EXPECT_EQ(l.act(std::vector<int>{2, 3}, 0.0), 0);
}

TEST(Learner, PositiveRewardRaisesItsAction) {
  AgentConfig c = small_config();
  c.zero_output_layer = true;
  c.learning_rate = 0.1;
  Learner l(kShape, c, 4);
  const std::vector<int> obs{2, 3};
  for (int i = 0; i < 50; ++i) l.observe({obs, 1, 0.5, obs, true});
  const auto q = l.q(obs);
  EXPECT_GT(q(1), q(0));
  EXPECT_EQ(l.act(obs, 0.0), 1);
}

TEST(Learner, AdamAlsoLearns) {
  AgentConfig c = small_config();
  c.optimizer = Optimizer::Adam;
  c.learning_rate = 0.01;
  Learner l(kShape, c, 5);
  const std::vector<int> obs{4};
  for (int i = 0; i < 200; ++i) l.observe({obs, 0, -1.0, obs, true});
  EXPECT_NEAR(l.q(obs)(0), -1.0, 0.1);
  EXPECT_TRUE(l.params().all_finite());
}

TEST(Learner, SameSeedSameRun) {
  Learner a(kShape, small_config(), 6), b(kShape, small_config(), 6);
  for (int i = 0; i < 30; ++i) {
    a.observe(transition(i));
    b.observe(transition(i));
    EXPECT_EQ(a.act(std::vector<int>{2}, 0.3), b.act(std::vector<int>{2}, 0.3));
  }
  EXPECT_EQ(a.params(), b.params());
}
