#include <random>
#include <sstream>

#include "gtest/gtest.h"

#include "ged/importance.hpp"
#include "test_support.hpp"

namespace ged {
namespace {

TEST(DegreeImportance, StarCenter) {
  SocialNetwork net;
  for (NodeId spoke = 2; spoke <= 5; ++spoke) net.add_interaction(1, spoke);
  const auto ni = degree_importance(net);
  EXPECT_EQ(ni.at(1), 4.0);
  for (NodeId spoke = 2; spoke <= 5; ++spoke) EXPECT_EQ(ni.at(spoke), 1.0);
}

TEST(DegreeImportance, IsolatedNodeIsZero) {
  SocialNetwork net;
  net.nodes.insert(7);
  net.add_interaction(1, 2);
  const auto ni = degree_importance(net);
  ASSERT_TRUE(ni.values.count(7));
  EXPECT_EQ(ni.at(7), 0.0);
}

TEST(DegreeImportance, MutualPairAndRepeatedRecords) {
  SocialNetwork net;
  net.add_interaction(1, 2);
  net.add_interaction(1, 2);
  net.add_interaction(2, 1);
  const auto ni = degree_importance(net);
  EXPECT_EQ(ni.at(1), 2.0);
  EXPECT_EQ(ni.at(2), 2.0);
}

TEST(SocialPosition, ZeroEpsilonIsConstant) {
  std::mt19937_64 rng(1);
  const auto net = test::random_out_connected(rng, 20);
  const auto sp = social_position(net, {0.0, 1e-9, 200});
  for (const auto& [x, v] : sp.values) EXPECT_EQ(v, 1.0);
}

TEST(SocialPosition, MutualPairIsFixedAtOne) {
  SocialNetwork net;
  net.add_interaction(1, 2);
  net.add_interaction(2, 1);
  const auto sp = social_position(net, {0.9, 1e-9, 200});
  EXPECT_NEAR(sp.at(1), 1.0, 1e-12);
  EXPECT_NEAR(sp.at(2), 1.0, 1e-12);
}

TEST(SocialPosition, Chain) {
  // frozen from a direct linear solve of the fixed-point equations
  SocialNetwork net;
  net.add_interaction(1, 2);
  net.add_interaction(2, 3);
  const auto sp = social_position(net, {0.9, 1e-9, 200});
  EXPECT_NEAR(sp.at(1), 0.1, 1e-9);
  EXPECT_NEAR(sp.at(2), 0.19, 1e-9);
  EXPECT_NEAR(sp.at(3), 0.271, 1e-9);
}

TEST(SocialPosition, AgreesWithDirectSolve) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    SocialNetwork net = test::random_out_connected(rng, 15);
    // a few dangling nodes too
    net.add_interaction(3, 100 + static_cast<NodeId>(trial));
    const auto sp = social_position(net, {0.85, 1e-12, 2000});
    for (const auto& [x, v] : test::social_position_direct(net, 0.85)) EXPECT_NEAR(sp.at(x), v, 1e-9);
  }
}

TEST(SocialPosition, ConservesMassWhenEveryNodeSends) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto net = test::random_out_connected(rng, 30);
    const SocialPositionOptions opt{0.9, 1e-9, 1000};
    const auto sp = social_position(net, opt);
    double sum = 0.0;
    for (const auto& [x, v] : sp.values) sum += v;
    EXPECT_NEAR(sum, static_cast<double>(net.nodes.size()), 10 * opt.tolerance * static_cast<double>(net.nodes.size()));
  }
}

TEST(SocialPosition, BoundedBelowByOneMinusEpsilon) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    SocialNetwork net = test::random_out_connected(rng, 25);
    net.add_interaction(1, 999);
    const double eps = 0.5 + 0.02 * trial;
    for (const auto& [x, v] : social_position(net, {eps, 1e-10, 5000}).values) EXPECT_GE(v, 1.0 - eps - 1e-12);
  }
}

TEST(SocialPosition, ReportsNonConvergence) {
  std::mt19937_64 rng(6);
  const auto net = test::random_out_connected(rng, 30);
  try {
    social_position(net, {0.9, 1e-12, 2});
    FAIL();
  } catch (const NonConvergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonConvergence);
    EXPECT_GT(e.residual(), 1e-12);
  }
}

TEST(SocialPosition, RejectsEpsilonOutsideUnitInterval) {
  SocialNetwork net;
  net.add_interaction(1, 2);
  EXPECT_THROW(social_position(net, {1.0, 1e-9, 10}), Error);
  EXPECT_THROW(social_position(net, {-0.1, 1e-9, 10}), Error);
}

TEST(Importance, EquivariantUnderRelabeling) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const auto net = test::random_out_connected(rng, 20);
    std::vector<NodeId> ids(net.nodes.begin(), net.nodes.end());
    auto shuffled = ids;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::map<NodeId, NodeId> relabel;
    for (std::size_t i = 0; i < ids.size(); ++i) relabel[ids[i]] = 1000 + shuffled[i];
    SocialNetwork moved;
    for (const auto& [e, w] : net.edges)
      for (std::uint32_t i = 0; i < w; ++i) moved.add_interaction(relabel[e.first], relabel[e.second]);

    const auto deg = degree_importance(net), deg_moved = degree_importance(moved);
    const auto sp = social_position(net, {0.9, 1e-12, 2000}), sp_moved = social_position(moved, {0.9, 1e-12, 2000});
    for (const auto x : ids) {
      EXPECT_EQ(deg.at(x), deg_moved.at(relabel[x]));
      EXPECT_NEAR(sp.at(x), sp_moved.at(relabel[x]), 1e-9);
    }
  }
}

TEST(ImportanceFile, RoundTripsAndValidates) {
  std::vector<ImportanceMap> maps(2);
  maps[0] = {1, {{1, 0.5}, {2, 1.25}}};
  maps[1] = {2, {{3, 0.1}}};
  std::ostringstream out;
  write_importance(out, maps);
  std::istringstream in(out.str());
  EXPECT_EQ(read_importance(in, 2), maps);

  std::istringstream wrong_frame("3,1,0.5\n");
  try {
    read_importance(wrong_frame, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FrameMismatch);
  }
  std::istringstream negative("1,1,-0.5\n");
  EXPECT_THROW(read_importance(negative, 2), Error);
}

}  // namespace
}  // namespace ged
