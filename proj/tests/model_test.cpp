#include "decsched/model.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace {

using namespace decsched;

TEST(ParseInstance, DefaultSimulationInstance) {
  const Instance inst = parse_instance(R"({"workload":10,"nodes":[
      {"rate":1,"fwd_delay":1,"bwd_delay":1},
      {"rate":1,"fwd_delay":1,"bwd_delay":1},
      {"rate":1,"fwd_delay":1,"bwd_delay":1}]})");
  EXPECT_EQ(inst.size(), 3u);
  EXPECT_EQ(inst.workload(), 10.0);
  for (NodeId i = 0; i < 3; ++i) {
    EXPECT_EQ(inst.node(i).id, i);
    EXPECT_EQ(inst.node(i).rate, 1.0);
  }
}

TEST(ParseInstance, SingleNodeZeroWork) {
  const Instance inst = parse_instance(R"({"workload":0,"nodes":[{"rate":1,"fwd_delay":0,"bwd_delay":0}]})");
  EXPECT_EQ(inst.size(), 1u);
  EXPECT_EQ(inst.workload(), 0.0);
}

TEST(ParseInstance, AcceptsFloatLiterals) {
  const Instance inst = parse_instance(R"({"workload":2.5e1,"nodes":[{"rate":0.5,"fwd_delay":1.25,"bwd_delay":3}]})");
  EXPECT_EQ(inst.workload(), 25.0);
  EXPECT_EQ(inst.node(0).fwd_delay, 1.25);
}

void expect_error(const std::string& text, const std::string& fragment) {
  try {
    parse_instance(text);
    FAIL() << "expected an error containing '" << fragment << "'";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(ParseInstance, SemanticErrors) {
  expect_error(R"({"workload":5,"nodes":[{"rate":0,"fwd_delay":1,"bwd_delay":1}]})", "rate must be > 0");
  expect_error(R"({"workload":5,"nodes":[{"rate":1,"fwd_delay":1,"bwd_delay":1},{"rate":1,"fwd_delay":-1,"bwd_delay":1}]})",
               "node 1: fwd_delay must be >= 0");
  expect_error(R"({"workload":5,"nodes":[{"rate":1,"fwd_delay":1}]})", "node 0: missing field 'bwd_delay'");
  expect_error(R"({"workload":-1,"nodes":[{"rate":1,"fwd_delay":1,"bwd_delay":1}]})", "workload");
  expect_error(R"({"nodes":[{"rate":1,"fwd_delay":1,"bwd_delay":1}]})", "missing field 'workload'");
  expect_error(R"({"workload":1,"nodes":[]})", "at least one node");
  expect_error(R"({"workload":1,"nodes":[{"id":1,"rate":1,"fwd_delay":1,"bwd_delay":1}]})", "node 0: field 'id'");
  expect_error(R"({"workload":1,"nodes":[{"rate":"fast","fwd_delay":1,"bwd_delay":1}]})", "'rate' must be a number");
}

TEST(ParseInstance, SyntaxError) { expect_error(R"({"workload":1,"nodes":[)", "syntax error"); }

TEST(GenerateInstance, UniformProfileIsConstant) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const Instance inst = generate_instance(3, seed, Profile::kUMUC);
    for (const NodeSpec& n : inst.nodes()) {
      EXPECT_EQ(n.rate, 1.0);
      EXPECT_EQ(n.fwd_delay, 1.0);
      EXPECT_EQ(n.bwd_delay, 1.0);
    }
  }
}

TEST(GenerateInstance, Deterministic) {
  EXPECT_EQ(generate_instance(4, 7, Profile::kDMDC), generate_instance(4, 7, Profile::kDMDC));
  EXPECT_NE(generate_instance(4, 7, Profile::kDMDC), generate_instance(4, 8, Profile::kDMDC));
}

TEST(GenerateInstance, ProfileConstraints) {
  const Instance dmuc = generate_instance(5, 7, Profile::kDMUC);
  for (const NodeSpec& n : dmuc.nodes()) {
    EXPECT_EQ(n.rate, 1.0);
    EXPECT_GE(n.fwd_delay, 0.5);
    EXPECT_LE(n.fwd_delay, 5.0);
    EXPECT_EQ(n.fwd_delay, n.bwd_delay);
  }
  const Instance umdc = generate_instance(5, 7, Profile::kUMDC);
  for (const NodeSpec& n : umdc.nodes()) {
    EXPECT_EQ(n.fwd_delay, 1.0);
    EXPECT_GE(n.rate, 0.5);
    EXPECT_LE(n.rate, 5.0);
  }
}

TEST(GenerateInstance, PrefixStable) {
  const Instance big = generate_instance(8, 3, Profile::kDMDC);
  EXPECT_EQ(generate_instance(5, 3, Profile::kDMDC), big.prefix(5));
}

TEST(GenerateInstance, RejectsZeroNodes) { EXPECT_THROW(generate_instance(0, 1, Profile::kUMUC), InputError); }

TEST(RenderInstance, RoundTripIsBitExact) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 8;
    std::vector<NodeSpec> nodes(n);
    for (NodeId i = 0; i < n; ++i) {
      // arbitrary bit patterns in a sane range, not just short decimals
      nodes[i] = {i, std::ldexp(1.0 + unit_draw(rng), static_cast<int>(rng() % 20) - 10), unit_draw(rng) * 1e3,
                  unit_draw(rng) / 3.0};
    }
    const Instance inst(unit_draw(rng) * 1e6, nodes);
    EXPECT_EQ(parse_instance(render_instance(inst)), inst);
  }
}

TEST(CommPlan, RejectsNonBijectiveOrders) {
  EXPECT_THROW(CommPlan({0, 1, 2}, {0, 1, 1}, {0, 1, 2}), InputError);
  EXPECT_THROW(CommPlan({0, 1, 2}, {0, 1, 2}, {0, 1}), InputError);
  EXPECT_THROW(CommPlan({0, 1, 2}, {0, 1, 3}, {0, 1, 2}), InputError);
  EXPECT_THROW(CommPlan({}, {}, {}), InputError);
  EXPECT_THROW(CommPlan({1, 1}, {1, 1}, {1, 1}), InputError);
}

TEST(CommPlan, Positions) {
  const CommPlan p({0, 2, 5}, {5, 0, 2}, {2, 5, 0});
  EXPECT_EQ(p.fwd_position(5), 0u);
  EXPECT_EQ(p.fwd_position(2), 2u);
  EXPECT_EQ(p.bwd_position(0), 2u);
  EXPECT_THROW(p.fwd_position(1), InputError);
  EXPECT_THROW(p.check_against(generate_instance(5, 1, Profile::kUMUC)), InputError);
}

}  // namespace
