#include <gtest/gtest.h>

#include "mdl/match.hpp"
#include "mdl/oracle.hpp"
#include "support/generators.hpp"

namespace {

using namespace mdl;
namespace gen = mdl::testing;
using gen::Rng;

TEST(Oracle, CycleBlocksAtFirstMessages) {
  SeqSet set{{1, {make_send(1, 3, "a", {2, 10}), make_send(1, 2, "b", {2, 30})}},
             {2, {make_recv(2, 1, "b", {3, 10}), make_send(2, 3, "c", {3, 30})}},
             {3, {make_recv(3, 2, "c", {4, 10}), make_recv(3, 1, "a", {4, 30})}}};
  auto r = oracle::simulate(set);
  EXPECT_TRUE(r.deadlocked());
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.blocked, (std::vector<MsgRef>{{0, 0}, {1, 0}, {2, 0}}));
  EXPECT_EQ(oracle::format_trace(set, r), "DEADLOCK blocked=[1:2:10, 2:3:10, 3:4:10]\n");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(oracle::status_of(set, r.final_state, i), oracle::HostStatus::blocked);
}

TEST(Oracle, PingPongTrace) {
  SeqSet set{{1, {make_send(1, 2, {}, {1, 1}), make_recv(1, 2, {}, {1, 2})}},
             {2, {make_recv(2, 1, {}, {2, 1}), make_send(2, 1, {}, {2, 2})}}};
  auto r = oracle::simulate(set);
  EXPECT_EQ(r.outcome, oracle::Outcome::terminated);
  ASSERT_EQ(r.trace.size(), 2u);
  EXPECT_EQ(oracle::format_trace(set, r), "fire (1:1:1) <-> (2:2:1)\nfire (2:2:2) <-> (1:1:2)\nTERMINATED\n");
  EXPECT_EQ(oracle::status_of(set, r.final_state, 0), oracle::HostStatus::done);
}

TEST(Oracle, StatusRunning) {
  SeqSet set{{1, {make_send(1, 2)}}, {2, {make_recv(2, 1)}}};
  oracle::ExecState st{{0, 0}};
  EXPECT_EQ(oracle::status_of(set, st, 0), oracle::HostStatus::running);
}

TEST(Oracle, ConditionalProjection) {
  CondSet set{{1, "c1", {1, {make_send(1, 2)}}, {}}, {2, "c2", {2, {make_recv(2, 1)}}, {}}};
  EXPECT_FALSE(oracle::simulate_conditional(set, {{"c1", true}, {"c2", true}}).deadlocked());
  EXPECT_FALSE(oracle::simulate_conditional(set, {{"c1", false}, {"c2", false}}).deadlocked());
  EXPECT_TRUE(oracle::simulate_conditional(set, {{"c1", true}, {"c2", false}}).deadlocked());
  EXPECT_THROW(oracle::simulate_conditional(set, {{"c1", true}}), std::invalid_argument);
}

TEST(Oracle, BudgetExceeded) {
  SeqSet set = gen::empty_set(6);
  for (NodeId h = 1; h <= 6; h += 2)
    for (int k = 0; k < 6; ++k) {
      set[h - 1].messages.push_back(make_send(h, h + 1));
      set[h].messages.push_back(make_recv(h + 1, h));
    }
  EXPECT_THROW(oracle::simulate_all_schedules(set, 50), oracle::BudgetExceeded);
  EXPECT_EQ(oracle::simulate_all_schedules(set).size(), 1u);
}

// Every schedule reaches the same final state, and each greedy trace is a
// valid FIFO execution.
TEST(Oracle, ConfluenceAndTraceValidity) {
  Rng rng(5);
  for (int i = 0; i < 800; ++i) {
    SeqSet set = gen::random_s0_set(rng, 4, 4);
    auto r = oracle::simulate(set);
    auto all = oracle::simulate_all_schedules(set);
    ASSERT_EQ(all.size(), 1u);
    EXPECT_EQ(all.begin()->first, r.outcome);
    EXPECT_EQ(all.begin()->second, r.final_state);
    EXPECT_EQ(r.deadlocked(), gen::reference_deadlocks(set));

    auto m = match_pairs(set);
    std::vector<std::size_t> cur(set.size(), 0);
    for (const auto& f : r.trace) {
      EXPECT_EQ(f.send.index, cur[f.send.seq]++);
      EXPECT_EQ(f.recv.index, cur[f.recv.seq]++);
      EXPECT_EQ(m.partner[f.send.seq][f.send.index], f.recv);
    }
    EXPECT_EQ(cur, r.final_state.cursor);
  }
}

}  // namespace
