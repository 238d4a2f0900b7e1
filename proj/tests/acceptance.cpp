// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "mdl/mdl.hpp"
#include "support/generators.hpp"

namespace {

using namespace mdl;
namespace gen = mdl::testing;
using gen::Rng;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

bool deadlocks(const SeqSet& s) { return detect_deadlock_s0(s).status == Status::deadlock; }

void table_one() {
  const auto t0 = Clock::now();
  SeqSet set{{1, {make_send(1, 3, "a"), make_send(1, 2, "b")}},
             {2, {make_recv(2, 1, "b"), make_send(2, 3, "c")}},
             {3, {make_recv(3, 2, "c"), make_recv(3, 1, "a")}}};
  auto v = detect_deadlock_s0(set);
  const double dt = seconds_since(t0);
  bool ok = v.status == Status::deadlock && v.witness.kind == S0Witness::Kind::cycle &&
            v.witness.messages.size() == 6 && v.graph && v.graph->vertices == 6 && v.graph->program_edges == 3 &&
            v.graph->match_edges == 3 && oracle::simulate(set).deadlocked() && dt < 1.0;
  std::ostringstream d;
  d << "verdict " << to_string(v.status) << ", cycle of " << v.witness.messages.size() << ", graph "
    << (v.graph ? v.graph->vertices : 0) << "v/" << (v.graph ? v.graph->program_edges : 0) << "p/"
    << (v.graph ? v.graph->match_edges : 0) << "m, " << dt << " s";
  report(1, "three-node cycle", ok, d.str());
}

void table_three() {
  const auto t0 = Clock::now();
  CondSet set{{1, "c1", {1, {make_send(1, 2, "a")}}, {}},
              {2, "c2", {2, {make_recv(2, 3, "b"), make_recv(2, 1, "a")}}, {}},
              {3, "c3", {3, {make_send(3, 2, "b")}}, {}}};
  auto v = detect_deadlock_c0(set);
  const double dt = seconds_since(t0);
  bool extremes_safe = true;
  for (const auto& a : v.deadlocking_assignments)
    if (a.at("c1") == a.at("c2") && a.at("c2") == a.at("c3")) extremes_safe = false;
  const IncrementSet& inc = v.increment;
  const bool columns =
      inc.size() == 3 &&
      inc[0].messages == std::vector<Message>{make_send(1, 2, "c1"), make_recv(1, 2, "c2")} &&
      inc[1].messages == std::vector<Message>{make_recv(2, 1, "c1"), make_send(2, 1, "c2"), make_send(2, 3, "c2"),
                                              make_recv(2, 3, "c3")} &&
      inc[2].messages == std::vector<Message>{make_recv(3, 2, "c2"), make_send(3, 2, "c3")};
  bool ok = v.increment_deadlock_free && v.body_verdict.status == Status::no_deadlock &&
            v.deadlocking_assignments.size() == 6 && extremes_safe && columns && dt < 1.0;
  std::ostringstream d;
  d << "increment " << (v.increment_deadlock_free ? "deadlock-free" : "DEADLOCKS") << ", sequent "
    << to_string(v.body_verdict.status) << ", " << v.deadlocking_assignments.size() << "/8 deadlock, handshake "
    << (columns ? "matches" : "differs") << ", " << dt << " s";
  report(2, "conditional handshake", ok, d.str());
}

void period_table() {
  auto loop = [](NodeId h, std::vector<Message> b) { return LoopSeq{h, std::nullopt, {h, std::move(b)}, {}}; };
  LoopSet set{loop(1, {make_send(1, 2), make_send(1, 3)}),
              loop(2, {make_recv(2, 3), make_recv(2, 3), make_recv(2, 1), make_recv(2, 1)}),
              loop(3, {make_recv(3, 1), make_recv(3, 1), make_recv(3, 1), make_send(3, 2), make_send(3, 2),
                       make_send(3, 2)})};
  auto r12 = sequence_ratio(set[0], set[1]);
  auto r23 = sequence_ratio(set[1], set[2]);
  auto t = simplest_period_table(set);
  bool ok = std::holds_alternative<Ratio>(r12) && std::get<Ratio>(r12) == Ratio(2, 1) &&
            std::holds_alternative<Ratio>(r23) && std::get<Ratio>(r23) == Ratio(3, 2) &&
            std::holds_alternative<PeriodTable>(t) &&
            std::get<PeriodTable>(t).periods == std::vector<std::uint64_t>{6, 3, 2};
  std::string got = "none";
  if (auto* p = std::get_if<PeriodTable>(&t))
    got = std::to_string(p->periods[0]) + ":" + std::to_string(p->periods[1]) + ":" + std::to_string(p->periods[2]);
  report(3, "period table", ok, "2:1 and 3:2 give " + got);
}

void exhaustive_s0() {
  const auto t0 = Clock::now();
  std::size_t n = 0, agree = 0, dl = 0;
  gen::for_each_s0_set(3, 2, [&](const SeqSet& s) {
    ++n;
    const bool v = deadlocks(s);
    dl += v ? 1 : 0;
    if (v == oracle::simulate(s).deadlocked() && v == gen::reference_deadlocks(s)) ++agree;
  });
  const double dt = seconds_since(t0);
  std::ostringstream d;
  d << agree << "/" << n << " agree (" << dl << " deadlock), " << dt << " s";
  report(4, "exhaustive three-host sets", n == 9261 && agree == n && dt < 60.0, d.str());
}

void random_s0() {
  Rng rng(20260101);
  std::size_t n = 0, agree = 0, confluent = 0, explored = 0, dl = 0;
  for (; n < 10000; ++n) {
    SeqSet s = gen::random_s0_set(rng, 5, 6);
    const auto r = oracle::simulate(s);
    const bool v = deadlocks(s);
    dl += v ? 1 : 0;
    if (v == r.deadlocked() && v == gen::reference_deadlocks(s)) ++agree;
    if (n % 16 == 0) {
      ++explored;
      auto all = oracle::simulate_all_schedules(s);
      if (all.size() == 1 && all.begin()->first == r.outcome && all.begin()->second == r.final_state) ++confluent;
    }
  }
  std::ostringstream d;
  d << agree << "/" << n << " agree (" << dl << " deadlock), " << confluent << "/" << explored << " confluent";
  report(5, "random plain sets", agree == n && confluent == explored && explored >= 500, d.str());
}

void extensions() {
  Rng rng(20260102);
  std::size_t append = 0, right = 0, left = 0, pass = 0, total = 0;
  auto check = [&](bool ok) {
    ++total;
    if (ok) ++pass;
  };
  while (append < 1000 || right < 1000 || left < 1000) {
    SeqSet a = gen::random_s0_set(rng, 4, 5);
    const std::size_t hosts = a.size();
    const bool base = oracle::simulate(a).deadlocked();
    if (deadlocks(a) != base) {
      check(false);
      continue;
    }
    SeqSet ext = gen::empty_set(hosts);
    if (gen::uniform(rng, 0, 1)) {
      NodeId i = static_cast<NodeId>(gen::uniform(rng, 1, hosts)), j;
      do j = static_cast<NodeId>(gen::uniform(rng, 1, hosts));
      while (j == i);
      ext[i - 1].messages.push_back(make_send(i, j));
      ext[j - 1].messages.push_back(make_recv(j, i));
    } else {
      ext = gen::random_balanced_set(rng, hosts, 3);
      if (oracle::simulate(ext).deadlocked()) continue;
    }
    const SeqSet a_full = concat(a, gen::empty_set(hosts));
    const SeqSet c = concat(a, ext);
    check(deadlocks(c) == base && oracle::simulate(c).deadlocked() == base);
    ++append;
    auto r = subtract_right(c, ext);
    check(r && *r == a_full && deadlocks(*r) == deadlocks(c));
    ++right;
    const SeqSet p = concat(ext, a);
    auto l = subtract_left(p, ext);
    check(l && *l == a_full && deadlocks(*l) == deadlocks(p) && oracle::simulate(p).deadlocked() == base);
    ++left;
  }
  std::ostringstream d;
  d << pass << "/" << total << " pass (append " << append << ", right-subtract " << right << ", left-subtract "
    << left << ")";
  report(6, "extension properties", pass == total && total >= 1000, d.str());
}

void increments() {
  Rng rng(20260103);
  std::size_t n = 0, ok = 0;
  for (; n < 1000; ++n) {
    CondSet s = gen::random_c0_set(rng, 6, 4, 4);
    IncrementSet inc = build_increment(s);
    if (verify_increment_deadlock_free(inc) && !oracle::simulate(inc).deadlocked()) ++ok;
  }
  report(7, "handshake increment", ok == n, std::to_string(ok) + "/" + std::to_string(n) + " deadlock-free");
}

void loops() {
  Rng rng(20260104);
  std::size_t n = 0, agree = 0, dl = 0;
  for (; n < 2000; ++n) {
    LoopSet s = gen::random_l0_set(rng, 5, 4, 6);
    SeqSet full = expand_all(s);
    const bool v = detect_deadlock_l0(s).status == Status::deadlock;
    if (v == deadlocks(full) && v == oracle::simulate(full).deadlocked()) ++agree;
    dl += v ? 1 : 0;
  }
  std::ostringstream d;
  d << agree << "/" << n << " agree (" << dl << " deadlock, " << n - dl << " safe)";
  report(8, "loop unroll equivalence", agree == n, d.str());
}

void determinism() {
  std::size_t files = 0, same = 0;
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(MDL_SAMPLES_DIR))
    if (e.path().extension() == ".mdl") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    report::Options opt;
    opt.format = report::Format::json;
    opt.trace = true;
    const std::string first = report::analyze(ss.str(), p.filename().string(), opt).json.dump(2);
    bool all = true;
    for (int k = 0; k < 5; ++k) all = all && report::analyze(ss.str(), p.filename().string(), opt).json.dump(2) == first;
    ++files;
    if (all) ++same;
  }
  report(9, "deterministic reports", files > 0 && same == files,
         std::to_string(same) + "/" + std::to_string(files) + " fixtures byte-identical over 6 runs");
}

}  // namespace

int main() {
  const std::function<void()> criteria[] = {table_one, table_three, period_table, exhaustive_s0, random_s0,
                                            extensions, increments,  loops,        determinism};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("[FAIL] exception: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
