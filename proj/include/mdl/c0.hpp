#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdl/match.hpp"
#include "mdl/model.hpp"
#include "mdl/s0.hpp"

namespace mdl {

// Handshake sequences exchanging condition values. Each message's tag holds
// the condition symbol it carries.
using IncrementSet = SeqSet;

inline void check_cond_set(const CondSet& set) {
  std::set<NodeId> seen;
  for (const auto& s : set) {
    if (!seen.insert(s.host).second) throw std::invalid_argument("duplicate host in conditional set");
    if (s.body.host != s.host) throw std::invalid_argument("conditional body host mismatch");
    if (s.body.empty()) throw std::invalid_argument("empty conditional body on node " + std::to_string(s.host));
    if (s.cond.empty()) throw std::invalid_argument("missing condition symbol on node " + std::to_string(s.host));
    check_hosts(s.body);
  }
}

// Directly associated partners (sequence indices) of each body, ascending.
inline std::vector<std::vector<std::size_t>> direct_partners(const SeqSet& body_set) {
  const MatchResult match = match_pairs(body_set);
  std::vector<std::set<std::size_t>> sets(body_set.size());
  for (const auto& p : match.pairs) {
    sets[p.send.seq].insert(p.recv.seq);
    sets[p.recv.seq].insert(p.send.seq);
  }
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : sets) out.emplace_back(s.begin(), s.end());
  return out;
}

// For node j and each directly associated partner k in ascending order:
// send own condition then receive k's when j < k, the reverse otherwise.
inline IncrementSet build_increment(const CondSet& input) {
  CondSet set = input;
  std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) { return a.host < b.host; });
  const auto partners = direct_partners(bodies(set));
  IncrementSet out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    const NodeId self = set[j].host;
    MessageSeq inc{self, {}};
    for (std::size_t k : partners[j]) {
      const NodeId other = set[k].host;
      Message snd = make_send(self, other, set[j].cond, set[j].site);
      Message rcv = make_recv(self, other, set[k].cond, set[j].site);
      if (self < other) {
        inc.messages.push_back(snd);
        inc.messages.push_back(rcv);
      } else {
        inc.messages.push_back(rcv);
        inc.messages.push_back(snd);
      }
    }
    out.push_back(std::move(inc));
  }
  return out;
}

// The handshake can never deadlock; a false result is an internal defect.
inline bool verify_increment_deadlock_free(const IncrementSet& inc) {
  return detect_deadlock_s0(inc).status == Status::no_deadlock;
}

// One node of the replacement program: handshake, the all-equal runtime
// check over the conditions seen in the handshake, then the guarded body.
struct ReplacementNode {
  NodeId host = 0;
  MessageSeq increment;
  std::vector<std::string> check_conditions;  // distinct, ordered by node id
  Site check_site;
  std::string cond;
  MessageSeq body;

  bool has_check() const { return check_conditions.size() > 1; }

  bool check_fires(const CondAssignment& a) const {
    for (const auto& c : check_conditions)
      if (a.at(c) != a.at(check_conditions.front())) return true;
    return false;
  }
};

using Replacement = std::vector<ReplacementNode>;

inline Replacement build_replacement(const CondSet& input) {
  CondSet set = input;
  std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) { return a.host < b.host; });
  const IncrementSet inc = build_increment(set);
  Replacement out;
  for (std::size_t j = 0; j < set.size(); ++j) {
    ReplacementNode r{set[j].host, inc[j], {}, set[j].site, set[j].cond, set[j].body};
    // conditions of this node and its handshake partners, by node id
    std::map<NodeId, std::string> by_host{{set[j].host, set[j].cond}};
    for (const auto& m : inc[j].messages)
      if (m.method == Method::recv) by_host.emplace(m.from, *m.tag);
    for (const auto& [h, c] : by_host)
      if (std::find(r.check_conditions.begin(), r.check_conditions.end(), c) == r.check_conditions.end())
        r.check_conditions.push_back(c);
    out.push_back(std::move(r));
  }
  return out;
}

// `if (c1 != c2) deadlock` or `if (!(c1 = c2 = c3)) deadlock`; empty when the
// check is vacuous.
inline std::string check_expression(const ReplacementNode& r) {
  if (!r.has_check()) return {};
  std::string s;
  if (r.check_conditions.size() == 2) {
    s = "if (" + r.check_conditions[0] + " != " + r.check_conditions[1] + ") deadlock";
  } else {
    s = "if (!(";
    for (std::size_t i = 0; i < r.check_conditions.size(); ++i) s += (i ? " = " : "") + r.check_conditions[i];
    s += ")) deadlock";
  }
  return s;
}

inline std::string render(const ReplacementNode& r) {
  std::string out;
  for (const auto& m : r.increment.messages) out += describe(m) + ";\n";
  if (r.has_check()) out += check_expression(r) + ";\n";
  out += "if (" + r.cond + ") {\n";
  for (const auto& m : r.body.messages) out += "  " + describe(m) + ";\n";
  out += "}\n";
  return out;
}

// Executable form of the replacement under one assignment.
struct ReplacementRun {
  SeqSet program;                 // handshake followed by the active body, per node
  std::vector<NodeId> check_fired;
};

inline ReplacementRun instantiate(const Replacement& rep, const CondAssignment& a) {
  ReplacementRun run;
  for (const auto& r : rep) {
    MessageSeq s = r.increment;
    if (a.at(r.cond)) s.messages.insert(s.messages.end(), r.body.messages.begin(), r.body.messages.end());
    run.program.push_back(std::move(s));
    if (r.check_fires(a)) run.check_fired.push_back(r.host);
  }
  return run;
}

enum class C0Status { conditionally_safe, runtime_check_required, deadlock };

inline const char* to_string(C0Status s) {
  switch (s) {
    case C0Status::deadlock: return "Deadlock";
    case C0Status::runtime_check_required: return "RuntimeCheckRequired";
    default: return "ConditionallySafe";
  }
}

struct CheckSite {
  NodeId host = 0;
  Site site;
  std::vector<std::string> conditions;
};

struct C0Verdict {
  C0Status static_status = C0Status::conditionally_safe;
  S0Verdict body_verdict;
  bool increment_deadlock_free = true;
  IncrementSet increment;
  std::vector<std::string> symbols;
  bool enumerated = false;
  std::vector<CondAssignment> deadlocking_assignments;     // when enumerated
  std::optional<std::uint64_t> deadlocking_count;          // absent past 63 symbols
  std::vector<CheckSite> check_sites;
  std::vector<CondAssignment> characterization_mismatches;  // must stay empty
};

inline constexpr std::uint64_t default_max_assignments = std::uint64_t{1} << 16;

// Assignment number `index` over sorted `symbols`: the first symbol is the
// most significant bit, false before true.
inline CondAssignment assignment_at(const std::vector<std::string>& symbols, std::uint64_t index) {
  CondAssignment a;
  const std::size_t k = symbols.size();
  for (std::size_t i = 0; i < k; ++i) a[symbols[i]] = (index >> (k - 1 - i)) & 1U;
  return a;
}

namespace detail {

struct C0Blocks {
  std::vector<std::vector<std::size_t>> blocks;  // sequence indices
  std::vector<bool> sequent_deadlocks;
};

// Deadlock under `a` iff some association block mixes true and false
// conditions, or is entirely true while its sequent block deadlocks.
inline bool characterized_deadlock(const CondSet& set, const C0Blocks& b, const CondAssignment& a) {
  for (std::size_t k = 0; k < b.blocks.size(); ++k) {
    std::size_t on = 0;
    for (auto i : b.blocks[k]) on += a.at(set[i].cond) ? 1 : 0;
    if (on != 0 && on != b.blocks[k].size()) return true;
    if (on != 0 && b.sequent_deadlocks[k]) return true;
  }
  return false;
}

// Safe assignments: symbols sharing a block must be equal, so each connected
// group of symbols takes one value, and may be true only if every block it
// touches is safe when fully active.
inline std::optional<std::uint64_t> characterized_count(const CondSet& set, const C0Blocks& b,
                                                         const std::vector<std::string>& symbols) {
  if (symbols.size() > 63) return std::nullopt;
  std::map<std::string, std::size_t> sym_index;
  for (std::size_t i = 0; i < symbols.size(); ++i) sym_index[symbols[i]] = i;
  UnionFind uf(symbols.size());
  for (const auto& blk : b.blocks)
    for (auto i : blk) uf.unite(sym_index[set[blk.front()].cond], sym_index[set[i].cond]);
  std::map<std::size_t, bool> true_allowed;
  for (std::size_t s = 0; s < symbols.size(); ++s) true_allowed.emplace(uf.find(s), true);
  for (std::size_t k = 0; k < b.blocks.size(); ++k)
    if (b.sequent_deadlocks[k]) true_allowed[uf.find(sym_index[set[b.blocks[k].front()].cond])] = false;
  std::uint64_t safe = 1;
  for (const auto& [root, ok] : true_allowed) safe *= ok ? 2 : 1;
  return (std::uint64_t{1} << symbols.size()) - safe;
}

// Some assignment deadlocks iff a block carries two distinct symbols or its
// sequent deadlocks.
inline bool any_risk(const CondSet& set, const C0Blocks& b) {
  for (std::size_t k = 0; k < b.blocks.size(); ++k) {
    if (b.sequent_deadlocks[k]) return true;
    for (auto i : b.blocks[k])
      if (set[i].cond != set[b.blocks[k].front()].cond) return true;
  }
  return false;
}

}  // namespace detail

// Sequent analysis first (a sequent deadlock is a static deadlock). Then every
// assignment is evaluated on the projected plain set when there are at most
// `max_assignments` of them; otherwise only the count is derived from the
// block characterization.
inline C0Verdict detect_deadlock_c0(const CondSet& input, std::uint64_t max_assignments = default_max_assignments) {
  check_cond_set(input);
  CondSet set = input;
  std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) { return a.host < b.host; });

  C0Verdict v;
  const SeqSet body_set = bodies(set);
  v.body_verdict = detect_deadlock_s0(body_set);
  v.increment = build_increment(set);
  v.increment_deadlock_free = verify_increment_deadlock_free(v.increment);
  v.symbols = condition_symbols(set);

  detail::C0Blocks blocks;
  blocks.blocks = association_partition(body_set).blocks;
  for (const auto& bs : v.body_verdict.blocks) blocks.sequent_deadlocks.push_back(bs.status == Status::deadlock);

  const std::size_t k = v.symbols.size();
  const bool enumerable = k < 63 && (std::uint64_t{1} << k) <= max_assignments;
  if (enumerable) {
    v.enumerated = true;
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << k); ++idx) {
      CondAssignment a = assignment_at(v.symbols, idx);
      bool dl = detect_deadlock_s0(project(set, a)).status == Status::deadlock;
      if (dl) v.deadlocking_assignments.push_back(a);
      if (dl != detail::characterized_deadlock(set, blocks, a)) v.characterization_mismatches.push_back(a);
    }
    v.deadlocking_count = v.deadlocking_assignments.size();
  } else {
    v.deadlocking_count = detail::characterized_count(set, blocks, v.symbols);
  }

  for (const auto& r : build_replacement(set))
    if (r.has_check()) v.check_sites.push_back({r.host, r.check_site, r.check_conditions});

  if (v.body_verdict.status == Status::deadlock)
    v.static_status = C0Status::deadlock;
  else if (v.enumerated ? !v.deadlocking_assignments.empty() : detail::any_risk(set, blocks))
    v.static_status = C0Status::runtime_check_required;
  return v;
}

}  // namespace mdl
