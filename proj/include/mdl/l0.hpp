#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mdl/match.hpp"
#include "mdl/model.hpp"
#include "mdl/rational.hpp"
#include "mdl/s0.hpp"

namespace mdl {

struct ChannelSignature {
  NodeId from = 0;
  NodeId to = 0;
  Method method = Method::send;

  friend bool operator==(const ChannelSignature&, const ChannelSignature&) = default;
  friend auto operator<=>(const ChannelSignature&, const ChannelSignature&) = default;
};

inline ChannelSignature signature(const Message& m) { return {m.from, m.to, m.method}; }

inline ChannelSignature partner_signature(const ChannelSignature& c) {
  return {c.from, c.to, opposite(c.method)};
}

inline std::map<ChannelSignature, std::uint64_t> occurrences(const MessageSeq& body) {
  std::map<ChannelSignature, std::uint64_t> out;
  for (const auto& m : body.messages) ++out[signature(m)];
  return out;
}

// One channel shared by two loop bodies: `left` occurrences per iteration on
// the first body, `right` on the second. The iteration ratio it demands is
// right:left.
struct ChannelRatio {
  ChannelSignature channel;  // as seen from the first body
  std::uint64_t left = 0;
  std::uint64_t right = 0;

  Ratio ratio() const { return Ratio(right, left); }
};

struct RatioInconsistent {
  ChannelRatio first;
  ChannelRatio second;
};

using SequenceRatio = std::variant<Ratio, RatioInconsistent>;

// Channels carried by both bodies, as seen from `a`.
inline std::vector<ChannelRatio> shared_channels(const MessageSeq& a, const MessageSeq& b) {
  const auto occ_a = occurrences(a), occ_b = occurrences(b);
  std::vector<ChannelRatio> out;
  for (const auto& [sig, n] : occ_a) {
    if (sig.from != b.host && sig.to != b.host) continue;
    auto it = occ_b.find(partner_signature(sig));
    if (it != occ_b.end()) out.push_back({sig, n, it->second});
  }
  return out;
}

// Iteration ratio a:b demanded by every channel the two bodies share.
// Throws if the bodies share no channel.
inline SequenceRatio sequence_ratio(const LoopSeq& a, const LoopSeq& b) {
  auto channels = shared_channels(a.body, b.body);
  if (channels.empty())
    throw std::invalid_argument("nodes " + std::to_string(a.host) + " and " + std::to_string(b.host) +
                                " share no channel");
  for (const auto& c : channels)
    if (c.ratio() != channels.front().ratio()) return RatioInconsistent{channels.front(), c};
  return channels.front().ratio();
}

struct PeriodTable {
  std::vector<NodeId> hosts;
  std::vector<std::uint64_t> periods;  // jointly coprime
};

// Why a block has no period table. For a pair conflict `hosts` names the two
// nodes and `conflict` the two channels; for a cycle conflict `hosts` is the
// closed path (a triple in the simplest case) whose ratios do not multiply to 1.
struct TableFailure {
  enum class Kind { pair, cycle };
  Kind kind = Kind::pair;
  std::vector<NodeId> hosts;
  std::optional<RatioInconsistent> conflict;
};

using PeriodTableResult = std::variant<PeriodTable, TableFailure>;

namespace detail {

inline std::vector<std::vector<std::size_t>> association_graph(const LoopSet& block) {
  std::vector<std::vector<std::size_t>> adj(block.size());
  for (std::size_t i = 0; i < block.size(); ++i)
    for (std::size_t j = 0; j < block.size(); ++j)
      if (i != j && !shared_channels(block[i].body, block[j].body).empty()) adj[i].push_back(j);
  return adj;
}

}  // namespace detail

// Propagates pairwise ratios along a BFS tree of the direct-association graph
// in exact arithmetic, checks every non-tree edge, then scales to the smallest
// integer vector.
inline PeriodTableResult simplest_period_table(const LoopSet& block) {
  if (block.empty()) return PeriodTable{};
  const auto adj = detail::association_graph(block);
  std::vector<std::optional<Ratio>> value(block.size());
  std::vector<std::size_t> parent(block.size(), 0);
  value[0] = Ratio(1, 1);
  std::deque<std::size_t> queue{0};

  auto tree_path = [&](std::size_t i, std::size_t j) {
    std::vector<std::size_t> up_i{i}, up_j{j};
    while (up_i.back() != 0) up_i.push_back(parent[up_i.back()]);
    while (up_j.back() != 0) up_j.push_back(parent[up_j.back()]);
    while (up_i.size() > 1 && up_j.size() > 1 && up_i[up_i.size() - 2] == up_j[up_j.size() - 2]) {
      up_i.pop_back();
      up_j.pop_back();
    }
    std::vector<NodeId> hosts;
    for (auto k : up_i) hosts.push_back(block[k].host);
    for (auto it = up_j.rbegin() + 1; it != up_j.rend(); ++it) hosts.push_back(block[*it].host);
    return hosts;  // i ... lca ... j
  };

  while (!queue.empty()) {
    std::size_t i = queue.front();
    queue.pop_front();
    for (std::size_t j : adj[i]) {
      auto r = sequence_ratio(block[i], block[j]);
      if (auto* bad = std::get_if<RatioInconsistent>(&r))
        return TableFailure{TableFailure::Kind::pair, {block[i].host, block[j].host}, *bad};
      // T_i : T_j = r  =>  T_j = T_i / r
      Ratio tj = *value[i] / std::get<Ratio>(r);
      if (!value[j]) {
        value[j] = tj;
        parent[j] = i;
        queue.push_back(j);
      } else if (*value[j] != tj) {
        return TableFailure{TableFailure::Kind::cycle, tree_path(i, j), std::nullopt};
      }
    }
  }
  if (std::any_of(value.begin(), value.end(), [](const auto& v) { return !v; }))
    throw std::invalid_argument("period table block is not connected");

  std::uint64_t l = 1;
  for (const auto& v : value) l = Ratio::checked_mul(l / std::gcd(l, v->den()), v->den());
  PeriodTable table;
  std::uint64_t g = 0;
  for (std::size_t i = 0; i < block.size(); ++i) {
    table.hosts.push_back(block[i].host);
    table.periods.push_back(Ratio::checked_mul(value[i]->num(), l / value[i]->den()));
    g = std::gcd(g, table.periods.back());
  }
  for (auto& t : table.periods) t /= g;
  return table;
}

struct L0Block {
  enum class Reason { none, unpartnered, no_period_table, mixed_infinite, counts_not_proportional, hyper_period };

  std::vector<NodeId> hosts;
  std::vector<LoopCount> counts;
  Status status = Status::no_deadlock;
  Reason reason = Reason::none;
  std::vector<MsgRef> unpartnered;  // into bodies(L)
  std::optional<PeriodTable> table;
  std::optional<TableFailure> table_failure;
  std::optional<std::uint64_t> scale;  // N_i = scale * T_i for finite proportional counts
  SeqSet hyper_period;                 // prefix set L' of the block
  std::optional<S0Verdict> hyper_period_verdict;
};

inline const char* to_string(L0Block::Reason r) {
  switch (r) {
    case L0Block::Reason::unpartnered: return "unpartnered-message";
    case L0Block::Reason::no_period_table: return "no-period-table";
    case L0Block::Reason::mixed_infinite: return "mixed-finite-infinite";
    case L0Block::Reason::counts_not_proportional: return "counts-not-proportional";
    case L0Block::Reason::hyper_period: return "hyper-period-deadlock";
    default: return "none";
  }
}

struct L0Verdict {
  Status status = Status::no_deadlock;
  std::vector<L0Block> blocks;
  std::optional<std::size_t> witness_block;  // first deadlocked block
};

inline void check_loop_set(const LoopSet& set) {
  std::set<NodeId> seen;
  for (const auto& s : set) {
    if (!seen.insert(s.host).second) throw std::invalid_argument("duplicate host in loop set");
    if (s.body.host != s.host) throw std::invalid_argument("loop body host mismatch");
    if (s.body.empty()) throw std::invalid_argument("empty loop body on node " + std::to_string(s.host));
    if (s.count && *s.count == 0) throw std::invalid_argument("loop count must be positive");
    check_hosts(s.body);
  }
}

// Per association block of the bodies: every body message needs a partner
// signature in the block; the simplest period table must exist; counts must
// be all unbounded or proportional to the table; then the block deadlocks
// iff its hyper-period prefix (T_i iterations each) does.
inline L0Verdict detect_deadlock_l0(const LoopSet& set) {
  check_loop_set(set);
  const SeqSet body_set = bodies(set);
  const Partition part = association_partition(body_set);

  L0Verdict out;
  for (const auto& idx : part.blocks) {
    L0Block b;
    LoopSet block;
    for (auto i : idx) {
      b.hosts.push_back(set[i].host);
      b.counts.push_back(set[i].count);
      block.push_back(set[i]);
    }

    for (auto i : idx) {
      const auto& body = body_set[i];
      for (std::size_t k = 0; k < body.length(); ++k) {
        const Message& m = body.messages[k];
        auto it = std::find_if(idx.begin(), idx.end(), [&](auto j) { return body_set[j].host == peer(m); });
        bool found = it != idx.end() && occurrences(body_set[*it]).count(partner_signature(signature(m)));
        if (!found) b.unpartnered.push_back({i, k});
      }
    }

    if (!b.unpartnered.empty()) {
      b.status = Status::deadlock;
      b.reason = L0Block::Reason::unpartnered;
    } else if (auto table = simplest_period_table(block); std::holds_alternative<TableFailure>(table)) {
      b.status = Status::deadlock;
      b.reason = L0Block::Reason::no_period_table;
      b.table_failure = std::get<TableFailure>(table);
    } else {
      b.table = std::get<PeriodTable>(table);
      const auto& T = b.table->periods;
      std::size_t finite = std::count_if(b.counts.begin(), b.counts.end(), [](const auto& c) { return c.has_value(); });
      if (finite != 0 && finite != b.counts.size()) {
        b.status = Status::deadlock;
        b.reason = L0Block::Reason::mixed_infinite;
      } else {
        if (finite != 0) {
          const std::uint64_t n0 = *b.counts[0];
          bool proportional = n0 % T[0] == 0;
          const std::uint64_t c = n0 / T[0];
          for (std::size_t k = 0; proportional && k < T.size(); ++k)
            proportional = *b.counts[k] % T[k] == 0 && *b.counts[k] / T[k] == c;
          if (!proportional) {
            b.status = Status::deadlock;
            b.reason = L0Block::Reason::counts_not_proportional;
          } else {
            b.scale = c;
          }
        }
        if (b.reason == L0Block::Reason::none) {
          for (std::size_t k = 0; k < block.size(); ++k) b.hyper_period.push_back(expand(block[k], T[k]));
          b.hyper_period_verdict = detect_deadlock_s0(b.hyper_period);
          if (b.hyper_period_verdict->status == Status::deadlock) {
            b.status = Status::deadlock;
            b.reason = L0Block::Reason::hyper_period;
          }
        }
      }
    }

    if (b.status == Status::deadlock && !out.witness_block) {
      out.status = Status::deadlock;
      out.witness_block = out.blocks.size();
    }
    out.blocks.push_back(std::move(b));
  }
  return out;
}

// Hyper-period prefix set of every block that has one, as a single plain set.
inline SeqSet hyper_period_set(const L0Verdict& v) {
  SeqSet out;
  for (const auto& b : v.blocks) out.insert(out.end(), b.hyper_period.begin(), b.hyper_period.end());
  sort_by_host(out);
  return out;
}

}  // namespace mdl
