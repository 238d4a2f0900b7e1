#pragma once

#include <algorithm>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mdl/match.hpp"
#include "mdl/message.hpp"

namespace mdl {

enum class Status { no_deadlock, deadlock };

inline const char* to_string(Status s) { return s == Status::deadlock ? "Deadlock" : "NoDeadlock"; }

// Messages as vertices; program-order arcs between adjacent messages of one
// sequence; each matched pair is an edge usable in both directions.
struct DependencyGraph {
  std::vector<MsgRef> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> program_edges;
  std::vector<std::pair<std::size_t, std::size_t>> match_edges;  // (send, recv)
  std::vector<std::vector<std::size_t>> arcs;                    // successor lists

  std::size_t size() const { return vertices.size(); }

  bool has_arc(std::size_t u, std::size_t v) const {
    return std::find(arcs[u].begin(), arcs[u].end(), v) != arcs[u].end();
  }
};

inline DependencyGraph build_dependency_graph(const SeqSet& set, const MatchResult& match) {
  if (!match.full())
    throw std::invalid_argument("dependency graph requires a fully matched sequence set");
  DependencyGraph g;
  std::vector<std::size_t> first(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    first[i] = g.vertices.size();
    for (std::size_t k = 0; k < set[i].length(); ++k) g.vertices.push_back({i, k});
  }
  auto id = [&](MsgRef r) { return first[r.seq] + r.index; };
  g.arcs.resize(g.vertices.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t k = 0; k + 1 < set[i].length(); ++k) {
      std::size_t u = first[i] + k;
      g.program_edges.emplace_back(u, u + 1);
      g.arcs[u].push_back(u + 1);
    }
  }
  for (const auto& p : match.pairs) {
    std::size_t s = id(p.send), r = id(p.recv);
    g.match_edges.emplace_back(s, r);
    g.arcs[s].push_back(r);
    g.arcs[r].push_back(s);
  }
  for (auto& a : g.arcs) std::sort(a.begin(), a.end());
  return g;
}

// Tarjan's algorithm, iterative. Returns component index per vertex;
// components are numbered in reverse topological order.
inline std::vector<std::size_t> strongly_connected_components(const DependencyGraph& g,
                                                              std::size_t* count = nullptr) {
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  const std::size_t n = g.size();
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (vertex, next arc)
  std::size_t next_index = 0, ncomp = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, ai] = call.back();
      if (ai == 0 && index[v] == unvisited) {
        index[v] = low[v] = next_index++;
        stack.push_back(v);
        on_stack[v] = true;
      }
      if (ai < g.arcs[v].size()) {
        std::size_t w = g.arcs[v][ai++];
        if (index[w] == unvisited) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      std::size_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  if (count) *count = ncomp;
  return comp;
}

// True iff some strongly connected component has at least three vertices.
inline bool has_long_component(const DependencyGraph& g) {
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(g, &ncomp);
  std::vector<std::size_t> sizes(ncomp, 0);
  for (auto c : comp)
    if (++sizes[c] >= 3) return true;
  return false;
}

// A simple directed cycle through at least three distinct vertices, or none.
//
// Such a cycle exists iff some SCC has >= 3 vertices: match edges form a
// matching between distinct hosts, so a large SCC must contain a program arc
// u -> w, and the shortest path w -> u inside the SCC cannot be the single arc
// back (u and w share a host). The cycle starts at the lowest vertex u that
// owns a program arc inside a large SCC.
inline std::optional<std::vector<std::size_t>> find_long_cycle(const DependencyGraph& g) {
  std::size_t ncomp = 0;
  auto comp = strongly_connected_components(g, &ncomp);
  std::vector<std::size_t> sizes(ncomp, 0);
  for (auto c : comp) ++sizes[c];

  for (const auto& [u, w] : g.program_edges) {  // ordered by u
    if (comp[u] != comp[w] || sizes[comp[u]] < 3) continue;
    const std::size_t c = comp[u];
    std::vector<std::size_t> parent(g.size(), std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> queue{w};
    parent[w] = w;
    while (!queue.empty()) {
      std::size_t v = queue.front();
      queue.pop_front();
      if (v == u) break;
      for (std::size_t x : g.arcs[v]) {
        if (comp[x] != c || parent[x] != std::numeric_limits<std::size_t>::max()) continue;
        parent[x] = v;
        queue.push_back(x);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t v = u; v != w; v = parent[v]) path.push_back(v);
    path.push_back(w);
    std::reverse(path.begin(), path.end());  // w ... u
    std::vector<std::size_t> cycle{u};
    cycle.insert(cycle.end(), path.begin(), path.end() - 1);
    return cycle;
  }
  return std::nullopt;
}

struct S0Witness {
  enum class Kind { none, unmatched, cycle };
  Kind kind = Kind::none;
  std::vector<MsgRef> messages;  // instances in the analyzed set
};

inline const char* to_string(S0Witness::Kind k) {
  switch (k) {
    case S0Witness::Kind::unmatched: return "UnmatchedMessages";
    case S0Witness::Kind::cycle: return "Cycle";
    default: return "None";
  }
}

struct BlockStatus {
  std::vector<NodeId> hosts;
  Status status = Status::no_deadlock;
};

struct GraphStats {
  std::size_t vertices = 0;
  std::size_t program_edges = 0;
  std::size_t match_edges = 0;
};

struct S0Verdict {
  Status status = Status::no_deadlock;
  S0Witness witness;
  std::vector<BlockStatus> blocks;
  std::optional<GraphStats> graph;  // present for fully matched sets
};

// Unmatched messages decide deadlock outright. A fully matched set is split
// into association blocks; a block deadlocks iff its dependency graph has a
// cycle longer than two. Blocks without unmatched messages are checked for
// cycles even when the set as a whole is not fully matched, so that per-block
// statuses are always meaningful.
inline S0Verdict detect_deadlock_s0(const SeqSet& set) {
  for (const auto& s : set) check_hosts(s);
  const MatchResult match = match_pairs(set);
  const Partition part = association_partition(set, match);

  S0Verdict out;
  if (match.full()) {
    auto g = build_dependency_graph(set, match);
    out.graph = GraphStats{g.size(), g.program_edges.size(), g.match_edges.size()};
  } else {
    out.status = Status::deadlock;
    out.witness = {S0Witness::Kind::unmatched, match.unmatched};
  }

  for (const auto& block : part.blocks) {
    BlockStatus bs;
    for (auto i : block) bs.hosts.push_back(set[i].host);
    bool unmatched = std::any_of(match.unmatched.begin(), match.unmatched.end(), [&](MsgRef r) {
      return std::find(block.begin(), block.end(), r.seq) != block.end();
    });
    if (unmatched) {
      bs.status = Status::deadlock;
    } else {
      SeqSet sub = select(set, block);
      auto g = build_dependency_graph(sub, match_pairs(sub));
      if (auto cycle = find_long_cycle(g)) {
        bs.status = Status::deadlock;
        if (out.witness.kind == S0Witness::Kind::none) {
          out.status = Status::deadlock;
          out.witness.kind = S0Witness::Kind::cycle;
          for (auto v : *cycle) {
            MsgRef r = g.vertices[v];
            out.witness.messages.push_back({block[r.seq], r.index});
          }
        }
      }
    }
    out.blocks.push_back(std::move(bs));
  }
  return out;
}

}  // namespace mdl
