#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mdl/message.hpp"

namespace mdl {

struct MatchedPair {
  MsgRef send;
  MsgRef recv;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct MatchResult {
  std::vector<MatchedPair> pairs;  // ordered by send instance
  std::vector<MsgRef> unmatched;   // ordered by instance
  // partner[seq][index], empty when the instance is unmatched
  std::vector<std::vector<std::optional<MsgRef>>> partner;

  bool full() const { return unmatched.empty(); }
};

// Pairs the k-th send on channel (i, j) in node i's sequence with the k-th
// recv on the same channel in node j's sequence. Hosts must be unique.
inline MatchResult match_pairs(const SeqSet& set) {
  std::map<NodeId, std::size_t> seq_of;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (!seq_of.emplace(set[i].host, i).second)
      throw std::invalid_argument("duplicate host " + std::to_string(set[i].host) + " in sequence set");
  }

  using Channel = std::pair<NodeId, NodeId>;
  std::map<Channel, std::vector<MsgRef>> sends, recvs;
  MatchResult out;
  out.partner.resize(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.partner[i].assign(set[i].length(), std::nullopt);
    for (std::size_t k = 0; k < set[i].length(); ++k) {
      const Message& m = set[i].messages[k];
      auto& bucket = m.method == Method::send ? sends : recvs;
      bucket[{m.from, m.to}].push_back({i, k});
    }
  }

  for (const auto& [channel, ss] : sends) {
    auto it = recvs.find(channel);
    if (it == recvs.end()) continue;
    const auto& rs = it->second;
    for (std::size_t k = 0; k < std::min(ss.size(), rs.size()); ++k) {
      out.pairs.push_back({ss[k], rs[k]});
      out.partner[ss[k].seq][ss[k].index] = rs[k];
      out.partner[rs[k].seq][rs[k].index] = ss[k];
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end(),
            [](const MatchedPair& a, const MatchedPair& b) { return a.send < b.send; });

  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t k = 0; k < set[i].length(); ++k)
      if (!out.partner[i][k]) out.unmatched.push_back({i, k});
  return out;
}

inline bool is_full_match(const SeqSet& set) { return match_pairs(set).full(); }

// Blocks of sequence indices; two sequences share a block iff they are
// connected through matched pairs. Blocks are ordered by their lowest index.
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;
};

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

inline Partition blocks_from(UnionFind& uf, std::size_t n) {
  Partition p;
  std::map<std::size_t, std::size_t> block_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, fresh] = block_of_root.emplace(uf.find(i), p.blocks.size());
    if (fresh) p.blocks.emplace_back();
    p.blocks[it->second].push_back(i);
  }
  return p;
}

}  // namespace detail

inline Partition association_partition(const SeqSet& set, const MatchResult& match) {
  detail::UnionFind uf(set.size());
  for (const auto& p : match.pairs) uf.unite(p.send.seq, p.recv.seq);
  return detail::blocks_from(uf, set.size());
}

inline Partition association_partition(const SeqSet& set) {
  return association_partition(set, match_pairs(set));
}

inline SeqSet select(const SeqSet& set, const std::vector<std::size_t>& indices) {
  SeqSet out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(set[i]);
  return out;
}

// Pairs whose two ends both carry a tag and the tags differ.
inline std::vector<MatchedPair> tag_mismatches(const SeqSet& set, const MatchResult& match) {
  std::vector<MatchedPair> out;
  for (const auto& p : match.pairs) {
    const auto& s = at(set, p.send);
    const auto& r = at(set, p.recv);
    if (s.tag && r.tag && *s.tag != *r.tag) out.push_back(p);
  }
  return out;
}

}  // namespace mdl
