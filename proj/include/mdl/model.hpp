#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdl/message.hpp"

namespace mdl {

// Loop trip count; std::nullopt stands for an unbounded loop.
using LoopCount = std::optional<std::uint64_t>;

inline std::string to_string(const LoopCount& n) { return n ? std::to_string(*n) : "inf"; }

// A node whose program is a single counted loop over a flat message list.
struct LoopSeq {
  NodeId host = 0;
  LoopCount count;
  MessageSeq body;
  Site site;  // loop header

  friend bool operator==(const LoopSeq&, const LoopSeq&) = default;
};

using LoopSet = std::vector<LoopSeq>;

// The body repeated `k` times.
inline MessageSeq expand(const LoopSeq& s, std::uint64_t k) {
  if (s.count && k > *s.count)
    throw std::out_of_range("expansion of " + std::to_string(k) + " iterations exceeds loop count " +
                            std::to_string(*s.count));
  MessageSeq out{s.host, {}};
  out.messages.reserve(s.body.length() * k);
  for (std::uint64_t i = 0; i < k; ++i)
    out.messages.insert(out.messages.end(), s.body.messages.begin(), s.body.messages.end());
  return out;
}

// Full unrolling of a set of finite loops.
inline SeqSet expand_all(const LoopSet& set) {
  SeqSet out;
  for (const auto& s : set) {
    if (!s.count) throw std::invalid_argument("cannot fully expand an unbounded loop");
    out.push_back(expand(s, *s.count));
  }
  return out;
}

inline SeqSet bodies(const LoopSet& set) {
  SeqSet out;
  for (const auto& s : set) out.push_back(s.body);
  return out;
}

// A node whose program is a single if-guarded flat message list.
struct CondSeq {
  NodeId host = 0;
  std::string cond;
  MessageSeq body;
  Site site;  // if header

  friend bool operator==(const CondSeq&, const CondSeq&) = default;
};

using CondSet = std::vector<CondSeq>;

using CondAssignment = std::map<std::string, bool>;

inline std::vector<std::string> condition_symbols(const CondSet& set) {
  std::set<std::string> syms;
  for (const auto& s : set) syms.insert(s.cond);
  return {syms.begin(), syms.end()};
}

inline SeqSet bodies(const CondSet& set) {
  SeqSet out;
  for (const auto& s : set) out.push_back(s.body);
  return out;
}

// The plain set executed under `a`: bodies whose condition holds. Hosts whose
// condition is false keep an empty sequence.
inline SeqSet project(const CondSet& set, const CondAssignment& a) {
  SeqSet out;
  for (const auto& s : set) {
    auto it = a.find(s.cond);
    if (it == a.end()) throw std::invalid_argument("assignment does not cover condition " + s.cond);
    out.push_back(it->second ? s.body : MessageSeq{s.host, {}});
  }
  return out;
}

}  // namespace mdl
