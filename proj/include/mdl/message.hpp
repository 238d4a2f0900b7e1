#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace mdl {

using NodeId = std::int64_t;

enum class Method { send, recv };

inline const char* to_string(Method m) { return m == Method::send ? "send" : "recv"; }

inline Method opposite(Method m) { return m == Method::send ? Method::recv : Method::send; }

// Source location of a message, 1-based. Synthesized messages carry {0, 0}.
struct Site {
  int line = 0;
  int col = 0;

  friend bool operator==(const Site&, const Site&) = default;
  friend auto operator<=>(const Site&, const Site&) = default;
};

inline std::string to_string(const Site& s) {
  return std::to_string(s.line) + ":" + std::to_string(s.col);
}

// One synchronous send or recv. `tag` houses the message contents; it never
// takes part in matching.
struct Message {
  NodeId from = 0;
  NodeId to = 0;
  Method method = Method::send;
  std::optional<std::string> tag;
  Site site;

  friend bool operator==(const Message&, const Message&) = default;
};

// The node that executes the message.
inline NodeId host(const Message& m) { return m.method == Method::recv ? m.to : m.from; }

// The node on the other end of the channel.
inline NodeId peer(const Message& m) { return m.method == Method::recv ? m.from : m.to; }

inline Message make_send(NodeId from, NodeId to, std::optional<std::string> tag = std::nullopt,
                         Site site = {}) {
  return Message{from, to, Method::send, std::move(tag), site};
}

inline Message make_recv(NodeId to, NodeId from, std::optional<std::string> tag = std::nullopt,
                         Site site = {}) {
  return Message{from, to, Method::recv, std::move(tag), site};
}

// `send(to=2, tag=a)` as written in the DSL, seen from the host.
inline std::string describe(const Message& m) {
  std::ostringstream os;
  if (m.method == Method::send)
    os << "send(to=" << m.to;
  else
    os << "recv(from=" << m.from;
  if (m.tag) os << ", tag=" << *m.tag;
  os << ")";
  return os.str();
}

// Ordered messages of one node. Program order is list position.
struct MessageSeq {
  NodeId host = 0;
  std::vector<Message> messages;

  std::size_t length() const { return messages.size(); }
  bool empty() const { return messages.empty(); }

  friend bool operator==(const MessageSeq&, const MessageSeq&) = default;
};

// Throws if some message is not executed by the sequence's host.
inline void check_hosts(const MessageSeq& s) {
  for (const auto& m : s.messages) {
    if (host(m) != s.host)
      throw std::invalid_argument("message " + describe(m) + " does not belong to node " +
                                  std::to_string(s.host));
    if (m.from == m.to) throw std::invalid_argument("self-message on node " + std::to_string(s.host));
  }
}

// A finite set of sequences, one per host, kept sorted by host id.
using SeqSet = std::vector<MessageSeq>;

inline void sort_by_host(SeqSet& set) {
  std::sort(set.begin(), set.end(), [](const auto& a, const auto& b) { return a.host < b.host; });
}

inline std::size_t total_messages(const SeqSet& set) {
  std::size_t n = 0;
  for (const auto& s : set) n += s.length();
  return n;
}

// A message instance: sequence index within its SeqSet plus position.
struct MsgRef {
  std::size_t seq = 0;
  std::size_t index = 0;

  friend bool operator==(const MsgRef&, const MsgRef&) = default;
  friend auto operator<=>(const MsgRef&, const MsgRef&) = default;
};

inline const Message& at(const SeqSet& set, MsgRef r) { return set[r.seq].messages[r.index]; }

// ---------------------------------------------------------------------------
// Sequence algebra. Results that the algebra defines as the empty set are
// returned as std::nullopt; an empty sequence is a regular value.

using SeqOrEmpty = std::optional<MessageSeq>;

inline MessageSeq prefix(const MessageSeq& s, std::size_t p) {
  if (p > s.length()) throw std::out_of_range("prefix length exceeds sequence length");
  return MessageSeq{s.host, {s.messages.begin(), s.messages.begin() + static_cast<std::ptrdiff_t>(p)}};
}

inline MessageSeq suffix(const MessageSeq& s, std::size_t p) {
  if (p > s.length()) throw std::out_of_range("suffix length exceeds sequence length");
  return MessageSeq{s.host, {s.messages.end() - static_cast<std::ptrdiff_t>(p), s.messages.end()}};
}

inline SeqOrEmpty concat(const MessageSeq& a, const MessageSeq& b) {
  if (a.host != b.host) return std::nullopt;
  MessageSeq out = a;
  out.messages.insert(out.messages.end(), b.messages.begin(), b.messages.end());
  return out;
}

inline SeqOrEmpty subtract_right(const MessageSeq& a, const MessageSeq& b) {
  if (a.host != b.host || b.length() > a.length()) return std::nullopt;
  if (suffix(a, b.length()) != MessageSeq{b.host, b.messages}) return std::nullopt;
  return prefix(a, a.length() - b.length());
}

inline SeqOrEmpty subtract_left(const MessageSeq& a, const MessageSeq& b) {
  if (a.host != b.host || b.length() > a.length()) return std::nullopt;
  if (prefix(a, b.length()) != MessageSeq{b.host, b.messages}) return std::nullopt;
  return suffix(a, a.length() - b.length());
}

namespace detail {

inline const MessageSeq* find_host(const SeqSet& set, NodeId h) {
  for (const auto& s : set)
    if (s.host == h) return &s;
  return nullptr;
}

template <typename Op>
std::optional<SeqSet> combine(const SeqSet& a, const SeqSet& b, Op op) {
  SeqSet out;
  for (const auto& s : a) {
    const MessageSeq* other = find_host(b, s.host);
    auto r = op(s, other ? *other : MessageSeq{s.host, {}});
    if (!r) return std::nullopt;
    out.push_back(std::move(*r));
  }
  for (const auto& s : b) {
    if (find_host(a, s.host)) continue;
    auto r = op(MessageSeq{s.host, {}}, s);
    if (!r) return std::nullopt;
    out.push_back(std::move(*r));
  }
  sort_by_host(out);
  return out;
}

}  // namespace detail

// Set-level forms pair sequences by host; a host missing on one side acts as
// the empty sequence. Any per-host empty-set result makes the whole set empty.
inline SeqSet concat(const SeqSet& a, const SeqSet& b) {
  return *detail::combine(a, b, [](const MessageSeq& x, const MessageSeq& y) { return concat(x, y); });
}

inline std::optional<SeqSet> subtract_right(const SeqSet& a, const SeqSet& b) {
  return detail::combine(a, b,
                         [](const MessageSeq& x, const MessageSeq& y) { return subtract_right(x, y); });
}

inline std::optional<SeqSet> subtract_left(const SeqSet& a, const SeqSet& b) {
  return detail::combine(a, b,
                         [](const MessageSeq& x, const MessageSeq& y) { return subtract_left(x, y); });
}

}  // namespace mdl
