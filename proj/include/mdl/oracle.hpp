#pragma once

#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdl/message.hpp"
#include "mdl/model.hpp"

namespace mdl::oracle {

enum class HostStatus { running, blocked, done };

struct ExecState {
  std::vector<std::size_t> cursor;  // next unexecuted message per sequence

  friend bool operator==(const ExecState&, const ExecState&) = default;
  friend auto operator<=>(const ExecState&, const ExecState&) = default;
};

enum class Outcome { terminated, deadlocked };

inline const char* to_string(Outcome o) { return o == Outcome::terminated ? "Terminated" : "Deadlocked"; }

struct Rendezvous {
  MsgRef send;
  MsgRef recv;
};

struct OracleResult {
  Outcome outcome = Outcome::terminated;
  std::vector<MsgRef> blocked;  // cursor message of each unfinished host
  std::vector<Rendezvous> trace;
  ExecState final_state;

  bool deadlocked() const { return outcome == Outcome::deadlocked; }
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::map<NodeId, std::size_t> index_hosts(const SeqSet& set) {
  std::map<NodeId, std::size_t> out;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (!out.emplace(set[i].host, i).second)
      throw std::invalid_argument("duplicate host in sequence set");
  return out;
}

// Sequence index of the partner that can fire with sequence `i` now, if any.
inline std::optional<std::size_t> enabled_partner(const SeqSet& set,
                                                  const std::map<NodeId, std::size_t>& hosts,
                                                  const ExecState& st, std::size_t i) {
  if (st.cursor[i] >= set[i].length()) return std::nullopt;
  const Message& m = set[i].messages[st.cursor[i]];
  if (m.method != Method::send) return std::nullopt;
  auto it = hosts.find(m.to);
  if (it == hosts.end()) return std::nullopt;
  const std::size_t j = it->second;
  if (st.cursor[j] >= set[j].length()) return std::nullopt;
  const Message& r = set[j].messages[st.cursor[j]];
  if (r.method == Method::recv && r.from == m.from && r.to == m.to) return j;
  return std::nullopt;
}

inline OracleResult finish(const SeqSet& set, ExecState st, std::vector<Rendezvous> trace) {
  OracleResult res;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (st.cursor[i] < set[i].length()) res.blocked.push_back({i, st.cursor[i]});
  res.outcome = res.blocked.empty() ? Outcome::terminated : Outcome::deadlocked;
  res.trace = std::move(trace);
  res.final_state = std::move(st);
  return res;
}

}  // namespace detail

// Running when the host's next message can fire now, blocked otherwise.
inline HostStatus status_of(const SeqSet& set, const ExecState& st, std::size_t i) {
  if (st.cursor[i] >= set[i].length()) return HostStatus::done;
  const auto hosts = detail::index_hosts(set);
  if (detail::enabled_partner(set, hosts, st, i)) return HostStatus::running;
  const Message& m = set[i].messages[st.cursor[i]];
  if (m.method == Method::recv) {
    auto it = hosts.find(m.from);
    if (it != hosts.end() && detail::enabled_partner(set, hosts, st, it->second) == i)
      return HostStatus::running;
  }
  return HostStatus::blocked;
}

// Greedy rendezvous execution: repeatedly fire the enabled pair with the
// lowest sender, then lowest receiver, until nothing is enabled.
inline OracleResult simulate(const SeqSet& set) {
  const auto hosts = detail::index_hosts(set);
  ExecState st{std::vector<std::size_t>(set.size(), 0)};
  std::vector<Rendezvous> trace;
  bool fired = true;
  while (fired) {
    fired = false;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (auto j = detail::enabled_partner(set, hosts, st, i)) {
        trace.push_back({{i, st.cursor[i]}, {*j, st.cursor[*j]}});
        ++st.cursor[i];
        ++st.cursor[*j];
        fired = true;
        break;
      }
    }
  }
  return detail::finish(set, std::move(st), std::move(trace));
}

// Explores every maximal firing order (depth first, with a visited set) and
// returns the distinct final states reached. Throws BudgetExceeded after
// visiting more than `budget` states.
inline std::set<std::pair<Outcome, ExecState>> simulate_all_schedules(const SeqSet& set,
                                                                      std::size_t budget = 100000) {
  const auto hosts = detail::index_hosts(set);
  std::set<ExecState> visited;
  std::set<std::pair<Outcome, ExecState>> outcomes;
  std::vector<ExecState> stack{ExecState{std::vector<std::size_t>(set.size(), 0)}};
  while (!stack.empty()) {
    ExecState st = std::move(stack.back());
    stack.pop_back();
    if (!visited.insert(st).second) continue;
    if (visited.size() > budget) throw BudgetExceeded("schedule exploration exceeded state budget");
    bool any = false;
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (auto j = detail::enabled_partner(set, hosts, st, i)) {
        ExecState next = st;
        ++next.cursor[i];
        ++next.cursor[*j];
        stack.push_back(std::move(next));
        any = true;
      }
    }
    if (!any) {
      bool done = true;
      for (std::size_t i = 0; i < set.size(); ++i) done = done && st.cursor[i] >= set[i].length();
      outcomes.emplace(done ? Outcome::terminated : Outcome::deadlocked, st);
    }
  }
  return outcomes;
}

inline OracleResult simulate_conditional(const CondSet& set, const CondAssignment& a) {
  return simulate(project(set, a));
}

// `fire (i:line:col) <-> (j:line:col)` per rendezvous, then TERMINATED or
// DEADLOCK blocked=[...].
inline std::string format_trace(const SeqSet& set, const OracleResult& r) {
  auto ref = [&](MsgRef m) { return std::to_string(set[m.seq].host) + ":" + to_string(at(set, m).site); };
  std::ostringstream os;
  for (const auto& f : r.trace) os << "fire (" << ref(f.send) << ") <-> (" << ref(f.recv) << ")\n";
  if (r.outcome == Outcome::terminated) {
    os << "TERMINATED\n";
  } else {
    os << "DEADLOCK blocked=[";
    for (std::size_t k = 0; k < r.blocked.size(); ++k) os << (k ? ", " : "") << ref(r.blocked[k]);
    os << "]\n";
  }
  return os.str();
}

}  // namespace mdl::oracle
