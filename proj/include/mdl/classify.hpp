#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mdl/ast.hpp"
#include "mdl/model.hpp"
#include "mdl/parser.hpp"

namespace mdl {

enum class ModelKind { s0, c0, l0 };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::c0: return "C0";
    case ModelKind::l0: return "L0";
    default: return "S0";
  }
}

struct Classification {
  std::vector<ModelKind> node_kinds;  // parallel to program.nodes, when supported
  std::optional<ModelKind> kind;
  std::optional<Diagnostic> unsupported;

  bool supported() const { return kind.has_value(); }
};

namespace detail {

inline bool comm_only(const std::vector<ast::Statement>& body) {
  for (const auto& st : body)
    if (!std::holds_alternative<ast::CommOp>(st.node)) return false;
  return true;
}

inline std::variant<ModelKind, Diagnostic> node_kind(const ast::NodeProgram& n) {
  const std::string who = "node " + std::to_string(n.id) + ": ";
  std::size_t ifs = 0, fors = 0, comms = 0;
  const ast::Statement* block = nullptr;
  for (const auto& st : n.body) {
    if (std::holds_alternative<ast::CommOp>(st.node)) {
      ++comms;
    } else {
      if (std::holds_alternative<ast::IfBlock>(st.node))
        ++ifs;
      else
        ++fors;
      if (!block) block = &st;
    }
  }
  auto unsupported = [&](const std::string& why, Site site) {
    return Diagnostic{Severity::error, diag::unsupported, who + why, site};
  };
  if (!block) return ModelKind::s0;
  if (ifs && fors) return unsupported("mixed conditional and loop statements", n.site);
  if (ifs > 1) return unsupported("multiple conditional statements", n.site);
  if (fors > 1) return unsupported("multiple loop statements", n.site);
  if (const auto* b = std::get_if<ast::IfBlock>(&block->node)) {
    if (!comm_only(b->body)) return unsupported("nested statement inside a conditional", b->site);
    if (comms) return unsupported("communication outside the conditional statement", n.site);
    return ModelKind::c0;
  }
  const auto& f = std::get<ast::ForBlock>(block->node);
  if (!comm_only(f.body)) return unsupported("nested statement inside a loop", f.site);
  if (comms) return unsupported("communication outside the loop statement", n.site);
  return ModelKind::l0;
}

}  // namespace detail

// Every node must be sequential, a single conditional, or a single loop over
// plain communication, and all nodes must agree on one of these kinds.
inline Classification classify(const ast::Program& p) {
  Classification c;
  for (const auto& n : p.nodes) {
    auto k = detail::node_kind(n);
    if (auto* d = std::get_if<Diagnostic>(&k)) {
      c.node_kinds.clear();
      c.unsupported = *d;
      return c;
    }
    c.node_kinds.push_back(std::get<ModelKind>(k));
  }
  for (std::size_t i = 1; i < c.node_kinds.size(); ++i) {
    if (c.node_kinds[i] != c.node_kinds[0]) {
      c.unsupported = Diagnostic{Severity::error, diag::unsupported,
                                 "mixed model kinds: node " + std::to_string(p.nodes[0].id) + " is " +
                                     to_string(c.node_kinds[0]) + ", node " + std::to_string(p.nodes[i].id) +
                                     " is " + to_string(c.node_kinds[i]),
                                 p.nodes[i].site};
      c.node_kinds.clear();
      return c;
    }
  }
  if (!c.node_kinds.empty()) c.kind = c.node_kinds[0];
  return c;
}

namespace detail {

inline MessageSeq lower_body(NodeId self, const std::vector<ast::Statement>& body) {
  MessageSeq s{self, {}};
  for (const auto& st : body) s.messages.push_back(ast::to_message(self, std::get<ast::CommOp>(st.node)));
  return s;
}

}  // namespace detail

inline SeqSet to_seq_set(const ast::Program& p) {
  SeqSet out;
  for (const auto& n : p.nodes) out.push_back(detail::lower_body(n.id, n.body));
  sort_by_host(out);
  return out;
}

inline CondSet to_cond_set(const ast::Program& p) {
  CondSet out;
  for (const auto& n : p.nodes) {
    const auto& b = std::get<ast::IfBlock>(n.body.front().node);
    out.push_back({n.id, b.cond, detail::lower_body(n.id, b.body), b.site});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.host < b.host; });
  return out;
}

inline LoopSet to_loop_set(const ast::Program& p) {
  LoopSet out;
  for (const auto& n : p.nodes) {
    const auto& f = std::get<ast::ForBlock>(n.body.front().node);
    out.push_back({n.id, f.count, detail::lower_body(n.id, f.body), f.site});
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.host < b.host; });
  return out;
}

}  // namespace mdl
