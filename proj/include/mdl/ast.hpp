#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "mdl/message.hpp"
#include "mdl/model.hpp"

namespace mdl {

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string code;
  std::string message;
  Site site;
};

// `file:line:col: code: message`
inline std::string format(const Diagnostic& d, const std::string& file) {
  return file + ":" + std::to_string(d.site.line) + ":" + std::to_string(d.site.col) + ": " + d.code + ": " +
         d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::error) return true;
  return false;
}

namespace ast {

struct CommOp {
  Method method = Method::send;
  NodeId peer = 0;
  std::optional<std::string> tag;
  Site site;
};

struct Statement;

struct IfBlock {
  std::string cond;
  std::vector<Statement> body;
  Site site;
};

struct ForBlock {
  LoopCount count;
  std::vector<Statement> body;
  Site site;
};

struct Statement {
  std::variant<CommOp, IfBlock, ForBlock> node;
};

struct NodeProgram {
  NodeId id = 0;
  std::vector<Statement> body;
  Site site;
};

struct Program {
  std::vector<NodeProgram> nodes;
};

// Message executed by node `self` for a communication statement.
inline Message to_message(NodeId self, const CommOp& op) {
  return op.method == Method::send ? make_send(self, op.peer, op.tag, op.site)
                                   : make_recv(self, op.peer, op.tag, op.site);
}

namespace detail {

inline void print(std::ostringstream& os, const std::vector<Statement>& body, int depth);

inline void print(std::ostringstream& os, const Statement& st, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (const auto* op = std::get_if<CommOp>(&st.node)) {
    os << pad << (op->method == Method::send ? "send(to=" : "recv(from=") << op->peer;
    if (op->tag) os << ", tag=" << *op->tag;
    os << ");\n";
  } else if (const auto* b = std::get_if<IfBlock>(&st.node)) {
    os << pad << "if (" << b->cond << ") {\n";
    print(os, b->body, depth + 1);
    os << pad << "}\n";
  } else {
    const auto& f = std::get<ForBlock>(st.node);
    os << pad << "for (" << to_string(f.count) << ") {\n";
    print(os, f.body, depth + 1);
    os << pad << "}\n";
  }
}

inline void print(std::ostringstream& os, const std::vector<Statement>& body, int depth) {
  for (const auto& st : body) print(os, st, depth);
}

inline bool same(const std::vector<Statement>& a, const std::vector<Statement>& b);

inline bool same(const Statement& a, const Statement& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<CommOp>(&a.node)) {
    const auto& y = std::get<CommOp>(b.node);
    return x->method == y.method && x->peer == y.peer && x->tag == y.tag;
  }
  if (const auto* x = std::get_if<IfBlock>(&a.node)) {
    const auto& y = std::get<IfBlock>(b.node);
    return x->cond == y.cond && same(x->body, y.body);
  }
  const auto& x = std::get<ForBlock>(a.node);
  const auto& y = std::get<ForBlock>(b.node);
  return x.count == y.count && same(x.body, y.body);
}

inline bool same(const std::vector<Statement>& a, const std::vector<Statement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

}  // namespace detail

inline std::string pretty_print(const Program& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    if (i) os << "\n";
    os << "node " << p.nodes[i].id << " {\n";
    detail::print(os, p.nodes[i].body, 1);
    os << "}\n";
  }
  return os.str();
}

// Structural equality, ignoring source sites.
inline bool structurally_equal(const Program& a, const Program& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].id != b.nodes[i].id || !detail::same(a.nodes[i].body, b.nodes[i].body)) return false;
  return true;
}

inline std::size_t count_comm_ops(const std::vector<Statement>& body) {
  std::size_t n = 0;
  for (const auto& st : body) {
    if (std::holds_alternative<CommOp>(st.node))
      ++n;
    else if (const auto* b = std::get_if<IfBlock>(&st.node))
      n += count_comm_ops(b->body);
    else
      n += count_comm_ops(std::get<ForBlock>(st.node).body);
  }
  return n;
}

inline std::size_t count_comm_ops(const Program& p) {
  std::size_t n = 0;
  for (const auto& node : p.nodes) n += count_comm_ops(node.body);
  return n;
}

}  // namespace ast
}  // namespace mdl
