#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mdl/ast.hpp"

namespace mdl {

// Diagnostic codes produced by the frontend.
namespace diag {
inline constexpr const char* lexical = "E001";
inline constexpr const char* syntax = "E002";
inline constexpr const char* duplicate_node = "E003";
inline constexpr const char* empty = "E004";
inline constexpr const char* self_message = "E005";
inline constexpr const char* bad_number = "E006";
inline constexpr const char* unsupported = "E010";
inline constexpr const char* tag_mismatch = "W001";
inline constexpr const char* unknown_peer = "W002";
}  // namespace diag

struct Token {
  enum class Kind { ident, integer, punct, end };
  Kind kind = Kind::end;
  std::string text;
  Site site;
};

// Splits source text into identifiers, integers and the punctuation
// `{ } ( ) ; , =`. Line comments start with `//` or `#`.
inline std::vector<Token> tokenize(std::string_view src, std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance();
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    Site site{line, col};
    if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Token::Kind::ident, std::string(src.substr(i, j - i)), site});
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Token::Kind::integer, std::string(src.substr(i, j - i)), site});
      advance(j - i);
    } else if (std::string_view("{}();,=").find(static_cast<char>(c)) != std::string_view::npos) {
      out.push_back({Token::Kind::punct, std::string(1, static_cast<char>(c)), site});
      advance();
    } else {
      std::string shown = c < 0x80 && std::isprint(c) ? std::string(1, static_cast<char>(c))
                                                       : "byte 0x" + std::string(1, "0123456789abcdef"[c >> 4]) +
                                                             std::string(1, "0123456789abcdef"[c & 15]);
      diags.push_back({Severity::error, diag::lexical, "unexpected character '" + shown + "'", site});
      return {};
    }
  }
  out.push_back({Token::Kind::end, "", {line, col}});
  return out;
}

struct ParseResult {
  std::optional<ast::Program> program;
  std::vector<Diagnostic> diagnostics;
};

namespace detail {

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  std::optional<ast::Program> program() {
    ast::Program p;
    if (peek().kind == Token::Kind::end) {
      error(diag::empty, "program declares no nodes", peek().site);
      return std::nullopt;
    }
    while (peek().kind != Token::Kind::end) {
      auto n = node();
      if (!n) return std::nullopt;
      p.nodes.push_back(std::move(*n));
    }
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  void error(const char* code, std::string msg, Site site) {
    diags_.push_back({Severity::error, code, std::move(msg), site});
  }

  static std::string shown(const Token& t) { return t.kind == Token::Kind::end ? "end of input" : "'" + t.text + "'"; }

  bool expect_punct(char c, const char* what) {
    if (peek().kind == Token::Kind::punct && peek().text[0] == c) {
      take();
      return true;
    }
    error(diag::syntax, std::string("expected '") + c + "' " + what + ", found " + shown(peek()), peek().site);
    return false;
  }

  bool expect_word(const char* word, const char* what) {
    if (peek().kind == Token::Kind::ident && peek().text == word) {
      take();
      return true;
    }
    error(diag::syntax, std::string("expected '") + word + "' " + what + ", found " + shown(peek()), peek().site);
    return false;
  }

  bool at_punct(char c) const { return peek().kind == Token::Kind::punct && peek().text[0] == c; }

  std::optional<std::uint64_t> positive(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Kind::integer) {
      error(diag::syntax, std::string("expected ") + what + ", found " + shown(t), t.site);
      return std::nullopt;
    }
    take();
    if (t.text.size() > 18) {
      error(diag::bad_number, std::string(what) + " out of range", t.site);
      return std::nullopt;
    }
    std::uint64_t v = std::stoull(t.text);
    if (v == 0) {
      error(diag::bad_number, std::string(what) + " must be positive", t.site);
      return std::nullopt;
    }
    return v;
  }

  std::optional<ast::NodeProgram> node() {
    const Site site = peek().site;
    if (!expect_word("node", "to start a node program")) return std::nullopt;
    auto id = positive("node id");
    if (!id) return std::nullopt;
    ast::NodeProgram n{static_cast<NodeId>(*id), {}, site};
    if (!ids_.insert(n.id).second) {
      error(diag::duplicate_node, "duplicate node id " + std::to_string(n.id), site);
      return std::nullopt;
    }
    self_ = n.id;
    if (!expect_punct('{', "after node id")) return std::nullopt;
    if (!block(n.body)) return std::nullopt;
    if (n.body.empty()) {
      error(diag::empty, "node " + std::to_string(n.id) + " has an empty body", site);
      return std::nullopt;
    }
    return n;
  }

  // Statements up to and including the closing brace.
  bool block(std::vector<ast::Statement>& body) {
    while (!at_punct('}')) {
      if (peek().kind == Token::Kind::end) {
        error(diag::syntax, "expected '}' before end of input", peek().site);
        return false;
      }
      auto st = statement();
      if (!st) return false;
      body.push_back(std::move(*st));
    }
    take();
    return true;
  }

  std::optional<ast::Statement> statement() {
    const Token& t = peek();
    if (t.kind == Token::Kind::ident && (t.text == "send" || t.text == "recv")) return comm();
    if (t.kind == Token::Kind::ident && t.text == "if") return if_block();
    if (t.kind == Token::Kind::ident && t.text == "for") return for_block();
    error(diag::syntax, "expected send, recv, if or for, found " + shown(t), t.site);
    return std::nullopt;
  }

  std::optional<ast::Statement> comm() {
    const Token kw = take();
    ast::CommOp op;
    op.method = kw.text == "send" ? Method::send : Method::recv;
    op.site = kw.site;
    const char* key = op.method == Method::send ? "to" : "from";
    if (!expect_punct('(', ("after " + kw.text).c_str())) return std::nullopt;
    if (!expect_word(key, ("in " + kw.text).c_str())) return std::nullopt;
    if (!expect_punct('=', (std::string("after '") + key + "'").c_str())) return std::nullopt;
    const Site peer_site = peek().site;
    auto peer = positive("peer node id");
    if (!peer) return std::nullopt;
    op.peer = static_cast<NodeId>(*peer);
    if (at_punct(',')) {
      take();
      if (!expect_word("tag", "after ','")) return std::nullopt;
      if (!expect_punct('=', "after 'tag'")) return std::nullopt;
      if (peek().kind != Token::Kind::ident && peek().kind != Token::Kind::integer) {
        error(diag::syntax, "expected tag, found " + shown(peek()), peek().site);
        return std::nullopt;
      }
      op.tag = take().text;
    }
    if (!expect_punct(')', ("to close " + kw.text).c_str())) return std::nullopt;
    if (!expect_punct(';', ("after " + kw.text).c_str())) return std::nullopt;
    if (op.peer == self_) {
      error(diag::self_message, "node " + std::to_string(self_) + " cannot " + kw.text + " to itself", peer_site);
      return std::nullopt;
    }
    peers_.emplace_back(op.peer, peer_site);
    return ast::Statement{op};
  }

  std::optional<ast::Statement> if_block() {
    ast::IfBlock b;
    b.site = take().site;
    if (!expect_punct('(', "after 'if'")) return std::nullopt;
    if (peek().kind != Token::Kind::ident) {
      error(diag::syntax, "expected condition symbol, found " + shown(peek()), peek().site);
      return std::nullopt;
    }
    b.cond = take().text;
    if (!expect_punct(')', "after condition")) return std::nullopt;
    if (!expect_punct('{', "to open the conditional body")) return std::nullopt;
    if (!block(b.body)) return std::nullopt;
    if (b.body.empty()) {
      error(diag::empty, "conditional body is empty", b.site);
      return std::nullopt;
    }
    return ast::Statement{std::move(b)};
  }

  std::optional<ast::Statement> for_block() {
    ast::ForBlock f;
    f.site = take().site;
    if (!expect_punct('(', "after 'for'")) return std::nullopt;
    if (peek().kind == Token::Kind::ident && peek().text == "inf") {
      take();
    } else {
      auto n = positive("loop count or 'inf'");
      if (!n) return std::nullopt;
      f.count = *n;
    }
    if (!expect_punct(')', "after loop count")) return std::nullopt;
    if (!expect_punct('{', "to open the loop body")) return std::nullopt;
    if (!block(f.body)) return std::nullopt;
    if (f.body.empty()) {
      error(diag::empty, "loop body is empty", f.site);
      return std::nullopt;
    }
    return ast::Statement{std::move(f)};
  }

 public:
  std::vector<std::pair<NodeId, Site>> peers_;
  std::set<NodeId> ids_;

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  NodeId self_ = 0;
};

}  // namespace detail

inline ParseResult parse(std::string_view source) {
  ParseResult r;
  auto toks = tokenize(source, r.diagnostics);
  if (toks.empty()) return r;
  detail::Parser p(std::move(toks), r.diagnostics);
  r.program = p.program();
  if (!r.program) return r;
  for (const auto& [peer, site] : p.peers_)
    if (!p.ids_.count(peer))
      r.diagnostics.push_back(
          {Severity::warning, diag::unknown_peer, "node " + std::to_string(peer) + " is not defined", site});
  return r;
}

}  // namespace mdl
