#include <gtest/gtest.h>

#include <random>

#include "mdl/classify.hpp"
#include "mdl/parser.hpp"

namespace {

using namespace mdl;

const char* kTable1 = R"(
node 1 { send(to=3, tag=a); send(to=2, tag=b); }
node 2 { recv(from=1, tag=b); send(to=3, tag=c); }
node 3 { recv(from=2, tag=c); recv(from=1, tag=a); }
)";

const char* kTable3 = R"(
node 1 { if (c1) { send(to=2, tag=a); } }
node 2 { if (c2) { recv(from=3, tag=b); recv(from=1, tag=a); } }
node 3 { if (c3) { send(to=2, tag=b); } }
)";

std::vector<std::string> codes(const ParseResult& r) {
  std::vector<std::string> out;
  for (const auto& d : r.diagnostics) out.push_back(d.code);
  return out;
}

TEST(Parse, SmallestProgram) {
  auto r = parse("node 1 { send(to=2); } node 2 { recv(from=1); }");
  ASSERT_TRUE(r.program);
  EXPECT_TRUE(r.diagnostics.empty());
  ASSERT_EQ(r.program->nodes.size(), 2u);
  EXPECT_EQ(ast::count_comm_ops(r.program->nodes[0].body), 1u);
  EXPECT_EQ(ast::count_comm_ops(r.program->nodes[1].body), 1u);
  const auto& op = std::get<ast::CommOp>(r.program->nodes[1].body[0].node);
  EXPECT_EQ(op.method, Method::recv);
  EXPECT_EQ(op.peer, 1);
}

TEST(Parse, CycleProgram) {
  auto r = parse(kTable1);
  ASSERT_TRUE(r.program);
  EXPECT_EQ(r.program->nodes.size(), 3u);
  EXPECT_EQ(ast::count_comm_ops(*r.program), 6u);
  auto set = to_seq_set(*r.program);
  EXPECT_EQ(set[2].messages[1], make_recv(3, 1, "a", {4, 31}));
}

TEST(Parse, MalformedArgumentPointsAtIt) {
  auto r = parse("node 1 { send(to=) }");
  EXPECT_FALSE(r.program);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, diag::syntax);
  EXPECT_EQ(r.diagnostics[0].site, (Site{1, 18}));
}

TEST(Parse, DistinctErrorCodes) {
  EXPECT_EQ(codes(parse("node 1 { send(to=2); } @")), std::vector<std::string>{diag::lexical});
  EXPECT_EQ(codes(parse("node 1 { send(to=2); } node 1 { recv(from=1); }")),
            std::vector<std::string>{diag::duplicate_node});
  EXPECT_EQ(codes(parse("")), std::vector<std::string>{diag::empty});
  EXPECT_EQ(codes(parse("node 1 { }")), std::vector<std::string>{diag::empty});
  EXPECT_EQ(codes(parse("node 1 { for (3) { } }")), std::vector<std::string>{diag::empty});
  EXPECT_EQ(codes(parse("node 1 { send(to=1); }")), std::vector<std::string>{diag::self_message});
  EXPECT_EQ(codes(parse("node 1 { for (0) { send(to=2); } }")).front(), diag::bad_number);
  EXPECT_EQ(codes(parse("node 0 { send(to=2); }")).front(), diag::bad_number);
  EXPECT_EQ(codes(parse("node 1 { send(to=2) }")), std::vector<std::string>{diag::syntax});
}

TEST(Parse, NonAsciiIsLexicalError) {
  auto r = parse("node 1 { send(to=2); } \xe2\x86\x92");
  EXPECT_FALSE(r.program);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_EQ(r.diagnostics[0].code, diag::lexical);
  EXPECT_EQ(r.diagnostics[0].site, (Site{1, 24}));
}

TEST(Parse, UnknownPeerIsWarning) {
  auto r = parse("node 1 { send(to=7); }");
  ASSERT_TRUE(r.program);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].severity, Severity::warning);
  EXPECT_EQ(r.diagnostics[0].code, diag::unknown_peer);
}

TEST(Parse, CommentsAndInfiniteLoops) {
  auto r = parse("# header\nnode 1 { // loop\n for (inf) { send(to=2); } }\nnode 2 { for (inf) { recv(from=1); } }");
  ASSERT_TRUE(r.program);
  auto loops = to_loop_set(*r.program);
  EXPECT_FALSE(loops[0].count.has_value());
  EXPECT_EQ(loops[0].site, (Site{3, 2}));
}

TEST(Parse, DiagnosticFormat) {
  Diagnostic d{Severity::error, "E002", "expected ';'", {3, 7}};
  EXPECT_EQ(format(d, "a.mdl"), "a.mdl:3:7: E002: expected ';'");
}

TEST(Classify, Kinds) {
  EXPECT_EQ(classify(*parse(kTable1).program).kind, ModelKind::s0);
  EXPECT_EQ(classify(*parse(kTable3).program).kind, ModelKind::c0);
  auto l0 = parse("node 1 { for (2) { send(to=2); } } node 2 { for (inf) { recv(from=1); } }");
  EXPECT_EQ(classify(*l0.program).kind, ModelKind::l0);
}

TEST(Classify, UnsupportedShapes) {
  auto reason = [](const char* src) {
    auto c = classify(*parse(src).program);
    EXPECT_FALSE(c.supported());
    return c.unsupported ? c.unsupported->message : std::string();
  };
  EXPECT_NE(reason("node 1 { for (2) { send(to=2); } for (3) { send(to=2); } }").find("multiple loop statements"),
            std::string::npos);
  EXPECT_NE(reason("node 1 { if (a) { send(to=2); } if (b) { send(to=2); } }").find("multiple conditional"),
            std::string::npos);
  EXPECT_NE(reason("node 1 { for (2) { if (c) { send(to=2); } } }").find("nested"), std::string::npos);
  EXPECT_NE(reason("node 1 { send(to=2); if (c) { send(to=2); } }").find("outside"), std::string::npos);
  EXPECT_NE(reason("node 1 { if (c) { send(to=2); } for (2) { send(to=2); } }").find("mixed"), std::string::npos);
  EXPECT_NE(reason("node 1 { send(to=2); } node 2 { if (c) { recv(from=1); } }").find("mixed model kinds"),
            std::string::npos);
}

// Random well-formed programs: printing and reparsing gives the same tree,
// and classification is deterministic.
TEST(Frontend, PrettyPrintRoundTrip) {
  std::mt19937_64 rng(7);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  auto comm = [&](NodeId self, std::size_t hosts) {
    ast::CommOp op;
    op.method = pick(2) ? Method::send : Method::recv;
    do op.peer = static_cast<NodeId>(pick(hosts) + 1);
    while (op.peer == self);
    if (pick(2)) op.tag = "t" + std::to_string(pick(5));
    return ast::Statement{op};
  };
  for (int iter = 0; iter < 300; ++iter) {
    ast::Program p;
    std::size_t hosts = 2 + pick(4);
    for (std::size_t h = 1; h <= hosts; ++h) {
      ast::NodeProgram n{static_cast<NodeId>(h), {}, {}};
      std::size_t shape = pick(4);
      std::vector<ast::Statement> body;
      for (std::size_t k = 0; k < 1 + pick(3); ++k) body.push_back(comm(n.id, hosts));
      if (shape == 0) {
        n.body = body;
      } else if (shape == 1) {
        n.body.push_back({ast::IfBlock{"c" + std::to_string(pick(3)), body, {}}});
      } else if (shape == 2) {
        n.body.push_back({ast::ForBlock{pick(2) ? LoopCount{} : LoopCount{1 + pick(9)}, body, {}}});
      } else {
        n.body = body;
        n.body.push_back({ast::ForBlock{LoopCount{2}, {ast::Statement{ast::IfBlock{"x", body, {}}}}, {}}});
      }
      p.nodes.push_back(std::move(n));
    }
    const std::string text = ast::pretty_print(p);
    auto r = parse(text);
    ASSERT_TRUE(r.program) << text;
    EXPECT_TRUE(ast::structurally_equal(p, *r.program)) << text;
    EXPECT_EQ(ast::pretty_print(*r.program), text);
    auto c1 = classify(*r.program), c2 = classify(*r.program);
    EXPECT_EQ(c1.kind, c2.kind);
    EXPECT_EQ(c1.supported(), !c1.unsupported.has_value());
  }
}

}  // namespace
