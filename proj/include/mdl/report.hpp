#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdl/ast.hpp"
#include "mdl/c0.hpp"
#include "mdl/classify.hpp"
#include "mdl/l0.hpp"
#include "mdl/match.hpp"
#include "mdl/oracle.hpp"
#include "mdl/parser.hpp"
#include "mdl/s0.hpp"

namespace mdl::report {

using Json = nlohmann::ordered_json;

enum ExitCode : int { ok = 0, deadlock = 1, usage = 2, unsupported = 3, disagreement = 4 };

enum class Format { text, json };

struct Options {
  Format format = Format::text;
  bool oracle = false;
  bool trace = false;
  std::uint64_t max_assignments = default_max_assignments;
  std::uint64_t max_unroll = 100000;
};

inline constexpr std::size_t max_listed_assignments = 32;
inline constexpr std::size_t max_traced_runs = 32;

enum class OracleCheck { agreement, disagreement, not_applicable };

inline const char* to_string(OracleCheck c) {
  switch (c) {
    case OracleCheck::agreement: return "Agreement";
    case OracleCheck::disagreement: return "Disagreement";
    default: return "NotApplicable";
  }
}

struct Report {
  int exit_code = ok;
  Json json;
  std::string text;
  std::vector<std::string> diagnostics;  // formatted, for stderr
};

// ---------------------------------------------------------------------------
// JSON fragments

inline Json site_json(const SeqSet& set, MsgRef r) {
  const Message& m = at(set, r);
  return Json{{"node", set[r.seq].host}, {"index", r.index},      {"line", m.site.line},
              {"col", m.site.col},       {"message", describe(m)}};
}

inline Json sites_json(const SeqSet& set, const std::vector<MsgRef>& refs) {
  Json a = Json::array();
  for (auto r : refs) a.push_back(site_json(set, r));
  return a;
}

inline Json s0_json(const SeqSet& set, const S0Verdict& v) {
  Json j;
  j["status"] = to_string(v.status);
  j["witness"] = {{"kind", to_string(v.witness.kind)}, {"sites", sites_json(set, v.witness.messages)}};
  Json blocks = Json::array();
  for (std::size_t b = 0; b < v.blocks.size(); ++b)
    blocks.push_back({{"block", b}, {"hosts", v.blocks[b].hosts}, {"status", to_string(v.blocks[b].status)}});
  j["blocks"] = blocks;
  if (v.graph)
    j["graph"] = {{"vertices", v.graph->vertices},
                  {"program_edges", v.graph->program_edges},
                  {"match_edges", v.graph->match_edges}};
  else
    j["graph"] = nullptr;
  return j;
}

inline Json counts_json(const std::vector<LoopCount>& counts) {
  Json a = Json::array();
  for (const auto& c : counts) {
    if (c)
      a.push_back(*c);
    else
      a.push_back("inf");
  }
  return a;
}

inline Json channel_json(const ChannelRatio& c) {
  return {{"from", c.channel.from},      {"to", c.channel.to},          {"method", to_string(c.channel.method)},
          {"per_iteration", c.left},     {"partner_per_iteration", c.right}, {"ratio", to_string(c.ratio())}};
}

inline Json l0_json(const LoopSet& set, const L0Verdict& v) {
  const SeqSet body_set = bodies(set);
  Json j;
  j["status"] = to_string(v.status);
  Json witness{{"kind", "None"}, {"block", nullptr}, {"sites", Json::array()}};
  Json blocks = Json::array();
  for (std::size_t b = 0; b < v.blocks.size(); ++b) {
    const L0Block& blk = v.blocks[b];
    Json jb;
    jb["block"] = b;
    jb["hosts"] = blk.hosts;
    jb["counts"] = counts_json(blk.counts);
    jb["table"] = blk.table ? Json(blk.table->periods) : Json(nullptr);
    jb["status"] = to_string(blk.status);
    jb["reason"] = to_string(blk.reason);
    if (blk.table_failure) {
      Json f{{"kind", blk.table_failure->kind == TableFailure::Kind::pair ? "pair" : "cycle"},
             {"hosts", blk.table_failure->hosts}};
      if (blk.table_failure->conflict)
        f["channels"] = {channel_json(blk.table_failure->conflict->first),
                         channel_json(blk.table_failure->conflict->second)};
      jb["table_failure"] = f;
    } else {
      jb["table_failure"] = nullptr;
    }
    jb["scale"] = blk.scale ? Json(*blk.scale) : Json(nullptr);
    jb["hyper_period_verdict"] =
        blk.hyper_period_verdict ? s0_json(blk.hyper_period, *blk.hyper_period_verdict) : Json(nullptr);
    blocks.push_back(jb);

    if (v.witness_block && *v.witness_block == b) {
      witness["kind"] = to_string(blk.reason);
      witness["block"] = b;
      if (blk.reason == L0Block::Reason::unpartnered) witness["sites"] = sites_json(body_set, blk.unpartnered);
      if (blk.reason == L0Block::Reason::hyper_period)
        witness["sites"] = sites_json(blk.hyper_period, blk.hyper_period_verdict->witness.messages);
    }
  }
  j["witness"] = witness;
  j["blocks"] = blocks;
  return j;
}

inline Json assignment_json(const CondAssignment& a) {
  Json j = Json::object();
  for (const auto& [k, v] : a) j[k] = v;
  return j;
}

inline Json c0_json(const CondSet& set, const C0Verdict& v) {
  Json j;
  j["static_status"] = to_string(v.static_status);
  j["body_verdict"] = s0_json(bodies(set), v.body_verdict);
  j["increment_deadlock_free"] = v.increment_deadlock_free;
  Json inc = Json::array();
  for (const auto& s : v.increment) {
    Json msgs = Json::array();
    for (const auto& m : s.messages) msgs.push_back(describe(m));
    inc.push_back({{"node", s.host}, {"messages", msgs}});
  }
  j["increment"] = inc;
  j["symbols"] = v.symbols;
  j["enumerated"] = v.enumerated;
  j["deadlocking_count"] = v.deadlocking_count ? Json(*v.deadlocking_count) : Json(nullptr);
  Json as = Json::array();
  for (std::size_t i = 0; i < v.deadlocking_assignments.size() && i < max_listed_assignments; ++i)
    as.push_back(assignment_json(v.deadlocking_assignments[i]));
  j["deadlocking_assignments"] = as;
  j["assignments_truncated"] = v.deadlocking_assignments.size() > max_listed_assignments;
  const Replacement rep = build_replacement(set);
  Json sites = Json::array();
  for (const auto& cs : v.check_sites) {
    std::string check;
    for (const auto& r : rep)
      if (r.host == cs.host) check = check_expression(r);
    sites.push_back({{"node", cs.host},
                     {"line", cs.site.line},
                     {"col", cs.site.col},
                     {"conditions", cs.conditions},
                     {"check", check}});
  }
  j["check_sites"] = sites;
  return j;
}

// ---------------------------------------------------------------------------
// Text fragments

inline std::string site_line(const SeqSet& set, MsgRef r) {
  const Message& m = at(set, r);
  return "node " + std::to_string(set[r.seq].host) + " at " + to_string(m.site) + "  " + describe(m);
}

inline std::string hosts_text(const std::vector<NodeId>& hosts) {
  std::string s = "{";
  for (std::size_t i = 0; i < hosts.size(); ++i) s += (i ? ", " : "") + std::to_string(hosts[i]);
  return s + "}";
}

inline void s0_text(std::ostringstream& os, const SeqSet& set, const S0Verdict& v, const std::string& indent) {
  os << indent << "status: " << to_string(v.status) << "\n";
  if (v.witness.kind == S0Witness::Kind::cycle)
    os << indent << "witness: dependency cycle of " << v.witness.messages.size() << " messages\n";
  else if (v.witness.kind == S0Witness::Kind::unmatched)
    os << indent << "witness: " << v.witness.messages.size() << " unmatched message(s)\n";
  for (auto r : v.witness.messages) os << indent << "  " << site_line(set, r) << "\n";
  if (v.graph)
    os << indent << "graph: " << v.graph->vertices << " vertices, " << v.graph->program_edges << " program edges, "
       << v.graph->match_edges << " match edges\n";
  for (std::size_t b = 0; b < v.blocks.size(); ++b)
    os << indent << "block " << b << " " << hosts_text(v.blocks[b].hosts) << ": " << to_string(v.blocks[b].status)
       << "\n";
}

inline void l0_text(std::ostringstream& os, const LoopSet& set, const L0Verdict& v) {
  const SeqSet body_set = bodies(set);
  os << "status: " << to_string(v.status) << "\n";
  for (std::size_t b = 0; b < v.blocks.size(); ++b) {
    const L0Block& blk = v.blocks[b];
    os << "block " << b << " " << hosts_text(blk.hosts) << ": " << to_string(blk.status);
    if (blk.reason != L0Block::Reason::none) os << " (" << to_string(blk.reason) << ")";
    os << "\n  counts:";
    for (const auto& c : blk.counts) os << " " << mdl::to_string(c);
    if (blk.table) {
      os << "\n  period table: ";
      for (std::size_t k = 0; k < blk.table->periods.size(); ++k) os << (k ? ":" : "") << blk.table->periods[k];
    }
    os << "\n";
    for (auto r : blk.unpartnered) os << "  no partner: " << site_line(body_set, r) << "\n";
    if (blk.table_failure) {
      os << "  inconsistent ratios among nodes " << hosts_text(blk.table_failure->hosts) << "\n";
      if (blk.table_failure->conflict) {
        const auto& c = *blk.table_failure->conflict;
        os << "    channel " << c.first.channel.from << "->" << c.first.channel.to << " needs "
           << to_string(c.first.ratio()) << ", channel " << c.second.channel.from << "->" << c.second.channel.to
           << " needs " << to_string(c.second.ratio()) << "\n";
      }
    }
    if (blk.hyper_period_verdict) {
      os << "  hyper-period prefix:\n";
      s0_text(os, blk.hyper_period, *blk.hyper_period_verdict, "    ");
    }
  }
}

inline void c0_text(std::ostringstream& os, const CondSet& set, const C0Verdict& v) {
  os << "status: " << to_string(v.static_status) << "\n";
  os << "sequent:\n";
  s0_text(os, bodies(set), v.body_verdict, "  ");
  os << "increment: " << (v.increment_deadlock_free ? "deadlock-free" : "DEADLOCKS (internal defect)") << "\n";
  for (const auto& s : v.increment) {
    os << "  node " << s.host << ":";
    for (const auto& m : s.messages) os << " " << describe(m) << ";";
    os << "\n";
  }
  if (v.deadlocking_count)
    os << "deadlocking assignments: " << *v.deadlocking_count << " of 2^" << v.symbols.size() << "\n";
  else
    os << "deadlocking assignments: some of 2^" << v.symbols.size() << "\n";
  for (std::size_t i = 0; i < v.deadlocking_assignments.size() && i < max_listed_assignments; ++i) {
    os << "  ";
    bool first = true;
    for (const auto& [k, val] : v.deadlocking_assignments[i]) {
      os << (first ? "" : " ") << k << "=" << (val ? "true" : "false");
      first = false;
    }
    os << "\n";
  }
  if (v.deadlocking_assignments.size() > max_listed_assignments)
    os << "  ... " << v.deadlocking_assignments.size() - max_listed_assignments << " more\n";
  if (!v.check_sites.empty()) os << "runtime checks:\n";
  const Replacement rep = build_replacement(set);
  for (const auto& cs : v.check_sites)
    for (const auto& r : rep)
      if (r.host == cs.host) os << "  node " << cs.host << " at " << to_string(cs.site) << ": " << check_expression(r) << "\n";
}

// ---------------------------------------------------------------------------
// Oracle cross-checks

struct OracleRun {
  std::string label;
  SeqSet set;
  oracle::OracleResult result;
};

struct OracleOutcome {
  OracleCheck check = OracleCheck::not_applicable;
  std::string detail;
  std::vector<OracleRun> runs;
};

inline OracleOutcome oracle_s0(const SeqSet& set, const S0Verdict& v) {
  OracleOutcome o;
  auto r = oracle::simulate(set);
  const bool agree = r.deadlocked() == (v.status == Status::deadlock);
  o.runs.push_back({"program", set, std::move(r)});
  o.check = agree ? OracleCheck::agreement : OracleCheck::disagreement;
  return o;
}

inline OracleOutcome oracle_l0(const LoopSet& set, const L0Verdict& v, std::uint64_t max_unroll) {
  OracleOutcome o;
  bool all_agree = true, all_checked = true;
  const Partition part = association_partition(bodies(set));
  for (std::size_t b = 0; b < v.blocks.size(); ++b) {
    const L0Block& blk = v.blocks[b];
    LoopSet block;
    for (auto i : part.blocks[b]) block.push_back(set[i]);
    bool finite = std::all_of(block.begin(), block.end(), [](const auto& s) { return s.count.has_value(); });
    std::uint64_t total = 0;
    if (finite)
      for (const auto& s : block) total += std::min<std::uint64_t>(*s.count, max_unroll + 1) * s.body.length();
    std::string label = "block " + std::to_string(b);
    SeqSet run_set;
    if (finite && total <= max_unroll) {
      run_set = expand_all(block);
      label += " full expansion";
    } else if (blk.hyper_period_verdict) {
      run_set = blk.hyper_period;
      label += " hyper-period prefix";
    } else {
      all_checked = false;
      continue;
    }
    auto r = oracle::simulate(run_set);
    all_agree = all_agree && r.deadlocked() == (blk.status == Status::deadlock);
    o.runs.push_back({label, std::move(run_set), std::move(r)});
  }
  if (!all_agree)
    o.check = OracleCheck::disagreement;
  else if (all_checked)
    o.check = OracleCheck::agreement;
  else
    o.detail = "some blocks have unbounded loops without a hyper-period";
  return o;
}

inline OracleOutcome oracle_c0(const CondSet& set, const C0Verdict& v) {
  OracleOutcome o;
  if (!v.enumerated) {
    o.detail = "assignment count exceeds the enumeration cap";
    return o;
  }
  const Replacement rep = build_replacement(set);
  bool agree = v.increment_deadlock_free && v.characterization_mismatches.empty();
  std::size_t next = 0;
  const std::uint64_t n = std::uint64_t{1} << v.symbols.size();
  for (std::uint64_t idx = 0; idx < n; ++idx) {
    CondAssignment a = assignment_at(v.symbols, idx);
    const bool listed = next < v.deadlocking_assignments.size() && v.deadlocking_assignments[next] == a;
    if (listed) ++next;
    auto r = oracle::simulate_conditional(set, a);
    auto run = instantiate(rep, a);
    auto rr = oracle::simulate(run.program);
    const bool replacement_deadlocks = !run.check_fired.empty() || rr.deadlocked();
    agree = agree && r.deadlocked() == listed && replacement_deadlocks == listed;
    if (o.runs.size() < max_traced_runs) {
      std::string label = "assignment";
      for (const auto& [k, val] : a) label += " " + k + "=" + (val ? "true" : "false");
      o.runs.push_back({label, project(set, a), std::move(r)});
    }
  }
  o.check = agree ? OracleCheck::agreement : OracleCheck::disagreement;
  return o;
}

// ---------------------------------------------------------------------------

inline std::vector<Diagnostic> tag_warnings(const SeqSet& set) {
  std::vector<Diagnostic> out;
  const MatchResult m = match_pairs(set);
  for (const auto& p : tag_mismatches(set, m)) {
    const Message& s = at(set, p.send);
    const Message& r = at(set, p.recv);
    out.push_back({Severity::warning, diag::tag_mismatch,
                   "matched pair disagrees on tag: send at " + to_string(s.site) + " has '" + *s.tag +
                       "', recv has '" + *r.tag + "'",
                   r.site});
  }
  return out;
}

// Analyzes one program text. Never throws for well-formed options.
inline Report analyze(const std::string& source, const std::string& file, const Options& opt) {
  Report rep;
  Json j;
  j["file"] = file;
  std::ostringstream text;
  text << file << ": ";

  auto finish = [&](std::vector<Diagnostic> diags) {
    Json d = Json::array();
    for (const auto& x : diags) {
      rep.diagnostics.push_back(format(x, file));
      d.push_back(rep.diagnostics.back());
    }
    j["diagnostics"] = d;
    rep.json = j;
    rep.text = text.str();
    return rep;
  };

  ParseResult parsed = parse(source);
  std::vector<Diagnostic> diags = parsed.diagnostics;
  if (!parsed.program || has_errors(diags)) {
    j["model"] = nullptr;
    j["status"] = nullptr;
    j["verdict"] = nullptr;
    j["oracle_check"] = nullptr;
    text << "parse failed\n";
    rep.exit_code = usage;
    return finish(diags);
  }

  const Classification cls = classify(*parsed.program);
  if (!cls.supported()) {
    diags.push_back(*cls.unsupported);
    j["model"] = "Unsupported";
    j["status"] = nullptr;
    j["verdict"] = nullptr;
    j["oracle_check"] = nullptr;
    text << "model Unsupported\n" << cls.unsupported->message << "\n";
    rep.exit_code = unsupported;
    return finish(diags);
  }

  const ModelKind kind = *cls.kind;
  j["model"] = to_string(kind);
  text << "model " << to_string(kind) << "\n";
  std::optional<OracleOutcome> orc;
  bool defect = false;
  const bool run_oracle = opt.oracle || opt.trace;

  if (kind == ModelKind::s0) {
    const SeqSet set = to_seq_set(*parsed.program);
    for (auto& w : tag_warnings(set)) diags.push_back(w);
    const S0Verdict v = detect_deadlock_s0(set);
    j["status"] = to_string(v.status);
    j["verdict"] = s0_json(set, v);
    s0_text(text, set, v, "");
    rep.exit_code = v.status == Status::deadlock ? deadlock : ok;
    if (run_oracle) orc = oracle_s0(set, v);
  } else if (kind == ModelKind::l0) {
    const LoopSet set = to_loop_set(*parsed.program);
    for (auto& w : tag_warnings(bodies(set))) diags.push_back(w);
    const L0Verdict v = detect_deadlock_l0(set);
    j["status"] = to_string(v.status);
    j["verdict"] = l0_json(set, v);
    l0_text(text, set, v);
    rep.exit_code = v.status == Status::deadlock ? deadlock : ok;
    if (run_oracle) orc = oracle_l0(set, v, opt.max_unroll);
  } else {
    const CondSet set = to_cond_set(*parsed.program);
    for (auto& w : tag_warnings(bodies(set))) diags.push_back(w);
    const C0Verdict v = detect_deadlock_c0(set, opt.max_assignments);
    j["status"] = to_string(v.static_status);
    j["verdict"] = c0_json(set, v);
    c0_text(text, set, v);
    rep.exit_code = v.static_status == C0Status::conditionally_safe ? ok : deadlock;
    defect = !v.increment_deadlock_free || !v.characterization_mismatches.empty();
    if (run_oracle) orc = oracle_c0(set, v);
  }

  if (orc) {
    j["oracle_check"] = to_string(orc->check);
    text << "oracle: " << to_string(orc->check);
    if (!orc->detail.empty()) text << " (" << orc->detail << ")";
    text << "\n";
    if (orc->check == OracleCheck::disagreement) rep.exit_code = disagreement;
  } else {
    j["oracle_check"] = nullptr;
  }
  if (defect) {
    text << "internal check failed: handshake or assignment characterization disagrees\n";
    rep.exit_code = disagreement;
  }
  if (opt.trace && orc) {
    Json runs = Json::array();
    for (const auto& run : orc->runs) {
      const std::string t = oracle::format_trace(run.set, run.result);
      text << "# " << run.label << "\n" << t;
      Json lines = Json::array();
      std::istringstream is(t);
      for (std::string line; std::getline(is, line);) lines.push_back(line);
      runs.push_back({{"run", run.label}, {"lines", lines}});
    }
    j["trace"] = runs;
  }
  return finish(diags);
}

}  // namespace mdl::report
