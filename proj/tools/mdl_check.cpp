#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mdl/report.hpp"

int main(int argc, char** argv) {
  using namespace mdl::report;
  CLI::App app{"Static deadlock checker for synchronous message-passing programs"};
  app.name("mdl-check");

  Options opt;
  std::string format = "text";
  std::string file;
  app.add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--oracle", opt.oracle, "Cross-check the verdict by rendezvous simulation");
  app.add_option("--max-assignments", opt.max_assignments, "Largest number of condition assignments to enumerate")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-unroll", opt.max_unroll, "Largest fully unrolled loop program (messages) the oracle runs")
      ->check(CLI::PositiveNumber);
  app.add_flag("--trace", opt.trace, "Print the oracle's rendezvous trace");
  app.add_option("file", file, "Program file (.mdl)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : ExitCode::usage;
  }
  opt.format = format == "json" ? Format::json : Format::text;

  std::ifstream in(file, std::ios::binary);
  if (!in) {
    std::cerr << file << ": cannot open file\n";
    return ExitCode::usage;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  Report rep;
  try {
    rep = analyze(buf.str(), file, opt);
  } catch (const std::exception& e) {
    std::cerr << file << ": internal error: " << e.what() << "\n";
    return ExitCode::disagreement;
  }
  for (const auto& d : rep.diagnostics) std::cerr << d << "\n";
  if (opt.format == Format::json)
    std::cout << rep.json.dump(2) << "\n";
  else
    std::cout << rep.text;
  return rep.exit_code;
}
