// Command-line front end: `hipta analyze` runs pointer analyses over IR
// files; `hipta gen` prints a generated random program.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hipta/cli_run.hpp"
#include "hipta/generator.hpp"

int main(int argc, char** argv) {
  CLI::App app{"compositional pointer analysis with selective context sensitivity"};
  app.require_subcommand(1);

  hipta::CliOptions opts;
  auto* analyze = app.add_subcommand("analyze", "analyze IR files");
  analyze->add_option("inputs", opts.inputs, "IR files or directories")->required();
  analyze->add_option("--mode", opts.mode, "comci | hi:<k> | hia | topci | inline:<k|inf> | all");
  analyze->add_flag("--assert", opts.checkAssertions, "evaluate alias assertions");
  analyze->add_option("--check-oracle", opts.checkOracle,
                      "compare against the inlining oracle (<k> or inf)");
  analyze->add_option("--metrics", opts.metricsPath, "append metrics lines to this file");
  analyze->add_option("--callgraph", opts.callgraphPath, "write call-graph edges to this file");
  analyze->add_option("--report", opts.reportPath, "write points-to facts to this file");
  analyze->add_option("--summaries", opts.summariesPath, "write summary dumps to this file");
  analyze->add_option("--depth-bound", opts.depthBound, "access-path depth bound D");
  analyze->add_option("--unroll", opts.unroll, "recursion unroll factor n");
  analyze->add_option("--dispatch-bound", opts.dispatchBound, "permutation guard m");
  analyze->add_option("--pending-cap", opts.pendingCap, "pending-set cap per summary");
  analyze->add_option("--jobs", opts.jobs, "parallel jobs across input files");
  analyze->add_flag("--all-procs", opts.allProcs, "summarize unreachable procedures too");

  std::uint64_t seed = 0;
  hipta::GenParams gp;
  auto* gen = app.add_subcommand("gen", "generate a random program");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--procs", gp.maxProcs, "max procedures");
  gen->add_option("--depth", gp.maxCallDepth, "max call depth");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    if (const char* env = std::getenv("HI_SEED"); env && !gen->count("--seed"))
      seed = std::strtoull(env, nullptr, 10);
    std::cout << hipta::prettyPrint(hipta::generateProgram(seed, gp));
    return 0;
  }
  return hipta::runCli(opts, std::cout, std::cerr);
}
