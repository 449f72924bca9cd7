// Command-line driver: `cbt check`, `cbt repl`, `cbt eval`.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cbt/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"proof checker for a small extensional type theory, with a finite-set oracle"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "check .cbt modules, one report line per declaration");
  std::vector<std::string> paths;
  cbt::CheckFlags flags;
  check->add_option("files", paths, "modules to check")->required();
  check->add_flag("--oracle", flags.oracle, "cross-check accepted judgments in the set model");
  check->add_flag("--dump-core", flags.dump_core, "print elaborated core under each ok line");
  check->add_flag("--no-prelude", flags.no_prelude, "start from an empty scope");

  auto* repl = app.add_subcommand("repl", "interactive session (:t :nf :eval :assume :eq :q)");

  auto* eval = app.add_subcommand("eval", "print the set-model value of a closed definition");
  std::string eval_path, defn;
  eval->add_option("file", eval_path, "module to check first")->required();
  eval->add_option("--defn", defn, "definition to evaluate")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (check->parsed()) return cbt::run_check(paths, flags, std::cout);
  if (repl->parsed()) return cbt::run_repl(std::cin, std::cout);
  if (eval->parsed()) return cbt::eval_defn(eval_path, defn, std::cout);
  return 2;
}
