// Command-line front end for the equation-system language.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "vset/cli.hpp"

namespace {

bool read_file(const std::string& path, std::string& out, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot open '" << path << "'\n";
    return false;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"set equations over the nested-tuple universe"};
  app.require_subcommand(1);

  std::string file, var, var2, format = "set", check_name, demo_kind;
  unsigned depth = 3;

  CLI::App* solve_cmd =
      app.add_subcommand("solve", "solve a system and expand one variable");
  solve_cmd->add_option("FILE", file, "equation file")->required();
  solve_cmd->add_option("--var", var, "variable to expand")->required();
  solve_cmd->add_option("--depth", depth, "expansion depth")->required();
  solve_cmd->add_option("--format", format, "set or json")
      ->check(CLI::IsMember({"set", "json"}));

  CLI::App* eq_cmd =
      app.add_subcommand("eq", "decide equality of two variables");
  eq_cmd->add_option("FILE", file, "equation file")->required();
  eq_cmd->add_option("V1", var, "first variable")->required();
  eq_cmd->add_option("V2", var2, "second variable")->required();

  CLI::App* check_cmd =
      app.add_subcommand("check", "run a built-in brute-force check");
  check_cmd->add_option("NAME", check_name, "prop3 or lemma31")->required();

  CLI::App* demo_cmd = app.add_subcommand("demo", "built-in demonstrations");
  demo_cmd->add_option("KIND", demo_kind, "demo kind (stream)")->required();
  demo_cmd->add_option("--depth", depth, "maximum expansion depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return vset::kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) {
      std::string text;
      if (!read_file(file, text, std::cerr)) return vset::kExitUsage;
      vset::OutputFormat fmt = format == "json" ? vset::OutputFormat::kJson
                                                : vset::OutputFormat::kSet;
      return vset::run_solve(text, var, depth, fmt, std::cout, std::cerr);
    }
    if (eq_cmd->parsed()) {
      std::string text;
      if (!read_file(file, text, std::cerr)) return vset::kExitUsage;
      return vset::run_eq(text, var, var2, std::cout, std::cerr);
    }
    if (check_cmd->parsed()) {
      return vset::run_check(check_name, std::cout, std::cerr);
    }
    if (demo_cmd->parsed()) {
      if (demo_kind != "stream") {
        std::cerr << "error: unknown demo '" << demo_kind
                  << "' (available: stream)\n";
        return vset::kExitUsage;
      }
      return vset::run_demo_stream(depth, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return vset::kExitUsage;
  }
  return vset::kExitUsage;
}
