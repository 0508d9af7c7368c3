// weldlab: experiment runner for welding extensions, boundary geometry and
// modulus computations.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "weldlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"weldlab: conformal welding extension laboratory"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::string out = ".";
    std::uint64_t seed = 42;
    std::optional<int> grid;
  };
  Flags flags;
  const char* commands[][2] = {
      {"extend", "extend a welding to the plane and report its distortion"},
      {"classify", "evaluate the generalized-quasidisk condition for a control function"},
      {"boundary", "three point envelope, LC probes and duality check for a curve"},
      {"modulus", "ring / continua modulus by Dirichlet energy"},
      {"report", "reproduction tables across the pipeline"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON configuration file");
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--seed", flags.seed, "random seed")->capture_default_str();
    sub->add_option("--grid", flags.grid, "grid resolution override");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    nlohmann::json user;
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) throw std::runtime_error("cannot open config: " + flags.config);
      user = nlohmann::json::parse(in);
    }
    weldlab::CommandContext ctx;
    ctx.out_dir = flags.out;
    ctx.seed = flags.seed;
    ctx.grid = flags.grid;
    weldlab::run_command(command, user, ctx);
    std::cout << command << ": wrote " << ctx.out_dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "weldlab " << command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
