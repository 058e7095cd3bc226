#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mvsp/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Multivariate state preparation from series approximations"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int qubit_cap = 0;

  const char* names[][2] = {
      {"approx", "Compute series coefficients and a convergence table"},
      {"synth", "Build the state-preparation circuit and count resources"},
      {"simulate", "Run the circuit on the state-vector simulator"},
      {"sample", "Draw measurement shots from the post-selected state"},
      {"analyze", "Reconstruct the density from counts and report figures of merit"},
  };
  std::vector<CLI::App*> subs;
  for (auto& [name, help] : names) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--seed", seed, "Sampling seed");
    sub->add_option("--qubit-cap", qubit_cap, "Simulator qubit cap")->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    mvsp::CommandOptions opt;
    if (sub->count("--out")) opt.out_dir = out;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--qubit-cap")) opt.qubit_cap = qubit_cap;
    return mvsp::run_command(sub->get_name(), config, opt, std::cout);
  }
  return 2;
}
