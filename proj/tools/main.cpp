#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "report.hpp"

using namespace curvlab;

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

// Command-line flags that mirror configuration keys.
constexpr Flag kFlags[] = {
    {"--domain", "model.domain", "circle or torus"},
    {"--algebra", "model.algebra", "su2, su3, abelianN or a structure-constant file"},
    {"--s", "model.s", "Sobolev exponent"},
    {"--m0", "model.m0", "mass parameter"},
    {"--cutoff", "model.cutoff", "mode cutoff N"},
    {"--cutoffs", "ricci.cutoffs", "comma-separated trace cutoffs"},
    {"--vectors", "ricci.vectors", "comma-separated test vectors, e.g. cos1@0,sin2@1 or lowest:5"},
    {"--seed", "run.seed", "random seed"},
    {"--output", "run.output", "output directory"},
    {"--tolerance", "run.tolerance", "assertion tolerance override"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvlab: curvature experiments on truncated Sobolev loop groups"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> assignments;
  std::map<std::string, std::string> flag_values;

  const std::vector<std::pair<std::string, cli::Command>> commands{
      {"biinvariant-check", cli::biinvariant_check}, {"order-probe", cli::order_probe},
      {"identity-check", cli::identity_check},       {"circle-ricci", cli::circle_ricci},
      {"torus-ricci", cli::torus_ricci},             {"config-scan", cli::config_scan},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--set", assignments, "override a configuration key (key=value), repeatable");
    for (const auto& f : kFlags) sub->add_option(f.name, flag_values[f.key], f.help);
    subs[name] = sub;
  }
  subs["biinvariant-check"]->description("curvature identities for bi-invariant metrics on su(2), su(3)");
  subs["order-probe"]->description("decay slope of z -> R(x,y)z on the circle and torus");
  subs["identity-check"]->description("G-form identities and formula equivalence");
  subs["circle-ricci"]->description("two-step regularized Ricci on the circle and the ungrouped trace");
  subs["torus-ricci"]->description("residue Ricci on the torus, Einstein ratio, plane-wave check");
  subs["config-scan"]->description("configuration groups: Green's matrix, curvature, lower-bound scan");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = ExperimentConfig::load(config_path);
    for (const auto& a : assignments) cfg.set_assignment(a);
    for (const auto& [key, value] : flag_values)
      if (!value.empty()) cfg.set(key, value);
    for (const auto& [name, fn] : commands)
      if (subs[name]->parsed()) return fn(cfg);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
