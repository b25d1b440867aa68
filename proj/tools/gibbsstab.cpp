#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gibbsstab/experiment.hpp"

namespace {

using gstab::json;

// Reads and parses a JSON file; returns false with a message on failure.
bool load_json(const std::string& path, json& out) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "config error: cannot open " << path << '\n';
    return false;
  }
  try {
    out = json::parse(is);
  } catch (const json::parse_error& e) {
    std::cerr << "config error: " << path << ": " << e.what() << '\n';
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs samplers for linear hierarchical models with stability diagnostics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::string cell;
  std::string query;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "JSON config file");
    if (config_required) c->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Base seed (overrides the config)");
  };

  auto* run = app.add_subcommand("run", "Run Gibbs chains and write traces plus a summary");
  add_common(run, true);
  auto* table2 = app.add_subcommand("table2", "Classify all error pairs under P0 and P1");
  add_common(table2, false);
  table2->add_option("--cell", cell, "Run a single cell: f1,f2,P0|P1 (e.g. C,G,P0)");
  auto* oracle = app.add_subcommand("oracle", "Evaluate a quadrature-oracle query");
  oracle->add_option("--config", config_path, "Query JSON file");
  oracle->add_option("--query", query, "Inline query JSON");
  oracle->add_option("--out", out_dir, "Also write the result here");
  auto* diagnose = app.add_subcommand("diagnose", "Stability report for one model and kernel");
  add_common(diagnose, true);

  CLI11_PARSE(app, argc, argv);

  gstab::CliOverrides cli;
  if (!out_dir.empty()) cli.out_dir = out_dir;
  for (auto* sub : {run, table2, diagnose}) {
    if (sub->parsed() && sub->count("--seed") > 0) cli.seed = seed;
  }
  if (!cell.empty()) cli.cell = cell;

  json cfg = json::object();
  if (oracle->parsed()) {
    if (config_path.empty() == query.empty()) {
      std::cerr << "usage error: give exactly one of --config and --query\n";
      return gstab::kExitConfig;
    }
    if (!query.empty()) {
      try {
        cfg = json::parse(query);
      } catch (const json::parse_error& e) {
        std::cerr << "config error: --query: " << e.what() << '\n';
        return gstab::kExitConfig;
      }
    } else if (!load_json(config_path, cfg)) {
      return gstab::kExitConfig;
    }
    return gstab::cmd_oracle(cfg, cli, std::cout, std::cerr);
  }
  if (!config_path.empty() && !load_json(config_path, cfg)) return gstab::kExitConfig;
  if (run->parsed()) return gstab::cmd_run(cfg, cli, std::cout, std::cerr);
  if (table2->parsed()) return gstab::cmd_table2(cfg, cli, std::cout, std::cerr);
  return gstab::cmd_diagnose(cfg, cli, std::cout, std::cerr);
}
