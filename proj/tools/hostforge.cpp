#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hostforge/commands.hpp"

using namespace hostforge;

namespace {

struct Flags {
  std::vector<std::string> dates;
  std::string from, to, cutoff;
  std::string scheme = "row";
  std::string model = "correlated";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> quota;
};

void add_common(CLI::App* cmd, RunConfig& cfg, Flags& f) {
  cmd->add_option("--seed", f.seed, "Random seed (derived from entropy and printed if absent)");
  cmd->add_option("-o,--output", cfg.output, "Output file (default: standard output)");
  cmd->add_flag("--strict", cfg.strict, "Exit with status 2 when warnings were emitted");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hostforge: host population models for volunteer computing"};
  app.require_subcommand(1);
  RunConfig cfg;
  Flags f;

  auto* gen = app.add_subcommand("generate", "Sample a host population at a date");
  add_common(gen, cfg, f);
  gen->add_option("--date", f.dates, "Date (YYYY-MM-DD or fractional year)")->required()->expected(1);
  gen->add_option("--count", cfg.count, "Number of hosts")->required();
  gen->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json", "jsonl"}));
  gen->add_option("--params", cfg.params_path, "Model parameter JSON (default: built-in)");
  gen->add_option("--model", f.model, "correlated, uncorrelated or grid")
      ->check(CLI::IsMember({"correlated", "uncorrelated", "grid"}));
  gen->add_option("--scheme", f.scheme, "Correlation construction: row or cholesky")
      ->check(CLI::IsMember({"row", "cholesky"}));

  auto* fit = app.add_subcommand("fit", "Fit model parameters to a host trace");
  add_common(fit, cfg, f);
  fit->add_option("-i,--input", cfg.inputs, "Trace file (CSV or JSON lines)")->required()->expected(1);
  fit->add_option("--format", cfg.format, "Trace format when not implied by extension")
      ->check(CLI::IsMember({"csv", "json", "jsonl"}));
  fit->add_option("--report", cfg.report, "Write the fit report JSON here");
  fit->add_option("--date", f.dates, "Sample dates (default: yearly)");
  fit->add_option("--lifetime-cutoff", f.cutoff, "Ignore hosts still seen after this date");
  fit->add_option("--ks-rounds", cfg.ks_rounds, "Subsampled KS rounds")->check(CLI::PositiveNumber);
  fit->add_option("--ks-subsample", cfg.ks_subsample, "Subsample size")->check(CLI::PositiveNumber);

  auto* pred = app.add_subcommand("predict", "Tabulate predicted distributions over a date range");
  add_common(pred, cfg, f);
  pred->add_option("--params", cfg.params_path, "Model parameter JSON (default: built-in)");
  pred->add_option("--date", f.dates, "Explicit dates (overrides the range)");
  pred->add_option("--from", f.from, "First date (default 2006)");
  pred->add_option("--to", f.to, "Last date (default 2014)");
  pred->add_option("--step", cfg.step_years, "Step in years");

  auto* sim = app.add_subcommand("simulate", "Compare allocation utility across host models");
  add_common(sim, cfg, f);
  sim->add_option("--date", f.dates, "Simulation dates (default 2010-09-01)");
  sim->add_option("--count", cfg.count, "Hosts per population")->required();
  sim->add_option("--params", cfg.params_path, "Model parameter JSON (default: built-in)");
  sim->add_option("--profiles", cfg.profiles_path, "Application profile JSON (default: built-in)");
  sim->add_option("--quota", f.quota, "Maximum hosts per application");
  sim->add_option("--report", cfg.report, "Write a JSON summary here");
  sim->add_option("--scheme", f.scheme, "Correlation construction: row or cholesky")
      ->check(CLI::IsMember({"row", "cholesky"}));

  auto* val = app.add_subcommand("validate", "Compare a generated population to actual data");
  add_common(val, cfg, f);
  val->add_option("inputs", cfg.inputs, "ACTUAL GENERATED")->required()->expected(2);
  val->add_option("--date", f.dates, "Snapshot date for trace inputs");
  val->add_option("--ks-rounds", cfg.ks_rounds, "Subsampled KS rounds")->check(CLI::PositiveNumber);
  val->add_option("--ks-subsample", cfg.ks_subsample, "Subsample size")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) cfg.subcommand = Subcommand::generate;
    else if (fit->parsed()) cfg.subcommand = Subcommand::fit;
    else if (pred->parsed()) cfg.subcommand = Subcommand::predict;
    else if (sim->parsed()) cfg.subcommand = Subcommand::simulate;
    else cfg.subcommand = Subcommand::validate;

    for (const auto& d : f.dates) cfg.dates.push_back(parse_date(d));
    if (!f.from.empty()) cfg.from = parse_date(f.from);
    if (!f.to.empty()) cfg.to = parse_date(f.to);
    if (!f.cutoff.empty()) cfg.lifetime_cutoff = parse_date(f.cutoff);
    cfg.scheme = scheme_from_string(f.scheme);
    cfg.model = population_model_from_string(f.model);
    cfg.quota = f.quota;
    if (f.seed) {
      cfg.seed = *f.seed;
    } else if (cfg.subcommand != Subcommand::predict) {
      std::random_device rd;
      cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
      std::cerr << "seed: " << cfg.seed << '\n';
    }
    return run_command(cfg, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
