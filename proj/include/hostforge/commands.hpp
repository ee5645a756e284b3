// Subcommand implementations behind the hostforge executable. Each command
// takes a RunConfig and reports through the given streams so it can be
// driven from tests as well as from main().

#ifndef HOSTFORGE_COMMANDS_HPP_
#define HOSTFORGE_COMMANDS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hostforge/allocsim.hpp"
#include "hostforge/ingest.hpp"
#include "hostforge/json_io.hpp"
#include "hostforge/model.hpp"
#include "hostforge/sampler.hpp"
#include "hostforge/statfit.hpp"

namespace hostforge {

enum class Subcommand { generate, fit, predict, simulate, validate };

enum class PopulationModel { correlated, uncorrelated, grid };

std::string_view to_string(PopulationModel model);
PopulationModel population_model_from_string(std::string_view name);

struct RunConfig {
  Subcommand subcommand = Subcommand::generate;
  std::vector<YearTime> dates;
  std::optional<YearTime> from;
  std::optional<YearTime> to;
  double step_years = 1.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::string output;   // "" or "-" means standard output where allowed
  std::string report;   // secondary output (fit report, simulation summary)
  std::string format = "csv";
  std::string params_path;
  std::string profiles_path;
  CorrelationScheme scheme = CorrelationScheme::vector_times_factor;
  PopulationModel model = PopulationModel::correlated;
  std::optional<std::size_t> quota;
  std::optional<YearTime> lifetime_cutoff;
  std::size_t ks_rounds = 100;
  std::size_t ks_subsample = 50;
  /// Treat warnings as errors for the exit code.
  bool strict = false;
};

/// Unwritable/unreadable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flags or configuration files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exit codes: 0 success, 1 error, 2 warnings escalated by --strict.
int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Default parameters, or the document at `path` when nonempty.
ModelParams load_params(const std::string& path);

/// Shipped profiles, or the document at `path` when nonempty.
std::vector<AppProfile> load_profiles(const std::string& path);

std::vector<HostSpec> make_population(PopulationModel model, const ModelParams& params,
                                      YearTime t, std::size_t n, std::uint64_t seed,
                                      CorrelationScheme scheme);

// --- fitting pipeline -------------------------------------------------------

struct FitOptions {
  /// Empty: yearly dates from half a year after the earliest first_seen.
  std::vector<YearTime> dates;
  std::optional<YearTime> lifetime_cutoff;
  KsOptions ks;
};

struct FamilyScore {
  DistFamilyTag family = DistFamilyTag::normal;
  double mean_p = 0.0;  // averaged over sample dates
  std::size_t dates = 0;
};

struct FitOutcome {
  std::vector<YearTime> dates;
  std::size_t records = 0;
  std::size_t discarded = 0;
  std::vector<std::optional<FitReport>> core_laws;
  std::vector<std::optional<FitReport>> mem_laws;
  std::optional<FitReport> whetstone_mean, whetstone_variance;
  std::optional<FitReport> dhrystone_mean, dhrystone_variance;
  std::optional<FitReport> disk_mean, disk_variance;
  std::optional<SquareMatrix> correlation;
  std::optional<DistFamily> lifetime;
  /// Descending by mean_p.
  std::vector<FamilyScore> whetstone_ranking, dhrystone_ranking, disk_ranking;
  std::vector<std::string> warnings;

  /// ModelParams layout with explicit nulls for anything not fitted.
  [[nodiscard]] Json params_document() const;
  [[nodiscard]] Json report() const;
};

FitOutcome fit_trace(std::span<const TraceRecord> records, const FitOptions& options);

// --- prediction ---------------------------------------------------------------

/// CSV with one row per date: pmfs, means, and (mean, std) of speeds and disk.
void write_prediction(std::ostream& out, const ModelParams& params,
                      std::span<const YearTime> dates);

// --- simulation ---------------------------------------------------------------

struct SimulationRow {
  YearTime date;
  std::string app;
  std::string model;  // reference, correlated, uncorrelated, grid
  double total_utility = 0.0;
  double percent_difference = 0.0;
};

std::vector<SimulationRow> run_simulation(const ModelParams& params,
                                          std::span<const AppProfile> apps,
                                          std::span<const YearTime> dates, std::size_t n,
                                          std::uint64_t seed, std::optional<std::size_t> quota,
                                          CorrelationScheme scheme);

void write_simulation_csv(std::ostream& out, std::span<const SimulationRow> rows);

// --- validation ---------------------------------------------------------------

/// Either a population file or a trace file.
using HostData = std::variant<std::vector<HostSpec>, std::vector<TraceRecord>>;

/// Format detected from the first line.
HostData read_host_data(const std::string& path);

Json validation_report(const ResourceColumns& actual, const ResourceColumns& generated,
                       const KsOptions& ks);

}  // namespace hostforge

#endif  // HOSTFORGE_COMMANDS_HPP_
