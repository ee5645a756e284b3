// Cobb-Douglas utility allocation and baseline population models.
//
// Utility of host H for application A:
//   Y = cores^alpha * memory_mb^beta * dhrystone^gamma * whetstone^delta * disk_gb^epsilon

#ifndef HOSTFORGE_ALLOCSIM_HPP_
#define HOSTFORGE_ALLOCSIM_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hostforge/model.hpp"
#include "hostforge/parallel.hpp"
#include "hostforge/sampler.hpp"

namespace hostforge {

struct AppProfile {
  std::string name;
  double alpha = 0.0;    // cores
  double beta = 0.0;     // memory
  double gamma = 0.0;    // dhrystone
  double delta = 0.0;    // whetstone
  double epsilon = 0.0;  // disk

  /// Throws std::invalid_argument for negative or non-finite exponents.
  void validate() const;

  friend bool operator==(const AppProfile&, const AppProfile&) = default;
};

/// SETI@home, Folding@home, Climate Prediction, P2P.
std::vector<AppProfile> default_app_profiles();

/// {"applications": [{"name": ..., "alpha": ..., ...}, ...]}
std::vector<AppProfile> read_app_profiles(std::istream& in);
void write_app_profiles(std::ostream& out, std::span<const AppProfile> apps);

/// Evaluated in log space. Throws std::domain_error for a nonpositive field.
double utility(const AppProfile& app, const HostSpec& host);

/// utilities[a][h] for every app and host.
std::vector<std::vector<double>> utility_matrix(std::span<const AppProfile> apps,
                                                std::span<const HostSpec> hosts,
                                                Execution execution = Execution::parallel);

struct Assignment {
  static constexpr int kUnassigned = -1;
  /// owner[h] is the app index that claimed host h.
  std::vector<int> owner;
  std::vector<double> totals;
  std::vector<std::size_t> counts;
  /// Hosts in claim order, as (app, host).
  std::vector<std::pair<int, std::size_t>> claims;
};

/// Apps take turns in list order; each claims the unassigned host with the
/// highest utility for it (lowest index on ties). Stops when hosts run out or
/// every app has reached its quota.
Assignment greedy_round_robin(std::span<const AppProfile> apps, std::span<const HostSpec> hosts,
                              std::optional<std::size_t> quota_per_app = std::nullopt,
                              Execution execution = Execution::parallel);

/// Independent marginals: no cross-resource correlation by construction.
std::vector<HostSpec> uncorrelated_population(const ModelParams& params, YearTime t,
                                              std::size_t n, std::uint64_t seed,
                                              Execution execution = Execution::parallel);

/// Grid-style baseline: log-normal speeds and memory evaluated at a creation
/// date set back by a lifetime-based age, and free disk following the
/// exponential growth of the disk mean law at the evaluation date, with
/// median-one log-normal jitter.
std::vector<HostSpec> grid_population(const ModelParams& params, YearTime t, std::size_t n,
                                      std::uint64_t seed,
                                      Execution execution = Execution::parallel);

struct AppDifference {
  std::string app;
  double actual_total = 0.0;
  double model_total = 0.0;
  double percent_difference = 0.0;
};

/// Runs the allocation on each population with all apps and reports
/// 100 * |U_model - U_actual| / U_actual per app. Throws std::invalid_argument
/// for an empty population or app list.
std::vector<AppDifference> compare_models(std::span<const HostSpec> actual,
                                          std::span<const HostSpec> modeled,
                                          std::span<const AppProfile> apps,
                                          std::optional<std::size_t> quota_per_app = std::nullopt);

}  // namespace hostforge

#endif  // HOSTFORGE_ALLOCSIM_HPP_
