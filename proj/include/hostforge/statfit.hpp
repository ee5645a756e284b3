// Statistical estimation: exponential-law fitting, Pearson correlation,
// maximum-likelihood fits for seven families, and Kolmogorov-Smirnov scoring
// averaged over random subsamples.

#ifndef HOSTFORGE_STATFIT_HPP_
#define HOSTFORGE_STATFIT_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hostforge/model.hpp"
#include "hostforge/parallel.hpp"
#include "hostforge/sampler.hpp"

namespace hostforge {

class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Product-moment correlation. Throws UndefinedCorrelation when either
/// series has zero variance, std::invalid_argument on length mismatch or
/// fewer than two points.
double pearson(std::span<const double> x, std::span<const double> y);

/// Six resource columns in the fixed order
/// (cores, memory, mem/core, whetstone, dhrystone, disk).
struct ResourceColumns {
  static constexpr std::size_t kCount = 6;
  static constexpr std::array<const char*, kCount> kNames{
      "cores", "memory", "mem_per_core", "whetstone", "dhrystone", "disk"};

  std::array<std::vector<double>, kCount> columns;

  [[nodiscard]] std::size_t rows() const noexcept { return columns[0].size(); }
};

ResourceColumns columns_of(std::span<const HostSpec> hosts);

/// Symmetric, unit diagonal.
SquareMatrix correlation_matrix(const ResourceColumns& data,
                                Execution execution = Execution::parallel);

struct FitReport {
  ExpLaw law;
  double r = 0.0;
  std::size_t n_points = 0;
  double residual_rms = 0.0;
  /// Constant input: b = 0 and r is reported as 0.
  bool degenerate = false;
};

/// Least squares through (t - 2006, ln value). Needs at least three points;
/// nonpositive values throw std::domain_error.
FitReport fit_exp_law(std::span<const double> times, std::span<const double> values);

using Cdf = std::function<double(double)>;

/// Sup distance between the empirical CDF of an ascending sample and cdf.
double ks_statistic(std::span<const double> sorted, const Cdf& cdf);

/// Asymptotic Kolmogorov p-value with the small-sample correction
/// lambda = D (sqrt(n) + 0.12 + 0.11 / sqrt(n)).
double ks_pvalue(double d, std::size_t n);

struct KsOptions {
  std::size_t rounds = 100;
  std::size_t subsample = 50;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;
};

/// Mean p-value over rounds, each testing a subset drawn without replacement.
double subsampled_ks(std::span<const double> data, const Cdf& cdf, const KsOptions& options);

/// A fitted member of one of the seven families. Parameter meaning:
///   normal (mean, variance), lognormal (mu, sigma), exponential (rate),
///   weibull (k, lambda), pareto (x_min, alpha), gamma (shape, scale),
///   loggamma (shape, scale) of ln(x).
struct DistFamily {
  DistFamilyTag tag = DistFamilyTag::normal;
  std::array<double, 2> params{};
  /// Zero-spread input; the CDF is a unit step at `point`.
  bool degenerate = false;
  double point = 0.0;

  [[nodiscard]] double cdf(double x) const;
  [[nodiscard]] double quantile(double u) const;
  [[nodiscard]] std::size_t param_count() const noexcept;
  [[nodiscard]] std::array<const char*, 2> param_names() const noexcept;
};

inline constexpr std::array<DistFamilyTag, 7> kAllFamilies{
    DistFamilyTag::normal, DistFamilyTag::lognormal, DistFamilyTag::exponential,
    DistFamilyTag::weibull, DistFamilyTag::pareto,   DistFamilyTag::gamma,
    DistFamilyTag::loggamma};

/// True when every value lies in the family's support.
bool in_support(DistFamilyTag family, std::span<const double> data);

/// Maximum-likelihood fit. Throws std::domain_error for out-of-support or
/// empty data and ConvergenceError when an iterative solve stalls.
DistFamily mle_fit(DistFamilyTag family, std::span<const double> data);

struct RankedFit {
  DistFamily fit;
  double mean_p = 0.0;
};

struct BestFit {
  std::vector<RankedFit> ranked;  // descending mean_p
  std::vector<std::string> notes;
};

/// Fits each family and ranks by subsampled KS mean p-value. Throws
/// std::runtime_error when no family could be fitted.
BestFit best_fit(std::span<const double> data, std::span<const DistFamilyTag> families,
                 const KsOptions& options = {});

}  // namespace hostforge

#endif  // HOSTFORGE_STATFIT_HPP_
