// Synthetic host generation for a calendar date.
//
// Per host: cores come from the core ratio chain with their own uniform; a
// correlated normal triple drives per-core memory (through the normal CDF and
// the memory chain) and the two benchmark speeds; free disk is an independent
// log-normal draw. Total memory is cores * per-core memory.

#ifndef HOSTFORGE_SAMPLER_HPP_
#define HOSTFORGE_SAMPLER_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hostforge/model.hpp"
#include "hostforge/parallel.hpp"
#include "hostforge/rng.hpp"

namespace hostforge {

struct HostSpec {
  int cores = 1;
  int per_core_memory_mb = 256;
  std::int64_t memory_mb = 256;
  double whetstone_mips = 0.0;
  double dhrystone_mips = 0.0;
  double disk_gb = 0.0;

  friend bool operator==(const HostSpec&, const HostSpec&) = default;
};

using Normal3 = std::array<double, 3>;

/// L * v for lower-triangular L: the textbook construction whose output has
/// correlation matrix L * L^T.
Normal3 correlated_normals(const SquareMatrix& l, const Normal3& v);

/// Draws v from the stream and returns L * v.
Normal3 correlated_normals(const SquareMatrix& l, SeededStream& stream);

/// Row vector times factor, v * L, with each component divided by its
/// standard deviation so the marginals stay standard normal.
Normal3 row_correlated_normals(const SquareMatrix& l, const Normal3& v);

/// How the correlated triple is built from independent normals.
enum class CorrelationScheme {
  /// v * L with unit-variance rescaling. Reproduces the published
  /// generated-host correlation table; default.
  vector_times_factor,
  /// L * v. Reproduces R exactly.
  factor_times_vector,
};

std::string_view to_string(CorrelationScheme scheme);
CorrelationScheme scheme_from_string(std::string_view name);

/// Phi(z).
double standard_normal_cdf(double z);

/// Phi^{-1}(u) for u in (0, 1).
double standard_normal_quantile(double u);

/// Inverse-CDF pick, accumulating mass in ascending level order.
int sample_discrete(std::span<const int> levels, std::span<const double> pmf, double u);

/// Speeds below this floor are clamped to it.
inline constexpr double kMinBenchmarkMips = 1.0;

/// All random inputs consumed by one host.
struct HostDraw {
  double core_uniform = 0.5;
  Normal3 independent{};  // v, before correlation
  double disk_uniform = 0.5;
};

/// Date-specific quantities shared by every host generated at that date.
class HostSampler {
 public:
  HostSampler(const ModelParams& params, YearTime t,
              CorrelationScheme scheme = CorrelationScheme::vector_times_factor);

  [[nodiscard]] HostDraw draw(SeededStream& stream) const;

  /// Deterministic assembly from explicit draws.
  [[nodiscard]] HostSpec assemble(const HostDraw& d) const;

  /// Assembly from an already-correlated triple z.
  [[nodiscard]] HostSpec assemble_correlated(double core_uniform, const Normal3& z,
                                             double disk_uniform) const;

  [[nodiscard]] HostSpec sample(SeededStream& stream) const { return assemble(draw(stream)); }

  [[nodiscard]] YearTime date() const noexcept { return t_; }
  [[nodiscard]] const std::vector<double>& core_pmf() const noexcept { return core_pmf_; }
  [[nodiscard]] const std::vector<double>& mem_pmf() const noexcept { return mem_pmf_; }
  [[nodiscard]] Moments whetstone() const noexcept { return whet_; }
  [[nodiscard]] Moments dhrystone() const noexcept { return dhry_; }
  [[nodiscard]] LognormalParams disk() const noexcept { return disk_; }

 private:
  YearTime t_;
  CorrelationScheme scheme_;
  SquareMatrix l_;
  std::vector<int> core_levels_;
  std::vector<int> mem_levels_;
  std::vector<double> core_pmf_;
  std::vector<double> mem_pmf_;
  Moments whet_;
  Moments dhry_;
  LognormalParams disk_;
};

HostSpec generate_host(const ModelParams& params, YearTime t, SeededStream stream,
                       CorrelationScheme scheme = CorrelationScheme::vector_times_factor);

struct GenerateOptions {
  CorrelationScheme scheme = CorrelationScheme::vector_times_factor;
  Execution execution = Execution::parallel;
};

/// Host i is generated from SeededStream(seed, i).
std::vector<HostSpec> generate_population(const ModelParams& params, YearTime t,
                                          std::size_t n, std::uint64_t seed,
                                          const GenerateOptions& options = {});

/// lambda * (-ln(1 - u))^(1/k), in days.
double weibull_quantile(const WeibullLaw& law, double u);
double sample_lifetime(const WeibullLaw& law, SeededStream& stream);

// Population files.

inline constexpr std::string_view kPopulationCsvHeader =
    "cores,per_core_memory_mb,memory_mb,whetstone_mips,dhrystone_mips,disk_gb";

enum class PopulationFormat { csv, jsonl };

PopulationFormat population_format_from_string(std::string_view name);

void write_population(std::ostream& out, std::span<const HostSpec> hosts,
                      PopulationFormat format);

/// Throws std::runtime_error with the offending line number on bad input.
std::vector<HostSpec> read_population(std::istream& in, PopulationFormat format);

}  // namespace hostforge

#endif  // HOSTFORGE_SAMPLER_HPP_
