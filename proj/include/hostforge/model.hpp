// Host resource model: exponential time laws, ratio chains, and the default
// parameter set. Everything here is deterministic; randomness lives in
// sampler.hpp.

#ifndef HOSTFORGE_MODEL_HPP_
#define HOSTFORGE_MODEL_HPP_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hostforge/linalg.hpp"

namespace hostforge {

/// Calendar time as fractional years (2010.667 is roughly Sep 1, 2010).
struct YearTime {
  double value = 2006.0;

  static constexpr double kOrigin = 2006.0;
  static constexpr double kFittedEnd = 2014.0;

  constexpr YearTime() = default;
  explicit YearTime(double v);

  /// Outside the range the laws were fitted or predicted for.
  [[nodiscard]] bool is_extrapolated() const noexcept {
    return value < kOrigin || value > kFittedEnd;
  }
  [[nodiscard]] double since_origin() const noexcept { return value - kOrigin; }

  friend bool operator==(YearTime, YearTime) = default;
  friend auto operator<=>(YearTime, YearTime) = default;
};

/// year + (month - 1) / 12 + (day - 1) / 365.25
YearTime from_calendar(int year, int month, int day);

/// Accepts "YYYY-MM-DD" or a fractional year such as "2010.667".
/// Throws std::invalid_argument on anything else.
YearTime parse_date(std::string_view text);

/// a * exp(b * (t - 2006))
struct ExpLaw {
  double a = 1.0;
  double b = 0.0;

  ExpLaw() = default;
  ExpLaw(double a_, double b_);

  [[nodiscard]] double value(YearTime t) const noexcept;

  friend bool operator==(const ExpLaw&, const ExpLaw&) = default;
};

inline double exp_law_eval(const ExpLaw& law, YearTime t) noexcept {
  return law.value(t);
}

/// Discrete levels linked by adjacent-level ratio laws:
/// laws[i](t) = weight(levels[i]) / weight(levels[i + 1]).
struct RatioChain {
  std::vector<int> levels;
  std::vector<ExpLaw> laws;

  RatioChain() = default;
  RatioChain(std::vector<int> levels_, std::vector<ExpLaw> laws_);

  [[nodiscard]] std::size_t size() const noexcept { return levels.size(); }

  friend bool operator==(const RatioChain&, const RatioChain&) = default;
};

/// Probability of each level at time t; sums to one.
std::vector<double> ratio_chain_pmf(const RatioChain& chain, YearTime t);

/// Sum of level * probability.
double pmf_mean(const RatioChain& chain, std::span<const double> pmf);

enum class DistFamilyTag {
  normal,
  lognormal,
  exponential,
  weibull,
  pareto,
  gamma,
  loggamma,
};

std::string_view to_string(DistFamilyTag tag);
DistFamilyTag family_from_string(std::string_view name);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance each follow an exponential law. Only normal and
/// lognormal are meaningful here.
struct DistLaw {
  DistFamilyTag family = DistFamilyTag::normal;
  ExpLaw mean_law;
  ExpLaw variance_law;

  DistLaw() = default;
  DistLaw(DistFamilyTag family_, ExpLaw mean_, ExpLaw variance_);

  friend bool operator==(const DistLaw&, const DistLaw&) = default;
};

Moments predicted_moments(const DistLaw& dist, YearTime t);

/// Underlying-normal parameters of a log-normal with the given arithmetic
/// mean and variance.
struct LognormalParams {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Throws std::domain_error for nonpositive mean or variance.
LognormalParams lognormal_params_from_moments(double mean, double variance);

/// Arithmetic mean and variance of a log-normal.
Moments lognormal_moments(LognormalParams p);

/// Correlation between (per-core memory, Whetstone, Dhrystone) and its
/// lower-triangular Cholesky factor.
class CorrelationModel {
 public:
  static constexpr std::size_t kDim = 3;

  CorrelationModel();
  explicit CorrelationModel(const SquareMatrix& r);

  [[nodiscard]] const SquareMatrix& r() const noexcept { return r_; }
  [[nodiscard]] const SquareMatrix& l() const noexcept { return l_; }

  friend bool operator==(const CorrelationModel& x, const CorrelationModel& y) {
    return x.r_ == y.r_;
  }

 private:
  SquareMatrix r_;
  SquareMatrix l_;
};

/// Host lifetime law. lambda is in days.
struct WeibullLaw {
  double k = 1.0;
  double lambda = 1.0;

  WeibullLaw() = default;
  WeibullLaw(double k_, double lambda_);

  friend bool operator==(const WeibullLaw&, const WeibullLaw&) = default;
};

struct ModelParams {
  RatioChain core_chain;
  RatioChain mem_chain;
  DistLaw dhrystone;
  DistLaw whetstone;
  DistLaw disk;
  CorrelationModel correlation;
  WeibullLaw lifetime;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline const std::vector<int> kCoreLevels{1, 2, 4, 8, 16};
inline const std::vector<int> kMemLevelsMb{256, 512, 768, 1024, 1536, 2048, 4096};

ModelParams default_params();

/// Law-derived expected total memory in MB (cores and per-core memory are
/// independent in the model).
double expected_memory_mb(const ModelParams& params, YearTime t);

}  // namespace hostforge

#endif  // HOSTFORGE_MODEL_HPP_
