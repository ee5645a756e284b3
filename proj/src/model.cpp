#include "hostforge/model.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hostforge {

YearTime::YearTime(double v) : value(v) {
  if (!std::isfinite(v)) throw std::invalid_argument("YearTime: not finite");
}

YearTime from_calendar(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    throw std::invalid_argument("invalid calendar date " + std::to_string(year) +
                                "-" + std::to_string(month) + "-" +
                                std::to_string(day));
  }
  return YearTime(year + (month - 1) / 12.0 + (day - 1) / 365.25);
}

namespace {

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

YearTime parse_date(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
    text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
    text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty date");

  // ISO form: a dash after the first character.
  const auto dash = text.find('-', 1);
  if (dash != std::string_view::npos) {
    const auto dash2 = text.find('-', dash + 1);
    int y = 0, m = 0, d = 0;
    if (dash2 == std::string_view::npos || !parse_int(text.substr(0, dash), y) ||
        !parse_int(text.substr(dash + 1, dash2 - dash - 1), m) ||
        !parse_int(text.substr(dash2 + 1), d)) {
      throw std::invalid_argument("invalid ISO date '" + std::string(text) + "'");
    }
    return from_calendar(y, m, d);
  }

  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw std::invalid_argument("invalid date '" + std::string(text) + "'");
  }
  return YearTime(v);
}

ExpLaw::ExpLaw(double a_, double b_) : a(a_), b(b_) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("ExpLaw: a must be positive");
  if (!std::isfinite(b)) throw std::invalid_argument("ExpLaw: b must be finite");
}

double ExpLaw::value(YearTime t) const noexcept {
  return a * std::exp(b * t.since_origin());
}

RatioChain::RatioChain(std::vector<int> levels_, std::vector<ExpLaw> laws_)
    : levels(std::move(levels_)), laws(std::move(laws_)) {
  if (levels.empty()) throw std::invalid_argument("RatioChain: no levels");
  if (laws.size() + 1 != levels.size())
    throw std::invalid_argument("RatioChain: need one law per adjacent level pair");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw std::invalid_argument("RatioChain: levels must be strictly increasing");
}

std::vector<double> ratio_chain_pmf(const RatioChain& chain, YearTime t) {
  // Work in log space so long chains with extreme ratios cannot underflow.
  std::vector<double> logw(chain.size(), 0.0);
  for (std::size_t i = 0; i < chain.laws.size(); ++i)
    logw[i + 1] = logw[i] - std::log(chain.laws[i].value(t));
  double top = logw[0];
  for (double w : logw) top = std::max(top, w);

  std::vector<double> pmf(chain.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    pmf[i] = std::exp(logw[i] - top);
    total += pmf[i];
  }
  for (double& p : pmf) p /= total;
  return pmf;
}

double pmf_mean(const RatioChain& chain, std::span<const double> pmf) {
  if (pmf.size() != chain.size()) throw std::invalid_argument("pmf_mean: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) m += chain.levels[i] * pmf[i];
  return m;
}

std::string_view to_string(DistFamilyTag tag) {
  switch (tag) {
    case DistFamilyTag::normal: return "normal";
    case DistFamilyTag::lognormal: return "lognormal";
    case DistFamilyTag::exponential: return "exponential";
    case DistFamilyTag::weibull: return "weibull";
    case DistFamilyTag::pareto: return "pareto";
    case DistFamilyTag::gamma: return "gamma";
    case DistFamilyTag::loggamma: return "loggamma";
  }
  return "unknown";
}

DistFamilyTag family_from_string(std::string_view name) {
  for (auto tag : {DistFamilyTag::normal, DistFamilyTag::lognormal,
                   DistFamilyTag::exponential, DistFamilyTag::weibull,
                   DistFamilyTag::pareto, DistFamilyTag::gamma,
                   DistFamilyTag::loggamma}) {
    if (to_string(tag) == name) return tag;
  }
  throw std::invalid_argument("unknown distribution family '" + std::string(name) + "'");
}

DistLaw::DistLaw(DistFamilyTag family_, ExpLaw mean_, ExpLaw variance_)
    : family(family_), mean_law(mean_), variance_law(variance_) {
  if (family != DistFamilyTag::normal && family != DistFamilyTag::lognormal)
    throw std::invalid_argument("DistLaw: family must be normal or lognormal");
}

Moments predicted_moments(const DistLaw& dist, YearTime t) {
  return {dist.mean_law.value(t), dist.variance_law.value(t)};
}

LognormalParams lognormal_params_from_moments(double mean, double variance) {
  if (!(mean > 0.0) || !(variance > 0.0) || !std::isfinite(mean) ||
      !std::isfinite(variance)) {
    throw std::domain_error("lognormal moments require positive mean and variance");
  }
  // log1p keeps precision when variance / mean^2 is tiny.
  const double s2 = std::log1p(variance / (mean * mean));
  return {std::log(mean) - 0.5 * s2, std::sqrt(s2)};
}

Moments lognormal_moments(LognormalParams p) {
  const double s2 = p.sigma * p.sigma;
  const double mean = std::exp(p.mu + 0.5 * s2);
  return {mean, std::expm1(s2) * mean * mean};
}

namespace {

SquareMatrix default_correlation() {
  // Ordered (per-core memory, Whetstone, Dhrystone).
  return SquareMatrix{{1.0, 0.250, 0.306}, {0.250, 1.0, 0.639}, {0.306, 0.639, 1.0}};
}

void validate_correlation(const SquareMatrix& r) {
  if (r.size() != CorrelationModel::kDim)
    throw std::invalid_argument("CorrelationModel: expected a 3x3 matrix");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r(i, i) != 1.0) throw std::invalid_argument("CorrelationModel: diagonal must be 1");
    for (std::size_t j = 0; j < r.size(); ++j)
      if (i != j && !(std::abs(r(i, j)) < 1.0))
        throw std::invalid_argument("CorrelationModel: off-diagonal outside (-1, 1)");
  }
}

}  // namespace

CorrelationModel::CorrelationModel() : CorrelationModel(default_correlation()) {}

CorrelationModel::CorrelationModel(const SquareMatrix& r) : r_(r) {
  validate_correlation(r_);
  l_ = cholesky(r_);
}

WeibullLaw::WeibullLaw(double k_, double lambda_) : k(k_), lambda(lambda_) {
  if (!(k > 0.0) || !(lambda > 0.0) || !std::isfinite(k) || !std::isfinite(lambda))
    throw std::invalid_argument("WeibullLaw: k and lambda must be positive");
}

ModelParams default_params() {
  ModelParams p;
  p.core_chain = RatioChain(kCoreLevels, {
                                             {3.369, -0.5004},
                                             {17.49, -0.3217},
                                             {12.8, -0.2377},
                                             {12, -0.2},
                                         });
  p.mem_chain = RatioChain(kMemLevelsMb, {
                                             {0.5829, -0.2517},
                                             {4.89, -0.1292},
                                             {0.3821, -0.1709},
                                             {3.98, -0.1367},
                                             {1.51, -0.0925},
                                             {4.951, -0.1008},
                                         });
  p.dhrystone = DistLaw(DistFamilyTag::normal, {2064, 0.1709}, {1.379e6, 0.3313});
  p.whetstone = DistLaw(DistFamilyTag::normal, {1179, 0.1157}, {3.237e5, 0.1057});
  p.disk = DistLaw(DistFamilyTag::lognormal, {31.59, 0.2691}, {2890, 0.5224});
  p.correlation = CorrelationModel(default_correlation());
  p.lifetime = WeibullLaw(0.58, 135);
  return p;
}

double expected_memory_mb(const ModelParams& params, YearTime t) {
  const auto cores = ratio_chain_pmf(params.core_chain, t);
  const auto mem = ratio_chain_pmf(params.mem_chain, t);
  return pmf_mean(params.core_chain, cores) * pmf_mean(params.mem_chain, mem);
}

}  // namespace hostforge
