#include "hostforge/statfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/pareto.hpp>
#include <boost/math/distributions/weibull.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace hostforge {

namespace {

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least two points");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelation("pearson: zero variance, correlation undefined");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

ResourceColumns columns_of(std::span<const HostSpec> hosts) {
  ResourceColumns out;
  for (auto& c : out.columns) c.reserve(hosts.size());
  for (const auto& h : hosts) {
    out.columns[0].push_back(h.cores);
    out.columns[1].push_back(static_cast<double>(h.memory_mb));
    out.columns[2].push_back(h.per_core_memory_mb);
    out.columns[3].push_back(h.whetstone_mips);
    out.columns[4].push_back(h.dhrystone_mips);
    out.columns[5].push_back(h.disk_gb);
  }
  return out;
}

SquareMatrix correlation_matrix(const ResourceColumns& data, Execution execution) {
  constexpr std::size_t n = ResourceColumns::kCount;
  SquareMatrix m = SquareMatrix::identity(n);
  std::array<std::pair<std::size_t, std::size_t>, n * (n - 1) / 2> cells{};
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) cells[c++] = {i, j};

  std::array<double, cells.size()> values{};
  const auto count = static_cast<std::int64_t>(cells.size());
  if (execution == Execution::serial) {
    for (std::int64_t k = 0; k < count; ++k) {
      const auto [i, j] = cells[k];
      values[k] = pearson(data.columns[i], data.columns[j]);
    }
  } else {
    // Errors are rethrown after the region; exceptions may not cross it.
    std::array<std::string, cells.size()> errors{};
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
    for (std::int64_t k = 0; k < count; ++k) {
      const auto [i, j] = cells[k];
      try {
        values[k] = pearson(data.columns[i], data.columns[j]);
      } catch (const std::exception& e) {
        errors[k] = e.what();
      }
    }
    for (const auto& e : errors)
      if (!e.empty()) throw UndefinedCorrelation(e);
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto [i, j] = cells[k];
    m(i, j) = values[k];
    m(j, i) = values[k];
  }
  return m;
}

FitReport fit_exp_law(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_exp_law: length mismatch");
  if (times.size() < 3) throw std::invalid_argument("fit_exp_law: need at least three points");

  const std::size_t n = times.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw std::domain_error("fit_exp_law: values must be positive");
    x[i] = times[i] - YearTime::kOrigin;
    y[i] = std::log(values[i]);
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_exp_law: all times are equal");

  FitReport rep;
  rep.n_points = n;
  if (syy == 0.0) {
    rep.law = ExpLaw(values[0], 0.0);
    rep.degenerate = true;
    return rep;
  }
  const double b = sxy / sxx;
  const double ln_a = my - b * mx;
  rep.law = ExpLaw(std::exp(ln_a), b);
  rep.r = pearson(x, y);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (ln_a + b * x[i]);
    ss += e * e;
  }
  rep.residual_rms = std::sqrt(ss / static_cast<double>(n));
  return rep;
}

double ks_statistic(std::span<const double> sorted, const Cdf& cdf) {
  if (sorted.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = static_cast<double>(i + 1) / n - f;
    const double below = f - static_cast<double>(i) / n;
    d = std::max({d, above, below});
  }
  return std::min(d, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
  if (n == 0) throw std::invalid_argument("ks_pvalue: n must be positive");
  if (!(d > 0.0)) return 1.0;
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = std::min(d, 1.0) * (sn + 0.12 + 0.11 / sn);

  constexpr double kTol = 1e-10;
  double p = 0.0;
  if (lambda < 1.18) {
    // The alternating series converges too slowly here; use the equivalent
    // theta-function form of the Kolmogorov CDF.
    const double c = -M_PI * M_PI / (8.0 * lambda * lambda);
    double cdf = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(c * odd * odd);
      cdf += term;
      if (term < kTol) break;
    }
    p = 1.0 - std::sqrt(2.0 * M_PI) / lambda * cdf;
  } else {
    const double c = -2.0 * lambda * lambda;
    double sign = 1.0;
    for (int k = 1; k < 100; ++k) {
      const double term = std::exp(c * k * k);
      p += sign * term;
      if (term < kTol) break;
      sign = -sign;
    }
    p *= 2.0;
  }
  return std::clamp(p, 0.0, 1.0);
}

namespace {

/// Floyd's algorithm: m distinct indices from [0, n).
std::vector<std::size_t> choose_subset(std::size_t n, std::size_t m, SeededStream& stream) {
  std::vector<std::size_t> out;
  out.reserve(m);
  if (m == n) {
    out.resize(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  std::unordered_set<std::size_t> seen;
  seen.reserve(2 * m);
  for (std::size_t j = n - m; j < n; ++j) {
    const auto t = static_cast<std::size_t>(stream.below(j + 1));
    const std::size_t pick = seen.contains(t) ? j : t;
    seen.insert(pick);
    out.push_back(pick);
  }
  return out;
}

double ks_round(std::span<const double> data, const Cdf& cdf, std::size_t subsample,
                std::uint64_t seed, std::uint64_t round) {
  SeededStream stream(seed, round);
  const auto idx = choose_subset(data.size(), subsample, stream);
  std::vector<double> sample(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) sample[i] = data[idx[i]];
  std::sort(sample.begin(), sample.end());
  return ks_pvalue(ks_statistic(sample, cdf), sample.size());
}

}  // namespace

double subsampled_ks(std::span<const double> data, const Cdf& cdf, const KsOptions& options) {
  if (options.rounds == 0 || options.subsample == 0)
    throw std::invalid_argument("subsampled_ks: rounds and subsample must be positive");
  if (data.size() < options.subsample)
    throw std::invalid_argument("subsampled_ks: insufficient data (" +
                                std::to_string(data.size()) + " < " +
                                std::to_string(options.subsample) + ")");
  std::vector<double> p(options.rounds);
  const auto rounds = static_cast<std::int64_t>(options.rounds);
  if (options.execution == Execution::serial) {
    for (std::int64_t r = 0; r < rounds; ++r)
      p[r] = ks_round(data, cdf, options.subsample, options.seed, static_cast<std::uint64_t>(r));
  } else {
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t r = 0; r < rounds; ++r)
      p[r] = ks_round(data, cdf, options.subsample, options.seed, static_cast<std::uint64_t>(r));
  }
  // Summed in round order so the result does not depend on scheduling.
  return std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
}

// ---------------------------------------------------------------------------
// Distribution families

double DistFamily::cdf(double x) const {
  namespace bm = boost::math;
  if (degenerate) return x >= point ? 1.0 : 0.0;
  const double a = params[0];
  const double b = params[1];
  switch (tag) {
    case DistFamilyTag::normal:
      return bm::cdf(bm::normal_distribution<>(a, std::sqrt(b)), x);
    case DistFamilyTag::lognormal:
      return x <= 0.0 ? 0.0 : bm::cdf(bm::lognormal_distribution<>(a, b), x);
    case DistFamilyTag::exponential:
      return x <= 0.0 ? 0.0 : -std::expm1(-a * x);
    case DistFamilyTag::weibull:
      return x <= 0.0 ? 0.0 : bm::cdf(bm::weibull_distribution<>(a, b), x);
    case DistFamilyTag::pareto:
      return x <= a ? 0.0 : 1.0 - std::pow(a / x, b);
    case DistFamilyTag::gamma:
      return x <= 0.0 ? 0.0 : bm::cdf(bm::gamma_distribution<>(a, b), x);
    case DistFamilyTag::loggamma:
      return x <= 1.0 ? 0.0 : bm::cdf(bm::gamma_distribution<>(a, b), std::log(x));
  }
  return 0.0;
}

double DistFamily::quantile(double u) const {
  namespace bm = boost::math;
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must be in (0, 1)");
  if (degenerate) return point;
  const double a = params[0];
  const double b = params[1];
  switch (tag) {
    case DistFamilyTag::normal:
      return bm::quantile(bm::normal_distribution<>(a, std::sqrt(b)), u);
    case DistFamilyTag::lognormal:
      return bm::quantile(bm::lognormal_distribution<>(a, b), u);
    case DistFamilyTag::exponential:
      return -std::log1p(-u) / a;
    case DistFamilyTag::weibull:
      return bm::quantile(bm::weibull_distribution<>(a, b), u);
    case DistFamilyTag::pareto:
      return a * std::pow(1.0 - u, -1.0 / b);
    case DistFamilyTag::gamma:
      return bm::quantile(bm::gamma_distribution<>(a, b), u);
    case DistFamilyTag::loggamma:
      return std::exp(bm::quantile(bm::gamma_distribution<>(a, b), u));
  }
  return 0.0;
}

std::size_t DistFamily::param_count() const noexcept {
  return tag == DistFamilyTag::exponential ? 1 : 2;
}

std::array<const char*, 2> DistFamily::param_names() const noexcept {
  switch (tag) {
    case DistFamilyTag::normal: return {"mean", "variance"};
    case DistFamilyTag::lognormal: return {"mu", "sigma"};
    case DistFamilyTag::exponential: return {"rate", ""};
    case DistFamilyTag::weibull: return {"k", "lambda"};
    case DistFamilyTag::pareto: return {"x_min", "alpha"};
    case DistFamilyTag::gamma: return {"shape", "scale"};
    case DistFamilyTag::loggamma: return {"shape", "scale"};
  }
  return {"", ""};
}

bool in_support(DistFamilyTag family, std::span<const double> data) {
  switch (family) {
    case DistFamilyTag::normal:
      return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
    case DistFamilyTag::loggamma:
      return std::all_of(data.begin(), data.end(),
                         [](double v) { return v > 1.0 && std::isfinite(v); });
    default:
      return std::all_of(data.begin(), data.end(),
                         [](double v) { return v > 0.0 && std::isfinite(v); });
  }
}

namespace {

constexpr int kMaxIterations = 200;
constexpr double kRelTol = 1e-8;

DistFamily degenerate_fit(DistFamilyTag tag, double value) {
  DistFamily f;
  f.tag = tag;
  f.degenerate = true;
  f.point = value;
  f.params = {value, 0.0};
  return f;
}

/// Safeguarded Newton for a root of a monotone function. `increasing` gives
/// the sign convention; `lo` is a known lower bound of the root.
template <typename F>
double solve_monotone(F&& f_and_slope, double start, bool increasing, const char* what) {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  double k = start;
  for (int it = 0; it < kMaxIterations; ++it) {
    const auto [f, df] = f_and_slope(k);
    if (!std::isfinite(f) || !std::isfinite(df)) break;
    if (f == 0.0) return k;
    const bool root_above = increasing ? f < 0.0 : f > 0.0;
    if (root_above)
      lo = k;
    else
      hi = k;
    double next = k - f / df;
    if (!(next > lo && next < hi)) {
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * k;
    }
    if (std::abs(next - k) <= kRelTol * k) return next;
    k = next;
  }
  throw ConvergenceError(std::string(what) + ": no convergence after 200 iterations");
}

DistFamily fit_weibull(std::span<const double> data) {
  const std::size_t n = data.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = std::log(data[i]);
  const double ymax = *std::max_element(y.begin(), y.end());
  const double ybar = mean_of(y);
  double var = 0.0;
  for (double v : y) var += (v - ybar) * (v - ybar);
  var /= static_cast<double>(n);
  if (var == 0.0) return degenerate_fit(DistFamilyTag::weibull, data[0]);

  // Profile score in k, with weights scaled by exp(-k * ymax) to avoid overflow.
  auto score = [&](double k) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (double v : y) {
      const double w = std::exp(k * (v - ymax));
      s0 += w;
      s1 += w * v;
      s2 += w * v * v;
    }
    const double m1 = s1 / s0;
    const double g = m1 - 1.0 / k - ybar;
    const double dg = (s2 / s0 - m1 * m1) + 1.0 / (k * k);
    return std::pair{g, dg};
  };
  const double k0 = M_PI / std::sqrt(6.0 * var);
  const double k = solve_monotone(score, k0, true, "weibull MLE");

  double s0 = 0.0;
  for (double v : y) s0 += std::exp(k * (v - ymax));
  const double lambda = std::exp(ymax + std::log(s0 / static_cast<double>(n)) / k);
  DistFamily f;
  f.tag = DistFamilyTag::weibull;
  f.params = {k, lambda};
  return f;
}

/// Shape and scale of a gamma fitted to `x` (all positive).
std::array<double, 2> gamma_mle(std::span<const double> x, const char* what) {
  const double m = mean_of(x);
  double mean_log = 0.0;
  for (double v : x) mean_log += std::log(v);
  mean_log /= static_cast<double>(x.size());
  const double s = std::log(m) - mean_log;
  if (!(s > 0.0)) return {0.0, 0.0};

  auto score = [s](double k) {
    const double f = std::log(k) - boost::math::digamma(k) - s;
    const double df = 1.0 / k - boost::math::trigamma(k);
    return std::pair{f, df};
  };
  const double k0 = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
  const double k = solve_monotone(score, k0, false, what);
  return {k, m / k};
}

}  // namespace

DistFamily mle_fit(DistFamilyTag family, std::span<const double> data) {
  if (data.empty()) throw std::domain_error("mle_fit: empty data");
  if (!in_support(family, data))
    throw std::domain_error("mle_fit: data outside the support of " +
                            std::string(to_string(family)));
  // Checked on the raw values: log-space sums of equal inputs can round to a
  // spurious nonzero spread.
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  if (*lo == *hi && family != DistFamilyTag::exponential) return degenerate_fit(family, *lo);
  const double n = static_cast<double>(data.size());
  DistFamily f;
  f.tag = family;
  switch (family) {
    case DistFamilyTag::normal: {
      const double m = mean_of(data);
      double ss = 0.0;
      for (double v : data) ss += (v - m) * (v - m);
      if (ss == 0.0) return degenerate_fit(family, m);
      f.params = {m, ss / n};
      return f;
    }
    case DistFamilyTag::lognormal: {
      double m = 0.0;
      for (double v : data) m += std::log(v);
      m /= n;
      double ss = 0.0;
      for (double v : data) ss += (std::log(v) - m) * (std::log(v) - m);
      if (ss == 0.0) return degenerate_fit(family, data[0]);
      f.params = {m, std::sqrt(ss / n)};
      return f;
    }
    case DistFamilyTag::exponential:
      f.params = {1.0 / mean_of(data), 0.0};
      return f;
    case DistFamilyTag::weibull:
      return fit_weibull(data);
    case DistFamilyTag::pareto: {
      const double xm = *std::min_element(data.begin(), data.end());
      double s = 0.0;
      for (double v : data) s += std::log(v / xm);
      if (s == 0.0) return degenerate_fit(family, xm);
      f.params = {xm, n / s};
      return f;
    }
    case DistFamilyTag::gamma: {
      const auto p = gamma_mle(data, "gamma MLE");
      if (p[0] == 0.0) return degenerate_fit(family, data[0]);
      f.params = p;
      return f;
    }
    case DistFamilyTag::loggamma: {
      std::vector<double> logs(data.size());
      std::transform(data.begin(), data.end(), logs.begin(), [](double v) { return std::log(v); });
      const auto p = gamma_mle(logs, "log-gamma MLE");
      if (p[0] == 0.0) return degenerate_fit(family, data[0]);
      f.params = p;
      return f;
    }
  }
  throw std::invalid_argument("mle_fit: unknown family");
}

BestFit best_fit(std::span<const double> data, std::span<const DistFamilyTag> families,
                 const KsOptions& options) {
  if (families.empty()) throw std::invalid_argument("best_fit: no candidate families");
  BestFit out;
  for (const auto tag : families) {
    const std::string name(to_string(tag));
    if (!in_support(tag, data)) {
      out.notes.push_back(name + ": skipped, data outside support");
      continue;
    }
    try {
      RankedFit r;
      r.fit = mle_fit(tag, data);
      // Every family is scored on the same subsets.
      r.mean_p = subsampled_ks(data, [&r](double x) { return r.fit.cdf(x); }, options);
      if (r.fit.degenerate) out.notes.push_back(name + ": degenerate (zero spread) fit");
      out.ranked.push_back(r);
    } catch (const std::exception& e) {
      out.notes.push_back(name + ": " + e.what());
    }
  }
  if (out.ranked.empty()) throw std::runtime_error("best_fit: no family could be fitted");
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const RankedFit& a, const RankedFit& b) { return a.mean_p > b.mean_p; });
  return out;
}

}  // namespace hostforge
