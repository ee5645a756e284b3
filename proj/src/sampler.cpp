#include "hostforge/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include "json.hpp"

#include "hostforge/csv.hpp"

namespace hostforge {

double SeededStream::normal() { return standard_normal_quantile(uniform_open()); }

Normal3 correlated_normals(const SquareMatrix& l, const Normal3& v) {
  if (l.size() != 3) throw std::invalid_argument("correlated_normals: need a 3x3 factor");
  Normal3 z{};
  for (std::size_t i = 0; i < 3; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j <= i; ++j) s += l(i, j) * v[j];
    z[i] = s;
  }
  return z;
}

Normal3 correlated_normals(const SquareMatrix& l, SeededStream& stream) {
  Normal3 v{};
  for (double& x : v) x = stream.normal();
  return correlated_normals(l, v);
}

Normal3 row_correlated_normals(const SquareMatrix& l, const Normal3& v) {
  if (l.size() != 3) throw std::invalid_argument("row_correlated_normals: need a 3x3 factor");
  Normal3 z{};
  for (std::size_t j = 0; j < 3; ++j) {
    double s = 0.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      s += v[i] * l(i, j);
      norm2 += l(i, j) * l(i, j);
    }
    z[j] = s / std::sqrt(norm2);
  }
  return z;
}

std::string_view to_string(CorrelationScheme scheme) {
  switch (scheme) {
    case CorrelationScheme::vector_times_factor: return "row";
    case CorrelationScheme::factor_times_vector: return "cholesky";
  }
  return "unknown";
}

CorrelationScheme scheme_from_string(std::string_view name) {
  if (name == "row") return CorrelationScheme::vector_times_factor;
  if (name == "cholesky") return CorrelationScheme::factor_times_vector;
  throw std::invalid_argument("unknown correlation scheme '" + std::string(name) +
                              "' (expected row or cholesky)");
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

double standard_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal quantile needs u in (0, 1)");
  return -M_SQRT2 * boost::math::erfc_inv(2.0 * u);
}

int sample_discrete(std::span<const int> levels, std::span<const double> pmf, double u) {
  if (levels.size() != pmf.size() || levels.empty())
    throw std::invalid_argument("sample_discrete: levels and pmf must match and be nonempty");
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    if (pmf[i] <= 0.0) continue;
    last_positive = i;
    cumulative += pmf[i];
    if (u < cumulative) return levels[i];
  }
  // Rounding left the total a hair below u.
  return levels[last_positive];
}

HostSampler::HostSampler(const ModelParams& params, YearTime t, CorrelationScheme scheme)
    : t_(t),
      scheme_(scheme),
      l_(params.correlation.l()),
      core_levels_(params.core_chain.levels),
      mem_levels_(params.mem_chain.levels),
      core_pmf_(ratio_chain_pmf(params.core_chain, t)),
      mem_pmf_(ratio_chain_pmf(params.mem_chain, t)),
      whet_(predicted_moments(params.whetstone, t)),
      dhry_(predicted_moments(params.dhrystone, t)) {
  const Moments d = predicted_moments(params.disk, t);
  disk_ = lognormal_params_from_moments(d.mean, d.variance);
}

HostDraw HostSampler::draw(SeededStream& stream) const {
  HostDraw d;
  d.core_uniform = stream.uniform();
  for (double& x : d.independent) x = stream.normal();
  d.disk_uniform = stream.uniform_open();
  return d;
}

HostSpec HostSampler::assemble(const HostDraw& d) const {
  const Normal3 z = scheme_ == CorrelationScheme::vector_times_factor
                        ? row_correlated_normals(l_, d.independent)
                        : correlated_normals(l_, d.independent);
  return assemble_correlated(d.core_uniform, z, d.disk_uniform);
}

HostSpec HostSampler::assemble_correlated(double core_uniform, const Normal3& z,
                                          double disk_uniform) const {
  HostSpec h;
  h.cores = sample_discrete(core_levels_, core_pmf_, core_uniform);
  h.per_core_memory_mb = sample_discrete(mem_levels_, mem_pmf_, standard_normal_cdf(z[0]));
  h.memory_mb = static_cast<std::int64_t>(h.cores) * h.per_core_memory_mb;
  h.whetstone_mips =
      std::max(kMinBenchmarkMips, whet_.mean + z[1] * std::sqrt(whet_.variance));
  h.dhrystone_mips =
      std::max(kMinBenchmarkMips, dhry_.mean + z[2] * std::sqrt(dhry_.variance));
  h.disk_gb = std::exp(disk_.mu + disk_.sigma * standard_normal_quantile(disk_uniform));
  return h;
}

HostSpec generate_host(const ModelParams& params, YearTime t, SeededStream stream,
                       CorrelationScheme scheme) {
  return HostSampler(params, t, scheme).sample(stream);
}

std::vector<HostSpec> generate_population(const ModelParams& params, YearTime t,
                                          std::size_t n, std::uint64_t seed,
                                          const GenerateOptions& options) {
  const HostSampler sampler(params, t, options.scheme);
  std::vector<HostSpec> hosts(n);
  const auto count = static_cast<std::int64_t>(n);
  if (options.execution == Execution::serial) {
    for (std::int64_t i = 0; i < count; ++i) {
      SeededStream stream(seed, static_cast<std::uint64_t>(i));
      hosts[i] = sampler.sample(stream);
    }
  } else {
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t i = 0; i < count; ++i) {
      SeededStream stream(seed, static_cast<std::uint64_t>(i));
      hosts[i] = sampler.sample(stream);
    }
  }
  return hosts;
}

double weibull_quantile(const WeibullLaw& law, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw std::domain_error("weibull_quantile: u must be in [0, 1)");
  return law.lambda * std::pow(-std::log1p(-u), 1.0 / law.k);
}

double sample_lifetime(const WeibullLaw& law, SeededStream& stream) {
  return weibull_quantile(law, stream.uniform_open());
}

PopulationFormat population_format_from_string(std::string_view name) {
  if (name == "csv") return PopulationFormat::csv;
  if (name == "json" || name == "jsonl") return PopulationFormat::jsonl;
  throw std::invalid_argument("unknown population format '" + std::string(name) + "'");
}

void write_population(std::ostream& out, std::span<const HostSpec> hosts,
                      PopulationFormat format) {
  char buf[256];
  if (format == PopulationFormat::csv) {
    out << kPopulationCsvHeader << '\n';
    for (const auto& h : hosts) {
      std::snprintf(buf, sizeof buf, "%d,%d,%lld,%.15g,%.15g,%.15g\n", h.cores,
                    h.per_core_memory_mb, static_cast<long long>(h.memory_mb),
                    h.whetstone_mips, h.dhrystone_mips, h.disk_gb);
      out << buf;
    }
    return;
  }
  for (const auto& h : hosts) {
    std::snprintf(buf, sizeof buf,
                  "{\"cores\":%d,\"per_core_memory_mb\":%d,\"memory_mb\":%lld,"
                  "\"whetstone_mips\":%.15g,\"dhrystone_mips\":%.15g,\"disk_gb\":%.15g}\n",
                  h.cores, h.per_core_memory_mb, static_cast<long long>(h.memory_mb),
                  h.whetstone_mips, h.dhrystone_mips, h.disk_gb);
    out << buf;
  }
}

namespace {

[[noreturn]] void bad_line(std::size_t line, const std::string& what) {
  throw std::runtime_error("population line " + std::to_string(line) + ": " + what);
}

void check_host(const HostSpec& h, std::size_t line) {
  if (h.cores <= 0 || h.per_core_memory_mb <= 0)
    bad_line(line, "cores and per-core memory must be positive");
  if (h.memory_mb != static_cast<std::int64_t>(h.cores) * h.per_core_memory_mb)
    bad_line(line, "memory_mb must equal cores * per_core_memory_mb");
  if (!(h.whetstone_mips > 0.0) || !(h.dhrystone_mips > 0.0) || !(h.disk_gb > 0.0))
    bad_line(line, "speeds and disk must be positive");
}

}  // namespace

std::vector<HostSpec> read_population(std::istream& in, PopulationFormat format) {
  std::vector<HostSpec> hosts;
  std::string line;
  std::size_t lineno = 0;
  if (format == PopulationFormat::csv) {
    if (!std::getline(in, line)) bad_line(1, "missing header");
    ++lineno;
    if (csv::trim(line) != kPopulationCsvHeader) bad_line(1, "unexpected header '" + line + "'");
    while (std::getline(in, line)) {
      ++lineno;
      if (csv::trim(line).empty()) continue;
      const auto f = csv::split(line);
      if (f.size() != 6) bad_line(lineno, "expected 6 fields");
      HostSpec h;
      try {
        h.cores = static_cast<int>(csv::to_int(f[0]));
        h.per_core_memory_mb = static_cast<int>(csv::to_int(f[1]));
        h.memory_mb = csv::to_int(f[2]);
        h.whetstone_mips = csv::to_double(f[3]);
        h.dhrystone_mips = csv::to_double(f[4]);
        h.disk_gb = csv::to_double(f[5]);
      } catch (const std::exception& e) {
        bad_line(lineno, e.what());
      }
      check_host(h, lineno);
      hosts.push_back(h);
    }
    return hosts;
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    HostSpec h;
    try {
      const auto j = nlohmann::json::parse(line);
      h.cores = j.at("cores").get<int>();
      h.per_core_memory_mb = j.at("per_core_memory_mb").get<int>();
      h.memory_mb = j.at("memory_mb").get<std::int64_t>();
      h.whetstone_mips = j.at("whetstone_mips").get<double>();
      h.dhrystone_mips = j.at("dhrystone_mips").get<double>();
      h.disk_gb = j.at("disk_gb").get<double>();
    } catch (const std::exception& e) {
      bad_line(lineno, e.what());
    }
    check_host(h, lineno);
    hosts.push_back(h);
  }
  return hosts;
}

}  // namespace hostforge
