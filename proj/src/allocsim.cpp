#include "hostforge/allocsim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "hostforge/ingest.hpp"
#include "json.hpp"

namespace hostforge {

void AppProfile::validate() const {
  for (double e : {alpha, beta, gamma, delta, epsilon})
    if (!(e >= 0.0) || !std::isfinite(e))
      throw std::invalid_argument("app '" + name + "': exponents must be finite and nonnegative");
}

std::vector<AppProfile> default_app_profiles() {
  return {
      {"SETI@home", 0.05, 0.1, 0.2, 0.4, 0.05},
      {"Folding@home", 0.4, 0.05, 0.2, 0.3, 0.05},
      {"Climate Prediction", 0.2, 0.2, 0.1, 0.35, 0.15},
      {"P2P", 0.05, 0.1, 0.1, 0.05, 0.7},
  };
}

std::vector<AppProfile> read_app_profiles(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("app profiles: ") + e.what());
  }
  const auto it = j.find("applications");
  if (it == j.end() || !it->is_array())
    throw std::invalid_argument("app profiles: expected an \"applications\" array");
  std::vector<AppProfile> apps;
  for (const auto& a : *it) {
    try {
      AppProfile p;
      p.name = a.at("name").get<std::string>();
      p.alpha = a.at("alpha").get<double>();
      p.beta = a.at("beta").get<double>();
      p.gamma = a.at("gamma").get<double>();
      p.delta = a.at("delta").get<double>();
      p.epsilon = a.at("epsilon").get<double>();
      p.validate();
      apps.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("app profiles: ") + e.what());
    }
  }
  return apps;
}

void write_app_profiles(std::ostream& out, std::span<const AppProfile> apps) {
  nlohmann::ordered_json j;
  j["applications"] = nlohmann::ordered_json::array();
  for (const auto& a : apps) {
    nlohmann::ordered_json o;
    o["name"] = a.name;
    o["alpha"] = a.alpha;
    o["beta"] = a.beta;
    o["gamma"] = a.gamma;
    o["delta"] = a.delta;
    o["epsilon"] = a.epsilon;
    j["applications"].push_back(o);
  }
  out << j.dump(2) << '\n';
}

double utility(const AppProfile& app, const HostSpec& h) {
  if (h.cores <= 0 || h.memory_mb <= 0 || !(h.dhrystone_mips > 0.0) ||
      !(h.whetstone_mips > 0.0) || !(h.disk_gb > 0.0))
    throw std::domain_error("utility: host resources must be positive");
  const double log_y = app.alpha * std::log(static_cast<double>(h.cores)) +
                       app.beta * std::log(static_cast<double>(h.memory_mb)) +
                       app.gamma * std::log(h.dhrystone_mips) +
                       app.delta * std::log(h.whetstone_mips) +
                       app.epsilon * std::log(h.disk_gb);
  return std::exp(log_y);
}

std::vector<std::vector<double>> utility_matrix(std::span<const AppProfile> apps,
                                                std::span<const HostSpec> hosts,
                                                Execution execution) {
  std::vector<std::vector<double>> u(apps.size(), std::vector<double>(hosts.size()));
  const auto n = static_cast<std::int64_t>(hosts.size());
  bool bad = false;
  for (std::size_t a = 0; a < apps.size(); ++a) {
    auto& row = u[a];
    const auto& app = apps[a];
    if (execution == Execution::serial) {
      for (std::int64_t h = 0; h < n; ++h) row[h] = utility(app, hosts[h]);
    } else {
#pragma omp parallel for schedule(static) num_threads(worker_count()) reduction(|| : bad)
      for (std::int64_t h = 0; h < n; ++h) {
        try {
          row[h] = utility(app, hosts[h]);
        } catch (const std::domain_error&) {
          bad = true;
        }
      }
    }
  }
  if (bad) throw std::domain_error("utility: host resources must be positive");
  return u;
}

Assignment greedy_round_robin(std::span<const AppProfile> apps, std::span<const HostSpec> hosts,
                              std::optional<std::size_t> quota_per_app, Execution execution) {
  if (apps.empty()) throw std::invalid_argument("greedy_round_robin: no applications");
  const std::size_t n = hosts.size();
  Assignment out;
  out.owner.assign(n, Assignment::kUnassigned);
  out.totals.assign(apps.size(), 0.0);
  out.counts.assign(apps.size(), 0);

  const auto u = utility_matrix(apps, hosts, execution);

  // Each app's preference order; the first unassigned entry is its argmax.
  std::vector<std::vector<std::size_t>> order(apps.size());
  for (std::size_t a = 0; a < apps.size(); ++a) {
    auto& o = order[a];
    o.resize(n);
    std::iota(o.begin(), o.end(), std::size_t{0});
    const auto& row = u[a];
    std::sort(o.begin(), o.end(), [&row](std::size_t x, std::size_t y) {
      return row[x] != row[y] ? row[x] > row[y] : x < y;
    });
  }

  const std::size_t quota = quota_per_app.value_or(n);
  std::vector<std::size_t> cursor(apps.size(), 0);
  std::size_t remaining = n;
  bool progress = true;
  while (remaining > 0 && progress) {
    progress = false;
    for (std::size_t a = 0; a < apps.size() && remaining > 0; ++a) {
      if (out.counts[a] >= quota) continue;
      auto& c = cursor[a];
      while (c < n && out.owner[order[a][c]] != Assignment::kUnassigned) ++c;
      if (c == n) continue;
      const std::size_t h = order[a][c];
      out.owner[h] = static_cast<int>(a);
      out.totals[a] += u[a][h];
      ++out.counts[a];
      out.claims.emplace_back(static_cast<int>(a), h);
      --remaining;
      progress = true;
    }
  }
  return out;
}

namespace {

template <typename Fn>
std::vector<HostSpec> per_host(std::size_t n, Execution execution, Fn&& make) {
  std::vector<HostSpec> hosts(n);
  const auto count = static_cast<std::int64_t>(n);
  if (execution == Execution::serial) {
    for (std::int64_t i = 0; i < count; ++i) hosts[i] = make(static_cast<std::uint64_t>(i));
  } else {
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t i = 0; i < count; ++i) hosts[i] = make(static_cast<std::uint64_t>(i));
  }
  return hosts;
}

double clamp_speed(double v) { return std::max(kMinBenchmarkMips, v); }

LognormalParams lognormal_for(const DistLaw& law, YearTime t) {
  const Moments m = predicted_moments(law, t);
  return lognormal_params_from_moments(m.mean, m.variance);
}

}  // namespace

std::vector<HostSpec> uncorrelated_population(const ModelParams& params, YearTime t,
                                              std::size_t n, std::uint64_t seed,
                                              Execution execution) {
  const auto core_pmf = ratio_chain_pmf(params.core_chain, t);
  const auto mem_pmf = ratio_chain_pmf(params.mem_chain, t);
  const Moments whet = predicted_moments(params.whetstone, t);
  const Moments dhry = predicted_moments(params.dhrystone, t);
  const LognormalParams disk = lognormal_for(params.disk, t);

  return per_host(n, execution, [&](std::uint64_t i) {
    SeededStream s(seed, i);
    HostSpec h;
    h.cores = sample_discrete(params.core_chain.levels, core_pmf, s.uniform());
    h.per_core_memory_mb = sample_discrete(params.mem_chain.levels, mem_pmf, s.uniform());
    h.memory_mb = static_cast<std::int64_t>(h.cores) * h.per_core_memory_mb;
    h.whetstone_mips = clamp_speed(whet.mean + s.normal() * std::sqrt(whet.variance));
    h.dhrystone_mips = clamp_speed(dhry.mean + s.normal() * std::sqrt(dhry.variance));
    h.disk_gb = std::exp(disk.mu + disk.sigma * s.normal());
    return h;
  });
}

std::vector<HostSpec> grid_population(const ModelParams& params, YearTime t, std::size_t n,
                                      std::uint64_t seed, Execution execution) {
  const ExpLaw growth = params.disk.mean_law;
  const Moments disk_now = predicted_moments(params.disk, t);
  const double jitter_sigma =
      std::sqrt(std::log1p(disk_now.variance / (disk_now.mean * disk_now.mean)));
  const double memory_speed_corr = params.correlation.r()(0, 1);

  return per_host(n, execution, [&](std::uint64_t i) {
    SeededStream s(seed, i);
    // Age is a uniform point within a lifetime drawn from the lifetime law.
    const double age_days = s.uniform() * sample_lifetime(params.lifetime, s);
    const YearTime created(t.value - age_days / kDaysPerYear);

    HostSpec h;
    h.cores = sample_discrete(params.core_chain.levels,
                              ratio_chain_pmf(params.core_chain, created), s.uniform());

    const LognormalParams whet = lognormal_for(params.whetstone, created);
    const LognormalParams dhry = lognormal_for(params.dhrystone, created);
    const double z_whet = s.normal();
    h.whetstone_mips = std::exp(whet.mu + whet.sigma * z_whet);
    h.dhrystone_mips = std::exp(dhry.mu + dhry.sigma * s.normal());

    // Per-core memory: log-normal matched to the level distribution at the
    // creation date, tied to speed through the Whetstone normal score.
    const auto mem_pmf = ratio_chain_pmf(params.mem_chain, created);
    double m = 0.0, m2 = 0.0;
    for (std::size_t k = 0; k < mem_pmf.size(); ++k) {
      const double lv = params.mem_chain.levels[k];
      m += mem_pmf[k] * lv;
      m2 += mem_pmf[k] * lv * lv;
    }
    const LognormalParams mem = lognormal_params_from_moments(m, m2 - m * m);
    const double z_mem = memory_speed_corr * z_whet +
                         std::sqrt(1.0 - memory_speed_corr * memory_speed_corr) * s.normal();
    const double per_core = std::exp(mem.mu + mem.sigma * z_mem);
    h.per_core_memory_mb =
        params.mem_chain.levels[*level_index(params.mem_chain.levels, per_core, LevelMatch::nearest)];
    h.memory_mb = static_cast<std::int64_t>(h.cores) * h.per_core_memory_mb;

    h.disk_gb = growth.value(t) * std::exp(jitter_sigma * s.normal());
    return h;
  });
}

std::vector<AppDifference> compare_models(std::span<const HostSpec> actual,
                                          std::span<const HostSpec> modeled,
                                          std::span<const AppProfile> apps,
                                          std::optional<std::size_t> quota_per_app) {
  if (actual.empty() || modeled.empty())
    throw std::invalid_argument("compare_models: populations must be nonempty");
  if (apps.empty()) throw std::invalid_argument("compare_models: no applications");
  const auto ra = greedy_round_robin(apps, actual, quota_per_app);
  const auto rm = greedy_round_robin(apps, modeled, quota_per_app);
  std::vector<AppDifference> out;
  for (std::size_t a = 0; a < apps.size(); ++a) {
    AppDifference d;
    d.app = apps[a].name;
    d.actual_total = ra.totals[a];
    d.model_total = rm.totals[a];
    d.percent_difference =
        d.actual_total > 0.0 ? 100.0 * std::abs(d.model_total - d.actual_total) / d.actual_total
                             : (d.model_total == 0.0 ? 0.0 : 100.0);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace hostforge
