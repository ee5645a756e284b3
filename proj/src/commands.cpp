#include "hostforge/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "hostforge/csv.hpp"
#include "hostforge/rng.hpp"

namespace hostforge {

std::string_view to_string(PopulationModel model) {
  switch (model) {
    case PopulationModel::correlated: return "correlated";
    case PopulationModel::uncorrelated: return "uncorrelated";
    case PopulationModel::grid: return "grid";
  }
  return "unknown";
}

PopulationModel population_model_from_string(std::string_view name) {
  if (name == "correlated") return PopulationModel::correlated;
  if (name == "uncorrelated") return PopulationModel::uncorrelated;
  if (name == "grid") return PopulationModel::grid;
  throw ConfigError("unknown model '" + std::string(name) +
                    "' (expected correlated, uncorrelated or grid)");
}

namespace {

/// Output sink: a file, or the caller's stream for "" / "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    stream_ = file_.get();
  }

  std::ostream& stream() { return *stream_; }
  [[nodiscard]] bool is_file() const { return file_ != nullptr; }

  void close(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw IoError("failed writing '" + path + "'");
    if (file_) file_->close();
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::string fmt_year(YearTime t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", t.value);
  return buf;
}

void warn(std::ostream& err, std::size_t& warnings, const std::string& msg) {
  err << "warning: " << msg << '\n';
  ++warnings;
}

void warn_extrapolation(std::ostream& err, std::size_t& warnings, YearTime t) {
  if (t.is_extrapolated())
    warn(err, warnings,
         "date " + fmt_year(t) + " lies outside 2006-2014; laws are extrapolated");
}

int exit_code(const RunConfig& config, std::size_t warnings) {
  return config.strict && warnings > 0 ? 2 : 0;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

ModelParams load_params(const std::string& path) {
  if (path.empty()) return default_params();
  auto in = open_input(path);
  try {
    return read_params(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<AppProfile> load_profiles(const std::string& path) {
  if (path.empty()) return default_app_profiles();
  auto in = open_input(path);
  try {
    return read_app_profiles(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<HostSpec> make_population(PopulationModel model, const ModelParams& params,
                                      YearTime t, std::size_t n, std::uint64_t seed,
                                      CorrelationScheme scheme) {
  switch (model) {
    case PopulationModel::correlated:
      return generate_population(params, t, n, seed, {.scheme = scheme});
    case PopulationModel::uncorrelated:
      return uncorrelated_population(params, t, n, seed);
    case PopulationModel::grid:
      return grid_population(params, t, n, seed);
  }
  return {};
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.dates.empty()) throw ConfigError("generate: --date is required");
  const YearTime t = config.dates.front();
  std::size_t warnings = 0;
  warn_extrapolation(err, warnings, t);

  const ModelParams params = load_params(config.params_path);
  const auto hosts = make_population(config.model, params, t, config.count, config.seed,
                                     config.scheme);

  Sink sink(config.output, out);
  write_population(sink.stream(), hosts, population_format_from_string(config.format));
  sink.close(config.output);

  std::ostream& summary = sink.is_file() ? out : err;
  summary << "generated " << hosts.size() << " hosts at " << fmt_year(t) << " (model "
          << to_string(config.model) << ", seed " << config.seed << ")\n";
  if (!hosts.empty()) {
    const auto cols = columns_of(std::span<const HostSpec>(hosts));
    for (std::size_t k = 0; k < ResourceColumns::kCount; ++k) {
      const auto& c = cols.columns[k];
      double m = 0.0;
      for (double v : c) m += v;
      m /= static_cast<double>(c.size());
      double ss = 0.0;
      for (double v : c) ss += (v - m) * (v - m);
      char line[128];
      std::snprintf(line, sizeof line, "  %-13s mean %12.4f  std %12.4f\n",
                    ResourceColumns::kNames[k], m, std::sqrt(ss / static_cast<double>(c.size())));
      summary << line;
    }
  }
  return exit_code(config, warnings);
}

// ---------------------------------------------------------------------------
// fit

namespace {

// Yearly mid-year dates across the trace, keeping only those with enough
// active hosts to say anything (heavy-tailed lifetimes stretch the span far
// beyond where the bulk of the data lives).
std::vector<YearTime> default_fit_dates(std::span<const TraceRecord> records,
                                        std::size_t min_active) {
  if (records.empty()) return {};
  double lo = records.front().first_seen.value;
  double hi = records.front().last_seen.value;
  for (const auto& r : records) {
    lo = std::min(lo, r.first_seen.value);
    hi = std::max(hi, r.last_seen.value);
  }
  const std::size_t floor_count = std::max(min_active, records.size() / 100);
  std::vector<YearTime> dates;
  for (double t = std::floor(lo) + 0.5; t < hi; t += 1.0) {
    const YearTime d(t);
    std::size_t active = 0;
    for (const auto& r : records) active += is_active(r, d) ? 1 : 0;
    if (active >= floor_count) dates.push_back(d);
  }
  return dates;
}

std::optional<FitReport> try_fit(const std::vector<double>& t, const std::vector<double>& v,
                                 const std::string& what, std::vector<std::string>& warnings) {
  if (t.size() < 3) {
    warnings.push_back(what + ": only " + std::to_string(t.size()) +
                       " usable sample dates, law left null");
    return std::nullopt;
  }
  try {
    auto rep = fit_exp_law(t, v);
    if (rep.degenerate) warnings.push_back(what + ": constant series, degenerate fit");
    return rep;
  } catch (const std::exception& e) {
    warnings.push_back(what + ": " + e.what());
    return std::nullopt;
  }
}

std::vector<FamilyScore> aggregate(const std::map<DistFamilyTag, std::pair<double, std::size_t>>& acc) {
  std::vector<FamilyScore> out;
  for (const auto& [tag, sum] : acc)
    out.push_back({tag, sum.first / static_cast<double>(sum.second), sum.second});
  std::stable_sort(out.begin(), out.end(),
                   [](const FamilyScore& a, const FamilyScore& b) { return a.mean_p > b.mean_p; });
  return out;
}

Json law_or_null(const std::optional<FitReport>& f) {
  return f ? Json{{"a", f->law.a}, {"b", f->law.b}} : Json(nullptr);
}

Json fit_or_null(const std::optional<FitReport>& f) { return f ? to_json(*f) : Json(nullptr); }

Json ranking_json(const std::vector<FamilyScore>& r) {
  Json a = Json::array();
  for (const auto& s : r)
    a.push_back({{"family", std::string(to_string(s.family))}, {"mean_p", s.mean_p},
                 {"dates", s.dates}});
  return a;
}

}  // namespace

FitOutcome fit_trace(std::span<const TraceRecord> records, const FitOptions& options) {
  FitOutcome o;
  const auto split = filter_outliers(records);
  const auto& kept = split.kept;
  o.records = records.size();
  o.discarded = split.discarded.size();
  o.dates = options.dates.empty() ? default_fit_dates(kept, std::max<std::size_t>(options.ks.subsample, 2))
                                  : options.dates;
  if (o.dates.size() < 3)
    o.warnings.push_back("fewer than three sample dates; exponential laws cannot be fitted");

  auto fit_chain = [&](std::span<const int> levels, RatioResource res, const char* unit,
                       std::vector<std::optional<FitReport>>& laws) {
    laws.assign(levels.size() - 1, std::nullopt);
    if (o.dates.empty()) return;
    const auto series = ratio_series(kept, levels, o.dates, res);
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      std::vector<double> t, v;
      for (std::size_t d = 0; d < o.dates.size(); ++d)
        if (series.ratios[i][d]) {
          t.push_back(o.dates[d].value);
          v.push_back(*series.ratios[i][d]);
        }
      laws[i] = try_fit(t, v,
                        std::string(unit) + " ratio " + std::to_string(levels[i]) + ":" +
                            std::to_string(levels[i + 1]),
                        o.warnings);
    }
  };
  fit_chain(kCoreLevels, RatioResource::cores, "core", o.core_laws);
  fit_chain(kMemLevelsMb, RatioResource::per_core_memory, "per-core-memory", o.mem_laws);

  // Moment laws and per-date correlation / family scoring.
  struct Series {
    std::vector<double> t, mean, var;
  };
  std::array<Series, 3> moments;  // whetstone, dhrystone, disk
  constexpr std::array<std::size_t, 3> kCols{3, 4, 5};
  SquareMatrix corr_sum(3);
  std::size_t corr_dates = 0;
  std::array<std::map<DistFamilyTag, std::pair<double, std::size_t>>, 3> scores;

  for (std::size_t d = 0; d < o.dates.size(); ++d) {
    const auto active = active_at(kept, o.dates[d]);
    if (active.size() < 2) continue;
    const auto cols = columns_of(std::span<const TraceRecord>(active));
    const double n = static_cast<double>(active.size());
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& c = cols.columns[kCols[k]];
      double m = 0.0;
      for (double v : c) m += v;
      m /= n;
      double ss = 0.0;
      for (double v : c) ss += (v - m) * (v - m);
      if (m > 0.0 && ss > 0.0) {
        moments[k].t.push_back(o.dates[d].value);
        moments[k].mean.push_back(m);
        moments[k].var.push_back(ss / n);
      }
    }
    try {
      constexpr std::array<std::size_t, 3> kCorrCols{2, 3, 4};
      SquareMatrix r = SquareMatrix::identity(3);
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j) {
          r(i, j) = r(j, i) = pearson(cols.columns[kCorrCols[i]], cols.columns[kCorrCols[j]]);
        }
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) corr_sum(i, j) += r(i, j);
      ++corr_dates;
    } catch (const UndefinedCorrelation&) {
      // Skipped for this date.
    }
    if (active.size() >= options.ks.subsample) {
      for (std::size_t k = 0; k < 3; ++k) {
        KsOptions ks = options.ks;
        ks.seed = derive_seed(options.ks.seed, d * 3 + k);
        try {
          const auto best = best_fit(cols.columns[kCols[k]], kAllFamilies, ks);
          for (const auto& r : best.ranked) {
            auto& acc = scores[k][r.fit.tag];
            acc.first += r.mean_p;
            ++acc.second;
          }
        } catch (const std::exception& e) {
          o.warnings.push_back(std::string("family ranking at ") + fmt_year(o.dates[d]) + ": " +
                               e.what());
        }
      }
    }
  }

  o.whetstone_mean = try_fit(moments[0].t, moments[0].mean, "whetstone mean", o.warnings);
  o.whetstone_variance = try_fit(moments[0].t, moments[0].var, "whetstone variance", o.warnings);
  o.dhrystone_mean = try_fit(moments[1].t, moments[1].mean, "dhrystone mean", o.warnings);
  o.dhrystone_variance = try_fit(moments[1].t, moments[1].var, "dhrystone variance", o.warnings);
  o.disk_mean = try_fit(moments[2].t, moments[2].mean, "disk mean", o.warnings);
  o.disk_variance = try_fit(moments[2].t, moments[2].var, "disk variance", o.warnings);

  if (corr_dates > 0) {
    SquareMatrix r(3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        r(i, j) = i == j ? 1.0 : corr_sum(i, j) / static_cast<double>(corr_dates);
    try {
      CorrelationModel check(r);
      o.correlation = r;
    } catch (const std::exception& e) {
      o.warnings.push_back(std::string("correlation matrix rejected: ") + e.what());
    }
  } else {
    o.warnings.push_back("correlation: no sample date with two or more varying hosts");
  }

  double end = 0.0;
  for (const auto& r : kept) end = std::max(end, r.last_seen.value);
  const YearTime cutoff = options.lifetime_cutoff.value_or(YearTime(end - 0.25));
  const auto life = lifetimes(kept, cutoff);
  if (life.size() >= 2) {
    try {
      o.lifetime = mle_fit(DistFamilyTag::weibull, life);
      if (o.lifetime->degenerate) {
        o.warnings.push_back("lifetime: all lifetimes equal, Weibull left null");
        o.lifetime.reset();
      }
    } catch (const std::exception& e) {
      o.warnings.push_back(std::string("lifetime: ") + e.what());
    }
  } else {
    o.warnings.push_back("lifetime: fewer than two hosts before the cutoff");
  }

  o.whetstone_ranking = aggregate(scores[0]);
  o.dhrystone_ranking = aggregate(scores[1]);
  o.disk_ranking = aggregate(scores[2]);
  auto check_top = [&](const std::vector<FamilyScore>& r, DistFamilyTag expect, const char* what) {
    if (!r.empty() && r.front().family != expect)
      o.warnings.push_back(std::string(what) + ": best-fitting family is " +
                           std::string(to_string(r.front().family)) + ", model uses " +
                           std::string(to_string(expect)));
  };
  check_top(o.whetstone_ranking, DistFamilyTag::normal, "whetstone");
  check_top(o.dhrystone_ranking, DistFamilyTag::normal, "dhrystone");
  check_top(o.disk_ranking, DistFamilyTag::lognormal, "disk");
  return o;
}

Json FitOutcome::params_document() const {
  auto chain = [](std::span<const int> levels, const std::vector<std::optional<FitReport>>& laws) {
    Json a = Json::array();
    for (const auto& l : laws) a.push_back(law_or_null(l));
    return Json{{"levels", std::vector<int>(levels.begin(), levels.end())}, {"laws", a}};
  };
  auto dist = [](const char* family, const std::optional<FitReport>& m,
                 const std::optional<FitReport>& v) {
    return Json{{"family", family}, {"mean", law_or_null(m)}, {"variance", law_or_null(v)}};
  };
  Json j;
  j["core_chain"] = chain(kCoreLevels, core_laws);
  j["mem_chain"] = chain(kMemLevelsMb, mem_laws);
  j["dhrystone"] = dist("normal", dhrystone_mean, dhrystone_variance);
  j["whetstone"] = dist("normal", whetstone_mean, whetstone_variance);
  j["disk"] = dist("lognormal", disk_mean, disk_variance);
  if (correlation) {
    Json c;
    c["order"] = {"per_core_memory", "whetstone", "dhrystone"};
    c["R"] = to_json(*correlation);
    c["L"] = to_json(cholesky(*correlation));
    j["correlation"] = c;
  } else {
    j["correlation"] = nullptr;
  }
  j["lifetime"] = lifetime ? Json{{"k", lifetime->params[0]}, {"lambda_days", lifetime->params[1]}}
                           : Json(nullptr);
  return j;
}

Json FitOutcome::report() const {
  Json j;
  Json d = Json::array();
  for (auto t : dates) d.push_back(t.value);
  j["sample_dates"] = d;
  j["records"] = records;
  j["discarded_outliers"] = discarded;
  auto laws_json = [](std::span<const int> levels, const std::vector<std::optional<FitReport>>& laws) {
    Json a = Json::array();
    for (std::size_t i = 0; i < laws.size(); ++i) {
      Json e = fit_or_null(laws[i]);
      if (e.is_null()) e = Json::object();
      e["pair"] = std::to_string(levels[i]) + ":" + std::to_string(levels[i + 1]);
      e["fitted"] = laws[i].has_value();
      a.push_back(e);
    }
    return a;
  };
  j["core_laws"] = laws_json(kCoreLevels, core_laws);
  j["mem_laws"] = laws_json(kMemLevelsMb, mem_laws);
  j["moment_laws"] = {
      {"whetstone_mean", fit_or_null(whetstone_mean)},
      {"whetstone_variance", fit_or_null(whetstone_variance)},
      {"dhrystone_mean", fit_or_null(dhrystone_mean)},
      {"dhrystone_variance", fit_or_null(dhrystone_variance)},
      {"disk_mean", fit_or_null(disk_mean)},
      {"disk_variance", fit_or_null(disk_variance)},
  };
  j["family_ranking"] = {{"whetstone", ranking_json(whetstone_ranking)},
                         {"dhrystone", ranking_json(dhrystone_ranking)},
                         {"disk", ranking_json(disk_ranking)}};
  j["lifetime"] = lifetime ? to_json(*lifetime) : Json(nullptr);
  j["warnings"] = warnings;
  return j;
}

int cmd_fit(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.empty()) throw ConfigError("fit: --input is required");
  const std::string& path = config.inputs.front();
  auto in = open_input(path);
  const TraceFormat format = ends_with(path, ".jsonl") || ends_with(path, ".json")
                                 ? TraceFormat::jsonl
                                 : trace_format_from_string(config.format);
  const auto parsed = parse_trace(in, format);
  std::size_t warnings = 0;
  for (const auto& e : parsed.errors)
    warn(err, warnings, path + ":" + std::to_string(e.line) + ": " + e.message);

  FitOptions opts;
  opts.dates = config.dates;
  opts.lifetime_cutoff = config.lifetime_cutoff;
  opts.ks.seed = config.seed;
  opts.ks.rounds = config.ks_rounds;
  opts.ks.subsample = config.ks_subsample;
  const auto outcome = fit_trace(parsed.records, opts);
  for (const auto& w : outcome.warnings) warn(err, warnings, w);

  Sink sink(config.output, out);
  sink.stream() << outcome.params_document().dump(2) << '\n';
  sink.close(config.output);
  if (!config.report.empty()) {
    Sink rep(config.report, out);
    rep.stream() << outcome.report().dump(2) << '\n';
    rep.close(config.report);
  }
  return exit_code(config, warnings);
}

// ---------------------------------------------------------------------------
// predict

void write_prediction(std::ostream& out, const ModelParams& params,
                      std::span<const YearTime> dates) {
  out << "date";
  for (int c : params.core_chain.levels) out << ",p_cores_" << c;
  out << ",mean_cores";
  for (int m : params.mem_chain.levels) out << ",p_mem_" << m << "mb";
  out << ",mean_mem_per_core_mb,mean_memory_mb,whetstone_mean,whetstone_std,"
         "dhrystone_mean,dhrystone_std,disk_mean_gb,disk_std_gb\n";
  for (const auto t : dates) {
    const auto cp = ratio_chain_pmf(params.core_chain, t);
    const auto mp = ratio_chain_pmf(params.mem_chain, t);
    out << csv::format_double(t.value);
    for (double p : cp) out << ',' << csv::format_double(p);
    const double mean_cores = pmf_mean(params.core_chain, cp);
    out << ',' << csv::format_double(mean_cores);
    for (double p : mp) out << ',' << csv::format_double(p);
    const double mean_pcm = pmf_mean(params.mem_chain, mp);
    out << ',' << csv::format_double(mean_pcm) << ',' << csv::format_double(mean_cores * mean_pcm);
    for (const auto* law : {&params.whetstone, &params.dhrystone, &params.disk}) {
      const auto m = predicted_moments(*law, t);
      out << ',' << csv::format_double(m.mean) << ',' << csv::format_double(std::sqrt(m.variance));
    }
    out << '\n';
  }
}

int cmd_predict(const RunConfig& config, std::ostream& out, std::ostream& err) {
  std::vector<YearTime> dates = config.dates;
  if (dates.empty()) {
    const YearTime from = config.from.value_or(YearTime(2006.0));
    const YearTime to = config.to.value_or(YearTime(2014.0));
    if (!(config.step_years > 0.0)) throw ConfigError("predict: --step must be positive");
    if (to < from) throw ConfigError("predict: --to precedes --from");
    const auto steps = static_cast<std::size_t>(
        std::floor((to.value - from.value) / config.step_years + 1e-9));
    for (std::size_t i = 0; i <= steps; ++i)
      dates.emplace_back(from.value + static_cast<double>(i) * config.step_years);
  }
  std::size_t warnings = 0;
  for (auto t : dates) warn_extrapolation(err, warnings, t);
  const ModelParams params = load_params(config.params_path);
  Sink sink(config.output, out);
  write_prediction(sink.stream(), params, dates);
  sink.close(config.output);
  return exit_code(config, warnings);
}

// ---------------------------------------------------------------------------
// simulate

std::vector<SimulationRow> run_simulation(const ModelParams& params,
                                          std::span<const AppProfile> apps,
                                          std::span<const YearTime> dates, std::size_t n,
                                          std::uint64_t seed, std::optional<std::size_t> quota,
                                          CorrelationScheme scheme) {
  if (apps.empty()) throw ConfigError("simulate: no applications configured");
  if (n == 0) throw ConfigError("simulate: --count must be positive");
  std::vector<SimulationRow> rows;
  for (std::size_t d = 0; d < dates.size(); ++d) {
    const YearTime t = dates[d];
    const std::uint64_t date_seed = derive_seed(seed, d);
    const auto reference = generate_population(params, t, n, derive_seed(date_seed, 0),
                                               {.scheme = scheme});
    const auto ref_assignment = greedy_round_robin(apps, reference, quota);
    for (std::size_t a = 0; a < apps.size(); ++a)
      rows.push_back({t, apps[a].name, "reference", ref_assignment.totals[a], 0.0});

    constexpr std::array<PopulationModel, 3> kModels{
        PopulationModel::correlated, PopulationModel::uncorrelated, PopulationModel::grid};
    for (std::size_t m = 0; m < kModels.size(); ++m) {
      const auto pop = make_population(kModels[m], params, t, n, derive_seed(date_seed, m + 1),
                                       scheme);
      const auto diff = compare_models(reference, pop, apps, quota);
      for (const auto& e : diff)
        rows.push_back({t, e.app, std::string(to_string(kModels[m])), e.model_total,
                        e.percent_difference});
    }
  }
  return rows;
}

void write_simulation_csv(std::ostream& out, std::span<const SimulationRow> rows) {
  out << "app,model,total_utility,percent_difference,date\n";
  for (const auto& r : rows)
    out << r.app << ',' << r.model << ',' << csv::format_double(r.total_utility) << ','
        << csv::format_double(r.percent_difference) << ',' << csv::format_double(r.date.value)
        << '\n';
}

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const ModelParams params = load_params(config.params_path);
  const auto apps = load_profiles(config.profiles_path);
  if (apps.empty()) throw ConfigError("simulate: application profile list is empty");
  std::vector<YearTime> dates = config.dates;
  if (dates.empty()) dates.push_back(from_calendar(2010, 9, 1));
  std::size_t warnings = 0;
  for (auto t : dates) warn_extrapolation(err, warnings, t);

  const auto rows = run_simulation(params, apps, dates, config.count, config.seed, config.quota,
                                   config.scheme);
  Sink sink(config.output, out);
  write_simulation_csv(sink.stream(), rows);
  sink.close(config.output);

  if (!config.report.empty()) {
    Json summary;
    summary["seed"] = config.seed;
    summary["hosts_per_population"] = config.count;
    summary["quota"] = config.quota ? Json(*config.quota) : Json(nullptr);
    Json results = Json::array();
    for (const auto& r : rows)
      results.push_back({{"date", r.date.value},
                         {"app", r.app},
                         {"model", r.model},
                         {"total_utility", r.total_utility},
                         {"percent_difference", r.percent_difference}});
    summary["results"] = results;
    Sink rep(config.report, out);
    rep.stream() << summary.dump(2) << '\n';
    rep.close(config.report);
  }
  return exit_code(config, warnings);
}

// ---------------------------------------------------------------------------
// validate

HostData read_host_data(const std::string& path) {
  std::string first;
  {
    auto probe = open_input(path);
    std::getline(probe, first);
  }
  const auto head = csv::trim(first);
  auto in = open_input(path);
  try {
    if (!head.empty() && head.front() == '{') {
      const auto j = nlohmann::json::parse(head);
      if (j.contains("host_id")) return parse_trace(in, TraceFormat::jsonl).records;
      return read_population(in, PopulationFormat::jsonl);
    }
    if (head == kPopulationCsvHeader) return read_population(in, PopulationFormat::csv);
    if (head.find("host_id") != std::string_view::npos)
      return parse_trace(in, TraceFormat::csv).records;
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (head.empty()) {
    // An empty JSON-lines population.
    return std::vector<HostSpec>{};
  }
  throw ConfigError(path + ": unrecognized file format (header '" + std::string(head) + "')");
}

namespace {

Json matrix_or_null(const ResourceColumns& c) {
  try {
    return to_json(correlation_matrix(c));
  } catch (const std::exception&) {
    return nullptr;
  }
}

}  // namespace

Json validation_report(const ResourceColumns& actual, const ResourceColumns& generated,
                       const KsOptions& ks) {
  Json j;
  j["rows"] = {{"actual", actual.rows()}, {"generated", generated.rows()}};
  Json res = Json::object();
  for (std::size_t k = 0; k < ResourceColumns::kCount; ++k) {
    auto stats = [k](const ResourceColumns& c) {
      const auto& v = c.columns[k];
      if (v.empty()) return std::pair{0.0, 0.0};
      double m = 0.0;
      for (double x : v) m += x;
      m /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - m) * (x - m);
      return std::pair{m, std::sqrt(ss / static_cast<double>(v.size()))};
    };
    const auto [ma, sa] = stats(actual);
    const auto [mg, sg] = stats(generated);
    auto pct = [](double a, double g) -> Json {
      if (a == 0.0) return g == 0.0 ? Json(0.0) : Json(nullptr);
      return 100.0 * std::abs(g - a) / std::abs(a);
    };
    res[ResourceColumns::kNames[k]] = {{"mean_actual", ma},       {"mean_generated", mg},
                                       {"mean_pct_diff", pct(ma, mg)}, {"std_actual", sa},
                                       {"std_generated", sg},     {"std_pct_diff", pct(sa, sg)}};
  }
  j["resources"] = res;
  j["correlation"] = {{"order", ResourceColumns::kNames},
                      {"actual", matrix_or_null(actual)},
                      {"generated", matrix_or_null(generated)}};

  // Generated marginals scored against the model family fitted to the actual
  // data, plus a full ranking of the generated marginal.
  Json marg = Json::object();
  const std::array<std::pair<std::size_t, DistFamilyTag>, 3> kMarginals{
      {{3, DistFamilyTag::normal}, {4, DistFamilyTag::normal}, {5, DistFamilyTag::lognormal}}};
  for (const auto& [col, family] : kMarginals) {
    const auto& a = actual.columns[col];
    const auto& g = generated.columns[col];
    Json e;
    e["model_family"] = std::string(to_string(family));
    if (g.size() < ks.subsample || a.empty()) {
      e["note"] = "too few rows for subsampled KS";
      marg[ResourceColumns::kNames[col]] = e;
      continue;
    }
    try {
      const auto fitted = mle_fit(family, a);
      e["fitted_to_actual"] = to_json(fitted);
      e["mean_p"] = subsampled_ks(g, [&fitted](double x) { return fitted.cdf(x); }, ks);
    } catch (const std::exception& ex) {
      e["note"] = ex.what();
    }
    try {
      e["generated_ranking"] = to_json(best_fit(g, kAllFamilies, ks));
    } catch (const std::exception& ex) {
      e["ranking_note"] = ex.what();
    }
    marg[ResourceColumns::kNames[col]] = e;
  }
  j["marginals"] = marg;
  return j;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.inputs.size() != 2)
    throw ConfigError("validate: expects exactly two input files (actual, generated)");
  const auto a = read_host_data(config.inputs[0]);
  const auto g = read_host_data(config.inputs[1]);
  if (a.index() != g.index())
    throw ConfigError("validate: schema mismatch (one population file and one trace file)");

  std::size_t warnings = 0;
  auto columns = [&](const HostData& data) {
    if (const auto* hosts = std::get_if<std::vector<HostSpec>>(&data))
      return columns_of(std::span<const HostSpec>(*hosts));
    auto kept = filter_outliers(std::get<std::vector<TraceRecord>>(data)).kept;
    if (!config.dates.empty()) kept = active_at(kept, config.dates.front());
    return columns_of(std::span<const TraceRecord>(kept));
  };
  const auto ca = columns(a);
  const auto cg = columns(g);
  if (ca.rows() < 2 || cg.rows() < 2) warn(err, warnings, "validate: fewer than two rows in an input");

  KsOptions ks;
  ks.seed = config.seed;
  ks.rounds = config.ks_rounds;
  ks.subsample = config.ks_subsample;
  Json report = validation_report(ca, cg, ks);
  report["inputs"] = {{"actual", config.inputs[0]}, {"generated", config.inputs[1]}};
  Sink sink(config.output, out);
  sink.stream() << report.dump(2) << '\n';
  sink.close(config.output);
  return exit_code(config, warnings);
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  switch (config.subcommand) {
    case Subcommand::generate: return cmd_generate(config, out, err);
    case Subcommand::fit: return cmd_fit(config, out, err);
    case Subcommand::predict: return cmd_predict(config, out, err);
    case Subcommand::simulate: return cmd_simulate(config, out, err);
    case Subcommand::validate: return cmd_validate(config, out, err);
  }
  return 1;
}

}  // namespace hostforge
