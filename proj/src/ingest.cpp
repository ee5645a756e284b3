#include "hostforge/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "hostforge/csv.hpp"
#include "json.hpp"

namespace hostforge {

TraceFormat trace_format_from_string(std::string_view name) {
  if (name == "csv") return TraceFormat::csv;
  if (name == "json" || name == "jsonl") return TraceFormat::jsonl;
  throw std::invalid_argument("unknown trace format '" + std::string(name) + "'");
}

namespace {

constexpr std::array<std::string_view, 8> kFields{
    "host_id", "first_seen", "last_seen", "cores",
    "memory_mb", "whetstone_mips", "dhrystone_mips", "disk_free_gb"};

enum class TimeForm { unknown, fractional, iso };

TimeForm detect_form(std::string_view v) {
  v = csv::trim(v);
  return v.find('-', 1) != std::string_view::npos ? TimeForm::iso : TimeForm::fractional;
}

YearTime parse_time(std::string_view v, TimeForm& form, const char* field) {
  if (csv::trim(v).empty()) throw std::invalid_argument(std::string("missing ") + field);
  const TimeForm here = detect_form(v);
  if (form == TimeForm::unknown) form = here;
  if (here != form)
    throw std::invalid_argument(std::string(field) + " mixes ISO and fractional-year dates");
  return parse_date(v);
}

double parse_resource(std::string_view v, const char* field) {
  if (csv::trim(v).empty()) throw std::invalid_argument(std::string("missing ") + field);
  const double x = csv::to_double(v);
  if (!std::isfinite(x) || x < 0.0)
    throw std::invalid_argument(std::string(field) + " must be nonnegative");
  return x;
}

void validate(const TraceRecord& r) {
  if (r.host_id.empty()) throw std::invalid_argument("missing host_id");
  if (r.last_seen < r.first_seen) throw std::invalid_argument("last_seen precedes first_seen");
  if (r.cores < 0) throw std::invalid_argument("cores must be nonnegative");
}

struct TimeForms {
  TimeForm first = TimeForm::unknown;
  TimeForm last = TimeForm::unknown;
};

TraceRecord record_from_fields(const std::array<std::string_view, 8>& f, TimeForms& forms) {
  TraceRecord r;
  r.host_id = std::string(csv::trim(f[0]));
  r.first_seen = parse_time(f[1], forms.first, "first_seen");
  r.last_seen = parse_time(f[2], forms.last, "last_seen");
  if (csv::trim(f[3]).empty()) throw std::invalid_argument("missing cores");
  r.cores = static_cast<int>(csv::to_int(f[3]));
  r.memory_mb = parse_resource(f[4], "memory_mb");
  r.whetstone_mips = parse_resource(f[5], "whetstone_mips");
  r.dhrystone_mips = parse_resource(f[6], "dhrystone_mips");
  r.disk_free_gb = parse_resource(f[7], "disk_free_gb");
  validate(r);
  return r;
}

std::string json_field_text(const nlohmann::json& j, std::string_view key, std::string& storage) {
  const auto it = j.find(std::string(key));
  if (it == j.end() || it->is_null()) return {};
  if (it->is_string()) {
    storage = it->get<std::string>();
  } else if (it->is_number_integer()) {
    storage = std::to_string(it->get<long long>());
  } else if (it->is_number()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", it->get<double>());
    storage = buf;
  } else {
    throw std::invalid_argument(std::string(key) + " has an unsupported type");
  }
  return storage;
}

void check_error_rate(const ParsedTrace& out) {
  const std::size_t total = out.records.size() + out.errors.size();
  if (total > 0 && out.errors.size() * 10 > total) {
    std::ostringstream os;
    os << "trace rejected: " << out.errors.size() << " of " << total
       << " rows malformed (limit 10%)";
    if (!out.errors.empty())
      os << "; first error at line " << out.errors.front().line << ": "
         << out.errors.front().message;
    throw TraceFormatError(os.str());
  }
}

}  // namespace

ParsedTrace parse_trace(std::istream& in, TraceFormat format) {
  ParsedTrace out;
  TimeForms forms;
  std::string line;
  std::size_t lineno = 0;

  if (format == TraceFormat::csv) {
    if (!std::getline(in, line)) throw TraceFormatError("trace: missing header");
    ++lineno;
    const auto header = csv::split(line);
    std::array<std::size_t, 8> column{};
    column.fill(static_cast<std::size_t>(-1));
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto it = std::find(kFields.begin(), kFields.end(), header[i]);
      if (it == kFields.end())
        throw TraceFormatError("trace: unknown header column '" + std::string(header[i]) + "'");
      column[static_cast<std::size_t>(it - kFields.begin())] = i;
    }
    for (std::size_t k = 0; k < kFields.size(); ++k)
      if (column[k] == static_cast<std::size_t>(-1))
        throw TraceFormatError("trace: header lacks column '" + std::string(kFields[k]) + "'");

    while (std::getline(in, line)) {
      ++lineno;
      if (csv::trim(line).empty()) continue;
      const auto parts = csv::split(line);
      try {
        if (parts.size() != header.size())
          throw std::invalid_argument("expected " + std::to_string(header.size()) + " fields, got " +
                                      std::to_string(parts.size()));
        std::array<std::string_view, 8> f;
        for (std::size_t k = 0; k < 8; ++k) f[k] = parts[column[k]];
        out.records.push_back(record_from_fields(f, forms));
      } catch (const std::exception& e) {
        out.errors.push_back({lineno, e.what()});
      }
    }
    check_error_rate(out);
    return out;
  }

  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (!j.is_object()) throw std::invalid_argument("row is not a JSON object");
      std::array<std::string, 8> storage;
      std::array<std::string_view, 8> f;
      for (std::size_t k = 0; k < 8; ++k) {
        json_field_text(j, kFields[k], storage[k]);
        f[k] = storage[k];
      }
      out.records.push_back(record_from_fields(f, forms));
    } catch (const std::exception& e) {
      out.errors.push_back({lineno, e.what()});
    }
  }
  check_error_rate(out);
  return out;
}

void write_trace(std::ostream& out, std::span<const TraceRecord> records, TraceFormat format) {
  if (format == TraceFormat::csv) {
    out << kTraceCsvHeader << '\n';
    char buf[256];
    for (const auto& r : records) {
      std::snprintf(buf, sizeof buf, ",%.15g,%.15g,%d,%.15g,%.15g,%.15g,%.15g\n",
                    r.first_seen.value, r.last_seen.value, r.cores, r.memory_mb,
                    r.whetstone_mips, r.dhrystone_mips, r.disk_free_gb);
      out << r.host_id << buf;
    }
    return;
  }
  char buf[384];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf,
                  ",\"first_seen\":%.15g,\"last_seen\":%.15g,\"cores\":%d,\"memory_mb\":%.15g,"
                  "\"whetstone_mips\":%.15g,\"dhrystone_mips\":%.15g,\"disk_free_gb\":%.15g}\n",
                  r.first_seen.value, r.last_seen.value, r.cores, r.memory_mb,
                  r.whetstone_mips, r.dhrystone_mips, r.disk_free_gb);
    out << "{\"host_id\":" << nlohmann::json(r.host_id).dump() << buf;
  }
}

bool is_outlier(const TraceRecord& r) noexcept {
  return r.cores > kMaxCores || r.whetstone_mips > kMaxBenchmarkMips ||
         r.dhrystone_mips > kMaxBenchmarkMips || r.memory_mb > kMaxMemoryMb ||
         r.disk_free_gb > kMaxDiskGb;
}

OutlierSplit filter_outliers(std::span<const TraceRecord> records) {
  OutlierSplit s;
  for (const auto& r : records) (is_outlier(r) ? s.discarded : s.kept).push_back(r);
  return s;
}

std::vector<TraceRecord> active_at(std::span<const TraceRecord> records, YearTime t) {
  std::vector<TraceRecord> out;
  for (const auto& r : records)
    if (is_active(r, t)) out.push_back(r);
  return out;
}

ResourceColumns columns_of(std::span<const TraceRecord> records) {
  ResourceColumns out;
  for (auto& c : out.columns) c.reserve(records.size());
  for (const auto& r : records) {
    out.columns[0].push_back(r.cores);
    out.columns[1].push_back(r.memory_mb);
    out.columns[2].push_back(r.cores > 0 ? r.memory_mb / r.cores : 0.0);
    out.columns[3].push_back(r.whetstone_mips);
    out.columns[4].push_back(r.dhrystone_mips);
    out.columns[5].push_back(r.disk_free_gb);
  }
  return out;
}

Snapshot snapshot_stats(std::span<const TraceRecord> records, YearTime t) {
  Snapshot s;
  s.t = t;
  const auto active = active_at(records, t);
  s.active_count = active.size();
  if (active.empty()) return s;
  s.defined = true;
  const auto cols = columns_of(active);
  const double n = static_cast<double>(active.size());
  for (std::size_t k = 0; k < ResourceColumns::kCount; ++k) {
    double m = 0.0;
    for (double v : cols.columns[k]) m += v;
    m /= n;
    double ss = 0.0;
    for (double v : cols.columns[k]) ss += (v - m) * (v - m);
    s.mean[k] = m;
    s.stddev[k] = std::sqrt(ss / n);
  }
  return s;
}

std::optional<std::size_t> level_index(std::span<const int> levels, double value,
                                       LevelMatch match) {
  if (levels.empty()) return std::nullopt;
  if (match == LevelMatch::exact) {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (static_cast<double>(levels[i]) == value) return i;
    return std::nullopt;
  }
  if (!(value > 0.0)) return std::nullopt;
  const double lv = std::log(value);
  std::size_t best = 0;
  double best_d = std::abs(lv - std::log(static_cast<double>(levels[0])));
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const double d = std::abs(lv - std::log(static_cast<double>(levels[i])));
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

RatioSeries ratio_series(std::span<const TraceRecord> records, std::span<const int> levels,
                         std::span<const YearTime> dates, RatioResource resource) {
  if (dates.empty()) throw std::invalid_argument("ratio_series: need at least one date");
  if (levels.size() < 2) throw std::invalid_argument("ratio_series: need at least two levels");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1])
      throw std::invalid_argument("ratio_series: levels must be ascending");

  RatioSeries s;
  s.ratios.assign(levels.size() - 1, {});
  for (const auto t : dates) {
    s.dates.push_back(t.value);
    std::vector<std::size_t> counts(levels.size(), 0);
    for (const auto& r : records) {
      if (!is_active(r, t)) continue;
      const auto idx =
          resource == RatioResource::cores
              ? level_index(levels, r.cores, LevelMatch::exact)
              : (r.cores > 0 ? level_index(levels, r.memory_mb / r.cores, LevelMatch::nearest)
                             : std::nullopt);
      if (idx) ++counts[*idx];
    }
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
      if (counts[i] > 0 && counts[i + 1] > 0)
        s.ratios[i].push_back(static_cast<double>(counts[i]) / static_cast<double>(counts[i + 1]));
      else
        s.ratios[i].push_back(std::nullopt);
    }
    s.counts.push_back(std::move(counts));
  }
  return s;
}

std::vector<double> lifetimes(std::span<const TraceRecord> records, YearTime cutoff) {
  std::vector<double> out;
  for (const auto& r : records) {
    if (r.first_seen > cutoff) continue;
    const double days = (r.last_seen.value - r.first_seen.value) * kDaysPerYear;
    if (days > 0.0) out.push_back(days);
  }
  return out;
}

}  // namespace hostforge
