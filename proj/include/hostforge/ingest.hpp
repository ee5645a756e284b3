// Trace ingestion: parsing, validity filters, active-host windows, snapshot
// statistics, and the per-date series the fitter consumes.

#ifndef HOSTFORGE_INGEST_HPP_
#define HOSTFORGE_INGEST_HPP_

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hostforge/model.hpp"
#include "hostforge/statfit.hpp"

namespace hostforge {

struct TraceRecord {
  std::string host_id;
  YearTime first_seen;
  YearTime last_seen;
  int cores = 0;
  double memory_mb = 0.0;
  double whetstone_mips = 0.0;
  double dhrystone_mips = 0.0;
  double disk_free_gb = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline constexpr std::string_view kTraceCsvHeader =
    "host_id,first_seen,last_seen,cores,memory_mb,whetstone_mips,dhrystone_mips,disk_free_gb";

enum class TraceFormat { csv, jsonl };

TraceFormat trace_format_from_string(std::string_view name);

/// Unreadable header, or too many malformed rows.
class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParsedTrace {
  std::vector<TraceRecord> records;
  std::vector<RowError> errors;
};

/// Rows that fail validation go to `errors`. More than 10% malformed rows
/// aborts with TraceFormatError. Timestamps may be fractional years or ISO
/// dates; the form is detected per column from the first data row.
ParsedTrace parse_trace(std::istream& in, TraceFormat format);

/// Fractional-year timestamps, 15 significant digits.
void write_trace(std::ostream& out, std::span<const TraceRecord> records, TraceFormat format);

struct OutlierSplit {
  std::vector<TraceRecord> kept;
  std::vector<TraceRecord> discarded;
};

inline constexpr int kMaxCores = 128;
inline constexpr double kMaxBenchmarkMips = 1e5;
inline constexpr double kMaxMemoryMb = 100.0 * 1024.0;
inline constexpr double kMaxDiskGb = 1e4;

[[nodiscard]] bool is_outlier(const TraceRecord& r) noexcept;
OutlierSplit filter_outliers(std::span<const TraceRecord> records);

/// first_seen < t < last_seen
[[nodiscard]] inline bool is_active(const TraceRecord& r, YearTime t) noexcept {
  return r.first_seen < t && t < r.last_seen;
}
std::vector<TraceRecord> active_at(std::span<const TraceRecord> records, YearTime t);

ResourceColumns columns_of(std::span<const TraceRecord> records);

struct Snapshot {
  YearTime t;
  std::size_t active_count = 0;
  /// False when no host is active; means and stds are then zero.
  bool defined = false;
  /// Population (denominator n) statistics, in ResourceColumns order.
  std::array<double, ResourceColumns::kCount> mean{};
  std::array<double, ResourceColumns::kCount> stddev{};
};

Snapshot snapshot_stats(std::span<const TraceRecord> records, YearTime t);

enum class LevelMatch {
  exact,    // value must equal a level
  nearest,  // nearest level in log space
};

/// Index of the level a value belongs to, if any.
std::optional<std::size_t> level_index(std::span<const int> levels, double value,
                                       LevelMatch match);

/// Count ratios between adjacent levels at each date. ratios[pair][date] is
/// empty where either count is zero.
struct RatioSeries {
  std::vector<double> dates;
  std::vector<std::vector<std::optional<double>>> ratios;
  std::vector<std::vector<std::size_t>> counts;  // [date][level]
};

enum class RatioResource { cores, per_core_memory };

RatioSeries ratio_series(std::span<const TraceRecord> records, std::span<const int> levels,
                         std::span<const YearTime> dates, RatioResource resource);

/// (last_seen - first_seen) in days for hosts first seen no later than cutoff.
/// Zero-length lifetimes are skipped.
std::vector<double> lifetimes(std::span<const TraceRecord> records, YearTime cutoff);

inline constexpr double kDaysPerYear = 365.25;

}  // namespace hostforge

#endif  // HOSTFORGE_INGEST_HPP_
