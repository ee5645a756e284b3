#include "hostforge/tracegen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hostforge {

TraceRecord to_trace_record(const HostSpec& h, std::string host_id, YearTime first_seen,
                            YearTime last_seen) {
  TraceRecord r;
  r.host_id = std::move(host_id);
  r.first_seen = first_seen;
  r.last_seen = last_seen;
  r.cores = h.cores;
  r.memory_mb = static_cast<double>(h.memory_mb);
  r.whetstone_mips = h.whetstone_mips;
  r.dhrystone_mips = h.dhrystone_mips;
  r.disk_free_gb = h.disk_gb;
  return r;
}

std::string_view to_string(TraceLayout layout) {
  return layout == TraceLayout::yearly ? "yearly" : "continuous";
}

TraceLayout trace_layout_from_string(std::string_view name) {
  if (name == "yearly") return TraceLayout::yearly;
  if (name == "continuous") return TraceLayout::continuous;
  throw std::invalid_argument("unknown trace layout '" + std::string(name) + "'");
}

namespace {

TraceRecord synth_one(const ModelParams& params, const TraceOptions& o, std::size_t years_in_span,
                      std::uint64_t i) {
  SeededStream stream(o.seed, i);
  const double span = o.end.value - o.begin.value;
  if (o.layout == TraceLayout::yearly) {
    const YearTime date(o.begin.value + static_cast<double>(i % years_in_span) + 0.5);
    const double offset = stream.uniform();
    const double years = sample_lifetime(params.lifetime, stream) / kDaysPerYear;
    const HostSpec h = HostSampler(params, date, o.scheme).sample(stream);
    return to_trace_record(h, "h" + std::to_string(i),
                           YearTime(std::max(date.value - offset * years, date.value - 0.5)),
                           YearTime(std::min(date.value + (1.0 - offset) * years, date.value + 0.5)));
  }
  const YearTime mid(o.begin.value + span * stream.uniform());
  const double years = sample_lifetime(params.lifetime, stream) / kDaysPerYear;
  const HostSpec h = HostSampler(params, mid, o.scheme).sample(stream);
  return to_trace_record(h, "h" + std::to_string(i), YearTime(mid.value - 0.5 * years),
                         YearTime(mid.value + 0.5 * years));
}

}  // namespace

std::vector<TraceRecord> synthesize_trace(const ModelParams& params, const TraceOptions& options) {
  if (!(options.end > options.begin))
    throw std::invalid_argument("synthesize_trace: end must follow begin");
  const auto years = static_cast<std::size_t>(
      std::floor(options.end.value - options.begin.value + 1e-9));
  if (options.layout == TraceLayout::yearly && years == 0)
    throw std::invalid_argument("synthesize_trace: yearly layout needs a span of at least a year");
  std::vector<TraceRecord> out(options.hosts);
  const auto n = static_cast<std::int64_t>(options.hosts);
  if (options.execution == Execution::serial) {
    for (std::int64_t i = 0; i < n; ++i) out[i] = synth_one(params, options, years, i);
  } else {
#pragma omp parallel for schedule(static) num_threads(worker_count())
    for (std::int64_t i = 0; i < n; ++i) out[i] = synth_one(params, options, years, i);
  }
  return out;
}

}  // namespace hostforge
