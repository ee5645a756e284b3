// Synthetic traces: hosts with activity windows drawn from the lifetime law.

#ifndef HOSTFORGE_TRACEGEN_HPP_
#define HOSTFORGE_TRACEGEN_HPP_

#include <cstdint>
#include <string_view>
#include <vector>

#include "hostforge/ingest.hpp"
#include "hostforge/sampler.hpp"

namespace hostforge {

enum class TraceLayout {
  /// Hosts split evenly over mid-year dates begin+0.5, begin+1.5, ...; each
  /// window is clipped to half a year either side of its date, so a host is
  /// active at exactly one sample date.
  yearly,
  /// Window midpoints uniform in [begin, end), unclipped lifetimes. More
  /// realistic, but long-lived hosts smear the active set at any date.
  continuous,
};

std::string_view to_string(TraceLayout layout);
TraceLayout trace_layout_from_string(std::string_view name);

struct TraceOptions {
  YearTime begin{2006.0};
  YearTime end{2011.0};
  std::size_t hosts = 0;
  std::uint64_t seed = 0;
  CorrelationScheme scheme = CorrelationScheme::vector_times_factor;
  TraceLayout layout = TraceLayout::yearly;
  Execution execution = Execution::parallel;
};

/// Host resources come from the model at the host's anchor date (its sample
/// date, or its window midpoint); lifetimes from params.lifetime.
std::vector<TraceRecord> synthesize_trace(const ModelParams& params, const TraceOptions& options);

/// A trace record for a generated host.
TraceRecord to_trace_record(const HostSpec& h, std::string host_id, YearTime first_seen,
                            YearTime last_seen);

}  // namespace hostforge

#endif  // HOSTFORGE_TRACEGEN_HPP_
