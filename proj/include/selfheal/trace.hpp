#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "selfheal/types.hpp"

namespace selfheal {

struct TraceEntry {
    Seconds time = 0.0;
    FailureKind kind = FailureKind::CF1;
    /// Resolved against the live model at injection time.
    std::uint64_t selector = 0;
    /// Pinned target for scripted scenarios; bypasses the selector.
    std::optional<ElementRef> target;
};

/// Time-sorted failure injections plus the provenance of the generator run.
struct FailureTrace {
    std::string model = "custom";
    std::string fgs = "-";
    std::string iat = "-";
    std::string fet = "-";
    std::size_t bursts = 0;
    Seconds duration = 0.0;
    std::uint64_t seed = 0;
    std::vector<TraceEntry> entries;
    /// Burst structure as generated; not serialized.
    std::vector<Seconds> burst_starts;
    std::vector<std::size_t> burst_sizes;

    std::size_t density() const { return entries.size(); }
};

/// CSV with a `# key=value` header block, then `time_s,cf_kind,target_selector`.
void write_trace(std::ostream& out, const FailureTrace& trace);
std::string trace_to_string(const FailureTrace& trace);
FailureTrace read_trace(std::istream& in);

void save_trace(const std::string& path, const FailureTrace& trace);
FailureTrace load_trace(const std::string& path);

}  // namespace selfheal
