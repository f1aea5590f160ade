#include "selfheal/trace.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace selfheal {

namespace {

std::string fixed6(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

}  // namespace

void write_trace(std::ostream& out, const FailureTrace& trace) {
    out << "# model=" << trace.model << '\n'
        << "# fgs=" << trace.fgs << '\n'
        << "# iat=" << trace.iat << '\n'
        << "# fet_s=" << trace.fet << '\n'
        << "# bursts=" << trace.bursts << '\n'
        << "# duration_s=" << fixed6(trace.duration) << '\n'
        << "# seed=" << trace.seed << '\n'
        << "# density=" << trace.density() << '\n'
        << "time_s,cf_kind,target_selector\n";
    for (const TraceEntry& e : trace.entries) {
        out << fixed6(e.time) << ',' << to_string(e.kind) << ',' << e.selector << '\n';
    }
}

std::string trace_to_string(const FailureTrace& trace) {
    std::ostringstream out;
    write_trace(out, trace);
    return out.str();
}

FailureTrace read_trace(std::istream& in) {
    FailureTrace trace;
    std::string line;
    std::size_t declared_density = 0;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line.starts_with("# ")) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string value = line.substr(eq + 1);
            if (key == "model") trace.model = value;
            else if (key == "fgs") trace.fgs = value;
            else if (key == "iat") trace.iat = value;
            else if (key == "fet_s") trace.fet = value;
            else if (key == "bursts") trace.bursts = std::stoul(value);
            else if (key == "duration_s") trace.duration = std::stod(value);
            else if (key == "seed") trace.seed = std::stoull(value);
            else if (key == "density") declared_density = std::stoul(value);
            continue;
        }
        if (!header_seen) {
            if (line != "time_s,cf_kind,target_selector") {
                throw Error("trace line " + std::to_string(line_no) + ": expected column header");
            }
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string time, kind, selector;
        if (!std::getline(row, time, ',') || !std::getline(row, kind, ',') ||
            !std::getline(row, selector)) {
            throw Error("trace line " + std::to_string(line_no) + ": expected 3 fields");
        }
        TraceEntry entry;
        try {
            entry.time = std::stod(time);
            entry.selector = std::stoull(selector);
        } catch (const std::exception&) {
            throw Error("trace line " + std::to_string(line_no) + ": bad number");
        }
        entry.kind = failure_kind_from_string(kind);
        if (!trace.entries.empty() && entry.time < trace.entries.back().time) {
            throw Error("trace line " + std::to_string(line_no) + ": times not sorted");
        }
        trace.entries.push_back(entry);
    }
    if (!header_seen) throw Error("trace has no column header");
    if (declared_density != 0 && declared_density != trace.entries.size()) {
        throw Error("trace density header does not match entry count");
    }
    return trace;
}

void save_trace(const std::string& path, const FailureTrace& trace) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    write_trace(out, trace);
}

FailureTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    return read_trace(in);
}

}  // namespace selfheal
