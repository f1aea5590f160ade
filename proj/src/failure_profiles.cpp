#include "selfheal/failure_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace selfheal {

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

double positive_sample(const Distribution& dist, Rng& rng) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const double v = dist.sample(rng);
        if (v > 0.0) return v;
    }
    throw Error("distribution " + dist.describe() + " yields no positive samples");
}

std::size_t round_size(double v) {
    const double r = std::floor(v + 0.5);
    return r < 1.0 ? 1 : static_cast<std::size_t>(r);
}

double truncated_offset(Rng& rng, Seconds fet, Seconds upper) {
    const double hi = std::min(fet, upper);
    if (!(hi > 0.0)) return 0.0;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const double v = rng.normal(fet / 2.0, fet / 6.0);
        if (v >= 0.0 && v <= hi) return v;
    }
    return std::clamp(fet / 2.0, 0.0, hi);
}

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double sq = 0.0;
    for (double x : xs) sq += (x - m) * (x - m);
    return std::sqrt(sq / static_cast<double>(xs.size() - 1));
}

FailureKind kind_at(std::size_t index) {
    static constexpr FailureKind kinds[] = {FailureKind::CF1, FailureKind::CF2, FailureKind::CF3};
    return kinds[index % 3];
}

}  // namespace

double Distribution::sample(Rng& rng) const {
    switch (kind) {
        case Kind::Lognormal: return rng.lognormal(a, b);
        case Kind::Normal: return rng.normal(a, b);
        case Kind::Constant: return a;
    }
    return a;
}

std::string Distribution::describe() const {
    switch (kind) {
        case Kind::Lognormal: return "LOGN(" + fmt_g(a) + "," + fmt_g(b) + ")";
        case Kind::Normal: return "N(" + fmt_g(a) + "," + fmt_g(b) + ")";
        case Kind::Constant: return fmt_g(a);
    }
    return "?";
}

FailureProfileModel profile_model(const std::string& name, TraceLength length) {
    const bool is_short = length == TraceLength::Short;
    constexpr Seconds kHour = 3600.0;
    constexpr Seconds kMonth = 30.0 * 24.0 * kHour;
    FailureProfileModel m;
    m.name = name;
    if (name == "lri") {
        m.fgs = Distribution::lognormal(1.32, 0.77);
        m.iat = Distribution::lognormal(-1.46, 1.28);
        m.fet = 100.0;
        m.bursts = is_short ? 50 : 1355;
        m.duration = is_short ? 41.2 * kHour : kMonth;
        return m;
    }
    if (name == "deug") {
        m.fgs = Distribution::lognormal(2.15, 0.70);
        m.iat = Distribution::lognormal(-2.28, 1.35);
        m.fet = 150.0;
        m.bursts = is_short ? 50 : 2843;
        m.duration = is_short ? 21.4 * kHour : kMonth;
        return m;
    }
    if (name == "grid5000") {
        m.fgs = Distribution::lognormal(1.88, 1.25);
        m.iat = Distribution::lognormal(-1.39, 1.03);
        m.fet = 250.0;
        m.bursts = is_short ? 50 : 1678;
        m.duration = is_short ? 24.0 * kHour : kMonth;
        return m;
    }
    if (!is_short) throw Error("model " + name + " has no long trace");
    m.duration = 24.0 * kHour;
    m.density = kGrid5000ShortDensity;
    if (name == "uniform") {
        m.fgs = Distribution::normal(22.85, 20.68);
        m.iat = Distribution::constant(1728.0);
        m.fet = 250.0;
        m.bursts = 50;
        return m;
    }
    if (name == "single") {
        m.fgs = Distribution::constant(1.0);
        m.iat = Distribution::constant(77.4);
        m.fet = 0.0;
        m.bursts = kGrid5000ShortDensity;
        return m;
    }
    if (name == "bigburst") {
        m.fgs = Distribution::normal(238.0, 97.3);
        m.iat = Distribution::normal(3521.4, 5418.6);
        m.fet = 250.0;
        m.bursts = 6;
        return m;
    }
    throw Error("unknown failure profile model: " + name);
}

FailureTrace generate_synthetic(std::size_t fgs, std::size_t runs, Seconds iat_s, std::uint64_t seed) {
    if (fgs == 0 || runs == 0) throw Error("synthetic trace needs fgs >= 1 and runs >= 1");
    Rng rng(seed);
    FailureTrace trace;
    trace.model = "synthetic";
    trace.fgs = std::to_string(fgs);
    trace.iat = fmt_g(iat_s);
    trace.fet = "0";
    trace.bursts = runs;
    trace.duration = static_cast<double>(runs) * iat_s;
    trace.seed = seed;
    const std::size_t offset = rng.uniform_int(0, 2);
    std::size_t counter = 0;
    for (std::size_t r = 0; r < runs; ++r) {
        const Seconds start = static_cast<double>(r) * iat_s;
        trace.burst_starts.push_back(start);
        trace.burst_sizes.push_back(fgs);
        for (std::size_t j = 0; j < fgs; ++j) {
            trace.entries.push_back({start, kind_at(offset + counter++), rng.next(), std::nullopt});
        }
    }
    return trace;
}

std::vector<std::size_t> normalize_sizes(std::span<const double> sizes, std::size_t total) {
    const std::size_t n = sizes.size();
    if (n == 0) throw Error("no bursts to normalize");
    if (total < n) throw Error("density smaller than the number of bursts");
    std::vector<double> weights(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = std::max(sizes[i] - 1.0, 0.0);
        sum += weights[i];
    }
    if (sum <= 0.0) {
        std::fill(weights.begin(), weights.end(), 1.0);
        sum = static_cast<double>(n);
    }
    const std::size_t extra = total - n;
    std::vector<std::size_t> out(n, 1);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double share = weights[i] * static_cast<double>(extra) / sum;
        const auto whole = static_cast<std::size_t>(std::floor(share));
        out[i] += whole;
        assigned += whole;
        remainders.emplace_back(share - static_cast<double>(whole), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& x, const auto& y) { return x.first > y.first; });
    for (std::size_t i = 0; assigned < extra; ++i, ++assigned) ++out[remainders[i % n].second];
    return out;
}

FailureTrace generate_realistic(const FailureProfileModel& model, std::uint64_t seed) {
    if (model.bursts == 0 || !(model.duration > 0.0) || model.fet < 0.0) {
        throw Error("malformed failure profile model " + model.name);
    }
    Rng rng(seed);
    const std::size_t n = model.bursts;

    std::vector<double> raw(n);
    for (double& s : raw) s = static_cast<double>(round_size(model.fgs.sample(rng)));
    std::vector<std::size_t> sizes(n);
    if (model.density) {
        sizes = normalize_sizes(raw, *model.density);
    } else {
        for (std::size_t i = 0; i < n; ++i) sizes[i] = static_cast<std::size_t>(raw[i]);
    }

    std::vector<double> iats(n);
    for (double& v : iats) v = positive_sample(model.iat, rng);
    const double scale = model.duration / std::accumulate(iats.begin(), iats.end(), 0.0);

    FailureTrace trace;
    trace.model = model.name;
    trace.fgs = model.fgs.describe();
    trace.iat = model.iat.describe();
    trace.fet = fmt_g(model.fet);
    trace.bursts = n;
    trace.duration = model.duration;
    trace.seed = seed;

    const std::size_t offset = rng.uniform_int(0, 2);
    std::size_t counter = 0;
    Seconds start = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trace.burst_starts.push_back(start);
        trace.burst_sizes.push_back(sizes[i]);
        for (std::size_t j = 0; j < sizes[i]; ++j) {
            const Seconds t = start + truncated_offset(rng, model.fet, model.duration - start);
            trace.entries.push_back({t, kind_at(offset + counter++), rng.next(), std::nullopt});
        }
        start += iats[i] * scale;
    }
    std::stable_sort(trace.entries.begin(), trace.entries.end(),
                     [](const TraceEntry& x, const TraceEntry& y) { return x.time < y.time; });
    return trace;
}

BurstSummary summarize_bursts(const FailureTrace& trace) {
    if (trace.burst_sizes.empty()) throw Error("trace carries no burst structure");
    BurstSummary summary;
    summary.starts = trace.burst_starts;
    for (std::size_t size : trace.burst_sizes) summary.sizes.push_back(static_cast<double>(size));
    for (std::size_t i = 1; i < summary.starts.size(); ++i) {
        summary.inter_arrivals.push_back(summary.starts[i] - summary.starts[i - 1]);
    }
    return summary;
}

std::vector<double> bootstrap_means(std::span<const double> sample, std::size_t resamples, Rng& rng) {
    if (sample.empty()) throw Error("bootstrap over an empty sample");
    std::vector<double> means;
    means.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < sample.size(); ++i) sum += sample[rng.uniform_int(0, sample.size() - 1)];
        means.push_back(sum / static_cast<double>(sample.size()));
    }
    return means;
}

FailureProfileModel derive_uniform_variant(const FailureTrace& base, std::uint64_t seed,
                                           std::size_t resamples) {
    const BurstSummary summary = summarize_bursts(base);
    Rng rng(seed);
    const auto means = bootstrap_means(summary.sizes, resamples, rng);
    FailureProfileModel m;
    m.name = "uniform";
    m.fgs = Distribution::normal(mean_of(means), 2.0 * sd_of(means));
    m.bursts = summary.sizes.size();
    m.iat = Distribution::constant(base.duration / static_cast<double>(m.bursts));
    m.fet = std::stod(base.fet);
    m.duration = base.duration;
    m.density = base.density();
    return m;
}

FailureProfileModel derive_single_variant(const FailureTrace& base) {
    if (base.density() == 0) throw Error("single variant of an empty trace");
    FailureProfileModel m;
    m.name = "single";
    m.fgs = Distribution::constant(1.0);
    m.bursts = base.density();
    m.iat = Distribution::constant(base.duration / static_cast<double>(m.bursts));
    m.fet = 0.0;
    m.duration = base.duration;
    m.density = base.density();
    return m;
}

FailureProfileModel derive_bigburst_variant(const FailureTrace& base, std::uint64_t seed,
                                            std::size_t resamples, double fgs_threshold,
                                            Seconds iat_threshold) {
    const BurstSummary summary = summarize_bursts(base);
    std::vector<double> fgs_tail;
    for (double s : summary.sizes) {
        if (s >= fgs_threshold) fgs_tail.push_back(s);
    }
    if (fgs_tail.empty()) throw InsufficientTailSamples("no base burst reaches the FGS threshold");
    std::vector<double> iat_tail;
    for (double v : summary.inter_arrivals) {
        if (v >= iat_threshold) iat_tail.push_back(v);
    }
    if (iat_tail.empty()) throw InsufficientTailSamples("no base inter-arrival reaches the IAT threshold");

    Rng rng(seed);
    const auto fgs_means = bootstrap_means(fgs_tail, resamples, rng);
    const auto iat_means = bootstrap_means(iat_tail, resamples, rng);
    FailureProfileModel m;
    m.name = "bigburst";
    m.fgs = Distribution::normal(mean_of(fgs_means), 2.0 * sd_of(fgs_means));
    m.iat = Distribution::normal(mean_of(iat_means), 2.0 * sd_of(iat_means));
    m.fet = std::stod(base.fet);
    m.duration = base.duration;
    m.density = base.density();
    const double n = std::floor(static_cast<double>(base.density()) / m.fgs.a + 0.5);
    m.bursts = static_cast<std::size_t>(std::max(1.0, n));
    return m;
}

std::optional<std::uint64_t> find_seed_with_density(const FailureProfileModel& model,
                                                    std::size_t density, std::uint64_t start,
                                                    std::uint64_t limit) {
    for (std::uint64_t seed = start; seed < start + limit; ++seed) {
        if (generate_realistic(model, seed).density() == density) return seed;
    }
    return std::nullopt;
}

FailureTrace grid5000_base_trace() {
    FailureTrace trace = generate_realistic(profile_model("grid5000"), kGrid5000ShortSeed);
    if (trace.density() != kGrid5000ShortDensity) throw Error("pinned Grid5000 seed drifted");
    return trace;
}

}  // namespace selfheal
