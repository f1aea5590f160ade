#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfheal/random.hpp"
#include "selfheal/trace.hpp"

namespace selfheal {

struct Distribution {
    enum class Kind : std::uint8_t { Lognormal, Normal, Constant };

    Kind kind = Kind::Constant;
    double a = 0.0;  // mu / mean / value
    double b = 0.0;  // sigma / sd

    static Distribution lognormal(double mu, double sigma) { return {Kind::Lognormal, mu, sigma}; }
    static Distribution normal(double mean, double sd) { return {Kind::Normal, mean, sd}; }
    static Distribution constant(double value) { return {Kind::Constant, value, 0.0}; }

    double sample(Rng& rng) const;
    /// LOGN(mu,sigma), N(mean,sd) or the constant.
    std::string describe() const;
};

struct FailureProfileModel {
    std::string name;
    Distribution fgs;
    Distribution iat;
    Seconds fet = 0.0;
    std::size_t bursts = 1;
    Seconds duration = 86400.0;
    /// When set, burst sizes are normalized so the trace has exactly this many failures.
    std::optional<std::size_t> density;
};

enum class TraceLength : std::uint8_t { Short, Long };

/// Failure-profile model by name: lri, deug, grid5000, uniform, single, bigburst.
/// The three variants are only defined for the short trace.
FailureProfileModel profile_model(const std::string& name, TraceLength length = TraceLength::Short);

/// `runs` groups of exactly `fgs` simultaneous failures, `iat_s` apart.
FailureTrace generate_synthetic(std::size_t fgs, std::size_t runs, Seconds iat_s, std::uint64_t seed);

/// Burst starts from sampled inter-arrival times rescaled to the model duration;
/// failures spread over each burst by a normal truncated to [0, FET].
FailureTrace generate_realistic(const FailureProfileModel& model, std::uint64_t seed);

/// Burst structure recovered from a generated trace: (start, size) per burst.
struct BurstSummary {
    std::vector<Seconds> starts;
    std::vector<double> sizes;
    std::vector<double> inter_arrivals;
};
BurstSummary summarize_bursts(const FailureTrace& trace);

/// Means of `resamples` bootstrap resamples of `sample`, each of the same size.
std::vector<double> bootstrap_means(std::span<const double> sample, std::size_t resamples, Rng& rng);

FailureProfileModel derive_uniform_variant(const FailureTrace& base, std::uint64_t seed,
                                           std::size_t resamples = 1000);
FailureProfileModel derive_single_variant(const FailureTrace& base);
FailureProfileModel derive_bigburst_variant(const FailureTrace& base, std::uint64_t seed,
                                            std::size_t resamples = 1000,
                                            double fgs_threshold = 100.0,
                                            Seconds iat_threshold = 1000.0);

/// Scales burst sizes so they sum to `total`, keeping each ≥ 1 (largest remainder).
std::vector<std::size_t> normalize_sizes(std::span<const double> sizes, std::size_t total);

/// Seed of the pinned Grid5000 short base trace, whose density is exactly 1116.
inline constexpr std::uint64_t kGrid5000ShortSeed = 3701;
inline constexpr std::size_t kGrid5000ShortDensity = 1116;

/// First seed in [start, start + limit) whose trace has the given density.
std::optional<std::uint64_t> find_seed_with_density(const FailureProfileModel& model,
                                                    std::size_t density, std::uint64_t start,
                                                    std::uint64_t limit);

/// The pinned Grid5000 short trace.
FailureTrace grid5000_base_trace();

}  // namespace selfheal
