#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "praudit/model.hpp"

namespace praudit {

// Standard normal CDF Phi(z) via the complementary error function:
// Phi(z) = erfc(-z / sqrt(2)) / 2. Relative error well below 1e-6 for
// results down to 1e-15 (libm erfc carries the precision).
double normal_tail(double z);

inline constexpr std::array<double, 3> kDefaultAlphaStars{0.05, 0.01, 0.001};

// Significance stars for a p-value against three strictly descending
// thresholds: "***" at the smallest, "**" at the middle, "*" at the
// largest, "" above all three.
std::string stars(double p, const std::array<double, 3>& thresholds = kDefaultAlphaStars);

struct ZTestResult {
    double z = 0.0;
    double p_two_sided = 1.0;
    std::string stars;      // consistent with the thresholds the test was run with
    bool degenerate = false; // pooled proportion hit 0 or 1: variance collapses
    std::string note;        // explanation when degenerate (z and p are NaN then)
};

// Pooled two-proportion z-test:
//   pbar = (p1*n1 + p2*n2) / (n1 + n2)
//   z    = (p1 - p2) / sqrt(pbar*(1-pbar)*(1/n1 + 1/n2))
//   p    = 2 * Phi(-|z|)
// When pbar is 0 or 1 the variance is zero; the result comes back with
// degenerate=true and an explanatory note instead of a z value.
// Throws ValidationError on n < 1 or proportions outside [0,1].
ZTestResult pooled_two_proportion_z(double p1, long n1, double p2, long n2,
                                    const std::array<double, 3>& thresholds = kDefaultAlphaStars);

// splitmix64: tiny, well-known 64-bit mixing generator. Used everywhere
// randomness is needed so results are bit-identical across platforms and
// thread counts (std::uniform_int_distribution is implementation-defined;
// this is not).
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, n) by 128-bit multiply-shift (unbiased to ~n/2^64).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct BootstrapPlan {
    long replicates = 2000;
    std::uint64_t seed = 42;
    double level = 0.95; // two-sided confidence level in (0,1)
    int threads = 1;     // replicates are seed-independent, so any count gives identical bytes
};

struct BootstrapResult {
    double point = 0.0; // statistic on the original data
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    long replicates = 0;
    std::uint64_t seed = 0;
    long discarded = 0; // replicates whose statistic was undefined (NaN or threw)
};

// Statistic over a (re)sampled view. Returning NaN or throwing an
// AuditError marks the replicate undefined; undefined replicates are
// discarded and counted.
using Statistic = std::function<double(const DatasetView&)>;

// Percentile bootstrap. Resamples records with replacement — within each
// stratum when stratify_by is non-empty — and takes the percentile CI of
// the replicate statistics at `level` (linear interpolation between order
// statistics).
//
// Stratification: a record belongs to the first selector it matches;
// records matching none form an implicit final stratum, so strata always
// cover the dataset and every resample has exactly n records.
//
// Determinism contract: replicate i draws from its own SplitMix64 stream
// with initial state (seed XOR i). Replicates share no state, so the result
// is byte-identical for a given seed across runs and thread counts.
//
// Throws AuditError when every replicate is undefined.
BootstrapResult bootstrap(const LabeledDataset& dataset, const Statistic& statistic,
                          const BootstrapPlan& plan,
                          const std::vector<SubgroupSelector>& stratify_by = {});

} // namespace praudit
