#include "praudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace praudit {

double normal_tail(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

std::string stars(double p, const std::array<double, 3>& thresholds) {
    if (!(thresholds[0] > thresholds[1] && thresholds[1] > thresholds[2])) {
        throw ValidationError("star thresholds must be strictly descending");
    }
    if (p <= thresholds[2]) return "***";
    if (p <= thresholds[1]) return "**";
    if (p <= thresholds[0]) return "*";
    return "";
}

ZTestResult pooled_two_proportion_z(double p1, long n1, double p2, long n2,
                                    const std::array<double, 3>& thresholds) {
    if (n1 < 1 || n2 < 1) throw ValidationError("z-test group sizes must be >= 1");
    if (!(p1 >= 0.0 && p1 <= 1.0) || !(p2 >= 0.0 && p2 <= 1.0)) {
        throw ValidationError("z-test proportions must lie in [0,1]");
    }

    ZTestResult result;
    const double pooled = (p1 * static_cast<double>(n1) + p2 * static_cast<double>(n2)) /
                          static_cast<double>(n1 + n2);
    if (pooled <= 0.0 || pooled >= 1.0) {
        // Both proportions sit on the same boundary: the pooled variance is
        // zero and the statistic has no value. Report the state, not a number.
        result.degenerate = true;
        result.z = std::numeric_limits<double>::quiet_NaN();
        result.p_two_sided = std::numeric_limits<double>::quiet_NaN();
        result.note = "pooled proportion is " + std::string(pooled <= 0.0 ? "0" : "1") +
                      "; variance degenerate, z undefined";
        return result;
    }

    const double variance = pooled * (1.0 - pooled) *
                            (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2));
    result.z = (p1 - p2) / std::sqrt(variance);
    result.p_two_sided = 2.0 * normal_tail(-std::fabs(result.z));
    result.stars = stars(result.p_two_sided, thresholds);
    return result;
}

namespace {

// Strata as index lists over the dataset. A record joins the first selector
// it matches; leftovers form an implicit final stratum so the strata always
// partition the dataset.
std::vector<std::vector<std::size_t>> build_strata(const LabeledDataset& dataset,
                                                   const std::vector<SubgroupSelector>& by) {
    std::vector<std::vector<std::size_t>> strata;
    if (by.empty()) {
        strata.push_back(whole_view(dataset).idx);
        return strata;
    }
    strata.resize(by.size() + 1);
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const auto& record = dataset.records[i];
        std::size_t stratum = by.size(); // implicit remainder stratum
        for (std::size_t s = 0; s < by.size(); ++s) {
            auto it = record.groups.find(by[s].attribute);
            if (it == record.groups.end()) {
                throw UnknownAttributeError("record '" + record.id + "' lacks attribute '" +
                                            by[s].attribute + "'");
            }
            if (by[s].values.count(it->second)) {
                stratum = s;
                break;
            }
        }
        strata[stratum].push_back(i);
    }
    while (!strata.empty() && strata.back().empty()) strata.pop_back();
    for (const auto& s : strata) {
        if (s.empty()) throw EmptySelectionError("bootstrap stratum matched no records");
    }
    return strata;
}

// Percentile with linear interpolation between order statistics
// (R type-7); `sorted` must be ascending and non-empty.
double percentile(const std::vector<double>& sorted, double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + (sorted[lo + 1] - sorted[lo]) * frac;
}

} // namespace

BootstrapResult bootstrap(const LabeledDataset& dataset, const Statistic& statistic,
                          const BootstrapPlan& plan,
                          const std::vector<SubgroupSelector>& stratify_by) {
    if (plan.replicates < 1) throw ValidationError("bootstrap needs >= 1 replicate");
    if (!(plan.level > 0.0 && plan.level < 1.0)) {
        throw ValidationError("bootstrap level must lie in (0,1)");
    }
    const int threads = std::max(1, plan.threads);

    const auto strata = build_strata(dataset, stratify_by);
    const std::size_t n = dataset.records.size();

    BootstrapResult result;
    result.level = plan.level;
    result.replicates = plan.replicates;
    result.seed = plan.seed;
    result.point = statistic(whole_view(dataset));

    // One slot per replicate, filled independently: replicate i draws from
    // a SplitMix64 stream with initial state (seed XOR i), so the outcome
    // is identical no matter how replicates are distributed over threads.
    std::vector<double> stats(static_cast<std::size_t>(plan.replicates));
    auto run_range = [&](long begin, long end) {
        DatasetView resample;
        resample.data = &dataset;
        for (long i = begin; i < end; ++i) {
            SplitMix64 rng{plan.seed ^ static_cast<std::uint64_t>(i)};
            resample.idx.clear();
            resample.idx.reserve(n);
            for (const auto& stratum : strata) {
                const std::uint64_t size = stratum.size();
                for (std::size_t d = 0; d < stratum.size(); ++d) {
                    resample.idx.push_back(stratum[rng.next_below(size)]);
                }
            }
            double value;
            try {
                value = statistic(resample);
            } catch (const AuditError&) {
                // Undefined on this resample (e.g. a subgroup vanished):
                // discard and count, per the statistic contract.
                value = std::numeric_limits<double>::quiet_NaN();
            }
            stats[static_cast<std::size_t>(i)] = value;
        }
    };

    if (threads == 1 || plan.replicates < 2 * threads) {
        run_range(0, plan.replicates);
    } else {
        std::vector<std::thread> pool;
        const long chunk = (plan.replicates + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const long begin = t * chunk;
            const long end = std::min<long>(begin + chunk, plan.replicates);
            if (begin >= end) break;
            pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    std::vector<double> defined;
    defined.reserve(stats.size());
    for (double v : stats) {
        if (std::isnan(v)) ++result.discarded;
        else defined.push_back(v);
    }
    if (defined.empty()) {
        throw AuditError("bootstrap: statistic undefined on every replicate");
    }
    std::sort(defined.begin(), defined.end());

    const double alpha = (1.0 - plan.level) / 2.0;
    result.lo = percentile(defined, alpha);
    result.hi = percentile(defined, 1.0 - alpha);
    return result;
}

} // namespace praudit
