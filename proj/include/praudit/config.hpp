#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "praudit/divergence.hpp"
#include "praudit/metrics.hpp"
#include "praudit/model.hpp"

namespace praudit {

// How the report's Z column is computed for a metric gap between two groups.
//
// GroupSize (default): pooled two-proportion z with the subgroup sample
// sizes as denominators for every metric — including precision, F1 and the
// AUCs, where a proportion test is statistically unorthodox. This is the
// arithmetic behind published audit tables of this shape, kept as the
// default so their Z columns reproduce.
//
// MetricSupport: each metric's true denominator (predicted positives for
// precision, actual positives for sensitivity, ...), with a bootstrap-based
// z for F1 and the AUCs, which are not proportions of anything.
enum class ZMode { GroupSize, MetricSupport };

std::string z_mode_name(ZMode mode);

// Named subgroup: selector values for the configured group attribute.
struct GroupSpec {
    std::string name;
    std::set<std::string> values;
};

struct BootstrapSettings {
    bool enabled = true; // compute bootstrap CIs for divergence PR rows
    long replicates = 2000;
    std::uint64_t seed = 42;
    double level = 0.95;
    int threads = 1;
};

// External-transportability gate knobs. Without a metric the gate bounds
// the divergence-based PR; epsilon falls back to EpsilonPolicy.fallback.
// min_overall_accuracy is an informational floor reported alongside the
// gate, never folded into pass/fail (so it stays visible which condition
// failed).
struct TransportSettings {
    std::optional<Metric> metric;
    std::optional<double> epsilon;
    std::optional<double> min_overall_accuracy;
};

// Fully resolved audit configuration. positive_label and group_attribute
// are required; everything else has the documented default.
struct AuditConfig {
    DivergenceSpec divergence;                              // TV, smoothing 1e-6
    DivergenceMode divergence_mode = DivergenceMode::HardLabel;
    Label positive_label;
    std::optional<Label> negative_label;                    // binary orientation check
    std::string group_attribute;
    std::vector<GroupSpec> groups;                          // empty = one selector per observed value
    EpsilonPolicy epsilon;                                  // default 0.05
    double parity_tolerance = 0.05;                         // bounds rates, separate knob from epsilon
    BootstrapSettings bootstrap;
    std::array<double, 3> alpha_stars{0.05, 0.01, 0.001};
    ZMode z_mode = ZMode::GroupSize;
    std::vector<Metric> metrics;                            // empty = auto (7 with scores, 5 without)
    TransportSettings transport;

    // Group selectors against this dataset: the configured groups, or —
    // when none are configured — one selector per distinct observed value
    // of group_attribute, in order of first appearance.
    std::vector<SubgroupSelector> selectors_for(const LabeledDataset& dataset) const;
};

// Range-checks every field; throws ConfigError on violations. load_config
// runs this; call it directly when building configs in code.
void validate_config(const AuditConfig& config);

} // namespace praudit
