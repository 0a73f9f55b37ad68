#include "praudit/config.hpp"

#include <algorithm>

namespace praudit {

std::string z_mode_name(ZMode mode) {
    return mode == ZMode::GroupSize ? "group_size" : "metric_support";
}

std::vector<SubgroupSelector> AuditConfig::selectors_for(const LabeledDataset& dataset) const {
    std::vector<SubgroupSelector> selectors;
    if (!groups.empty()) {
        for (const auto& g : groups) {
            selectors.push_back(SubgroupSelector{g.name, group_attribute, g.values});
        }
        return selectors;
    }
    // Discovery: one selector per distinct observed value, in order of
    // first appearance (deterministic and file-order stable).
    std::vector<std::string> seen;
    for (const auto& record : dataset.records) {
        auto it = record.groups.find(group_attribute);
        if (it == record.groups.end()) {
            throw UnknownAttributeError("record '" + record.id + "' lacks attribute '" +
                                        group_attribute + "'");
        }
        if (std::find(seen.begin(), seen.end(), it->second) == seen.end()) {
            seen.push_back(it->second);
        }
    }
    for (const auto& value : seen) {
        selectors.push_back(value_selector(group_attribute, value));
    }
    return selectors;
}

void validate_config(const AuditConfig& config) {
    if (config.positive_label.empty()) throw ConfigError("positive_label is required");
    if (config.group_attribute.empty()) throw ConfigError("group_attribute is required");
    if (config.negative_label && *config.negative_label == config.positive_label) {
        throw ConfigError("negative_label must differ from positive_label");
    }
    if (!(config.divergence.kl_smoothing_epsilon > 0.0 &&
          config.divergence.kl_smoothing_epsilon < 0.5)) {
        throw ConfigError("kl_smoothing_epsilon must lie in (0, 0.5)");
    }
    if (config.epsilon.fallback < 0.0) throw ConfigError("epsilon default must be >= 0");
    for (const auto& [name, eps] : config.epsilon.per_metric) {
        if (!metric_from_name(name)) throw ConfigError("epsilon for unknown metric '" + name + "'");
        if (eps < 0.0) throw ConfigError("epsilon for '" + name + "' must be >= 0");
    }
    if (config.parity_tolerance < 0.0) throw ConfigError("parity_tolerance must be >= 0");
    if (config.bootstrap.replicates < 1) throw ConfigError("bootstrap replicates must be >= 1");
    if (!(config.bootstrap.level > 0.0 && config.bootstrap.level < 1.0)) {
        throw ConfigError("bootstrap level must lie in (0,1)");
    }
    if (config.bootstrap.threads < 1) throw ConfigError("bootstrap threads must be >= 1");
    const auto& a = config.alpha_stars;
    const bool descending = a[0] > a[1] && a[1] > a[2];
    const bool in_range = a[0] > 0.0 && a[0] < 1.0 && a[2] > 0.0;
    if (!descending || !in_range) {
        throw ConfigError("alpha_stars must be three strictly descending values in (0,1)");
    }
    for (const auto& g : config.groups) {
        if (g.name.empty()) throw ConfigError("group selector with empty name");
        if (g.values.empty()) throw ConfigError("group selector '" + g.name + "' has no values");
    }
    if (config.transport.epsilon && *config.transport.epsilon < 0.0) {
        throw ConfigError("transport epsilon must be >= 0");
    }
    if (config.transport.min_overall_accuracy &&
        !(*config.transport.min_overall_accuracy >= 0.0 &&
          *config.transport.min_overall_accuracy <= 1.0)) {
        throw ConfigError("transport min_overall_accuracy must lie in [0,1]");
    }
}

} // namespace praudit
