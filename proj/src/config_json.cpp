#include "config_json.hpp"

namespace praudit::detail {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void unknown_key(const std::string& context, const std::string& key) {
    throw ConfigError("'" + context + "': unknown key '" + key + "'");
}

double expect_number(const json& v, const std::string& context, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + context + "': " + key + " must be a number");
    return v.get<double>();
}

std::string expect_string(const json& v, const std::string& context, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + context + "': " + key + " must be a string");
    return v.get<std::string>();
}

namespace {

DivergenceKind parse_divergence(const std::string& name, const std::string& context) {
    if (name == "tv") return DivergenceKind::TV;
    if (name == "kl") return DivergenceKind::KL;
    if (name == "js") return DivergenceKind::JS;
    throw ConfigError("'" + context + "': divergence must be tv, kl or js, got '" + name + "'");
}

void parse_epsilon(const json& v, AuditConfig& config, const std::string& context) {
    if (v.is_number()) {
        config.epsilon.fallback = v.get<double>();
        return;
    }
    if (!v.is_object()) {
        throw ConfigError("'" + context + "': epsilon must be a number or an object");
    }
    for (const auto& [key, value] : v.items()) {
        if (key == "default") {
            config.epsilon.fallback = expect_number(value, context, "epsilon.default");
        } else if (key == "per_metric") {
            if (!value.is_object()) {
                throw ConfigError("'" + context + "': epsilon.per_metric must be an object");
            }
            for (const auto& [metric, eps] : value.items()) {
                config.epsilon.per_metric[metric] =
                    expect_number(eps, context, "epsilon.per_metric." + metric);
            }
        } else {
            unknown_key(context, "epsilon." + key);
        }
    }
}

void parse_groups(const json& v, AuditConfig& config, const std::string& context) {
    if (!v.is_array()) throw ConfigError("'" + context + "': groups must be an array");
    for (const auto& item : v) {
        GroupSpec group;
        if (item.is_string()) {
            // Shorthand: a bare value selects itself and names the group.
            group.name = item.get<std::string>();
            group.values = {group.name};
        } else if (item.is_object()) {
            for (const auto& [key, value] : item.items()) {
                if (key == "name") group.name = expect_string(value, context, "groups.name");
                else if (key == "values") {
                    if (!value.is_array()) {
                        throw ConfigError("'" + context + "': groups.values must be an array");
                    }
                    for (const auto& val : value) {
                        group.values.insert(expect_string(val, context, "groups.values[]"));
                    }
                } else unknown_key(context, "groups." + key);
            }
        } else {
            throw ConfigError("'" + context + "': groups entries must be strings or objects");
        }
        config.groups.push_back(std::move(group));
    }
}

void parse_bootstrap(const json& v, AuditConfig& config, const std::string& context) {
    if (!v.is_object()) throw ConfigError("'" + context + "': bootstrap must be an object");
    for (const auto& [key, value] : v.items()) {
        if (key == "replicates") {
            config.bootstrap.replicates =
                static_cast<long>(expect_number(value, context, "bootstrap.replicates"));
        } else if (key == "seed") {
            if (!value.is_number_unsigned() && !value.is_number_integer()) {
                throw ConfigError("'" + context + "': bootstrap.seed must be an integer");
            }
            config.bootstrap.seed = value.get<std::uint64_t>();
        } else if (key == "level") {
            config.bootstrap.level = expect_number(value, context, "bootstrap.level");
        } else if (key == "enabled") {
            if (!value.is_boolean()) {
                throw ConfigError("'" + context + "': bootstrap.enabled must be a boolean");
            }
            config.bootstrap.enabled = value.get<bool>();
        } else if (key == "threads") {
            config.bootstrap.threads =
                static_cast<int>(expect_number(value, context, "bootstrap.threads"));
        } else unknown_key(context, "bootstrap." + key);
    }
}

void parse_transport(const json& v, AuditConfig& config, const std::string& context) {
    if (!v.is_object()) throw ConfigError("'" + context + "': transport must be an object");
    for (const auto& [key, value] : v.items()) {
        if (key == "metric") {
            if (value.is_null()) continue;
            const std::string name = expect_string(value, context, "transport.metric");
            auto metric = metric_from_name(name);
            if (!metric) {
                throw ConfigError("'" + context + "': unknown transport metric '" + name + "'");
            }
            config.transport.metric = *metric;
        } else if (key == "epsilon") {
            config.transport.epsilon = expect_number(value, context, "transport.epsilon");
        } else if (key == "min_overall_accuracy") {
            config.transport.min_overall_accuracy =
                expect_number(value, context, "transport.min_overall_accuracy");
        } else unknown_key(context, "transport." + key);
    }
}

} // namespace

AuditConfig config_from_json(const json& doc, const std::string& context) {
    if (!doc.is_object()) throw ConfigError("'" + context + "': expected a JSON object");

    AuditConfig config;
    for (const auto& [key, value] : doc.items()) {
        if (key == "divergence") {
            config.divergence.kind = parse_divergence(expect_string(value, context, key), context);
        } else if (key == "kl_smoothing_epsilon") {
            config.divergence.kl_smoothing_epsilon = expect_number(value, context, key);
        } else if (key == "divergence_mode") {
            const std::string mode = expect_string(value, context, key);
            if (mode == "hard_label") config.divergence_mode = DivergenceMode::HardLabel;
            else if (mode == "probabilistic") config.divergence_mode = DivergenceMode::Probabilistic;
            else throw ConfigError("'" + context + "': divergence_mode must be hard_label or "
                                   "probabilistic");
        } else if (key == "positive_label") {
            config.positive_label = expect_string(value, context, key);
        } else if (key == "negative_label") {
            config.negative_label = expect_string(value, context, key);
        } else if (key == "group_attribute") {
            config.group_attribute = expect_string(value, context, key);
        } else if (key == "groups") {
            parse_groups(value, config, context);
        } else if (key == "epsilon") {
            parse_epsilon(value, config, context);
        } else if (key == "parity_tolerance") {
            config.parity_tolerance = expect_number(value, context, key);
        } else if (key == "bootstrap") {
            parse_bootstrap(value, config, context);
        } else if (key == "alpha_stars") {
            if (!value.is_array() || value.size() != 3) {
                throw ConfigError("'" + context + "': alpha_stars must be an array of 3 numbers");
            }
            for (std::size_t i = 0; i < 3; ++i) {
                config.alpha_stars[i] = expect_number(value[i], context, "alpha_stars[]");
            }
        } else if (key == "z_mode") {
            const std::string mode = expect_string(value, context, key);
            if (mode == "group_size") config.z_mode = ZMode::GroupSize;
            else if (mode == "metric_support") config.z_mode = ZMode::MetricSupport;
            else throw ConfigError("'" + context + "': z_mode must be group_size or "
                                   "metric_support");
        } else if (key == "metrics") {
            if (!value.is_array()) throw ConfigError("'" + context + "': metrics must be an array");
            for (const auto& item : value) {
                const std::string name = expect_string(item, context, "metrics[]");
                auto metric = metric_from_name(name);
                if (!metric) throw ConfigError("'" + context + "': unknown metric '" + name + "'");
                config.metrics.push_back(*metric);
            }
        } else if (key == "transport") {
            parse_transport(value, config, context);
        } else {
            unknown_key(context, key);
        }
    }
    return config;
}

ordered_json config_to_json(const AuditConfig& config) {
    ordered_json doc;
    doc["divergence"] = divergence_name(config.divergence.kind);
    doc["kl_smoothing_epsilon"] = config.divergence.kl_smoothing_epsilon;
    doc["divergence_mode"] = divergence_mode_name(config.divergence_mode);
    doc["positive_label"] = config.positive_label;
    if (config.negative_label) doc["negative_label"] = *config.negative_label;
    doc["group_attribute"] = config.group_attribute;
    ordered_json groups = ordered_json::array();
    for (const auto& g : config.groups) {
        ordered_json item;
        item["name"] = g.name;
        item["values"] = g.values; // std::set serializes sorted
        groups.push_back(std::move(item));
    }
    doc["groups"] = std::move(groups);
    ordered_json epsilon;
    epsilon["default"] = config.epsilon.fallback;
    epsilon["per_metric"] = config.epsilon.per_metric;
    doc["epsilon"] = std::move(epsilon);
    doc["parity_tolerance"] = config.parity_tolerance;
    ordered_json bootstrap;
    bootstrap["enabled"] = config.bootstrap.enabled;
    bootstrap["replicates"] = config.bootstrap.replicates;
    bootstrap["seed"] = config.bootstrap.seed;
    bootstrap["level"] = config.bootstrap.level;
    bootstrap["threads"] = config.bootstrap.threads;
    doc["bootstrap"] = std::move(bootstrap);
    doc["alpha_stars"] = config.alpha_stars;
    doc["z_mode"] = z_mode_name(config.z_mode);
    ordered_json metrics = ordered_json::array();
    for (Metric m : config.metrics) metrics.push_back(metric_name(m));
    doc["metrics"] = std::move(metrics);
    ordered_json transport = ordered_json::object(); // default-constructed json is null
    if (config.transport.metric) transport["metric"] = metric_name(*config.transport.metric);
    if (config.transport.epsilon) transport["epsilon"] = *config.transport.epsilon;
    if (config.transport.min_overall_accuracy) {
        transport["min_overall_accuracy"] = *config.transport.min_overall_accuracy;
    }
    doc["transport"] = std::move(transport);
    return doc;
}

} // namespace praudit::detail
