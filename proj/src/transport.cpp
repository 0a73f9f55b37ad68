#include "praudit/transport.hpp"

#include <cmath>

namespace praudit {

std::vector<GateResult> check_metric_representativity(
    const std::map<Metric, std::optional<double>>& pr_values,
    const EpsilonPolicy& policy,
    const std::string& group_name,
    Domain domain) {
    std::vector<GateResult> gates;
    gates.reserve(pr_values.size());
    for (const auto& [metric, pr] : pr_values) {
        const std::string name = metric_name(metric);
        if (!pr) {
            throw ValidationError("representativity gate for " + name +
                                  " has no PR value to bound");
        }
        GateResult gate;
        gate.metric = name;
        gate.group = group_name;
        gate.epsilon = policy.tolerance_for(name);
        gate.margin = gate.epsilon - std::fabs(*pr);
        gate.passed = gate.margin >= 0.0;
        gate.domain = domain;
        gates.push_back(std::move(gate));
    }
    return gates;
}

namespace {

// Records tagged with `domain`; a dataset with no such tags is used
// wholesale (single-domain dumps rarely bother tagging).
DatasetView domain_view(const LabeledDataset& dataset, Domain domain) {
    DatasetView view;
    view.data = &dataset;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        if (dataset.records[i].domain == domain) view.idx.push_back(i);
    }
    if (view.idx.empty()) return whole_view(dataset);
    return view;
}

PrEstimate pr_on_view(const DatasetView& population, const SubgroupSelector& subgroup,
                      const AuditConfig& config) {
    if (config.transport.metric) {
        const Metric metric = *config.transport.metric;
        DatasetView sub = select(population, subgroup);
        const MetricValue on_sub = evaluate_metric(sub, metric, config.positive_label);
        const MetricValue on_pop = evaluate_metric(population, metric, config.positive_label);
        if (!on_sub.defined() || !on_pop.defined()) {
            throw NotAssessableError("transport metric " + metric_name(metric) +
                                     " is undefined on " +
                                     (on_sub.defined() ? "the population" : "the subgroup"));
        }
        PrEstimate estimate;
        estimate.pr = metric_pr(on_sub, on_pop);
        estimate.subgroup_term = *on_sub.value;
        estimate.population_term = *on_pop.value;
        estimate.n_subgroup = static_cast<long>(sub.size());
        estimate.n_population = static_cast<long>(population.size());
        estimate.basis = metric_name(metric);
        return estimate;
    }
    const int positive_index =
        population.data->label_index(config.positive_label);
    return empirical_pr(population, subgroup, config.divergence, config.divergence_mode,
                        positive_index);
}

double predicted_positive_rate(const DatasetView& view, const Label& positive) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        if (view[i].y_pred == positive) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(view.size());
}

} // namespace

TransportAssessment check_external_transportability(const LabeledDataset& target_dataset,
                                                    const SubgroupSelector& subgroup,
                                                    const AuditConfig& config,
                                                    const LabeledDataset* source_dataset) {
    if (target_dataset.records.empty()) {
        throw ValidationError("transportability over an empty target dataset");
    }
    const DatasetView target = domain_view(target_dataset, Domain::Target);

    TransportAssessment result;
    try {
        result.pr = pr_on_view(target, subgroup, config);
    } catch (const UnknownAttributeError& e) {
        throw NotAssessableError("transportability of '" + subgroup.name +
                                 "' not assessable: " + e.what());
    } catch (const EmptySelectionError& e) {
        throw NotAssessableError("transportability of '" + subgroup.name +
                                 "' not assessable: " + e.what());
    }

    const bool metric_gate = config.transport.metric.has_value();
    GateResult& gate = result.gate;
    gate.metric = metric_gate ? metric_name(*config.transport.metric) : "divergence";
    gate.group = subgroup.name;
    gate.epsilon = config.transport.epsilon
                       ? *config.transport.epsilon
                       : (metric_gate ? config.epsilon.tolerance_for(gate.metric)
                                      : config.epsilon.fallback);
    gate.margin = gate.epsilon - std::fabs(result.pr.pr);
    gate.passed = gate.margin >= 0.0;
    gate.domain = Domain::Target;

    result.overall_accuracy =
        evaluate_metric(target, Metric::Accuracy, config.positive_label).value;
    result.min_overall_accuracy = config.transport.min_overall_accuracy;
    if (result.overall_accuracy && result.min_overall_accuracy) {
        result.meets_floor = *result.overall_accuracy >= *result.min_overall_accuracy;
    }

    if (source_dataset && !source_dataset->records.empty()) {
        // Informational comparison only; a subgroup missing from the source
        // leaves the field empty rather than blocking the target gate.
        try {
            const DatasetView source = domain_view(*source_dataset, Domain::Source);
            result.source_pr = pr_on_view(source, subgroup, config).pr;
            result.pr_shift = result.pr.pr - *result.source_pr;
        } catch (const AuditError&) {
        }
    }
    return result;
}

double demographic_parity_gap(const LabeledDataset& dataset,
                              const SubgroupSelector& selector_a,
                              const SubgroupSelector& selector_b,
                              const Label& positive) {
    const DatasetView a = select(dataset, selector_a);
    const DatasetView b = select(dataset, selector_b);
    return std::fabs(predicted_positive_rate(a, positive) -
                     predicted_positive_rate(b, positive));
}

ParityAssessment validated_parity(const LabeledDataset& dataset,
                                  const std::vector<SubgroupSelector>& selectors,
                                  const AuditConfig& config) {
    if (selectors.size() < 2) {
        throw ValidationError("validated parity needs at least two subgroups");
    }
    ParityAssessment result;
    result.parity_tolerance = config.parity_tolerance;
    result.epsilon = config.epsilon.fallback;

    std::vector<double> rates;
    rates.reserve(selectors.size());
    const int positive_index = dataset.label_index(config.positive_label);
    for (const auto& selector : selectors) {
        const DatasetView view = select(dataset, selector);
        rates.push_back(predicted_positive_rate(view, config.positive_label));
        result.group_pr.emplace_back(
            selector.name, empirical_pr(dataset, selector, config.divergence,
                                        config.divergence_mode, positive_index));
    }

    result.gap = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i) {
        for (std::size_t j = i + 1; j < rates.size(); ++j) {
            result.gap = std::max(result.gap, std::fabs(rates[i] - rates[j]));
        }
    }
    result.gap_ok = result.gap <= result.parity_tolerance;
    result.pr_ok = true;
    for (const auto& [name, estimate] : result.group_pr) {
        if (std::fabs(estimate.pr) > result.epsilon) result.pr_ok = false;
    }
    result.validated = result.gap_ok && result.pr_ok;
    return result;
}

} // namespace praudit
