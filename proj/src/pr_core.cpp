#include "praudit/pr_core.hpp"

#include <cstdio>

namespace praudit {

std::string tag_name(PrTag tag) {
    switch (tag) {
        case PrTag::Representative: return "representative";
        case PrTag::Underperforms:  return "underperforms";
        case PrTag::Overoptimized:  return "overoptimized";
    }
    return "representative";
}

namespace {

std::string basis_name(const DivergenceSpec& spec) {
    if (spec.kind == DivergenceKind::KL) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "kl(eps=%g)", spec.kl_smoothing_epsilon);
        return buf;
    }
    return divergence_name(spec.kind);
}

} // namespace

PrEstimate empirical_pr(const DatasetView& population, const SubgroupSelector& subgroup,
                        const DivergenceSpec& spec, DivergenceMode mode,
                        int positive_index) {
    const DatasetView sub = select(population, subgroup);
    const auto& space = population.label_space();

    // Means accumulated in record order, one division each — the TV +
    // hard-label case then lands bit-for-bit on errorCount/n.
    double population_sum = 0.0;
    for (std::size_t i = 0; i < population.size(); ++i) {
        population_sum += record_divergence(population[i], space, positive_index, spec, mode);
    }
    double subgroup_sum = 0.0;
    for (std::size_t i = 0; i < sub.size(); ++i) {
        subgroup_sum += record_divergence(sub[i], space, positive_index, spec, mode);
    }

    PrEstimate estimate;
    estimate.n_population = static_cast<long>(population.size());
    estimate.n_subgroup = static_cast<long>(sub.size());
    estimate.population_term = population_sum / static_cast<double>(population.size());
    estimate.subgroup_term = subgroup_sum / static_cast<double>(sub.size());
    estimate.pr = estimate.subgroup_term - estimate.population_term;
    estimate.basis = basis_name(spec);
    return estimate;
}

PrEstimate empirical_pr(const LabeledDataset& dataset, const SubgroupSelector& subgroup,
                        const DivergenceSpec& spec, DivergenceMode mode,
                        int positive_index) {
    return empirical_pr(whole_view(dataset), subgroup, spec, mode, positive_index);
}

double metric_pr(const MetricValue& on_subgroup, const MetricValue& on_population) {
    if (on_subgroup.metric != on_population.metric) {
        throw ValidationError("metric PR over mismatched metrics: " +
                              metric_name(on_subgroup.metric) + " vs " +
                              metric_name(on_population.metric));
    }
    if (!on_subgroup.defined() || !on_population.defined()) {
        throw ValidationError("metric PR over an undefined " +
                              metric_name(on_subgroup.metric) + " value");
    }
    return *on_subgroup.value - *on_population.value;
}

Interpretation interpret(double pr, Orientation orientation, double tolerance) {
    if (tolerance < 0.0) throw ValidationError("interpretation tolerance must be >= 0");
    Interpretation result;
    // Normalize so positive always reads "worse in the subgroup": divergences
    // grow when things get worse, quality metrics shrink.
    result.normalized_pr = orientation == Orientation::DivergenceLike ? pr : -pr;
    if (result.normalized_pr > tolerance) result.tag = PrTag::Underperforms;
    else if (result.normalized_pr < -tolerance) result.tag = PrTag::Overoptimized;
    else result.tag = PrTag::Representative;
    return result;
}

std::vector<PrTableRow> pr_table(const LabeledDataset& dataset,
                                 const std::vector<SubgroupSelector>& group_selectors,
                                 const std::vector<Metric>& metric_names,
                                 const AuditConfig& config) {
    const DatasetView overall = whole_view(dataset);
    std::vector<DatasetView> group_views;
    group_views.reserve(group_selectors.size());
    for (const auto& selector : group_selectors) {
        group_views.push_back(select(dataset, selector)); // non-empty or it throws
    }

    std::vector<PrTableRow> rows;
    for (Metric metric : metric_names) {
        PrTableRow overall_row;
        overall_row.metric = metric;
        overall_row.group = "overall";
        overall_row.value = evaluate_metric(overall, metric, config.positive_label);
        overall_row.n = static_cast<long>(overall.size());
        const MetricValue overall_value = overall_row.value;
        rows.push_back(std::move(overall_row));

        for (std::size_t g = 0; g < group_selectors.size(); ++g) {
            PrTableRow row;
            row.metric = metric;
            row.group = group_selectors[g].name;
            row.value = evaluate_metric(group_views[g], metric, config.positive_label);
            row.n = static_cast<long>(group_views[g].size());
            if (row.value.defined() && overall_value.defined()) {
                row.pr = metric_pr(row.value, overall_value);
                row.interp = interpret(*row.pr, Orientation::HigherIsBetter,
                                       config.epsilon.tolerance_for(metric_name(metric)));
            }
            // Undefined on either side: the row keeps its (possibly
            // undefined) value and simply carries no PR — a dash in reports.
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

} // namespace praudit
