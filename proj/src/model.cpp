#include "praudit/model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace praudit {

std::string domain_name(Domain d) {
    return d == Domain::Source ? "source" : "target";
}

int LabeledDataset::label_index(const Label& label) const {
    for (std::size_t i = 0; i < label_space.size(); ++i) {
        if (label_space[i] == label) return static_cast<int>(i);
    }
    return -1;
}

DatasetView whole_view(const LabeledDataset& dataset) {
    DatasetView view;
    view.data = &dataset;
    view.idx.resize(dataset.records.size());
    for (std::size_t i = 0; i < view.idx.size(); ++i) view.idx[i] = i;
    return view;
}

SubgroupSelector value_selector(const std::string& attribute, const std::string& value) {
    return SubgroupSelector{value, attribute, {value}};
}

double EpsilonPolicy::tolerance_for(const std::string& metric) const {
    auto it = per_metric.find(metric);
    return it != per_metric.end() ? it->second : fallback;
}

namespace {

void check_probability_vector(const PredictionRecord& r, std::size_t space_size) {
    const auto& p = *r.probs;
    if (p.size() != space_size) {
        throw ValidationError("record '" + r.id + "': probability vector has " +
                              std::to_string(p.size()) + " entries, label space has " +
                              std::to_string(space_size));
    }
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) // catches negatives and NaN
            throw ValidationError("record '" + r.id + "': negative probability entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ValidationError("record '" + r.id + "': probability vector sums to " +
                              std::to_string(sum) + ", expected 1 within 1e-9");
    }
}

} // namespace

LabeledDataset validate_dataset(std::vector<PredictionRecord> raw_records,
                                std::vector<Label> declared_space) {
    if (raw_records.empty()) throw ValidationError("empty input: no prediction records");

    LabeledDataset dataset;
    dataset.label_space = std::move(declared_space);
    const bool infer = dataset.label_space.empty();

    std::unordered_set<std::string> seen_ids;
    seen_ids.reserve(raw_records.size());
    for (const auto& r : raw_records) {
        if (r.id.empty()) throw ValidationError("record with empty id");
        if (!seen_ids.insert(r.id).second)
            throw ValidationError("duplicate id '" + r.id + "'");

        if (r.score && !(*r.score >= 0.0 && *r.score <= 1.0)) {
            throw ValidationError("record '" + r.id + "': score " + std::to_string(*r.score) +
                                  " outside [0,1]");
        }

        auto note_label = [&](const Label& label) {
            const bool known =
                std::find(dataset.label_space.begin(), dataset.label_space.end(), label) !=
                dataset.label_space.end();
            if (known) return;
            if (!infer) {
                throw ValidationError("record '" + r.id + "': label '" + label +
                                      "' outside the declared label space");
            }
            dataset.label_space.push_back(label); // order of first appearance
        };
        note_label(r.y_true);
        note_label(r.y_pred);
    }

    // Probability vectors can only be checked once the space is final.
    for (const auto& r : raw_records) {
        if (r.probs) check_probability_vector(r, dataset.label_space.size());
    }

    dataset.records = std::move(raw_records);
    return dataset;
}

LabeledDataset orient_binary(const LabeledDataset& dataset, const Label& positive) {
    if (dataset.label_space.size() != 2) {
        throw ValidationError("binary orientation requires a 2-label space, have " +
                              std::to_string(dataset.label_space.size()));
    }
    const int pos = dataset.label_index(positive);
    if (pos < 0) {
        throw ValidationError("positive label '" + positive + "' not in the label space");
    }
    LabeledDataset out = dataset;
    const Label negative = dataset.label_space[pos == 0 ? 1 : 0];
    out.label_space = {negative, positive};
    return out;
}

namespace {

DatasetView select_impl(const LabeledDataset& data, const std::vector<std::size_t>& candidates,
                        const SubgroupSelector& selector) {
    DatasetView view;
    view.data = &data;
    for (std::size_t i : candidates) {
        const auto& record = data.records[i];
        auto it = record.groups.find(selector.attribute);
        if (it == record.groups.end()) {
            throw UnknownAttributeError("record '" + record.id + "' lacks attribute '" +
                                        selector.attribute + "'");
        }
        if (selector.values.count(it->second)) view.idx.push_back(i);
    }
    if (view.idx.empty()) {
        throw EmptySelectionError("selector '" + selector.name + "' (" + selector.attribute +
                                  ") matched no records: subgroup absent");
    }
    return view;
}

} // namespace

DatasetView select(const LabeledDataset& dataset, const SubgroupSelector& selector) {
    std::vector<std::size_t> all(dataset.records.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return select_impl(dataset, all, selector);
}

DatasetView select(const DatasetView& view, const SubgroupSelector& selector) {
    return select_impl(*view.data, view.idx, selector);
}

} // namespace praudit
