#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "praudit/errors.hpp"

namespace praudit {

// A label is a symbol drawn from a finite label space ("benign",
// "malignant", ...). Plain strings keep ingest and reporting trivial.
using Label = std::string;

// Which population a record was sampled from. Single-domain dumps default
// to Source; Target marks deployment-population records used by the
// transportability gate.
enum class Domain { Source, Target };

std::string domain_name(Domain d);

// One audited prediction. Features are out of scope: a record is an opaque
// id plus truth, prediction, optional score(s), group tags and domain.
struct PredictionRecord {
    std::string id;                            // opaque, unique per dataset
    Label y_true;
    Label y_pred;
    std::optional<double> score;               // probability of the positive label, in [0,1]
    std::optional<std::vector<double>> probs;  // full distribution over label_space (K-class mode)
    std::map<std::string, std::string> groups; // attribute name -> value, e.g. "phototype" -> "dark"
    Domain domain = Domain::Source;
};

// Validated, immutable collection of records sharing one label space.
// label_space is ordered; in binary mode index 0 is the negative label and
// index 1 the positive (deterministic confusion-matrix orientation).
struct LabeledDataset {
    std::vector<PredictionRecord> records;
    std::vector<Label> label_space;

    std::size_t size() const { return records.size(); }
    // Index of a label in label_space, -1 when absent.
    int label_index(const Label& label) const;
};

// Read-only, order-preserving view into a dataset. Subgroup selections hold
// unique indices in record order; bootstrap resamples may repeat indices.
struct DatasetView {
    const LabeledDataset* data = nullptr;
    std::vector<std::size_t> idx;

    std::size_t size() const { return idx.size(); }
    const PredictionRecord& operator[](std::size_t i) const { return data->records[idx[i]]; }
    const std::vector<Label>& label_space() const { return data->label_space; }
};

// View over the whole dataset in record order.
DatasetView whole_view(const LabeledDataset& dataset);

// Membership predicate over records: attribute value in `values`.
struct SubgroupSelector {
    std::string name;            // display name used in reports ("dark")
    std::string attribute;       // record attribute to test ("phototype")
    std::set<std::string> values;
};

// Convenience: selector named after a single value.
SubgroupSelector value_selector(const std::string& attribute, const std::string& value);

// Per-metric tolerances for representativity gates; metrics without an
// explicit entry use the fallback.
struct EpsilonPolicy {
    double fallback = 0.05;
    std::map<std::string, double> per_metric;

    double tolerance_for(const std::string& metric) const;
};

// Checks every dataset invariant and infers the label space (union of
// observed labels, order of first appearance) unless one is declared.
// Throws ValidationError on duplicate ids, empty input, score outside
// [0,1], malformed probability vectors, or labels outside a declared space.
LabeledDataset validate_dataset(std::vector<PredictionRecord> raw_records,
                                std::vector<Label> declared_space = {});

// Returns a copy whose binary label space is reordered to
// [negative, positive]. Throws ValidationError when the space is not
// binary or the positive label is absent. Record payloads are untouched.
LabeledDataset orient_binary(const LabeledDataset& dataset, const Label& positive);

// Subgroup selection. Throws UnknownAttributeError when some record lacks
// the attribute, EmptySelectionError when nothing matches ("subgroup
// absent" — deliberately distinct).
DatasetView select(const LabeledDataset& dataset, const SubgroupSelector& selector);
DatasetView select(const DatasetView& view, const SubgroupSelector& selector);

} // namespace praudit
