#include "praudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "praudit/stats.hpp"

namespace praudit {

namespace {

void check_rate(double value, const char* what, const std::string& group) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ValidationError("group '" + group + "': " + what + " must lie in [0,1]");
    }
}

} // namespace

SynthCounts counts_for(const SynthGroup& group) {
    if (group.name.empty()) throw ValidationError("synth group needs a name");
    if (group.n < 1) throw ValidationError("group '" + group.name + "': n must be >= 1");
    check_rate(group.prevalence, "prevalence", group.name);
    check_rate(group.sensitivity, "sensitivity", group.name);
    check_rate(group.specificity, "specificity", group.name);

    SynthCounts c;
    c.pos = std::lround(static_cast<double>(group.n) * group.prevalence);
    c.neg = group.n - c.pos;
    if (c.pos == 0) {
        throw ValidationError("group '" + group.name +
                              "': prevalence rounds to zero positives; "
                              "sensitivity cannot be realized");
    }
    if (c.neg == 0) {
        throw ValidationError("group '" + group.name +
                              "': prevalence rounds to zero negatives; "
                              "specificity cannot be realized");
    }
    c.tp = std::lround(static_cast<double>(c.pos) * group.sensitivity);
    c.fn = c.pos - c.tp;
    c.tn = std::lround(static_cast<double>(c.neg) * group.specificity);
    c.fp = c.neg - c.tn;
    return c;
}

namespace {

double bounded_score(SplitMix64& rng, const ScoreModel& model, bool predicted_positive) {
    const double mean = predicted_positive ? model.mean_pos : model.mean_neg;
    const double raw = mean - model.spread + 2.0 * model.spread * rng.next_unit();
    // Thresholding at 0.5 must reproduce y_pred exactly, whatever the model.
    if (predicted_positive) return std::clamp(raw, 0.5, 1.0);
    return std::clamp(raw, 0.0, std::nextafter(0.5, 0.0));
}

} // namespace

LabeledDataset generate(const SynthSpec& spec) {
    if (spec.groups.empty()) throw ValidationError("synth spec has no groups");
    if (spec.attribute.empty()) throw ValidationError("synth spec needs an attribute name");
    if (spec.positive_label.empty() || spec.negative_label.empty() ||
        spec.positive_label == spec.negative_label) {
        throw ValidationError("synth spec needs two distinct labels");
    }
    for (const auto& g : spec.groups) {
        if (!(g.score_model.spread >= 0.0)) {
            throw ValidationError("group '" + g.name + "': score spread must be >= 0");
        }
    }

    SplitMix64 rng{spec.seed};
    std::vector<PredictionRecord> records;
    for (const auto& group : spec.groups) {
        const SynthCounts c = counts_for(group);
        records.reserve(records.size() + static_cast<std::size_t>(group.n));
        long serial = 0;
        auto emit = [&](long count, const Label& truth, const Label& predicted) {
            for (long i = 0; i < count; ++i) {
                PredictionRecord r;
                char buf[64];
                std::snprintf(buf, sizeof buf, "%s-%04ld", group.name.c_str(), ++serial);
                r.id = buf;
                r.y_true = truth;
                r.y_pred = predicted;
                if (spec.with_scores) {
                    r.score = bounded_score(rng, group.score_model,
                                            predicted == spec.positive_label);
                }
                r.groups[spec.attribute] = group.name;
                r.domain = spec.domain;
                records.push_back(std::move(r));
            }
        };
        emit(c.tp, spec.positive_label, spec.positive_label);
        emit(c.fn, spec.positive_label, spec.negative_label);
        emit(c.tn, spec.negative_label, spec.negative_label);
        emit(c.fp, spec.negative_label, spec.positive_label);
    }

    // Fisher-Yates on the same stream; counts are already fixed, so the
    // shuffle only hides the generation order.
    for (std::size_t i = records.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(records[i - 1], records[j]);
    }
    return validate_dataset(std::move(records),
                            {spec.negative_label, spec.positive_label});
}

double oracle_pr(const SynthSpec& spec, const std::string& group_name) {
    if (spec.groups.empty()) throw ValidationError("synth spec has no groups");
    long total_errors = 0;
    long total_n = 0;
    long group_errors = -1;
    long group_n = 0;
    for (const auto& group : spec.groups) {
        const SynthCounts c = counts_for(group);
        total_errors += c.errors();
        total_n += group.n;
        if (group.name == group_name) {
            group_errors = c.errors();
            group_n = group.n;
        }
    }
    if (group_errors < 0) {
        throw ValidationError("unknown synth group '" + group_name + "'");
    }
    // Same two divisions the empirical hard-label TV estimate performs.
    return static_cast<double>(group_errors) / static_cast<double>(group_n) -
           static_cast<double>(total_errors) / static_cast<double>(total_n);
}

} // namespace praudit
