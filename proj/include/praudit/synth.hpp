#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "praudit/model.hpp"

namespace praudit {

// Bounded two-component score model: predicted-positive records draw
// around mean_pos, predicted-negative around mean_neg, each uniform within
// +/- spread and clamped so that score >= 0.5 holds exactly for predicted
// positives (thresholding the score at 0.5 reproduces y_pred). Enough to
// exercise AUC code paths; no claim of realism.
struct ScoreModel {
    double mean_pos = 0.8;
    double mean_neg = 0.2;
    double spread = 0.1;
};

struct SynthGroup {
    std::string name;
    long n = 0;
    double prevalence = 0.5;  // fraction of actual positives
    double sensitivity = 1.0;
    double specificity = 1.0;
    ScoreModel score_model;
};

// Generator spec for a synthetic population with analytically known
// per-group performance — the ground-truth oracle for PR, bootstrap and
// gate tests.
struct SynthSpec {
    std::vector<SynthGroup> groups;
    std::uint64_t seed = 42;
    Domain domain = Domain::Source;
    std::string attribute = "group";   // group attribute name on generated records
    Label positive_label = "malignant";
    Label negative_label = "benign";
    bool with_scores = true;
};

// Integer realization of one group's rates: P = round(n*prevalence),
// tp = round(P*sensitivity), tn = round(N*specificity). Count-exact by
// construction — this is what makes oracle_pr equal the empirical PR with
// no tolerance.
struct SynthCounts {
    long pos = 0;
    long neg = 0;
    long tp = 0;
    long fn = 0;
    long tn = 0;
    long fp = 0;

    long errors() const { return fn + fp; }
};

// Throws ValidationError when the rates are unachievable (no positives to
// realize sensitivity on, or no negatives for specificity).
SynthCounts counts_for(const SynthGroup& group);

// Deterministic quota generation: per group, exactly the SynthCounts
// records of each truth/prediction kind, ids "<group>-NNNN", scores from
// the score model, then one seeded shuffle of the whole record list.
// Same seed -> identical dataset; different seeds permute order and scores
// but never the confusion counts.
LabeledDataset generate(const SynthSpec& spec);

// Closed-form expected TV-PR of a group: errorRate(group) - errorRate(all),
// computed from the SynthSpec's integer counts. Matches the empirical hard-label
// TV estimate on generate(spec) exactly (same counts, same divisions).
// Throws ValidationError for an unknown group name.
double oracle_pr(const SynthSpec& spec, const std::string& group_name);

// JSON spec file, same structured format family as the audit config
// (schema in docs/config_schema.md).
SynthSpec load_synth_spec(const std::string& path);

} // namespace praudit
