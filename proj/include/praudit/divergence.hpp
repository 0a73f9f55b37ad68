#pragma once

#include <vector>

#include "praudit/model.hpp"

namespace praudit {

// Finite distribution over the label space, indexed by label position.
// Entries are non-negative and sum to 1 within 1e-9; length >= 2.
struct DiscreteDistribution {
    std::vector<double> probs;
};

// Validates and wraps a probability vector. Throws ValidationError on
// negative entries, bad sum, or fewer than two entries.
DiscreteDistribution make_distribution(std::vector<double> probs);

enum class DivergenceKind { TV, KL, JS };

std::string divergence_name(DivergenceKind kind);

// Divergence choice plus the KL smoothing knob. KL between point masses is
// infinite when labels differ, so KL always smooths the second argument
// with a uniform mixture: q' = (1-eps)q + eps*u. The epsilon is echoed in
// every report so audits are reproducible.
struct DivergenceSpec {
    DivergenceKind kind = DivergenceKind::TV;
    double kl_smoothing_epsilon = 1e-6; // in (0, 0.5)
};

// Degenerate distribution: probability 1 at `label`'s index.
// Throws ValidationError when the label is outside the space.
DiscreteDistribution point_mass(const Label& label, const std::vector<Label>& label_space);

// Total variation: 0.5 * sum |p_k - q_k|. In [0, 1].
double tv(const DiscreteDistribution& p, const DiscreteDistribution& q);

// KL(p || q') in bits with q' = (1-eps)q + eps*uniform; terms with p_k = 0
// contribute 0. Always finite because eps > 0.
double kl(const DiscreteDistribution& p, const DiscreteDistribution& q, double smoothing_epsilon);

// Jensen-Shannon divergence in bits: 0.5*KL(p||m) + 0.5*KL(q||m) with
// m = (p+q)/2, unsmoothed (m dominates both arguments, so always finite).
// In [0, 1]; disjoint point masses give exactly 1 bit (log base 2).
double js(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Dispatch on DivergenceSpec.kind.
double divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                  const DivergenceSpec& spec);

// HardLabel compares point masses of y_true and y_pred; Probabilistic
// compares the point mass of y_true against the predicted distribution
// (record.probs, or the binary (1-score, score) vector).
enum class DivergenceMode { HardLabel, Probabilistic };

std::string divergence_mode_name(DivergenceMode mode);

// Per-record divergence D(delta_{y_true} || prediction).
//
// HardLabel + TV reduces exactly to the 0/1 misclassification indicator
// (and works even on a degenerate single-label space); KL/JS require a
// label space of >= 2 symbols. Probabilistic mode needs record.probs, or a
// scalar score plus a binary label space, where positive_index locates the
// positive label; it throws MissingScoreError otherwise.
double record_divergence(const PredictionRecord& record,
                         const std::vector<Label>& label_space,
                         int positive_index,
                         const DivergenceSpec& spec,
                         DivergenceMode mode);

} // namespace praudit
