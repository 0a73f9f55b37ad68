#include "praudit/divergence.hpp"

#include <cmath>

namespace praudit {

std::string divergence_name(DivergenceKind kind) {
    switch (kind) {
        case DivergenceKind::TV: return "tv";
        case DivergenceKind::KL: return "kl";
        case DivergenceKind::JS: return "js";
    }
    return "tv";
}

std::string divergence_mode_name(DivergenceMode mode) {
    return mode == DivergenceMode::HardLabel ? "hard_label" : "probabilistic";
}

DiscreteDistribution make_distribution(std::vector<double> probs) {
    if (probs.size() < 2) {
        throw ValidationError("distribution needs >= 2 entries, have " +
                              std::to_string(probs.size()));
    }
    double sum = 0.0;
    for (double v : probs) {
        if (!(v >= 0.0)) throw ValidationError("distribution has a negative entry");
        sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw ValidationError("distribution sums to " + std::to_string(sum) +
                              ", expected 1 within 1e-9");
    }
    return DiscreteDistribution{std::move(probs)};
}

DiscreteDistribution point_mass(const Label& label, const std::vector<Label>& label_space) {
    if (label_space.size() < 2) {
        throw ValidationError("point mass needs a label space of >= 2 symbols");
    }
    std::vector<double> probs(label_space.size(), 0.0);
    for (std::size_t i = 0; i < label_space.size(); ++i) {
        if (label_space[i] == label) {
            probs[i] = 1.0;
            return DiscreteDistribution{std::move(probs)};
        }
    }
    throw ValidationError("label '" + label + "' outside the label space");
}

namespace {

void check_same_dimension(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    if (p.probs.size() != q.probs.size()) {
        throw ValidationError("divergence over mismatched dimensions: " +
                              std::to_string(p.probs.size()) + " vs " +
                              std::to_string(q.probs.size()));
    }
}

} // namespace

double tv(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    check_same_dimension(p, q);
    double sum = 0.0;
    for (std::size_t k = 0; k < p.probs.size(); ++k) {
        sum += std::fabs(p.probs[k] - q.probs[k]);
    }
    return 0.5 * sum;
}

double kl(const DiscreteDistribution& p, const DiscreteDistribution& q,
          double smoothing_epsilon) {
    check_same_dimension(p, q);
    if (!(smoothing_epsilon > 0.0 && smoothing_epsilon < 0.5)) {
        throw ValidationError("KL smoothing epsilon must lie in (0, 0.5)");
    }
    const double k = static_cast<double>(q.probs.size());
    const double uniform = 1.0 / k;
    double sum = 0.0;
    for (std::size_t i = 0; i < p.probs.size(); ++i) {
        const double pi = p.probs[i];
        if (pi <= 0.0) continue; // 0 * log(0/q) contributes 0
        const double qi = (1.0 - smoothing_epsilon) * q.probs[i] + smoothing_epsilon * uniform;
        sum += pi * std::log2(pi / qi);
    }
    return sum;
}

double js(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    check_same_dimension(p, q);
    // m dominates both arguments, so each KL term is finite; no smoothing.
    auto half_kl = [](const std::vector<double>& a, const std::vector<double>& b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] <= 0.0) continue;
            const double m = 0.5 * (a[i] + b[i]);
            sum += a[i] * std::log2(a[i] / m);
        }
        return sum;
    };
    return 0.5 * half_kl(p.probs, q.probs) + 0.5 * half_kl(q.probs, p.probs);
}

double divergence(const DiscreteDistribution& p, const DiscreteDistribution& q,
                  const DivergenceSpec& spec) {
    switch (spec.kind) {
        case DivergenceKind::TV: return tv(p, q);
        case DivergenceKind::KL: return kl(p, q, spec.kl_smoothing_epsilon);
        case DivergenceKind::JS: return js(p, q);
    }
    return tv(p, q);
}

double record_divergence(const PredictionRecord& record,
                         const std::vector<Label>& label_space,
                         int positive_index,
                         const DivergenceSpec& spec,
                         DivergenceMode mode) {
    if (mode == DivergenceMode::HardLabel) {
        if (spec.kind == DivergenceKind::TV) {
            // TV of two point masses is exactly the misclassification
            // indicator; same bits as the full formula, and it keeps the
            // degenerate single-label space working.
            return record.y_true == record.y_pred ? 0.0 : 1.0;
        }
        return divergence(point_mass(record.y_true, label_space),
                          point_mass(record.y_pred, label_space), spec);
    }

    // Probabilistic: truth stays a point mass, prediction is a distribution.
    DiscreteDistribution predicted;
    if (record.probs) {
        predicted = make_distribution(*record.probs);
        if (predicted.probs.size() != label_space.size()) {
            throw ValidationError("record '" + record.id +
                                  "': probability vector length does not match the label space");
        }
    } else if (record.score) {
        if (label_space.size() != 2) {
            throw MissingScoreError("record '" + record.id +
                                    "': scalar score needs a binary label space; provide a "
                                    "probability vector for K-class data");
        }
        if (positive_index != 0 && positive_index != 1) {
            throw ValidationError("probabilistic mode with scalar scores needs the positive "
                                  "label's index (0 or 1)");
        }
        std::vector<double> probs(2, 0.0);
        probs[static_cast<std::size_t>(positive_index)] = *record.score;
        probs[static_cast<std::size_t>(1 - positive_index)] = 1.0 - *record.score;
        predicted = DiscreteDistribution{std::move(probs)};
    } else {
        throw MissingScoreError("record '" + record.id +
                                "': probabilistic divergence needs a score or probability vector");
    }
    return divergence(point_mass(record.y_true, label_space), predicted, spec);
}

} // namespace praudit
