#include "praudit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace praudit {

std::string metric_name(Metric metric) {
    switch (metric) {
        case Metric::Precision:   return "precision";
        case Metric::Sensitivity: return "sensitivity";
        case Metric::Specificity: return "specificity";
        case Metric::Accuracy:    return "accuracy";
        case Metric::F1:          return "f1";
        case Metric::AucRoc:      return "auc_roc";
        case Metric::AucPr:       return "auc_pr";
    }
    return "accuracy";
}

std::optional<Metric> metric_from_name(const std::string& name) {
    if (name == "precision")   return Metric::Precision;
    if (name == "sensitivity") return Metric::Sensitivity;
    if (name == "specificity") return Metric::Specificity;
    if (name == "accuracy")    return Metric::Accuracy;
    if (name == "f1")          return Metric::F1;
    if (name == "auc_roc")     return Metric::AucRoc;
    if (name == "auc_pr")      return Metric::AucPr;
    return std::nullopt;
}

std::vector<Metric> threshold_metric_set() {
    return {Metric::Precision, Metric::Sensitivity, Metric::Specificity,
            Metric::Accuracy, Metric::F1};
}

std::vector<Metric> full_metric_set() {
    return {Metric::Precision, Metric::Sensitivity, Metric::Specificity,
            Metric::Accuracy, Metric::F1, Metric::AucRoc, Metric::AucPr};
}

ConfusionMatrix confusion(const DatasetView& view, const Label& positive) {
    if (view.size() == 0) throw ValidationError("confusion matrix over an empty view");
    bool known = false;
    for (const auto& label : view.label_space()) {
        if (label == positive) { known = true; break; }
    }
    if (!known) {
        throw ValidationError("positive label '" + positive + "' not in the label space");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& r = view[i];
        const bool truth = r.y_true == positive;
        const bool predicted = r.y_pred == positive;
        if (truth && predicted) ++cm.tp;
        else if (truth) ++cm.fn;
        else if (predicted) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

std::map<Metric, MetricValue> threshold_metrics(const ConfusionMatrix& cm) {
    auto ratio = [](Metric m, long num, long den) {
        MetricValue v;
        v.metric = m;
        v.support = den;
        if (den > 0) v.value = static_cast<double>(num) / static_cast<double>(den);
        return v; // zero denominator -> undefined, not 0, not an error
    };

    std::map<Metric, MetricValue> out;
    out[Metric::Precision]   = ratio(Metric::Precision, cm.tp, cm.predicted_positives());
    out[Metric::Sensitivity] = ratio(Metric::Sensitivity, cm.tp, cm.actual_positives());
    out[Metric::Specificity] = ratio(Metric::Specificity, cm.tn, cm.actual_negatives());
    out[Metric::Accuracy]    = ratio(Metric::Accuracy, cm.tp + cm.tn, cm.total());

    // F1 = harmonic mean of precision and sensitivity; undefined whenever
    // either factor is, or when both are zero (0/0).
    MetricValue f1;
    f1.metric = Metric::F1;
    f1.support = cm.total();
    const auto& p = out[Metric::Precision].value;
    const auto& r = out[Metric::Sensitivity].value;
    if (p && r && (*p + *r) > 0.0) f1.value = 2.0 * (*p) * (*r) / (*p + *r);
    out[Metric::F1] = f1;
    return out;
}

namespace {

// Effective ranking score of a record: the scalar score, or the positive
// label's probability when only a vector is present.
double effective_score(const PredictionRecord& r, int positive_index) {
    if (r.score) return *r.score;
    if (r.probs && positive_index >= 0 &&
        static_cast<std::size_t>(positive_index) < r.probs->size()) {
        return (*r.probs)[static_cast<std::size_t>(positive_index)];
    }
    throw MissingScoreError("record '" + r.id + "' has no score; ranking metrics need one");
}

// (score, is_positive) pairs sorted by descending score.
std::vector<std::pair<double, bool>> ranked_scores(const DatasetView& view,
                                                   const Label& positive) {
    int positive_index = -1;
    for (std::size_t i = 0; i < view.label_space().size(); ++i) {
        if (view.label_space()[i] == positive) positive_index = static_cast<int>(i);
    }
    std::vector<std::pair<double, bool>> scored;
    scored.reserve(view.size());
    for (std::size_t i = 0; i < view.size(); ++i) {
        const auto& r = view[i];
        scored.emplace_back(effective_score(r, positive_index), r.y_true == positive);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    return scored;
}

} // namespace

Curve roc_curve(const DatasetView& view, const Label& positive) {
    if (view.size() == 0) throw ValidationError("ROC curve over an empty view");
    auto scored = ranked_scores(view, positive);

    long pos = 0, neg = 0;
    for (const auto& [s, is_pos] : scored) (is_pos ? pos : neg)++;
    if (pos == 0) throw ValidationError("ROC undefined: view has no actual positives");
    if (neg == 0) throw ValidationError("ROC undefined: view has no actual negatives");

    Curve curve;
    curve.points.emplace_back(0.0, 0.0); // threshold above every score
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < scored.size()) {
        // Tie group: records sharing a score cross the threshold together.
        const double threshold = scored[i].first;
        while (i < scored.size() && scored[i].first == threshold) {
            (scored[i].second ? tp : fp)++;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(neg),
                                  static_cast<double>(tp) / static_cast<double>(pos));
    }
    // The lowest threshold admits everything, so the last point is (1,1).
    return curve;
}

MetricValue auc_roc(const Curve& curve) {
    MetricValue v;
    v.metric = Metric::AucRoc;
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& [x0, y0] = curve.points[i - 1];
        const auto& [x1, y1] = curve.points[i];
        area += (x1 - x0) * 0.5 * (y0 + y1);
    }
    v.value = area;
    return v;
}

MetricValue auc_roc(const DatasetView& view, const Label& positive) {
    MetricValue v = auc_roc(roc_curve(view, positive));
    v.support = static_cast<long>(view.size());
    return v;
}

Curve pr_curve(const DatasetView& view, const Label& positive) {
    if (view.size() == 0) throw ValidationError("precision-recall curve over an empty view");
    auto scored = ranked_scores(view, positive);

    long pos = 0;
    for (const auto& [s, is_pos] : scored) pos += is_pos ? 1 : 0;
    if (pos == 0) throw ValidationError("precision-recall undefined: no actual positives in view");

    Curve curve;
    long tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < scored.size()) {
        const double threshold = scored[i].first;
        while (i < scored.size() && scored[i].first == threshold) {
            (scored[i].second ? tp : fp)++;
            ++i;
        }
        curve.points.emplace_back(static_cast<double>(tp) / static_cast<double>(pos),
                                  static_cast<double>(tp) / static_cast<double>(tp + fp));
    }
    return curve;
}

MetricValue auc_pr(const Curve& curve) {
    MetricValue v;
    v.metric = Metric::AucPr;
    // Average precision: sum precision * (recall step). Step interpolation,
    // never trapezoids — linear interpolation in PR space over-estimates.
    double area = 0.0;
    double prev_recall = 0.0;
    for (const auto& [recall, precision] : curve.points) {
        area += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    v.value = area;
    return v;
}

MetricValue auc_pr(const DatasetView& view, const Label& positive) {
    MetricValue v = auc_pr(pr_curve(view, positive));
    v.support = static_cast<long>(view.size());
    return v;
}

MetricValue evaluate_metric(const DatasetView& view, Metric metric, const Label& positive) {
    switch (metric) {
        case Metric::AucRoc: return auc_roc(view, positive);
        case Metric::AucPr:  return auc_pr(view, positive);
        default: break;
    }
    return threshold_metrics(confusion(view, positive)).at(metric);
}

std::vector<ConfusionMatrix> reconstruct_confusion(double sens, double spec, double acc,
                                                   long n, double rounding_tol) {
    if (!(sens >= 0.0 && sens <= 1.0) || !(spec >= 0.0 && spec <= 1.0) ||
        !(acc >= 0.0 && acc <= 1.0)) {
        throw ValidationError("reconstruct_confusion rates must lie in [0,1]");
    }
    if (n < 1) throw ValidationError("reconstruct_confusion needs n >= 1");
    if (rounding_tol < 0.0) throw ValidationError("rounding tolerance must be >= 0");

    // Candidate integer range for a count whose ratio to `den` must fall
    // within tol of `rate`.
    auto candidates = [&](double rate, long den, long& lo, long& hi) {
        lo = static_cast<long>(std::ceil((rate - rounding_tol) * static_cast<double>(den) - 1e-12));
        hi = static_cast<long>(std::floor((rate + rounding_tol) * static_cast<double>(den) + 1e-12));
        lo = std::max<long>(lo, 0);
        hi = std::min<long>(hi, den);
    };
    auto within = [&](long num, long den, double rate) {
        return std::fabs(static_cast<double>(num) / static_cast<double>(den) - rate) <=
               rounding_tol + 1e-15;
    };

    std::vector<ConfusionMatrix> solutions;
    for (long p = 1; p < n; ++p) { // both classes must exist for sens and spec to mean anything
        const long neg = n - p;
        long tp_lo, tp_hi, tn_lo, tn_hi;
        candidates(sens, p, tp_lo, tp_hi);
        candidates(spec, neg, tn_lo, tn_hi);
        for (long tp = tp_lo; tp <= tp_hi; ++tp) {
            if (!within(tp, p, sens)) continue;
            for (long tn = tn_lo; tn <= tn_hi; ++tn) {
                if (!within(tn, neg, spec)) continue;
                if (!within(tp + tn, n, acc)) continue;
                solutions.push_back(ConfusionMatrix{tp, neg - tn, tn, p - tp});
            }
        }
    }
    return solutions;
}

} // namespace praudit
