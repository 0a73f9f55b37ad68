#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "praudit/model.hpp"

namespace praudit {

struct ConfusionMatrix {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
    long actual_positives() const { return tp + fn; }
    long actual_negatives() const { return tn + fp; }
    long predicted_positives() const { return tp + fp; }

    bool operator==(const ConfusionMatrix&) const = default;
};

enum class Metric { Precision, Sensitivity, Specificity, Accuracy, F1, AucRoc, AucPr };

// Wire/report names: "precision", "sensitivity", "specificity", "accuracy",
// "f1", "auc_roc", "auc_pr".
std::string metric_name(Metric metric);
std::optional<Metric> metric_from_name(const std::string& name);

// The five metrics computable from a confusion matrix alone, in report order.
std::vector<Metric> threshold_metric_set();
// All seven, in report order (threshold five + auc_roc + auc_pr).
std::vector<Metric> full_metric_set();

// One computed metric. `value` is empty when the defining denominator is
// zero — undefined is an explicit state, distinct from a true 0.0 (a report
// renders a dash for one and "0.000" for the other). `support` is the
// denominator population behind the value (predicted positives for
// precision, actual positives for sensitivity, ...), used by the
// metric-support z-test mode.
struct MetricValue {
    Metric metric = Metric::Accuracy;
    std::optional<double> value;
    long support = 0;

    bool defined() const { return value.has_value(); }
};

// Piecewise curve in [0,1]^2 with non-decreasing x (ROC: x=FPR, y=TPR;
// precision-recall: x=recall, y=precision).
struct Curve {
    std::vector<std::pair<double, double>> points;
};

// Counts truth/prediction agreement against `positive`; every non-positive
// label counts as negative. Throws ValidationError when the view is empty
// or the positive label is outside the label space.
ConfusionMatrix confusion(const DatasetView& view, const Label& positive);

// precision, sensitivity, specificity, accuracy, f1 from one confusion
// matrix. Zero-denominator metrics are emitted as undefined, never 0 and
// never an error.
std::map<Metric, MetricValue> threshold_metrics(const ConfusionMatrix& cm);

// ROC points (FPR, TPR) at every distinct score threshold, descending, with
// the (0,0) start anchor; the lowest threshold lands on (1,1). Records
// sharing a score enter the predicted-positive set together (threshold
// semantics "score >= t"). Throws MissingScoreError when a record has no
// usable score and ValidationError when the view lacks actual positives or
// negatives.
Curve roc_curve(const DatasetView& view, const Label& positive);

// Trapezoidal area under an ROC curve; equals the Mann-Whitney pair
// statistic with ties weighted 0.5. The view overload fills `support` with
// the view size.
MetricValue auc_roc(const Curve& curve);
MetricValue auc_roc(const DatasetView& view, const Label& positive);

// Precision-recall points (recall, precision) at descending thresholds.
// Requires at least one actual positive.
Curve pr_curve(const DatasetView& view, const Label& positive);

// Average precision: step-wise sum of (delta recall) x precision — not
// trapezoidal interpolation, which over-estimates between PR points.
MetricValue auc_pr(const Curve& curve);
MetricValue auc_pr(const DatasetView& view, const Label& positive);

// Any single metric on a view: ranking metrics via their curves, the rest
// via the confusion matrix.
MetricValue evaluate_metric(const DatasetView& view, Metric metric, const Label& positive);

// Exhaustive integer search for confusion matrices consistent with rounded
// (sensitivity, specificity, accuracy) at group size n: tries every split
// n = P + N (P, N >= 1) and every tp <= P, tn <= N whose rates fall within
// rounding_tol of the inputs. Returns all solutions in (P, tp, tn) order;
// an empty list means the inputs are inconsistent. Brute force on purpose —
// this is the verification oracle for published summary rows.
std::vector<ConfusionMatrix> reconstruct_confusion(double sens, double spec, double acc,
                                                   long n, double rounding_tol);

} // namespace praudit
