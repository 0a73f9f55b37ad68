#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "praudit/config.hpp"
#include "praudit/divergence.hpp"
#include "praudit/metrics.hpp"
#include "praudit/model.hpp"

namespace praudit {

// Predictive representativity of a subgroup S inside population P:
//   pr = mean divergence over S  -  mean divergence over P
// (divergence-based form), or M(S) - M(P) for a named metric. Positive
// divergence-based PR means predictions fit S worse than the population.
struct PrEstimate {
    double pr = 0.0;
    double subgroup_term = 0.0;   // mean divergence over S, or M(S)
    double population_term = 0.0; // mean divergence over P, or M(P)
    long n_subgroup = 0;
    long n_population = 0;
    std::string basis;            // "tv" / "kl(eps=1e-06)" / "js" / metric name
    std::optional<std::pair<double, double>> ci; // percentile bootstrap (lo, hi)
    std::optional<double> ci_level;
};

// Reading a PR value against a tolerance. normalized_pr is oriented so
// positive always means "worse in the subgroup", whichever direction the
// underlying quantity runs.
enum class Orientation { DivergenceLike, HigherIsBetter };
enum class PrTag { Representative, Underperforms, Overoptimized };

std::string tag_name(PrTag tag);

struct Interpretation {
    PrTag tag = PrTag::Representative;
    double normalized_pr = 0.0;
};

// Divergence-based empirical PR of `subgroup` within `dataset`.
// positive_index is only consulted in Probabilistic mode with scalar
// scores (binary label spaces); pass -1 otherwise. The view overload
// treats the view itself as the population — that is what bootstrap
// statistics resample.
PrEstimate empirical_pr(const LabeledDataset& dataset, const SubgroupSelector& subgroup,
                        const DivergenceSpec& spec, DivergenceMode mode,
                        int positive_index = -1);
PrEstimate empirical_pr(const DatasetView& population, const SubgroupSelector& subgroup,
                        const DivergenceSpec& spec, DivergenceMode mode,
                        int positive_index = -1);

// Metric-level PR: plain difference M(S) - M(P), no clamping. Throws
// ValidationError on mismatched metric names or when either side is
// undefined.
double metric_pr(const MetricValue& on_subgroup, const MetricValue& on_population);

// Tag a PR value: |normalized| <= tolerance -> Representative;
// normalized > tolerance -> Underperforms; below -tolerance ->
// Overoptimized (the subgroup is favored at the population's expense).
Interpretation interpret(double pr, Orientation orientation, double tolerance);

// One (group, metric) cell of the audit table. The "overall" population row
// carries no PR (it is the baseline itself).
struct PrTableRow {
    Metric metric = Metric::Accuracy;
    std::string group;                      // "overall" or a selector name
    MetricValue value;
    std::optional<double> pr;               // value - overall, absent for the overall row
    std::optional<Interpretation> interp;   // absent when pr is absent or value undefined
    long n = 0;                             // records in the evaluated view
};

// Metric-level PR table: for each metric (in the given order), the overall
// row first, then one row per selector with PR against the overall value.
// A subgroup metric that is undefined yields a row with an undefined value
// and no PR — reports render a dash for it. AUC metrics require scores and
// throw MissingScoreError without them.
std::vector<PrTableRow> pr_table(const LabeledDataset& dataset,
                                 const std::vector<SubgroupSelector>& group_selectors,
                                 const std::vector<Metric>& metric_names,
                                 const AuditConfig& config);

} // namespace praudit
