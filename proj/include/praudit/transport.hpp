#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "praudit/config.hpp"
#include "praudit/metrics.hpp"
#include "praudit/model.hpp"
#include "praudit/pr_core.hpp"

namespace praudit {

// Outcome of one tolerance gate: margin = epsilon - |PR|, so passed iff
// margin >= 0. Everything needed to audit the decision is echoed.
struct GateResult {
    bool passed = false;
    double margin = 0.0;
    std::string metric;  // metric name, or "divergence"
    std::string group;
    double epsilon = 0.0;
    Domain domain = Domain::Source;
};

// Metric-level representativity: one gate per metric, |PR| <= epsilon_i
// with per-metric tolerances from the policy. A metric mapped to an
// undefined PR (nullopt) is a ValidationError — the caller must decide
// what an unevaluable gate means, the gate itself cannot.
std::vector<GateResult> check_metric_representativity(
    const std::map<Metric, std::optional<double>>& pr_values,
    const EpsilonPolicy& policy,
    const std::string& group_name = "",
    Domain domain = Domain::Source);

// Result of the external-transportability check. The gate bounds |PR| on
// the target population only; overall performance and the source
// comparison ride along as information, never as pass/fail inputs.
struct TransportAssessment {
    GateResult gate;
    PrEstimate pr;                                // target-domain PR behind the gate
    std::optional<double> overall_accuracy;       // on the target slice
    std::optional<double> min_overall_accuracy;   // configured floor, when any
    std::optional<bool> meets_floor;
    std::optional<double> source_pr;              // same quantity on source data, when given
    std::optional<double> pr_shift;               // target PR - source PR (informational)
};

// External transportability of `subgroup` on the target population:
// pass iff |PR(target, subgroup)| <= epsilon, with epsilon from
// config.transport.epsilon falling back to the policy default. PR is
// metric-level when config.transport.metric is set, divergence-based
// otherwise. Records tagged Target form the evaluated slice; a dataset with
// no Target tags is treated wholesale as the target population. A subgroup
// absent from the target raises NotAssessableError — transportability has
// no answer there, which is different from failing.
TransportAssessment check_external_transportability(const LabeledDataset& target_dataset,
                                                    const SubgroupSelector& subgroup,
                                                    const AuditConfig& config,
                                                    const LabeledDataset* source_dataset = nullptr);

// |rate_a - rate_b| where rate = fraction of records predicted positive.
// Ground truth never enters — that blindness is the point the PR
// validation below addresses.
double demographic_parity_gap(const LabeledDataset& dataset,
                              const SubgroupSelector& selector_a,
                              const SubgroupSelector& selector_b,
                              const Label& positive);

struct ParityAssessment {
    bool validated = false;   // gap_ok && pr_ok
    bool gap_ok = false;      // max pairwise gap <= parity_tolerance
    bool pr_ok = false;       // every group |empirical PR| <= epsilon default
    double gap = 0.0;         // max pairwise parity gap over the selectors
    double parity_tolerance = 0.0;
    double epsilon = 0.0;
    std::vector<std::pair<std::string, PrEstimate>> group_pr; // evidence, selector order
};

// Demographic parity validated against ground truth: rates must agree
// within config.parity_tolerance AND every group's |empirical PR| must be
// within the epsilon default. Equal rates with unequal error rates pass
// the first check and fail the second — parity alone does not see labels.
// Requires >= 2 selectors.
ParityAssessment validated_parity(const LabeledDataset& dataset,
                                  const std::vector<SubgroupSelector>& selectors,
                                  const AuditConfig& config);

} // namespace praudit
