#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "praudit/config.hpp"
#include "praudit/model.hpp"
#include "praudit/pr_core.hpp"
#include "praudit/stats.hpp"
#include "praudit/transport.hpp"

namespace praudit {

inline constexpr std::string_view kToolVersion = "0.1.0";

// One group's cell in a metric row.
struct ReportGroupCell {
    std::string group;
    long n = 0;
    std::optional<double> value;          // empty = undefined metric, rendered as a dash
    std::optional<double> pr;             // value - overall
    std::optional<Interpretation> interp;
};

// One metric family row: overall value, per-group values/PR, and the
// significance test between the first two configured groups.
struct ReportRow {
    Metric metric = Metric::Accuracy;
    std::optional<double> overall;
    long n_overall = 0;
    std::vector<ReportGroupCell> groups;
    std::optional<ZTestResult> ztest;     // absent with < 2 groups or undefined values
};

// Divergence-based PR row per group, with its bootstrap CI when enabled.
struct DivergencePrRow {
    std::string group;
    PrEstimate estimate;
    Interpretation interp;
};

struct DomainSection {
    Domain domain = Domain::Source;
    long n = 0;
    std::vector<ReportRow> rows;
    std::vector<DivergencePrRow> divergence_pr;
    std::vector<GateResult> gates;
    std::vector<std::string> notes;       // e.g. why AUC families are absent
};

struct ReportMeta {
    std::string dataset_path;  // empty for in-memory datasets
    std::string dataset_hash;  // "fnv1a64:<hex>" of the file bytes, when known
    std::string tool_version{kToolVersion};
    AuditConfig config;        // full effective config — enough to reproduce the run
};

struct AuditReport {
    ReportMeta meta;
    std::vector<DomainSection> sections;
};

enum class ReportFormat { Markdown, JSON, CSV };

std::optional<ReportFormat> report_format_from_name(const std::string& name);

// Build the full audit: one section per domain present in the dataset
// (source first). Each section carries the metric table with z/p/stars,
// divergence PR per group (bootstrap CI when enabled), and the
// metric-representativity gates; a target section additionally runs the
// external-transportability gate per group. Metric set: config.metrics, or
// — when empty — all seven families if every record is scored, the five
// threshold families otherwise (with a note saying why).
AuditReport build_report(const LabeledDataset& dataset, const AuditConfig& config,
                         const std::string& dataset_path = "",
                         const std::string& dataset_hash = "");

// Deterministic rendering: identical reports give identical bytes.
// Markdown: fixed 3-decimal metrics/PR/z, p per format_p, stars column,
// dash for undefined. JSON: full-precision numbers alongside the rendered
// strings (report_from_json restores an equivalent report). CSV: flat rows
// with full-precision numbers, suitable for external plotting.
std::string render(const AuditReport& report, ReportFormat format);

// Inverse of render(..., JSON) up to full-precision equivalence.
AuditReport report_from_json(const std::string& text);

// Structural + numeric equality (exact doubles; NaNs compare equal to NaNs).
bool equivalent(const AuditReport& a, const AuditReport& b);

// 0 = every gate passed (or no gates), 1 = at least one failed. Input and
// config errors never reach here — they throw and the CLI maps them to 2.
int exit_code_for(const AuditReport& report);
int exit_code_for(const std::vector<GateResult>& gates);

// Rendering helpers shared by formats and tests.
std::string format_fixed(double v);                       // 3 decimals
std::string format_value(const std::optional<double>& v); // 3 decimals or "-"
std::string format_p(double p); // >= 0.001: 3 decimals; below: 2-decimal-mantissa scientific
std::string interpretation_label(const std::optional<Interpretation>& interp);

} // namespace praudit
