#include "praudit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

#include "config_json.hpp"
#include "praudit/ingest.hpp"

namespace praudit {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s == "-0.000") s = "0.000";
    return s;
}

std::string format_value(const std::optional<double>& v) {
    if (!v || std::isnan(*v)) return "-";
    return format_fixed(*v);
}

std::string format_p(double p) {
    if (std::isnan(p)) return "-";
    char buf[64];
    if (p >= 0.001) std::snprintf(buf, sizeof buf, "%.3f", p);
    else std::snprintf(buf, sizeof buf, "%.2e", p);
    return buf;
}

std::string interpretation_label(const std::optional<Interpretation>& interp) {
    if (!interp) return "-";
    return tag_name(interp->tag);
}

std::optional<ReportFormat> report_format_from_name(const std::string& name) {
    if (name == "md" || name == "markdown") return ReportFormat::Markdown;
    if (name == "json") return ReportFormat::JSON;
    if (name == "csv") return ReportFormat::CSV;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Building
// ---------------------------------------------------------------------------

namespace {

bool record_scored(const PredictionRecord& r) {
    return r.score.has_value() || r.probs.has_value();
}

// Inverse of normal_tail on (0,1) by bisection; normal_tail is monotone and
// cheap, so this beats shipping a rational approximation.
double normal_quantile(double q) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_tail(mid) < q) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// AUC over a slice holding a single class has no defined value; model that
// as an undefined cell (like a zero-denominator ratio), not a dead report.
MetricValue cell_value(const DatasetView& view, Metric metric, const Label& positive,
                       const std::string& where, std::vector<std::string>& notes) {
    if (metric == Metric::AucRoc || metric == Metric::AucPr) {
        try {
            return evaluate_metric(view, metric, positive);
        } catch (const ValidationError& e) {
            notes.push_back(metric_name(metric) + " undefined on " + where + ": " + e.what());
            MetricValue undefined;
            undefined.metric = metric;
            undefined.support = static_cast<long>(view.size());
            return undefined;
        }
    }
    return evaluate_metric(view, metric, positive);
}

ZTestResult bootstrap_z(const LabeledDataset& sub, Metric metric,
                        const SubgroupSelector& sel1, const SubgroupSelector& sel2,
                        double v1, double v2, const AuditConfig& config) {
    BootstrapPlan plan;
    plan.replicates = config.bootstrap.replicates;
    plan.seed = config.bootstrap.seed;
    plan.level = config.bootstrap.level;
    plan.threads = config.bootstrap.threads;
    const Label positive = config.positive_label;
    const Statistic diff = [&, positive](const DatasetView& view) {
        const MetricValue a = evaluate_metric(select(view, sel1), metric, positive);
        const MetricValue b = evaluate_metric(select(view, sel2), metric, positive);
        if (!a.defined() || !b.defined()) return std::nan("");
        return *a.value - *b.value;
    };
    const BootstrapResult boot = bootstrap(sub, diff, plan, {sel1, sel2});

    ZTestResult result;
    const double se =
        (boot.hi - boot.lo) / (2.0 * normal_quantile(0.5 + plan.level / 2.0));
    if (!(se > 0.0)) {
        result.z = std::nan("");
        result.p_two_sided = std::nan("");
        result.degenerate = true;
        result.note = "bootstrap spread is zero; z undefined";
        return result;
    }
    result.z = (v1 - v2) / se;
    result.p_two_sided = 2.0 * normal_tail(-std::fabs(result.z));
    result.stars = stars(result.p_two_sided, config.alpha_stars);
    char note[96];
    std::snprintf(note, sizeof note, "z from bootstrap se (%ld replicates, seed %llu)",
                  boot.replicates, static_cast<unsigned long long>(boot.seed));
    result.note = note;
    return result;
}

// Significance of the gap between the first two groups. GroupSize mode runs
// the pooled two-proportion test with group sizes for every metric;
// MetricSupport uses each metric's true denominator and falls back to a
// bootstrap z where the value is not a proportion at all.
std::optional<ZTestResult> z_between(const LabeledDataset& sub, Metric metric,
                                     const std::vector<SubgroupSelector>& selectors,
                                     const std::vector<MetricValue>& values,
                                     const std::vector<long>& sizes,
                                     const AuditConfig& config,
                                     std::vector<std::string>& notes) {
    if (selectors.size() < 2) return std::nullopt;
    const MetricValue& m1 = values[0];
    const MetricValue& m2 = values[1];
    if (!m1.defined() || !m2.defined()) {
        notes.push_back("z for " + metric_name(metric) + " skipped: undefined value in '" +
                        selectors[!m1.defined() ? 0 : 1].name + "'");
        return std::nullopt;
    }
    if (config.z_mode == ZMode::GroupSize) {
        return pooled_two_proportion_z(*m1.value, sizes[0], *m2.value, sizes[1],
                                       config.alpha_stars);
    }
    const bool proportion = metric == Metric::Precision || metric == Metric::Sensitivity ||
                            metric == Metric::Specificity || metric == Metric::Accuracy;
    if (proportion) {
        return pooled_two_proportion_z(*m1.value, m1.support, *m2.value, m2.support,
                                       config.alpha_stars);
    }
    if (!config.bootstrap.enabled) {
        notes.push_back("z for " + metric_name(metric) +
                        " skipped: needs bootstrap, which is disabled");
        return std::nullopt;
    }
    return bootstrap_z(sub, metric, selectors[0], selectors[1], *m1.value, *m2.value, config);
}

DomainSection build_section(const LabeledDataset& sub, Domain domain,
                            const std::vector<SubgroupSelector>& all_selectors,
                            const AuditConfig& config,
                            const LabeledDataset* transport_dataset,
                            const LabeledDataset* transport_source) {
    DomainSection section;
    section.domain = domain;
    section.n = static_cast<long>(sub.records.size());

    // Groups absent from this domain slice are skipped with a note; an
    // attribute missing on records is a real error and propagates.
    std::vector<SubgroupSelector> selectors;
    std::vector<DatasetView> views;
    for (const auto& sel : all_selectors) {
        try {
            DatasetView view = select(sub, sel);
            selectors.push_back(sel);
            views.push_back(std::move(view));
        } catch (const EmptySelectionError&) {
            section.notes.push_back("group '" + sel.name + "' absent in the " +
                                    domain_name(domain) + " domain; skipped");
        }
    }

    std::vector<Metric> metrics = config.metrics;
    if (metrics.empty()) {
        const long unscored = static_cast<long>(
            std::count_if(sub.records.begin(), sub.records.end(),
                          [](const PredictionRecord& r) { return !record_scored(r); }));
        if (unscored == 0) {
            metrics = full_metric_set();
        } else {
            metrics = threshold_metric_set();
            section.notes.push_back(
                "auc_roc and auc_pr omitted: " + std::to_string(unscored) + " of " +
                std::to_string(sub.records.size()) + " records carry no score");
        }
    }

    const DatasetView whole = whole_view(sub);

    for (Metric metric : metrics) {
        ReportRow row;
        row.metric = metric;
        const MetricValue overall =
            cell_value(whole, metric, config.positive_label, "overall", section.notes);
        row.overall = overall.value;
        row.n_overall = static_cast<long>(whole.size());

        std::vector<MetricValue> group_values;
        std::vector<long> group_sizes;
        for (std::size_t g = 0; g < selectors.size(); ++g) {
            const MetricValue value = cell_value(views[g], metric, config.positive_label,
                                                 "group '" + selectors[g].name + "'",
                                                 section.notes);
            ReportGroupCell cell;
            cell.group = selectors[g].name;
            cell.n = static_cast<long>(views[g].size());
            cell.value = value.value;
            if (value.defined() && overall.defined()) {
                cell.pr = *value.value - *overall.value;
                cell.interp = interpret(*cell.pr, Orientation::HigherIsBetter,
                                        config.epsilon.tolerance_for(metric_name(metric)));
            }
            row.groups.push_back(std::move(cell));
            group_values.push_back(value);
            group_sizes.push_back(static_cast<long>(views[g].size()));
        }
        row.ztest = z_between(sub, metric, selectors, group_values, group_sizes, config,
                              section.notes);
        section.rows.push_back(std::move(row));
    }

    // Divergence-based PR per group, with stratified bootstrap CIs. All
    // groups stratify every resample, so each group keeps its sample size
    // across replicates.
    const int positive_index = sub.label_index(config.positive_label);
    for (std::size_t g = 0; g < selectors.size(); ++g) {
        DivergencePrRow pr_row;
        pr_row.group = selectors[g].name;
        pr_row.estimate = empirical_pr(whole, selectors[g], config.divergence,
                                       config.divergence_mode, positive_index);
        if (config.bootstrap.enabled) {
            BootstrapPlan plan;
            plan.replicates = config.bootstrap.replicates;
            plan.seed = config.bootstrap.seed;
            plan.level = config.bootstrap.level;
            plan.threads = config.bootstrap.threads;
            const SubgroupSelector sel = selectors[g];
            const DivergenceSpec spec = config.divergence;
            const DivergenceMode mode = config.divergence_mode;
            const Statistic stat = [sel, spec, mode, positive_index](const DatasetView& view) {
                return empirical_pr(view, sel, spec, mode, positive_index).pr;
            };
            const BootstrapResult boot = bootstrap(sub, stat, plan, selectors);
            pr_row.estimate.ci = std::make_pair(boot.lo, boot.hi);
            pr_row.estimate.ci_level = boot.level;
            if (boot.discarded > 0) {
                section.notes.push_back("bootstrap for PR of '" + sel.name + "' discarded " +
                                        std::to_string(boot.discarded) + " undefined replicates");
            }
        }
        pr_row.interp = interpret(pr_row.estimate.pr, Orientation::DivergenceLike,
                                  config.epsilon.fallback);
        section.divergence_pr.push_back(std::move(pr_row));
    }

    // Gates: per group, the divergence-PR gate plus one gate per metric
    // whose PR is defined (undefined PRs are noted, not silently passed).
    for (std::size_t g = 0; g < selectors.size(); ++g) {
        GateResult divergence_gate;
        divergence_gate.metric = "divergence";
        divergence_gate.group = selectors[g].name;
        divergence_gate.epsilon = config.epsilon.fallback;
        divergence_gate.margin =
            divergence_gate.epsilon - std::fabs(section.divergence_pr[g].estimate.pr);
        divergence_gate.passed = divergence_gate.margin >= 0.0;
        divergence_gate.domain = domain;
        section.gates.push_back(divergence_gate);

        std::map<Metric, std::optional<double>> prs;
        for (const auto& row : section.rows) {
            const ReportGroupCell& cell = row.groups[g];
            if (cell.pr) {
                prs[row.metric] = cell.pr;
            } else {
                section.notes.push_back("gate " + metric_name(row.metric) + "/" + cell.group +
                                        " not evaluable: undefined value");
            }
        }
        auto gates = check_metric_representativity(prs, config.epsilon, selectors[g].name,
                                                   domain);
        section.gates.insert(section.gates.end(), gates.begin(), gates.end());
    }

    // Target sections also run the external-transportability criterion.
    if (transport_dataset) {
        for (const auto& sel : selectors) {
            try {
                const TransportAssessment t = check_external_transportability(
                    *transport_dataset, sel, config, transport_source);
                section.gates.push_back(t.gate);
                if (t.source_pr) {
                    section.notes.push_back(
                        "transportability of '" + sel.name + "': target PR " +
                        format_fixed(t.pr.pr) + " vs source PR " + format_fixed(*t.source_pr) +
                        " (shift " + format_fixed(*t.pr_shift) + ")");
                }
                if (t.meets_floor) {
                    section.notes.push_back(
                        "overall target accuracy " + format_value(t.overall_accuracy) +
                        (*t.meets_floor ? " meets" : " is below") + " the configured floor " +
                        format_value(t.min_overall_accuracy));
                }
            } catch (const NotAssessableError& e) {
                section.notes.push_back("transportability of '" + sel.name +
                                        "' not assessable: " + e.what());
            }
        }
    }
    return section;
}

} // namespace

AuditReport build_report(const LabeledDataset& dataset, const AuditConfig& config,
                         const std::string& dataset_path, const std::string& dataset_hash) {
    validate_config(config);
    if (dataset.records.empty()) throw ValidationError("audit over an empty dataset");
    if (dataset.label_index(config.positive_label) < 0) {
        throw ValidationError("positive label '" + config.positive_label +
                              "' not in the dataset label space");
    }

    AuditReport report;
    report.meta.dataset_path = dataset_path;
    report.meta.dataset_hash = dataset_hash;
    report.meta.config = config;

    const auto selectors = config.selectors_for(dataset);

    bool has_source = false;
    bool has_target = false;
    for (const auto& r : dataset.records) {
        (r.domain == Domain::Source ? has_source : has_target) = true;
    }

    for (Domain domain : {Domain::Source, Domain::Target}) {
        if (domain == Domain::Source && !has_source) continue;
        if (domain == Domain::Target && !has_target) continue;

        LabeledDataset slice;
        const LabeledDataset* sub = &dataset;
        if (has_source && has_target) {
            slice.label_space = dataset.label_space;
            for (const auto& r : dataset.records) {
                if (r.domain == domain) slice.records.push_back(r);
            }
            sub = &slice;
        }
        const bool run_transport = domain == Domain::Target;
        report.sections.push_back(build_section(
            *sub, domain, selectors, config,
            run_transport ? &dataset : nullptr,
            run_transport && has_source ? &dataset : nullptr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string shortest_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string csv_cell(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string csv_number(const std::optional<double>& v) {
    if (!v || std::isnan(*v)) return "";
    return shortest_double(*v);
}

std::string md_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '|') out += "\\|";
        else out += c;
    }
    return out;
}

std::string ci_text(const PrEstimate& estimate) {
    if (!estimate.ci) return "-";
    return "[" + format_fixed(estimate.ci->first) + ", " + format_fixed(estimate.ci->second) +
           "]";
}

std::string domain_heading(const DomainSection& section) {
    return "## Domain: " + domain_name(section.domain) + " (n=" +
           std::to_string(section.n) + ")";
}

std::string render_markdown(const AuditReport& report) {
    std::ostringstream out;
    const AuditConfig& config = report.meta.config;
    out << "# Representativity audit\n\n";
    out << "- dataset: "
        << (report.meta.dataset_path.empty() ? "(in-memory)" : report.meta.dataset_path);
    if (!report.meta.dataset_hash.empty()) out << " (" << report.meta.dataset_hash << ")";
    out << "\n";
    out << "- tool version: " << report.meta.tool_version << "\n";
    out << "- divergence: " << divergence_name(config.divergence.kind) << ", mode "
        << divergence_mode_name(config.divergence_mode) << "\n";
    out << "- epsilon: " << format_fixed(config.epsilon.fallback) << " default";
    if (!config.epsilon.per_metric.empty()) {
        out << " (per metric:";
        for (const auto& [name, eps] : config.epsilon.per_metric) {
            out << " " << name << "=" << format_fixed(eps);
        }
        out << ")";
    }
    out << "\n";
    out << "- parity tolerance: " << format_fixed(config.parity_tolerance) << "\n";
    out << "- z mode: " << z_mode_name(config.z_mode) << "; stars at p<"
        << shortest_double(config.alpha_stars[0]) << " (*), p<"
        << shortest_double(config.alpha_stars[1]) << " (**), p<"
        << shortest_double(config.alpha_stars[2]) << " (***)\n";
    if (config.bootstrap.enabled) {
        out << "- bootstrap: " << config.bootstrap.replicates << " replicates, seed "
            << config.bootstrap.seed << ", level " << shortest_double(config.bootstrap.level)
            << ", threads " << config.bootstrap.threads << "\n";
    } else {
        out << "- bootstrap: disabled\n";
    }

    for (const auto& section : report.sections) {
        out << "\n" << domain_heading(section) << "\n\n";

        // Metric table, one column pair per group; z/p compare the first two.
        out << "| metric | overall |";
        const auto& group_names =
            section.rows.empty() ? std::vector<ReportGroupCell>{} : section.rows[0].groups;
        for (const auto& cell : group_names) out << " " << md_escape(cell.group) << " |";
        for (const auto& cell : group_names) out << " PR(" << md_escape(cell.group) << ") |";
        out << " z | p | sig |\n";
        out << "|---|---:|";
        for (std::size_t i = 0; i < group_names.size() * 2; ++i) out << "---:|";
        out << "---:|---:|---|\n";
        for (const auto& row : section.rows) {
            out << "| " << metric_name(row.metric) << " | " << format_value(row.overall)
                << " |";
            for (const auto& cell : row.groups) out << " " << format_value(cell.value) << " |";
            for (const auto& cell : row.groups) out << " " << format_value(cell.pr) << " |";
            if (row.ztest && !row.ztest->degenerate) {
                out << " " << format_fixed(row.ztest->z) << " | "
                    << format_p(row.ztest->p_two_sided) << " | " << row.ztest->stars << " |\n";
            } else {
                out << " - | - |  |\n";
            }
        }

        if (!section.divergence_pr.empty()) {
            out << "\n### Divergence-based PR (" << section.divergence_pr[0].estimate.basis
                << ", " << divergence_mode_name(config.divergence_mode) << ")\n\n";
            out << "| group | n | PR | CI";
            if (section.divergence_pr[0].estimate.ci_level) {
                out << " (" << shortest_double(*section.divergence_pr[0].estimate.ci_level)
                    << ")";
            }
            out << " | reading |\n|---|---:|---:|---|---|\n";
            for (const auto& row : section.divergence_pr) {
                out << "| " << md_escape(row.group) << " | " << row.estimate.n_subgroup << " | "
                    << format_fixed(row.estimate.pr) << " | " << ci_text(row.estimate) << " | "
                    << tag_name(row.interp.tag) << " |\n";
            }
        }

        out << "\n### Gates\n\n";
        if (section.gates.empty()) {
            out << "no gates configured\n";
        } else {
            out << "| criterion | group | epsilon | margin | result |\n";
            out << "|---|---|---:|---:|---|\n";
            for (const auto& gate : section.gates) {
                out << "| " << md_escape(gate.metric) << " | " << md_escape(gate.group) << " | "
                    << format_fixed(gate.epsilon) << " | " << format_fixed(gate.margin) << " | "
                    << (gate.passed ? "pass" : "FAIL") << " |\n";
            }
        }

        if (!section.notes.empty()) {
            out << "\n### Notes\n\n";
            for (const auto& note : section.notes) out << "- " << note << "\n";
        }
    }

    out << "\n## Effective configuration\n\n```json\n"
        << detail::config_to_json(config).dump(2) << "\n```\n";
    return out.str();
}

ordered_json interp_json(const std::optional<Interpretation>& interp) {
    if (!interp) return nullptr;
    ordered_json doc;
    doc["reading"] = tag_name(interp->tag);
    doc["normalized_pr"] = interp->normalized_pr;
    return doc;
}

ordered_json ztest_json(const ZTestResult& t) {
    ordered_json doc;
    doc["z"] = t.z; // NaN serializes as null
    doc["z_str"] = std::isnan(t.z) ? "-" : format_fixed(t.z);
    doc["p"] = t.p_two_sided;
    doc["p_str"] = format_p(t.p_two_sided);
    doc["stars"] = t.stars;
    doc["degenerate"] = t.degenerate;
    doc["note"] = t.note;
    return doc;
}

ordered_json gate_json(const GateResult& gate) {
    ordered_json doc;
    doc["criterion"] = gate.metric;
    doc["group"] = gate.group;
    doc["domain"] = domain_name(gate.domain);
    doc["epsilon"] = gate.epsilon;
    doc["margin"] = gate.margin;
    doc["passed"] = gate.passed;
    return doc;
}

std::string render_json(const AuditReport& report) {
    ordered_json doc;
    doc["meta"]["dataset_path"] = report.meta.dataset_path;
    doc["meta"]["dataset_hash"] = report.meta.dataset_hash;
    doc["meta"]["tool_version"] = report.meta.tool_version;
    doc["meta"]["config"] = detail::config_to_json(report.meta.config);

    ordered_json sections = ordered_json::array();
    for (const auto& section : report.sections) {
        ordered_json s;
        s["domain"] = domain_name(section.domain);
        s["n"] = section.n;
        ordered_json rows = ordered_json::array();
        for (const auto& row : section.rows) {
            ordered_json r;
            r["metric"] = metric_name(row.metric);
            r["overall"] = row.overall ? ordered_json(*row.overall) : ordered_json(nullptr);
            r["overall_str"] = format_value(row.overall);
            r["n"] = row.n_overall;
            ordered_json cells = ordered_json::array();
            for (const auto& cell : row.groups) {
                ordered_json c;
                c["group"] = cell.group;
                c["n"] = cell.n;
                c["value"] = cell.value ? ordered_json(*cell.value) : ordered_json(nullptr);
                c["value_str"] = format_value(cell.value);
                c["pr"] = cell.pr ? ordered_json(*cell.pr) : ordered_json(nullptr);
                c["pr_str"] = format_value(cell.pr);
                c["interpretation"] = interp_json(cell.interp);
                cells.push_back(std::move(c));
            }
            r["groups"] = std::move(cells);
            r["ztest"] = row.ztest ? ztest_json(*row.ztest) : ordered_json(nullptr);
            rows.push_back(std::move(r));
        }
        s["rows"] = std::move(rows);

        ordered_json divergence = ordered_json::array();
        for (const auto& row : section.divergence_pr) {
            ordered_json d;
            d["group"] = row.group;
            d["pr"] = row.estimate.pr;
            d["pr_str"] = format_fixed(row.estimate.pr);
            d["subgroup_term"] = row.estimate.subgroup_term;
            d["population_term"] = row.estimate.population_term;
            d["n_subgroup"] = row.estimate.n_subgroup;
            d["n_population"] = row.estimate.n_population;
            d["basis"] = row.estimate.basis;
            if (row.estimate.ci) {
                d["ci"] = ordered_json::array({row.estimate.ci->first, row.estimate.ci->second});
                d["ci_level"] = *row.estimate.ci_level;
            } else {
                d["ci"] = nullptr;
                d["ci_level"] = nullptr;
            }
            d["interpretation"] = interp_json(row.interp);
            divergence.push_back(std::move(d));
        }
        s["divergence_pr"] = std::move(divergence);

        ordered_json gates = ordered_json::array();
        for (const auto& gate : section.gates) gates.push_back(gate_json(gate));
        s["gates"] = std::move(gates);
        s["notes"] = section.notes;
        sections.push_back(std::move(s));
    }
    doc["sections"] = std::move(sections);
    return doc.dump(2) + "\n";
}

std::string render_csv(const AuditReport& report) {
    std::ostringstream out;
    out << "domain,kind,metric,group,n,value,pr,z,p,stars,ci_lo,ci_hi,epsilon,margin,passed,"
           "reading,note\n";
    auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << csv_cell(fields[i]);
        }
        out << '\n';
    };
    for (const auto& section : report.sections) {
        const std::string domain = domain_name(section.domain);
        for (const auto& row : section.rows) {
            const std::string metric = metric_name(row.metric);
            std::string z, p, sig;
            if (row.ztest) {
                z = csv_number(row.ztest->z);
                p = csv_number(row.ztest->p_two_sided);
                sig = row.ztest->stars;
            }
            emit({domain, "metric", metric, "overall", std::to_string(row.n_overall),
                  csv_number(row.overall), "", z, p, sig, "", "", "", "", "", "", ""});
            for (const auto& cell : row.groups) {
                emit({domain, "metric", metric, cell.group, std::to_string(cell.n),
                      csv_number(cell.value), csv_number(cell.pr), "", "", "", "", "", "", "",
                      "", interpretation_label(cell.interp), ""});
            }
        }
        for (const auto& row : section.divergence_pr) {
            emit({domain, "divergence_pr", row.estimate.basis, row.group,
                  std::to_string(row.estimate.n_subgroup), "",
                  shortest_double(row.estimate.pr), "", "", "",
                  row.estimate.ci ? shortest_double(row.estimate.ci->first) : "",
                  row.estimate.ci ? shortest_double(row.estimate.ci->second) : "", "", "", "",
                  tag_name(row.interp.tag), ""});
        }
        for (const auto& gate : section.gates) {
            emit({domain, "gate", gate.metric, gate.group, "", "", "", "", "", "", "", "",
                  shortest_double(gate.epsilon), shortest_double(gate.margin),
                  gate.passed ? "true" : "false", "", ""});
        }
        for (const auto& note : section.notes) {
            emit({domain, "note", "", "", "", "", "", "", "", "", "", "", "", "", "", "", note});
        }
    }
    emit({"", "config", "", "", "", "", "", "", "", "", "", "", "", "", "", "",
          detail::config_to_json(report.meta.config).dump()});
    return out.str();
}

} // namespace

std::string render(const AuditReport& report, ReportFormat format) {
    switch (format) {
        case ReportFormat::Markdown: return render_markdown(report);
        case ReportFormat::JSON:     return render_json(report);
        case ReportFormat::CSV:      return render_csv(report);
    }
    return render_markdown(report);
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

namespace {

double number_or_nan(const json& v) {
    if (v.is_null()) return std::nan("");
    return v.get<double>();
}

std::optional<double> optional_number(const json& v) {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
}

PrTag tag_from_name(const std::string& name) {
    if (name == "representative") return PrTag::Representative;
    if (name == "underperforms") return PrTag::Underperforms;
    if (name == "overoptimized") return PrTag::Overoptimized;
    throw ParseError("report json: unknown reading '" + name + "'");
}

std::optional<Interpretation> interp_from_json(const json& v) {
    if (v.is_null()) return std::nullopt;
    Interpretation interp;
    interp.tag = tag_from_name(v.at("reading").get<std::string>());
    interp.normalized_pr = v.at("normalized_pr").get<double>();
    return interp;
}

Domain domain_from_json(const std::string& name) {
    if (name == "source") return Domain::Source;
    if (name == "target") return Domain::Target;
    throw ParseError("report json: unknown domain '" + name + "'");
}

Metric metric_or_throw(const std::string& name) {
    auto metric = metric_from_name(name);
    if (!metric) throw ParseError("report json: unknown metric '" + name + "'");
    return *metric;
}

} // namespace

AuditReport report_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("report json: not valid JSON");

    AuditReport report;
    const json& meta = doc.at("meta");
    report.meta.dataset_path = meta.at("dataset_path").get<std::string>();
    report.meta.dataset_hash = meta.at("dataset_hash").get<std::string>();
    report.meta.tool_version = meta.at("tool_version").get<std::string>();
    report.meta.config = detail::config_from_json(meta.at("config"), "report json");

    for (const json& s : doc.at("sections")) {
        DomainSection section;
        section.domain = domain_from_json(s.at("domain").get<std::string>());
        section.n = s.at("n").get<long>();
        for (const json& r : s.at("rows")) {
            ReportRow row;
            row.metric = metric_or_throw(r.at("metric").get<std::string>());
            row.overall = optional_number(r.at("overall"));
            row.n_overall = r.at("n").get<long>();
            for (const json& c : r.at("groups")) {
                ReportGroupCell cell;
                cell.group = c.at("group").get<std::string>();
                cell.n = c.at("n").get<long>();
                cell.value = optional_number(c.at("value"));
                cell.pr = optional_number(c.at("pr"));
                cell.interp = interp_from_json(c.at("interpretation"));
                row.groups.push_back(std::move(cell));
            }
            if (!r.at("ztest").is_null()) {
                const json& t = r.at("ztest");
                ZTestResult ztest;
                ztest.z = number_or_nan(t.at("z"));
                ztest.p_two_sided = number_or_nan(t.at("p"));
                ztest.stars = t.at("stars").get<std::string>();
                ztest.degenerate = t.at("degenerate").get<bool>();
                ztest.note = t.at("note").get<std::string>();
                row.ztest = std::move(ztest);
            }
            section.rows.push_back(std::move(row));
        }
        for (const json& d : s.at("divergence_pr")) {
            DivergencePrRow row;
            row.group = d.at("group").get<std::string>();
            row.estimate.pr = d.at("pr").get<double>();
            row.estimate.subgroup_term = d.at("subgroup_term").get<double>();
            row.estimate.population_term = d.at("population_term").get<double>();
            row.estimate.n_subgroup = d.at("n_subgroup").get<long>();
            row.estimate.n_population = d.at("n_population").get<long>();
            row.estimate.basis = d.at("basis").get<std::string>();
            if (!d.at("ci").is_null()) {
                const json& ci = d.at("ci");
                row.estimate.ci = std::make_pair(ci.at(0).get<double>(), ci.at(1).get<double>());
                row.estimate.ci_level = d.at("ci_level").get<double>();
            }
            auto interp = interp_from_json(d.at("interpretation"));
            if (interp) row.interp = *interp;
            section.divergence_pr.push_back(std::move(row));
        }
        for (const json& g : s.at("gates")) {
            GateResult gate;
            gate.metric = g.at("criterion").get<std::string>();
            gate.group = g.at("group").get<std::string>();
            gate.domain = domain_from_json(g.at("domain").get<std::string>());
            gate.epsilon = g.at("epsilon").get<double>();
            gate.margin = g.at("margin").get<double>();
            gate.passed = g.at("passed").get<bool>();
            section.gates.push_back(std::move(gate));
        }
        for (const json& note : s.at("notes")) {
            section.notes.push_back(note.get<std::string>());
        }
        report.sections.push_back(std::move(section));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Equivalence & exit codes
// ---------------------------------------------------------------------------

namespace {

bool eq(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return a == b;
}

bool eq(const std::optional<double>& a, const std::optional<double>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || eq(*a, *b);
}

bool eq(const std::optional<Interpretation>& a, const std::optional<Interpretation>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->tag == b->tag && eq(a->normalized_pr, b->normalized_pr));
}

bool eq(const PrEstimate& a, const PrEstimate& b) {
    if (a.ci.has_value() != b.ci.has_value()) return false;
    if (a.ci && (!eq(a.ci->first, b.ci->first) || !eq(a.ci->second, b.ci->second))) return false;
    if (a.ci_level.has_value() != b.ci_level.has_value()) return false;
    if (a.ci_level && !eq(*a.ci_level, *b.ci_level)) return false;
    return eq(a.pr, b.pr) && eq(a.subgroup_term, b.subgroup_term) &&
           eq(a.population_term, b.population_term) && a.n_subgroup == b.n_subgroup &&
           a.n_population == b.n_population && a.basis == b.basis;
}

bool eq(const std::optional<ZTestResult>& a, const std::optional<ZTestResult>& b) {
    if (a.has_value() != b.has_value()) return false;
    if (!a) return true;
    return eq(a->z, b->z) && eq(a->p_two_sided, b->p_two_sided) && a->stars == b->stars &&
           a->degenerate == b->degenerate && a->note == b->note;
}

bool eq(const GateResult& a, const GateResult& b) {
    return a.passed == b.passed && eq(a.margin, b.margin) && a.metric == b.metric &&
           a.group == b.group && eq(a.epsilon, b.epsilon) && a.domain == b.domain;
}

bool eq(const AuditConfig& a, const AuditConfig& b) {
    if (a.divergence.kind != b.divergence.kind ||
        !eq(a.divergence.kl_smoothing_epsilon, b.divergence.kl_smoothing_epsilon) ||
        a.divergence_mode != b.divergence_mode || a.positive_label != b.positive_label ||
        a.negative_label != b.negative_label || a.group_attribute != b.group_attribute ||
        !eq(a.epsilon.fallback, b.epsilon.fallback) ||
        a.epsilon.per_metric != b.epsilon.per_metric ||
        !eq(a.parity_tolerance, b.parity_tolerance) ||
        a.bootstrap.enabled != b.bootstrap.enabled ||
        a.bootstrap.replicates != b.bootstrap.replicates ||
        a.bootstrap.seed != b.bootstrap.seed || !eq(a.bootstrap.level, b.bootstrap.level) ||
        a.bootstrap.threads != b.bootstrap.threads || a.z_mode != b.z_mode ||
        a.metrics != b.metrics || a.transport.metric != b.transport.metric ||
        !eq(a.transport.epsilon, b.transport.epsilon) ||
        !eq(a.transport.min_overall_accuracy, b.transport.min_overall_accuracy)) {
        return false;
    }
    if (a.alpha_stars != b.alpha_stars) return false;
    if (a.groups.size() != b.groups.size()) return false;
    for (std::size_t i = 0; i < a.groups.size(); ++i) {
        if (a.groups[i].name != b.groups[i].name || a.groups[i].values != b.groups[i].values) {
            return false;
        }
    }
    return true;
}

} // namespace

bool equivalent(const AuditReport& a, const AuditReport& b) {
    if (a.meta.dataset_path != b.meta.dataset_path ||
        a.meta.dataset_hash != b.meta.dataset_hash ||
        a.meta.tool_version != b.meta.tool_version || !eq(a.meta.config, b.meta.config)) {
        return false;
    }
    if (a.sections.size() != b.sections.size()) return false;
    for (std::size_t s = 0; s < a.sections.size(); ++s) {
        const DomainSection& x = a.sections[s];
        const DomainSection& y = b.sections[s];
        if (x.domain != y.domain || x.n != y.n || x.notes != y.notes) return false;
        if (x.rows.size() != y.rows.size() || x.divergence_pr.size() != y.divergence_pr.size() ||
            x.gates.size() != y.gates.size()) {
            return false;
        }
        for (std::size_t i = 0; i < x.rows.size(); ++i) {
            const ReportRow& p = x.rows[i];
            const ReportRow& q = y.rows[i];
            if (p.metric != q.metric || !eq(p.overall, q.overall) ||
                p.n_overall != q.n_overall || !eq(p.ztest, q.ztest) ||
                p.groups.size() != q.groups.size()) {
                return false;
            }
            for (std::size_t g = 0; g < p.groups.size(); ++g) {
                const ReportGroupCell& c = p.groups[g];
                const ReportGroupCell& d = q.groups[g];
                if (c.group != d.group || c.n != d.n || !eq(c.value, d.value) ||
                    !eq(c.pr, d.pr) || !eq(c.interp, d.interp)) {
                    return false;
                }
            }
        }
        for (std::size_t i = 0; i < x.divergence_pr.size(); ++i) {
            const DivergencePrRow& p = x.divergence_pr[i];
            const DivergencePrRow& q = y.divergence_pr[i];
            if (p.group != q.group || !eq(p.estimate, q.estimate) ||
                !eq(std::optional<Interpretation>(p.interp),
                    std::optional<Interpretation>(q.interp))) {
                return false;
            }
        }
        for (std::size_t i = 0; i < x.gates.size(); ++i) {
            if (!eq(x.gates[i], y.gates[i])) return false;
        }
    }
    return true;
}

int exit_code_for(const std::vector<GateResult>& gates) {
    for (const auto& gate : gates) {
        if (!gate.passed) return 1;
    }
    return 0;
}

int exit_code_for(const AuditReport& report) {
    for (const auto& section : report.sections) {
        if (exit_code_for(section.gates) != 0) return 1;
    }
    return 0;
}

} // namespace praudit
