#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "praudit/ingest.hpp"
#include "praudit/metrics.hpp"
#include "praudit/report.hpp"
#include "praudit/synth.hpp"
#include "praudit/transport.hpp"

namespace {

using namespace praudit;

// PRAUDIT_SEED overrides the config's bootstrap seed (useful in CI matrices
// without touching checked-in configs).
void apply_env_seed(AuditConfig& config) {
    const char* raw = std::getenv("PRAUDIT_SEED");
    if (!raw || !*raw) return;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') {
        throw ConfigError(std::string("PRAUDIT_SEED is not an integer: '") + raw + "'");
    }
    config.bootstrap.seed = static_cast<std::uint64_t>(value);
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + out_path + "'");
    out << text;
}

int run_audit(const std::string& data_path, const std::string& config_path,
              const std::string& format_name, const std::string& out_path) {
    AuditConfig config = load_config(config_path);
    apply_env_seed(config);
    const auto format = report_format_from_name(format_name);
    if (!format) throw ConfigError("unknown report format '" + format_name + "'");
    const LabeledDataset dataset = load_predictions(data_path);
    const AuditReport report =
        build_report(dataset, config, data_path, hash_hex(fnv1a64_file(data_path)));
    write_text(render(report, *format), out_path);
    return exit_code_for(report);
}

void print_assessment(const std::string& group, const TransportAssessment& t) {
    std::printf("%s: PR %s (basis %s, target n=%ld), epsilon %s, margin %s -> %s\n",
                group.c_str(), format_fixed(t.pr.pr).c_str(), t.pr.basis.c_str(),
                t.pr.n_population, format_fixed(t.gate.epsilon).c_str(),
                format_fixed(t.gate.margin).c_str(), t.gate.passed ? "pass" : "FAIL");
    if (t.overall_accuracy) {
        std::printf("  overall target accuracy %s", format_fixed(*t.overall_accuracy).c_str());
        if (t.meets_floor) {
            std::printf(" (%s the configured floor %s)",
                        *t.meets_floor ? "meets" : "below",
                        format_fixed(*t.min_overall_accuracy).c_str());
        }
        std::printf("\n");
    }
    if (t.source_pr) {
        std::printf("  source PR %s, shift %s\n", format_fixed(*t.source_pr).c_str(),
                    format_fixed(*t.pr_shift).c_str());
    }
}

int run_transport(const std::string& source_path, const std::string& target_path,
                  const std::string& config_path, const std::optional<double>& epsilon) {
    AuditConfig config = load_config(config_path);
    apply_env_seed(config);
    if (epsilon) {
        config.transport.epsilon = *epsilon;
        validate_config(config);
    }
    const LabeledDataset source = load_predictions(source_path);
    const LabeledDataset target = load_predictions(target_path);

    std::vector<GateResult> gates;
    for (const auto& selector : config.selectors_for(target)) {
        const TransportAssessment t =
            check_external_transportability(target, selector, config, &source);
        print_assessment(selector.name, t);
        gates.push_back(t.gate);
    }
    if (gates.empty()) throw ValidationError("no subgroups found to assess");
    return exit_code_for(gates);
}

int run_parity(const std::string& data_path, const std::string& config_path,
               const std::string& value_a, const std::string& value_b) {
    AuditConfig config = load_config(config_path);
    apply_env_seed(config);
    const LabeledDataset dataset = load_predictions(data_path);
    const SubgroupSelector a = value_selector(config.group_attribute, value_a);
    const SubgroupSelector b = value_selector(config.group_attribute, value_b);

    const double gap = demographic_parity_gap(dataset, a, b, config.positive_label);
    const ParityAssessment parity = validated_parity(dataset, {a, b}, config);
    std::printf("demographic parity gap %s (tolerance %s) -> %s\n", format_fixed(gap).c_str(),
                format_fixed(parity.parity_tolerance).c_str(),
                parity.gap_ok ? "within" : "exceeded");
    for (const auto& [name, estimate] : parity.group_pr) {
        std::printf("  PR(%s) = %s (|PR| <= %s: %s)\n", name.c_str(),
                    format_fixed(estimate.pr).c_str(), format_fixed(parity.epsilon).c_str(),
                    std::fabs(estimate.pr) <= parity.epsilon ? "yes" : "no");
    }
    std::printf("validated parity: %s\n", parity.validated ? "pass" : "FAIL");
    return parity.validated ? 0 : 1;
}

int run_synth(const std::string& spec_path, const std::string& out_path) {
    const SynthSpec spec = load_synth_spec(spec_path);
    const LabeledDataset dataset = generate(spec);
    save_predictions(dataset, out_path);
    std::printf("wrote %zu records to %s\n", dataset.records.size(), out_path.c_str());
    for (const auto& group : spec.groups) {
        const SynthCounts c = counts_for(group);
        std::printf("  %s: n=%ld tp=%ld fn=%ld tn=%ld fp=%ld errors=%ld oracle PR %+.6f\n",
                    group.name.c_str(), group.n, c.tp, c.fn, c.tn, c.fp, c.errors(),
                    oracle_pr(spec, group.name));
    }
    return 0;
}

int run_reconstruct(double sens, double spec, double acc, long n, double tol) {
    const auto solutions = reconstruct_confusion(sens, spec, acc, n, tol);
    std::printf("%zu consistent confusion matrix(es) for sens=%g spec=%g acc=%g n=%ld "
                "tol=%g\n",
                solutions.size(), sens, spec, acc, n, tol);
    for (const auto& cm : solutions) {
        std::printf("  tp=%ld fp=%ld tn=%ld fn=%ld (P=%ld, N=%ld)\n", cm.tp, cm.fp, cm.tn,
                    cm.fn, cm.actual_positives(), cm.actual_negatives());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Subgroup representativity auditing for prediction dumps"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    auto* audit = app.add_subcommand("audit", "Full PR table + gates on one dataset");
    std::string audit_data, audit_config, audit_format = "md", audit_out;
    audit->add_option("--data", audit_data, "prediction dump (csv or json)")->required();
    audit->add_option("--config", audit_config, "audit config (json)")->required();
    audit->add_option("--format", audit_format, "md|json|csv (default md)");
    audit->add_option("--out", audit_out, "write the report here instead of stdout");

    auto* transport = app.add_subcommand(
        "transport", "External-transportability gate on a target population");
    std::string tr_source, tr_target, tr_config;
    std::optional<double> tr_epsilon;
    transport->add_option("--source", tr_source, "source-domain predictions")->required();
    transport->add_option("--target", tr_target, "target-domain predictions")->required();
    transport->add_option("--config", tr_config, "audit config (json)")->required();
    transport->add_option("--epsilon", tr_epsilon, "override the transport tolerance");

    auto* parity = app.add_subcommand("parity",
                                      "Demographic parity gap, validated against PR");
    std::string pa_data, pa_config, pa_a, pa_b;
    parity->add_option("--data", pa_data, "prediction dump")->required();
    parity->add_option("--config", pa_config, "audit config (json)")->required();
    parity->add_option("--group-a", pa_a, "first group attribute value")->required();
    parity->add_option("--group-b", pa_b, "second group attribute value")->required();

    auto* synth = app.add_subcommand("synth", "Generate a dataset with known per-group rates");
    std::string sy_spec, sy_out;
    synth->add_option("--spec", sy_spec, "generator spec (json)")->required();
    synth->add_option("--out", sy_out, "output path (csv or json)")->required();

    auto* reconstruct = app.add_subcommand(
        "reconstruct", "Confusion counts consistent with rounded summary rates");
    double rc_sens = 0.0, rc_spec = 0.0, rc_acc = 0.0, rc_tol = 5e-4;
    long rc_n = 0;
    reconstruct->add_option("--sens", rc_sens, "sensitivity")->required();
    reconstruct->add_option("--spec", rc_spec, "specificity")->required();
    reconstruct->add_option("--acc", rc_acc, "accuracy")->required();
    reconstruct->add_option("--n", rc_n, "group size")->required();
    reconstruct->add_option("--tol", rc_tol, "rounding tolerance (default 5e-4)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2; // bad flags are config errors
    }

    try {
        if (app.got_subcommand(audit)) {
            return run_audit(audit_data, audit_config, audit_format, audit_out);
        }
        if (app.got_subcommand(transport)) {
            return run_transport(tr_source, tr_target, tr_config, tr_epsilon);
        }
        if (app.got_subcommand(parity)) {
            return run_parity(pa_data, pa_config, pa_a, pa_b);
        }
        if (app.got_subcommand(synth)) {
            return run_synth(sy_spec, sy_out);
        }
        if (app.got_subcommand(reconstruct)) {
            return run_reconstruct(rc_sens, rc_spec, rc_acc, rc_n, rc_tol);
        }
    } catch (const AuditError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2; // unreachable with require_subcommand(1)
}
