#include "doctest.h"

#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "praudit/ingest.hpp"
#include "praudit/report.hpp"
#include "praudit/transport.hpp"
#include "support.hpp"

using namespace praudit;
using namespace praudit::test;

namespace {

// A-vs-B population with equal predicted-positive rates but unequal error
// rates: parity looks perfect, representativity does not.
LabeledDataset parity_trap() {
    std::vector<PredictionRecord> records;
    auto add_block = [&records](const std::string& cohort, long tp, long fn, long tn, long fp) {
        auto push = [&](const Label& t, const Label& p, long count) {
            for (long i = 0; i < count; ++i) {
                records.push_back(grec(cohort + "-" + t + p + std::to_string(i), t, p, cohort));
            }
        };
        push("pos", "pos", tp);
        push("pos", "neg", fn);
        push("neg", "neg", tn);
        push("neg", "pos", fp);
    };
    add_block("A", 16, 4, 16, 4); // error rate 0.2, predicted-positive rate 0.5
    add_block("B", 12, 8, 12, 8); // error rate 0.4, predicted-positive rate 0.5
    return make_dataset(std::move(records), {"neg", "pos"});
}

} // namespace

TEST_CASE("transport: metric representativity gates") {
    EpsilonPolicy policy; // fallback 0.05

    SUBCASE("anchored pass and fail margins") {
        std::map<Metric, std::optional<double>> pr_values{
            {Metric::Precision, -0.296},
            {Metric::Sensitivity, -0.044},
        };
        auto gates = check_metric_representativity(pr_values, policy, "dark", Domain::Source);
        REQUIRE(gates.size() == 2);

        CHECK(gates[0].metric == "precision");
        CHECK_FALSE(gates[0].passed);
        CHECK(std::fabs(gates[0].margin - -0.246) <= 1e-12);
        CHECK(gates[0].group == "dark");
        CHECK(gates[0].epsilon == 0.05);
        CHECK(gates[0].domain == Domain::Source);

        CHECK(gates[1].metric == "sensitivity");
        CHECK(gates[1].passed);
        CHECK(std::fabs(gates[1].margin - 0.006) <= 1e-12);
    }

    SUBCASE("zero PR passes with the full epsilon as margin") {
        auto gates = check_metric_representativity({{Metric::F1, 0.0}}, policy);
        REQUIRE(gates.size() == 1);
        CHECK(gates[0].passed);
        CHECK(gates[0].margin == 0.05);
    }

    SUBCASE("per-metric tolerances override the fallback") {
        EpsilonPolicy loose;
        loose.per_metric["precision"] = 0.3;
        auto gates = check_metric_representativity({{Metric::Precision, -0.296}}, loose);
        CHECK(gates[0].passed);
        CHECK(gates[0].epsilon == 0.3);
        CHECK(std::fabs(gates[0].margin - 0.004) <= 1e-12);
    }

    SUBCASE("gates come out in metric enum order regardless of insertion") {
        std::map<Metric, std::optional<double>> pr_values;
        pr_values[Metric::AucPr] = 0.01;
        pr_values[Metric::Precision] = 0.01;
        pr_values[Metric::F1] = 0.01;
        auto gates = check_metric_representativity(pr_values, policy);
        REQUIRE(gates.size() == 3);
        CHECK(gates[0].metric == "precision");
        CHECK(gates[1].metric == "f1");
        CHECK(gates[2].metric == "auc_pr");
    }

    SUBCASE("margin is epsilon minus |PR| and grows with epsilon") {
        for (double pr : {-0.12, 0.03, 0.0}) {
            double previous = -1.0;
            for (double eps : {0.01, 0.05, 0.2}) {
                EpsilonPolicy p;
                p.fallback = eps;
                auto gates = check_metric_representativity({{Metric::Accuracy, pr}}, p);
                CHECK(gates[0].margin == eps - std::fabs(pr));
                CHECK(gates[0].passed == (gates[0].margin >= 0.0));
                CHECK(gates[0].margin > previous);
                previous = gates[0].margin;
            }
        }
    }

    SUBCASE("an undefined PR cannot be gated") {
        CHECK_THROWS_AS(
            check_metric_representativity({{Metric::Precision, std::nullopt}}, policy),
            ValidationError);
    }
}

TEST_CASE("transport: gate lists map to process exit codes") {
    GateResult pass;
    pass.passed = true;
    GateResult fail;
    fail.passed = false;
    CHECK(exit_code_for(std::vector<GateResult>{}) == 0);
    CHECK(exit_code_for(std::vector<GateResult>{pass, pass}) == 0);
    CHECK(exit_code_for(std::vector<GateResult>{pass, fail}) == 1);
}

TEST_CASE("transport: external transportability on the dermoscopy target fixture") {
    auto target = load_predictions(data_dir() + "/dermoscopy_resnet50_target.csv");
    AuditConfig config = test_config("malignant", "phototype");
    config.transport.metric = Metric::F1;
    config.transport.epsilon = 0.1;
    config.transport.min_overall_accuracy = 0.5;
    SubgroupSelector dark = value_selector("phototype", "dark");

    auto assessment = check_external_transportability(target, dark, config);
    CHECK_FALSE(assessment.gate.passed);
    CHECK(std::fabs(assessment.gate.margin - -0.121256038647343) <= 1e-12);
    CHECK(assessment.gate.metric == "f1");
    CHECK(assessment.gate.group == "dark");
    CHECK(assessment.gate.epsilon == 0.1);
    CHECK(assessment.gate.domain == Domain::Target);
    CHECK(assessment.pr.basis == "f1");
    CHECK(std::fabs(assessment.pr.pr - -0.221256038647343) <= 1e-12);
    CHECK(assessment.pr.n_subgroup == 58);
    CHECK(assessment.pr.n_population == 165);
    CHECK(*assessment.overall_accuracy == 128.0 / 165.0);
    CHECK(*assessment.min_overall_accuracy == 0.5);
    CHECK(*assessment.meets_floor);
    CHECK_FALSE(assessment.source_pr.has_value()); // no source dataset given

    SUBCASE("a looser epsilon turns the same PR into a pass") {
        config.transport.epsilon = 0.25;
        auto loose = check_external_transportability(target, dark, config);
        CHECK(loose.gate.passed);
        CHECK(std::fabs(loose.gate.margin - 0.028743961352657) <= 1e-12);
    }

    SUBCASE("the accuracy floor is informational and never flips the gate") {
        config.transport.min_overall_accuracy = 0.9;
        auto floored = check_external_transportability(target, dark, config);
        CHECK_FALSE(*floored.meets_floor);
        CHECK(floored.gate.margin == assessment.gate.margin);
        CHECK_FALSE(floored.gate.passed);
    }

    SUBCASE("without a floor the verdict fields stay empty") {
        config.transport.min_overall_accuracy.reset();
        auto unfloored = check_external_transportability(target, dark, config);
        CHECK_FALSE(unfloored.min_overall_accuracy.has_value());
        CHECK_FALSE(unfloored.meets_floor.has_value());
    }

    SUBCASE("a source dataset adds the informational shift") {
        auto source = load_predictions(data_dir() + "/dermoscopy_resnet50.csv");
        auto compared = check_external_transportability(target, dark, config, &source);
        // Fixture source and target realize identical confusion counts, so
        // the PR carries over exactly.
        CHECK(*compared.source_pr == compared.pr.pr);
        CHECK(*compared.pr_shift == 0.0);
    }

    SUBCASE("a subgroup missing from the source leaves the shift empty") {
        auto source_light_only = make_dataset({grec("s1", "malignant", "malignant", "light"),
                                               grec("s2", "benign", "benign", "light")},
                                              {"benign", "malignant"});
        auto partial = check_external_transportability(target, dark, config, &source_light_only);
        CHECK_FALSE(partial.source_pr.has_value());
        CHECK_FALSE(partial.pr_shift.has_value());
        CHECK_FALSE(partial.gate.passed); // the target gate is untouched
    }
}

TEST_CASE("transport: divergence-based gate is the default") {
    auto target = load_predictions(data_dir() + "/dermoscopy_resnet50_target.csv");
    AuditConfig config = test_config("malignant", "phototype"); // no transport metric

    auto assessment =
        check_external_transportability(target, value_selector("phototype", "dark"), config);
    CHECK(assessment.gate.metric == "divergence");
    CHECK(assessment.pr.basis == "tv");
    CHECK(assessment.pr.pr == 20.0 / 58.0 - 37.0 / 165.0);
    CHECK(assessment.gate.epsilon == 0.05); // policy fallback
    CHECK_FALSE(assessment.gate.passed);

    SUBCASE("a subgroup covering the whole target passes with margin epsilon") {
        SubgroupSelector everyone{"everyone", "phototype", {"light", "dark"}};
        auto full = check_external_transportability(target, everyone, config);
        CHECK(full.pr.pr == 0.0);
        CHECK(full.gate.margin == 0.05);
        CHECK(full.gate.passed);
    }
}

TEST_CASE("transport: only target-tagged records enter a mixed-domain assessment") {
    // Source half: subgroup s is error-free. Target half: s carries 1 error
    // in 2 records against 1 error in 4 overall -> PR exactly 0.25.
    auto ds = make_dataset(
        {
            rec("src1", "pos", "pos", std::nullopt, {{"g", "s"}}, Domain::Source),
            rec("src2", "pos", "pos", std::nullopt, {{"g", "s"}}, Domain::Source),
            rec("src3", "neg", "neg", std::nullopt, {{"g", "t"}}, Domain::Source),
            rec("src4", "neg", "neg", std::nullopt, {{"g", "t"}}, Domain::Source),
            rec("tgt1", "pos", "neg", std::nullopt, {{"g", "s"}}, Domain::Target),
            rec("tgt2", "pos", "pos", std::nullopt, {{"g", "s"}}, Domain::Target),
            rec("tgt3", "neg", "neg", std::nullopt, {{"g", "t"}}, Domain::Target),
            rec("tgt4", "neg", "neg", std::nullopt, {{"g", "t"}}, Domain::Target),
        },
        {"neg", "pos"});
    AuditConfig config = test_config();
    config.transport.epsilon = 0.3;

    auto assessment = check_external_transportability(ds, value_selector("g", "s"), config);
    CHECK(assessment.pr.pr == 1.0 / 2.0 - 1.0 / 4.0);
    CHECK(assessment.pr.n_population == 4); // target slice only
    CHECK(assessment.pr.n_subgroup == 2);
    CHECK(assessment.gate.passed);
    CHECK(std::fabs(assessment.gate.margin - 0.05) <= 1e-15);
}

TEST_CASE("transport: unanswerable assessments are distinct from failures") {
    auto target = load_predictions(data_dir() + "/dermoscopy_resnet50_target.csv");
    AuditConfig config = test_config("malignant", "phototype");

    CHECK_THROWS_AS(check_external_transportability(
                        target, value_selector("phototype", "olive"), config),
                    NotAssessableError);
    CHECK_THROWS_AS(check_external_transportability(
                        target, value_selector("age_band", "18-25"), config),
                    NotAssessableError);

    SUBCASE("empty dataset") {
        LabeledDataset empty;
        CHECK_THROWS_AS(check_external_transportability(
                            empty, value_selector("phototype", "dark"), config),
                        ValidationError);
    }

    SUBCASE("a transport metric undefined on the subgroup") {
        // Subgroup never predicts positive -> precision undefined there.
        auto ds = make_dataset({grec("a1", "pos", "neg", "quiet"),
                                grec("a2", "neg", "neg", "quiet"),
                                grec("b1", "pos", "pos", "loud"),
                                grec("b2", "neg", "pos", "loud")},
                               {"neg", "pos"});
        AuditConfig cfg = test_config();
        cfg.transport.metric = Metric::Precision;
        CHECK_THROWS_AS(
            check_external_transportability(ds, value_selector("g", "quiet"), cfg),
            NotAssessableError);
    }
}

TEST_CASE("transport: demographic parity gap") {
    auto ds = load_predictions(data_dir() + "/dermoscopy_resnet50.csv");
    SubgroupSelector light = value_selector("phototype", "light");
    SubgroupSelector dark = value_selector("phototype", "dark");

    // Predicted-positive rates 78/107 vs 31/58.
    const double gap = demographic_parity_gap(ds, light, dark, "malignant");
    CHECK(std::fabs(gap - 0.1944892039961328) <= 1e-15);
    CHECK(std::fabs(gap - 0.195) <= 1.2e-3); // published rounding
    CHECK(demographic_parity_gap(ds, dark, light, "malignant") == gap);

    SUBCASE("identical prediction rates have zero gap") {
        auto even = parity_trap();
        CHECK(demographic_parity_gap(even, value_selector("g", "A"),
                                     value_selector("g", "B"), "pos") == 0.0);
    }

    SUBCASE("opposite extremes have gap one") {
        auto extreme = make_dataset({grec("a1", "pos", "pos", "all"),
                                     grec("a2", "neg", "pos", "all"),
                                     grec("b1", "pos", "neg", "none"),
                                     grec("b2", "neg", "neg", "none")},
                                    {"neg", "pos"});
        CHECK(demographic_parity_gap(extreme, value_selector("g", "all"),
                                     value_selector("g", "none"), "pos") == 1.0);
    }

    SUBCASE("selection errors propagate") {
        CHECK_THROWS_AS(demographic_parity_gap(ds, value_selector("phototype", "olive"),
                                               dark, "malignant"),
                        EmptySelectionError);
        CHECK_THROWS_AS(demographic_parity_gap(ds, value_selector("age_band", "x"),
                                               dark, "malignant"),
                        UnknownAttributeError);
    }
}

TEST_CASE("transport: parity validated against ground truth") {
    AuditConfig config = test_config();

    SUBCASE("twin subgroups validate cleanly") {
        auto twins = make_dataset(
            {
                grec("a1", "pos", "pos", "A"), grec("a2", "pos", "neg", "A"),
                grec("a3", "neg", "neg", "A"), grec("a4", "neg", "neg", "A"),
                grec("b1", "pos", "pos", "B"), grec("b2", "pos", "neg", "B"),
                grec("b3", "neg", "neg", "B"), grec("b4", "neg", "neg", "B"),
            },
            {"neg", "pos"});
        auto result = validated_parity(
            twins, {value_selector("g", "A"), value_selector("g", "B")}, config);
        CHECK(result.validated);
        CHECK(result.gap_ok);
        CHECK(result.pr_ok);
        CHECK(result.gap == 0.0);
        REQUIRE(result.group_pr.size() == 2);
        CHECK(result.group_pr[0].first == "A");
        CHECK(result.group_pr[1].first == "B");
        CHECK(result.group_pr[0].second.pr == 0.0);
        CHECK(result.group_pr[1].second.pr == 0.0);
    }

    SUBCASE("equal rates with unequal errors pass parity but fail validation") {
        auto trap = parity_trap();
        auto result = validated_parity(
            trap, {value_selector("g", "A"), value_selector("g", "B")}, config);
        CHECK(result.gap == 0.0);
        CHECK(result.gap_ok);
        CHECK_FALSE(result.pr_ok);
        CHECK_FALSE(result.validated);
        CHECK(std::fabs(result.group_pr[0].second.pr - -0.1) <= 1e-12);
        CHECK(std::fabs(result.group_pr[1].second.pr - 0.1) <= 1e-12);
        CHECK(result.parity_tolerance == 0.05);
        CHECK(result.epsilon == 0.05);
    }

    SUBCASE("the dermoscopy fixture fails on both counts") {
        auto ds = load_predictions(data_dir() + "/dermoscopy_resnet50.csv");
        AuditConfig cfg = test_config("malignant", "phototype");
        auto result = validated_parity(ds, cfg.selectors_for(ds), cfg);
        CHECK_FALSE(result.gap_ok);
        CHECK_FALSE(result.pr_ok);
        CHECK_FALSE(result.validated);
        CHECK(std::fabs(result.gap - 0.1944892039961328) <= 1e-15);
    }

    SUBCASE("fewer than two subgroups is a caller error") {
        auto twins = parity_trap();
        CHECK_THROWS_AS(validated_parity(twins, {value_selector("g", "A")}, config),
                        ValidationError);
        CHECK_THROWS_AS(validated_parity(twins, {}, config), ValidationError);
    }
}
