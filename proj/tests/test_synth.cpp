#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "praudit/ingest.hpp"
#include "praudit/metrics.hpp"
#include "praudit/pr_core.hpp"
#include "praudit/synth.hpp"
#include "support.hpp"

using namespace praudit;
using namespace praudit::test;

namespace {

SynthGroup group(std::string name, long n, double prevalence, double sensitivity,
                 double specificity) {
    SynthGroup g;
    g.name = std::move(name);
    g.n = n;
    g.prevalence = prevalence;
    g.sensitivity = sensitivity;
    g.specificity = specificity;
    return g;
}

// Two cohorts of equal size and prevalence, one markedly weaker: group A
// realizes error rate 0.3, group B 0.1, population 0.2.
SynthSpec ab_spec() {
    SynthSpec spec;
    spec.groups = {group("A", 1000, 0.5, 0.7, 0.7), group("B", 1000, 0.5, 0.9, 0.9)};
    spec.attribute = "cohort";
    spec.positive_label = "malignant";
    spec.negative_label = "benign";
    spec.with_scores = false;
    return spec;
}

const SynthGroup& group_named(const SynthSpec& spec, const std::string& name) {
    for (const auto& g : spec.groups) {
        if (g.name == name) return g;
    }
    throw std::runtime_error("test spec has no group named " + name);
}

} // namespace

TEST_CASE("synth: counts realize the configured rates exactly") {
    const SynthCounts a = counts_for(group("A", 1000, 0.5, 0.7, 0.7));
    CHECK(a.pos == 500);
    CHECK(a.neg == 500);
    CHECK(a.tp == 350);
    CHECK(a.fn == 150);
    CHECK(a.tn == 350);
    CHECK(a.fp == 150);
    CHECK(a.errors() == 300);

    const SynthCounts b = counts_for(group("B", 1000, 0.5, 0.9, 0.9));
    CHECK(b.tp == 450);
    CHECK(b.fn == 50);
    CHECK(b.tn == 450);
    CHECK(b.fp == 50);
    CHECK(b.errors() == 100);

    SUBCASE("halves round away from zero") {
        const SynthCounts c = counts_for(group("h", 5, 0.5, 1.0, 1.0));
        CHECK(c.pos == 3);
        CHECK(c.neg == 2);
    }

    SUBCASE("the dermoscopy generator spec reproduces the fixture confusion") {
        auto spec = load_synth_spec(config_dir() + "/synth_dermoscopy_resnet50.json");
        const SynthCounts light = counts_for(group_named(spec, "light"));
        CHECK(light.pos == 79);
        CHECK(light.tp == 70);
        CHECK(light.fn == 9);
        CHECK(light.tn == 20);
        CHECK(light.fp == 8);
        const SynthCounts dark = counts_for(group_named(spec, "dark"));
        CHECK(dark.pos == 19);
        CHECK(dark.tp == 15);
        CHECK(dark.fn == 4);
        CHECK(dark.tn == 23);
        CHECK(dark.fp == 16);
    }
}

TEST_CASE("synth: unachievable group rates are rejected") {
    CHECK_THROWS_AS(counts_for(group("", 10, 0.5, 0.5, 0.5)), ValidationError);
    CHECK_THROWS_AS(counts_for(group("g", 0, 0.5, 0.5, 0.5)), ValidationError);
    CHECK_THROWS_AS(counts_for(group("g", 10, 1.2, 0.5, 0.5)), ValidationError);
    CHECK_THROWS_AS(counts_for(group("g", 10, -0.1, 0.5, 0.5)), ValidationError);
    CHECK_THROWS_AS(counts_for(group("g", 10, 0.5, 1.5, 0.5)), ValidationError);
    CHECK_THROWS_AS(counts_for(group("g", 10, 0.5, 0.5, -1.0)), ValidationError);
    const double nan = std::nan("");
    CHECK_THROWS_AS(counts_for(group("g", 10, nan, 0.5, 0.5)), ValidationError);

    // Rates inside [0,1] can still be unrealizable once rounded to counts.
    CHECK_THROWS_WITH_AS(counts_for(group("tiny", 10, 0.01, 0.5, 0.5)),
                         "group 'tiny': prevalence rounds to zero positives; "
                         "sensitivity cannot be realized",
                         ValidationError);
    CHECK_THROWS_WITH_AS(counts_for(group("full", 10, 0.99, 0.5, 0.5)),
                         "group 'full': prevalence rounds to zero negatives; "
                         "specificity cannot be realized",
                         ValidationError);
}

TEST_CASE("synth: generation is seed-deterministic with fixed counts") {
    SynthSpec spec = ab_spec();
    spec.with_scores = true;
    const auto first = generate(spec);
    const auto second = generate(spec);

    REQUIRE(first.size() == 2000);
    REQUIRE(second.size() == first.size());
    CHECK(first.label_space == std::vector<Label>{"benign", "malignant"});
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first.records[i].id == second.records[i].id);
        CHECK(first.records[i].y_true == second.records[i].y_true);
        CHECK(first.records[i].y_pred == second.records[i].y_pred);
        CHECK(first.records[i].score == second.records[i].score);
        CHECK(first.records[i].groups == second.records[i].groups);
        CHECK(first.records[i].domain == second.records[i].domain);
    }

    SUBCASE("a different seed permutes records but not the confusion") {
        SynthSpec reseeded = spec;
        reseeded.seed = 7;
        const auto other = generate(reseeded);
        REQUIRE(other.size() == first.size());

        auto sorted_ids = [](const LabeledDataset& ds) {
            std::vector<std::string> ids;
            for (const auto& r : ds.records) ids.push_back(r.id);
            std::sort(ids.begin(), ids.end());
            return ids;
        };
        CHECK(sorted_ids(other) == sorted_ids(first));
        for (const auto& name : {"A", "B"}) {
            const auto want = confusion(select(first, value_selector("cohort", name)),
                                        "malignant");
            const auto got = confusion(select(other, value_selector("cohort", name)),
                                       "malignant");
            CHECK(got.tp == want.tp);
            CHECK(got.fp == want.fp);
            CHECK(got.tn == want.tn);
            CHECK(got.fn == want.fn);
        }
    }
}

TEST_CASE("synth: generated records carry the configured shape") {
    SynthSpec spec = ab_spec();
    spec.groups[0].n = 107;
    spec.groups[1].n = 58;
    spec.domain = Domain::Target;
    spec.with_scores = true;
    const auto ds = generate(spec);

    long a_count = 0;
    for (const auto& r : ds.records) {
        CHECK(r.domain == Domain::Target);
        REQUIRE(r.groups.count("cohort") == 1);
        REQUIRE(r.score.has_value());
        // Thresholding the score at 0.5 must reproduce the prediction.
        CHECK((r.y_pred == "malignant") == (*r.score >= 0.5));
        CHECK(*r.score >= 0.0);
        CHECK(*r.score <= 1.0);
        if (r.groups.at("cohort") == "A") ++a_count;
    }
    CHECK(a_count == 107);

    SUBCASE("ids are group-serial, zero-padded, and survive the shuffle") {
        std::vector<std::string> a_ids;
        for (const auto& r : ds.records) {
            if (r.groups.at("cohort") == "A") a_ids.push_back(r.id);
        }
        std::sort(a_ids.begin(), a_ids.end());
        CHECK(a_ids.front() == "A-0001");
        CHECK(a_ids.back() == "A-0107");
    }

    SUBCASE("scores are omitted when not requested") {
        SynthSpec bare = spec;
        bare.with_scores = false;
        for (const auto& r : generate(bare).records) {
            CHECK_FALSE(r.score.has_value());
        }
    }
}

TEST_CASE("synth: malformed specs are rejected") {
    SynthSpec spec = ab_spec();

    SynthSpec no_groups = spec;
    no_groups.groups.clear();
    CHECK_THROWS_AS(generate(no_groups), ValidationError);

    SynthSpec no_attribute = spec;
    no_attribute.attribute = "";
    CHECK_THROWS_AS(generate(no_attribute), ValidationError);

    SynthSpec one_label = spec;
    one_label.negative_label = one_label.positive_label;
    CHECK_THROWS_AS(generate(one_label), ValidationError);

    SynthSpec empty_label = spec;
    empty_label.positive_label = "";
    CHECK_THROWS_AS(generate(empty_label), ValidationError);

    SynthSpec bad_spread = spec;
    bad_spread.groups[0].score_model.spread = -0.5;
    CHECK_THROWS_AS(generate(bad_spread), ValidationError);
}

TEST_CASE("synth: closed-form PR matches the empirical estimate bit for bit") {
    SynthSpec spec = ab_spec();
    const auto ds = generate(spec);

    for (const auto& name : {"A", "B"}) {
        const auto est = empirical_pr(ds, value_selector("cohort", name), DivergenceSpec{},
                                      DivergenceMode::HardLabel);
        CHECK(est.pr == oracle_pr(spec, name));
    }
    CHECK(oracle_pr(spec, "A") == 300.0 / 1000.0 - 400.0 / 2000.0);
    CHECK(std::fabs(oracle_pr(spec, "A") - 0.10) <= 1e-12);
    CHECK(oracle_pr(spec, "B") == 100.0 / 1000.0 - 400.0 / 2000.0);
    CHECK(std::fabs(oracle_pr(spec, "B") - -0.10) <= 1e-12);

    SUBCASE("randomized specs agree with no tolerance at all") {
        SplitMix64 rng{20260816};
        for (int trial = 0; trial < 50; ++trial) {
            SynthSpec random;
            random.attribute = "g";
            random.positive_label = "pos";
            random.negative_label = "neg";
            random.with_scores = trial % 2 == 0;
            random.seed = rng.next();
            const int n_groups = 2 + static_cast<int>(rng.next_below(2));
            for (int k = 0; k < n_groups; ++k) {
                const long n = 5 + static_cast<long>(rng.next_below(200));
                const double prevalence = 0.25 + 0.5 * rng.next_unit();
                const double sensitivity = 0.05 + 0.9 * rng.next_unit();
                const double specificity = 0.05 + 0.9 * rng.next_unit();
                random.groups.push_back(group("g" + std::to_string(k), n, prevalence,
                                              sensitivity, specificity));
            }
            const auto sample = generate(random);
            for (const auto& g : random.groups) {
                const auto view = select(sample, value_selector("g", g.name));
                const auto cm = confusion(view, "pos");
                const SynthCounts want = counts_for(g);
                CHECK(cm.tp == want.tp);
                CHECK(cm.fp == want.fp);
                CHECK(cm.tn == want.tn);
                CHECK(cm.fn == want.fn);
                const auto est = empirical_pr(sample, value_selector("g", g.name),
                                              DivergenceSpec{}, DivergenceMode::HardLabel);
                CHECK(est.pr == oracle_pr(random, g.name));
            }
        }
    }

    SUBCASE("a lone group and twin groups sit exactly at zero") {
        SynthSpec lone;
        lone.groups = {group("only", 40, 0.5, 0.8, 0.7)};
        lone.attribute = "g";
        lone.positive_label = "pos";
        lone.negative_label = "neg";
        CHECK(oracle_pr(lone, "only") == 0.0);

        SynthSpec twins = lone;
        twins.groups.push_back(group("copy", 40, 0.5, 0.8, 0.7));
        CHECK(oracle_pr(twins, "only") == 0.0);
        CHECK(oracle_pr(twins, "copy") == 0.0);
    }

    SUBCASE("unknown group names and empty specs are errors") {
        CHECK_THROWS_AS(oracle_pr(spec, "C"), ValidationError);
        CHECK_THROWS_AS(oracle_pr(SynthSpec{}, "A"), ValidationError);
    }
}

TEST_CASE("synth: the checked-in dermoscopy fixture regenerates byte for byte") {
    auto spec = load_synth_spec(config_dir() + "/synth_dermoscopy_resnet50.json");
    const auto ds = generate(spec);
    TempFile out("regen.csv");
    save_predictions(ds, out.str());
    CHECK(read_file_text(out.str()) == read_file_text(data_dir() + "/dermoscopy_resnet50.csv"));

    SUBCASE("and so does the target-domain fixture") {
        auto target_spec =
            load_synth_spec(config_dir() + "/synth_dermoscopy_resnet50_target.json");
        const auto target = generate(target_spec);
        TempFile target_out("regen_target.csv");
        save_predictions(target, target_out.str());
        CHECK(read_file_text(target_out.str()) ==
              read_file_text(data_dir() + "/dermoscopy_resnet50_target.csv"));
    }
}
