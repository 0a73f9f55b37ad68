#pragma once

// Shared test scaffolding: record/dataset builders, a deterministic dataset
// fuzzer, and independent oracles that recompute expected values by the most
// literal route available. Production code never includes this file.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "praudit/config.hpp"
#include "praudit/model.hpp"
#include "praudit/stats.hpp"

namespace praudit::test {

inline std::string data_dir() {
#ifdef PRAUDIT_DATA_DIR
    return PRAUDIT_DATA_DIR;
#else
    return "data";
#endif
}

inline std::string config_dir() {
#ifdef PRAUDIT_CONFIG_DIR
    return PRAUDIT_CONFIG_DIR;
#else
    return "configs";
#endif
}

inline PredictionRecord rec(std::string id, Label y_true, Label y_pred,
                            std::optional<double> score = std::nullopt,
                            std::map<std::string, std::string> groups = {},
                            Domain domain = Domain::Source) {
    PredictionRecord r;
    r.id = std::move(id);
    r.y_true = std::move(y_true);
    r.y_pred = std::move(y_pred);
    r.score = score;
    r.groups = std::move(groups);
    r.domain = domain;
    return r;
}

// Binary record tagged with one value of the "g" attribute.
inline PredictionRecord grec(std::string id, Label y_true, Label y_pred,
                             std::string group_value,
                             std::optional<double> score = std::nullopt) {
    return rec(std::move(id), std::move(y_true), std::move(y_pred), score,
               {{"g", std::move(group_value)}});
}

inline LabeledDataset make_dataset(std::vector<PredictionRecord> records,
                                   std::vector<Label> space = {}) {
    return validate_dataset(std::move(records), std::move(space));
}

// Minimal config for in-code audits; bootstrap off unless a test opts in.
inline AuditConfig test_config(Label positive = "pos", std::string attribute = "g") {
    AuditConfig config;
    config.positive_label = std::move(positive);
    config.group_attribute = std::move(attribute);
    config.bootstrap.enabled = false;
    config.bootstrap.replicates = 200;
    return config;
}

// Deterministic fuzz dataset: binary labels pos/neg, `n_groups` values of
// attribute "g". Guarantees at least one actual positive and one actual
// negative. Scores, when requested, are drawn from a coarse grid so ties are
// common (the interesting case for curve code).
inline LabeledDataset random_dataset(SplitMix64& rng, long max_n, bool with_scores,
                                     int n_groups = 3) {
    const long n = 2 + static_cast<long>(rng.next_below(static_cast<std::uint64_t>(max_n - 1)));
    std::vector<PredictionRecord> records;
    records.reserve(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const Label truth = i == 0 ? "pos" : i == 1 ? "neg"
                                           : (rng.next_below(2) == 0 ? "pos" : "neg");
        const Label pred = rng.next_below(2) == 0 ? "pos" : "neg";
        std::optional<double> score;
        if (with_scores) {
            score = static_cast<double>(rng.next_below(9)) / 8.0; // tie-prone grid
        }
        records.push_back(rec("r" + std::to_string(i), truth, pred, score,
                              {{"g", "g" + std::to_string(rng.next_below(
                                         static_cast<std::uint64_t>(n_groups)))}}));
    }
    return make_dataset(std::move(records), {"neg", "pos"});
}

// ---- independent oracles ----------------------------------------------

// Mismatch fraction, the most literal error rate.
inline double oracle_error_rate(const DatasetView& view) {
    long bad = 0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        if (view[i].y_true != view[i].y_pred) ++bad;
    }
    return static_cast<double>(bad) / static_cast<double>(view.size());
}

// Mann-Whitney pair statistic: fraction of (positive, negative) score pairs
// won by the positive, ties counting one half.
inline double oracle_pair_auc(const DatasetView& view, const Label& positive) {
    std::vector<double> pos;
    std::vector<double> neg;
    for (std::size_t i = 0; i < view.size(); ++i) {
        (view[i].y_true == positive ? pos : neg).push_back(*view[i].score);
    }
    double wins = 0.0;
    for (double sp : pos) {
        for (double sn : neg) {
            if (sp > sn) wins += 1.0;
            else if (sp == sn) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Average precision by direct threshold enumeration: for each distinct score
// t descending, the predicted-positive set is {score >= t}; sum
// (recall step) x precision.
inline double oracle_average_precision(const DatasetView& view, const Label& positive) {
    std::vector<double> thresholds;
    long total_pos = 0;
    for (std::size_t i = 0; i < view.size(); ++i) {
        thresholds.push_back(*view[i].score);
        if (view[i].y_true == positive) ++total_pos;
    }
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    double ap = 0.0;
    double prev_recall = 0.0;
    for (double t : thresholds) {
        long tp = 0;
        long fp = 0;
        for (std::size_t i = 0; i < view.size(); ++i) {
            if (*view[i].score >= t) {
                (view[i].y_true == positive ? tp : fp) += 1;
            }
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    return ap;
}

// Reference divergences on raw probability vectors, written from the
// defining sums (no shortcuts shared with the implementation).
inline double ref_tv(const std::vector<double>& p, const std::vector<double>& q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) acc += std::fabs(p[k] - q[k]);
    return 0.5 * acc;
}

inline double ref_kl_bits(const std::vector<double>& p, const std::vector<double>& q,
                          double eps) {
    const double u = 1.0 / static_cast<double>(q.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        const double qk = (1.0 - eps) * q[k] + eps * u;
        acc += p[k] * std::log2(p[k] / qk);
    }
    return acc;
}

inline double ref_js_bits(const std::vector<double>& p, const std::vector<double>& q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double m = 0.5 * (p[k] + q[k]);
        if (p[k] > 0.0) acc += 0.5 * p[k] * std::log2(p[k] / m);
        if (q[k] > 0.0) acc += 0.5 * q[k] * std::log2(q[k] / m);
    }
    return acc;
}

// Percentile with linear interpolation between order statistics (the
// convention R calls type 7): h = (n-1)q.
inline double ref_percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

// ---- filesystem helpers -------------------------------------------------

// Unique temp file removed on scope exit.
struct TempFile {
    std::filesystem::path path;

    explicit TempFile(const std::string& name_hint) {
        static std::atomic<unsigned> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("praudit-test-" + std::to_string(counter++) + "-" + name_hint);
    }
    TempFile(const TempFile&) = delete;
    TempFile& operator=(const TempFile&) = delete;
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }

    std::string str() const { return path.string(); }
};

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

inline std::string read_file_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace praudit::test
