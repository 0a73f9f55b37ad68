#include "praudit/ingest.hpp"

#include "praudit/synth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "config_json.hpp"

namespace praudit {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

FileFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        std::string ext = path.substr(dot + 1);
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext == "json") return FileFormat::JSON;
    }
    return FileFormat::CSV;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3); // UTF-8 BOM
    return text;
}

// One CSV line into fields. RFC-4180-style quoting with "" escapes; embedded
// newlines are not supported (prediction dumps never need them).
std::vector<std::string> split_csv_line(const std::string& line, const std::string& path,
                                        std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { field += '"'; ++i; }
                else quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) {
        throw ParseError(path + " row " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(field));
    return fields;
}

Domain parse_domain(const std::string& raw, const std::string& where) {
    std::string v = raw;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (v.empty() || v == "source") return Domain::Source;
    if (v == "target") return Domain::Target;
    throw ParseError(where + ": domain must be source or target, got '" + raw + "'");
}

double parse_score(const std::string& raw, const std::string& where) {
    double value = 0.0;
    const char* begin = raw.data();
    const char* end = raw.data() + raw.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw ParseError(where + ": unparseable score '" + raw + "'");
    }
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ValidationError(where + ": score " + raw + " outside [0,1]");
    }
    return value;
}

LabeledDataset load_csv(const std::string& path) {
    const std::string text = read_file(path);

    std::vector<std::string> lines;
    std::string current;
    for (char c : text) {
        if (c == '\n') { lines.push_back(std::move(current)); current.clear(); }
        else if (c != '\r') current += c;
    }
    if (!current.empty()) lines.push_back(std::move(current));
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("'" + path + "' is empty");

    const auto header = split_csv_line(lines[0], path, 1);
    int col_id = -1, col_true = -1, col_pred = -1, col_score = -1, col_domain = -1;
    std::vector<std::pair<int, std::string>> attr_cols; // column index -> attribute name
    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        const int ci = static_cast<int>(c);
        if (name == "id") col_id = ci;
        else if (name == "y_true") col_true = ci;
        else if (name == "y_pred") col_pred = ci;
        else if (name == "score") col_score = ci;
        else if (name == "domain") col_domain = ci;
        else if (name == "probs")
            throw ParseError("'" + path + "': probability vectors are JSON-only; "
                             "a CSV 'probs' column is not supported");
        else if (name.empty())
            throw ParseError("'" + path + "': empty column name in header");
        else attr_cols.emplace_back(ci, name);
    }
    auto require = [&](int col, const char* name) {
        if (col < 0) throw ParseError("'" + path + "': missing required column " + name);
    };
    require(col_id, "id");
    require(col_true, "y_true");
    require(col_pred, "y_pred");

    std::vector<PredictionRecord> records;
    records.reserve(lines.size() - 1);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        const std::string where = path + " row " + std::to_string(row + 1);
        if (lines[row].empty()) continue; // tolerate stray blank lines
        auto fields = split_csv_line(lines[row], path, row + 1);
        if (fields.size() != header.size()) {
            throw ParseError(where + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        PredictionRecord r;
        r.id = fields[static_cast<std::size_t>(col_id)];
        r.y_true = fields[static_cast<std::size_t>(col_true)];
        r.y_pred = fields[static_cast<std::size_t>(col_pred)];
        if (r.id.empty()) throw ParseError(where + ": empty id");
        if (r.y_true.empty() || r.y_pred.empty()) {
            throw ParseError(where + ": empty label field");
        }
        if (col_score >= 0) {
            const std::string& raw = fields[static_cast<std::size_t>(col_score)];
            if (!raw.empty()) r.score = parse_score(raw, where);
        }
        if (col_domain >= 0) {
            r.domain = parse_domain(fields[static_cast<std::size_t>(col_domain)], where);
        }
        for (const auto& [ci, name] : attr_cols) {
            r.groups[name] = fields[static_cast<std::size_t>(ci)];
        }
        records.push_back(std::move(r));
    }
    return validate_dataset(std::move(records));
}

json parse_json_file(const std::string& path) {
    const std::string text = read_file(path);
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("'" + path + "' is not valid JSON");
    return doc;
}

LabeledDataset load_json(const std::string& path) {
    const json doc = parse_json_file(path);
    if (!doc.is_array()) throw ParseError("'" + path + "': expected an array of records");
    if (doc.empty()) throw ParseError("'" + path + "' is empty");

    std::vector<PredictionRecord> records;
    records.reserve(doc.size());
    std::size_t index = 0;
    for (const auto& item : doc) {
        ++index;
        const std::string where = path + " record " + std::to_string(index);
        if (!item.is_object()) throw ParseError(where + ": expected an object");
        PredictionRecord r;
        for (const auto& [key, value] : item.items()) {
            if (key == "id" || key == "y_true" || key == "y_pred") {
                if (!value.is_string()) throw ParseError(where + ": " + key + " must be a string");
                if (key == "id") r.id = value.get<std::string>();
                else if (key == "y_true") r.y_true = value.get<std::string>();
                else r.y_pred = value.get<std::string>();
            } else if (key == "score") {
                if (value.is_null()) continue;
                if (!value.is_number()) throw ParseError(where + ": score must be a number");
                const double s = value.get<double>();
                if (!(s >= 0.0 && s <= 1.0)) {
                    throw ValidationError(where + ": score outside [0,1]");
                }
                r.score = s;
            } else if (key == "probs") {
                if (value.is_null()) continue;
                if (!value.is_array()) throw ParseError(where + ": probs must be an array");
                std::vector<double> probs;
                for (const auto& v : value) {
                    if (!v.is_number()) throw ParseError(where + ": probs entries must be numbers");
                    probs.push_back(v.get<double>());
                }
                r.probs = std::move(probs);
            } else if (key == "domain") {
                if (value.is_null()) continue;
                if (!value.is_string()) throw ParseError(where + ": domain must be a string");
                r.domain = parse_domain(value.get<std::string>(), where);
            } else {
                if (!value.is_string()) {
                    throw ParseError(where + ": group attribute '" + key + "' must be a string");
                }
                r.groups[key] = value.get<std::string>();
            }
        }
        if (r.id.empty()) throw ParseError(where + ": missing id");
        if (r.y_true.empty()) throw ParseError(where + ": missing y_true");
        if (r.y_pred.empty()) throw ParseError(where + ": missing y_pred");
        records.push_back(std::move(r));
    }
    return validate_dataset(std::move(records));
}

// Shortest decimal that round-trips to the same double.
std::string shortest_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += "\"\"";
        else quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<std::string> attribute_columns(const LabeledDataset& dataset) {
    std::vector<std::string> names;
    for (const auto& r : dataset.records) {
        for (const auto& [name, value] : r.groups) {
            if (std::find(names.begin(), names.end(), name) == names.end()) {
                names.push_back(name);
            }
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

void save_csv(const LabeledDataset& dataset, const std::string& path) {
    for (const auto& r : dataset.records) {
        if (r.probs) {
            throw ValidationError("dataset carries probability vectors; save as JSON instead");
        }
    }
    const bool any_score = std::any_of(dataset.records.begin(), dataset.records.end(),
                                       [](const auto& r) { return r.score.has_value(); });
    const auto attrs = attribute_columns(dataset);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << "id,y_true,y_pred";
    if (any_score) out << ",score";
    for (const auto& a : attrs) out << ',' << csv_quote(a);
    out << ",domain\n";
    for (const auto& r : dataset.records) {
        out << csv_quote(r.id) << ',' << csv_quote(r.y_true) << ',' << csv_quote(r.y_pred);
        if (any_score) {
            out << ',';
            if (r.score) out << shortest_double(*r.score);
        }
        for (const auto& a : attrs) {
            out << ',';
            auto it = r.groups.find(a);
            if (it != r.groups.end()) out << csv_quote(it->second);
        }
        out << ',' << domain_name(r.domain) << '\n';
    }
}

void save_json(const LabeledDataset& dataset, const std::string& path) {
    ordered_json doc = ordered_json::array();
    for (const auto& r : dataset.records) {
        ordered_json item;
        item["id"] = r.id;
        item["y_true"] = r.y_true;
        item["y_pred"] = r.y_pred;
        if (r.score) item["score"] = *r.score;
        if (r.probs) item["probs"] = *r.probs;
        for (const auto& [name, value] : r.groups) item[name] = value;
        item["domain"] = domain_name(r.domain);
        doc.push_back(std::move(item));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

} // namespace

LabeledDataset load_predictions(const std::string& path, FileFormat format) {
    return format == FileFormat::CSV ? load_csv(path) : load_json(path);
}

LabeledDataset load_predictions(const std::string& path) {
    return load_predictions(path, format_from_path(path));
}

void save_predictions(const LabeledDataset& dataset, const std::string& path, FileFormat format) {
    if (format == FileFormat::CSV) save_csv(dataset, path);
    else save_json(dataset, path);
}

void save_predictions(const LabeledDataset& dataset, const std::string& path) {
    save_predictions(dataset, path, format_from_path(path));
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

AuditConfig load_config(const std::string& path) {
    AuditConfig config = detail::config_from_json(parse_json_file(path), path);
    if (config.positive_label.empty()) {
        throw ConfigError("'" + path + "': positive_label is required");
    }
    if (config.group_attribute.empty()) {
        throw ConfigError("'" + path + "': group_attribute is required");
    }
    validate_config(config);
    return config;
}

namespace {

using detail::expect_number;
using detail::expect_string;
using detail::unknown_key;

ScoreModel parse_score_model(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError("'" + path + "': score_model must be an object");
    ScoreModel model;
    for (const auto& [key, value] : v.items()) {
        if (key == "mean_pos") model.mean_pos = expect_number(value, path, "score_model.mean_pos");
        else if (key == "mean_neg") model.mean_neg = expect_number(value, path, "score_model.mean_neg");
        else if (key == "spread") model.spread = expect_number(value, path, "score_model.spread");
        else unknown_key(path, "score_model." + key);
    }
    return model;
}

SynthGroup parse_synth_group(const json& v, const std::string& path) {
    if (!v.is_object()) throw ConfigError("'" + path + "': groups entries must be objects");
    SynthGroup group;
    for (const auto& [key, value] : v.items()) {
        if (key == "name") group.name = expect_string(value, path, "groups.name");
        else if (key == "n") group.n = static_cast<long>(expect_number(value, path, "groups.n"));
        else if (key == "prevalence") group.prevalence = expect_number(value, path, "groups.prevalence");
        else if (key == "sensitivity") group.sensitivity = expect_number(value, path, "groups.sensitivity");
        else if (key == "specificity") group.specificity = expect_number(value, path, "groups.specificity");
        else if (key == "score_model") group.score_model = parse_score_model(value, path);
        else unknown_key(path, "groups." + key);
    }
    return group;
}

} // namespace

SynthSpec load_synth_spec(const std::string& path) {
    const json doc = parse_json_file(path);
    if (!doc.is_object()) throw ConfigError("'" + path + "': expected a JSON object");

    SynthSpec spec;
    for (const auto& [key, value] : doc.items()) {
        if (key == "groups") {
            if (!value.is_array()) throw ConfigError("'" + path + "': groups must be an array");
            for (const auto& item : value) spec.groups.push_back(parse_synth_group(item, path));
        } else if (key == "seed") {
            if (!value.is_number_unsigned() && !value.is_number_integer()) {
                throw ConfigError("'" + path + "': seed must be an integer");
            }
            spec.seed = value.get<std::uint64_t>();
        } else if (key == "domain") {
            const std::string name = expect_string(value, path, key);
            if (name == "source") spec.domain = Domain::Source;
            else if (name == "target") spec.domain = Domain::Target;
            else throw ConfigError("'" + path + "': domain must be source or target");
        } else if (key == "attribute") {
            spec.attribute = expect_string(value, path, key);
        } else if (key == "positive_label") {
            spec.positive_label = expect_string(value, path, key);
        } else if (key == "negative_label") {
            spec.negative_label = expect_string(value, path, key);
        } else if (key == "with_scores") {
            if (!value.is_boolean()) {
                throw ConfigError("'" + path + "': with_scores must be a boolean");
            }
            spec.with_scores = value.get<bool>();
        } else {
            unknown_key(path, key);
        }
    }
    if (spec.groups.empty()) throw ConfigError("'" + path + "': groups must be non-empty");
    return spec;
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64_file(const std::string& path) {
    const std::string text = read_file(path);
    return fnv1a64(text.data(), text.size());
}

std::string hash_hex(std::uint64_t h) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace praudit
