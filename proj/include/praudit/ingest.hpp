#pragma once

#include <cstdint>
#include <string>

#include "praudit/config.hpp"
#include "praudit/model.hpp"

namespace praudit {

enum class FileFormat { CSV, JSON };

// ".json" -> JSON, anything else -> CSV.
FileFormat format_from_path(const std::string& path);

// Load a prediction dump.
//
// CSV (canonical, UTF-8, comma-separated, first row header): required
// columns id, y_true, y_pred; optional score (decimal in [0,1], empty =
// absent) and domain (source|target, case-insensitive, absent/empty =
// source); every other column is a group attribute. Probability vectors
// are JSON-only; a CSV column named "probs" is rejected.
//
// JSON: array of objects mirroring the CSV columns — id/y_true/y_pred as
// strings, optional numeric score, optional "probs" array, optional domain
// string, any other string-valued key becomes a group attribute.
//
// The result is validated via validate_dataset. Errors name the file and
// the offending 1-based row/element.
LabeledDataset load_predictions(const std::string& path, FileFormat format);
LabeledDataset load_predictions(const std::string& path); // format sniffed from extension

// Write a dataset back out in either wire format. Round trip is lossless:
// ids, labels, scores (shortest round-trip decimal), groups and domains
// reload identically, in the same order. Datasets carrying probability
// vectors must be saved as JSON.
void save_predictions(const LabeledDataset& dataset, const std::string& path, FileFormat format);
void save_predictions(const LabeledDataset& dataset, const std::string& path);

// Load an audit configuration (JSON; schema in docs/config_schema.md).
// Absent optional fields take the documented defaults: TV divergence with
// smoothing 1e-6, hard-label mode, epsilon 0.05, parity tolerance 0.05,
// 2000 replicates / seed 42 / level 0.95, stars 0.05/0.01/0.001,
// group-size z mode, auto metric set. Unknown keys and out-of-range values
// raise ConfigError.
AuditConfig load_config(const std::string& path);

// FNV-1a 64-bit over a file's raw bytes; reports echo it so a rendered
// audit pins the exact input. Not cryptographic, deliberately.
std::uint64_t fnv1a64_file(const std::string& path);
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hash_hex(std::uint64_t h);

} // namespace praudit
