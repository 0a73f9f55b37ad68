#pragma once

// Internal glue: AuditConfig <-> JSON document, shared by the config file
// loader and the report's config echo (which must round-trip). Not public
// API; lives next to the sources on purpose.

#include <string>

#include "json.hpp"
#include "praudit/config.hpp"

namespace praudit::detail {

// Structural parse only — no required-key or range validation, so a report
// echo can be restored verbatim. `context` prefixes error messages
// (a file path or "report json").
AuditConfig config_from_json(const nlohmann::json& doc, const std::string& context);

nlohmann::ordered_json config_to_json(const AuditConfig& config);

// Small typed-field helpers shared by the structured-document parsers.
[[noreturn]] void unknown_key(const std::string& context, const std::string& key);
double expect_number(const nlohmann::json& v, const std::string& context, const std::string& key);
std::string expect_string(const nlohmann::json& v, const std::string& context,
                          const std::string& key);

} // namespace praudit::detail
