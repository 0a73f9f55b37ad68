#pragma once

#include <stdexcept>
#include <string>

namespace praudit {

// Base class for every error this library throws on purpose. The CLI maps
// any AuditError to exit code 2 (input/config error); gate failures are not
// errors and travel through return values instead.
class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dataset-level invariant violation: duplicate ids, score outside [0,1],
// labels outside the declared space, empty input, malformed probability
// vectors. Messages carry the offending record/row when known.
class ValidationError : public AuditError {
public:
    using AuditError::AuditError;
};

// Structural file problem: missing column, wrong field count, unparseable
// value. Messages name the file and the 1-based row where possible.
class ParseError : public AuditError {
public:
    using AuditError::AuditError;
};

// Bad audit configuration: missing required key, unknown key, out-of-range
// field.
class ConfigError : public AuditError {
public:
    using AuditError::AuditError;
};

// A selector names an attribute that some record does not carry.
class UnknownAttributeError : public AuditError {
public:
    using AuditError::AuditError;
};

// A selector matched zero records. "Subgroup absent" is its own failure
// class so callers can distinguish it from malformed selectors.
class EmptySelectionError : public AuditError {
public:
    using AuditError::AuditError;
};

// An operation needs per-record scores (or probability vectors) that the
// dataset does not carry: probabilistic divergences, AUC metrics.
class MissingScoreError : public AuditError {
public:
    using AuditError::AuditError;
};

// The transportability gate cannot be evaluated at all (subgroup absent in
// the target population). Distinct from a failed gate: a failed gate is an
// answer, this is the absence of one.
class NotAssessableError : public AuditError {
public:
    using AuditError::AuditError;
};

} // namespace praudit
