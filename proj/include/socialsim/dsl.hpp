#pragma once

// Scenario language: lexing, parsing, validation and canonical formatting.
//
// A scenario is a sequence of declarations:
//
//   scenario NAME
//   network NAME range MIN MAX default INT
//   trait NAME
//   status NAME [targeted] duration INT          (0 = permanent)
//   relationship NAME
//   location NAME
//   character ID { attribute* }
//   goals NETWORK [when COND] { rule ID weight W [per trait] when COND ... }
//   exchange ID { attribute* }
//   trigger ID when COND then { effect* }
//
// Rule order inside exchanges, goal blocks and the trigger list is semantic
// and preserved by the formatter; everything else is emitted sorted.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socialsim/scenario.hpp"

namespace socialsim::dsl {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 1;
    int column = 1;
    std::string code;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// Every diagnostic code the front end can emit, in documentation order.
inline constexpr std::string_view kDiagnosticCodes[] = {
    "unexpected-character",   "unterminated-string",   "int-out-of-range",
    "unexpected-token",       "unknown-declaration",   "unknown-attribute",
    "unknown-condition",      "unknown-effect",        "nesting-too-deep",
    "duplicate-symbol",       "duplicate-attribute",   "duplicate-rule",
    "duplicate-goal-block",   "undeclared-trait",      "undeclared-network",
    "undeclared-status",      "undeclared-relationship", "undeclared-location",
    "undeclared-character",   "undeclared-exchange",   "invalid-range",
    "score-out-of-range",     "likes-dislikes-overlap", "missing-effects",
    "missing-scene",          "missing-attribute",     "player-count",
    "status-target",          "self-reference",        "unknown-orientation",
    "unbound-trait",          "misplaced-volition",    "misplaced-random",
    "invalid-role",           "unsatisfiable-condition",
};

struct ParseResult {
    std::optional<ScenarioDoc> doc;  // present iff no error diagnostics
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return doc.has_value(); }
};

/// Parses and validates. Never throws on malformed input; any byte sequence
/// yields either a document or at least one positioned diagnostic.
ParseResult parse(std::string_view text);

/// Syntax only: the document is returned even when semantic checks would
/// fail. Syntax diagnostics are appended to `diagnostics`.
std::optional<ScenarioDoc> parse_syntax(std::string_view text, std::vector<Diagnostic>& diagnostics);

/// Semantic checks over a parsed document.
std::vector<Diagnostic> validate(const ScenarioDoc& doc);

/// Canonical text form. `parse(serialize(d))` is structurally equal to `d`.
std::string serialize(const ScenarioDoc& doc);

std::string format_condition(const Condition& cond);
std::string format_weight(const WeightTerm& weight);
std::string format_effect(const Effect& effect);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

/// `file:line:col code message`
std::string format_diagnostic(std::string_view file, const Diagnostic& d);

}  // namespace socialsim::dsl
