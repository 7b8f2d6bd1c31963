#pragma once

#include <string_view>

#include "dedc/ast.hpp"
#include "dedc/diagnostic.hpp"

namespace dedc {

/// Parses a whole `.dl` source. The returned Program is present even when errors were reported
/// (it then holds every statement that parsed cleanly); callers must check `ok()`.
///
/// Grammar, whitespace-insensitive, `//` comments to end of line:
///
///     .decl name[(type, ...)]
///     #name(P, ...) = { C statements }
///     [macro][macro:arg] head[@next] :- item, item, ... .
///     fact(1, 2)@0.
///
/// Variables start with an uppercase letter or `_`, predicates with a lowercase letter.
Checked<Program> parse_program(std::string_view source);

/// Parses a single `#name(P, ...) = { body }` definition and classifies each parameter as read
/// (`#P` occurs in the body) or set (the body declares `P` with `type P = ...`).
Checked<IoDefinition> parse_io_definition(std::string_view text);

/// Re-runs parameter classification on an already split definition. Exposed for the analyzer's
/// standard library and for tests.
std::vector<Diagnostic> classify_io_params(IoDefinition& def);

}  // namespace dedc
