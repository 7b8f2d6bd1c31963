#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dedc/ast.hpp"

namespace dedc {

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    int line = 0;  // 1-based; 0 when the diagnostic has no source position
    int column = 0;
    std::string message;

    static Diagnostic error(SourceLoc loc, std::string message) {
        return {Severity::Error, loc.line, loc.column, std::move(message)};
    }
    static Diagnostic warning(SourceLoc loc, std::string message) {
        return {Severity::Warning, loc.line, loc.column, std::move(message)};
    }

    bool is_error() const { return severity == Severity::Error; }
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

/// `file:line:col: severity: message`
inline std::string format_diagnostic(const std::string& file, const Diagnostic& d) {
    return file + ":" + std::to_string(d.line) + ":" + std::to_string(d.column) + ": " +
           (d.is_error() ? "error" : "warning") + ": " + d.message;
}

/// A value together with whatever diagnostics producing it raised. `value` is empty when an error
/// prevented producing a result.
template <class T>
struct Checked {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return value.has_value() && !has_errors(diagnostics); }
    const T& operator*() const { return *value; }
    T& operator*() { return *value; }
    const T* operator->() const { return &*value; }
    T* operator->() { return &*value; }
};

}  // namespace dedc
