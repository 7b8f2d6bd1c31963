#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "dedc/analyzer.hpp"

namespace dedc {

/// Parse, macro expansion and analysis in one go. Later stages are skipped once an earlier one
/// reports an error.
struct FrontendResult {
    std::optional<Program> parsed;
    std::optional<Program> expanded;
    std::optional<AnalyzedProgram> analyzed;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return analyzed.has_value() && !has_errors(diagnostics); }
};

FrontendResult run_frontend(std::string_view source, const AnalyzeOptions& options = {});

}  // namespace dedc
