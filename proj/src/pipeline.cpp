#include "dedc/pipeline.hpp"

#include "dedc/macros.hpp"
#include "dedc/parser.hpp"

namespace dedc {

FrontendResult run_frontend(std::string_view source, const AnalyzeOptions& options) {
    FrontendResult r;
    auto take = [&](std::vector<Diagnostic>& ds) { r.diagnostics.insert(r.diagnostics.end(), ds.begin(), ds.end()); };

    auto parsed = parse_program(source);
    take(parsed.diagnostics);
    r.parsed = parsed.value;
    if (!parsed.ok()) return r;

    auto expanded = expand_macros(*parsed.value);
    take(expanded.diagnostics);
    r.expanded = expanded.value;
    if (!expanded.ok()) return r;

    auto analyzed = analyze(*expanded.value, options);
    take(analyzed.diagnostics);
    if (analyzed.ok()) r.analyzed = std::move(analyzed.value);
    return r;
}

}  // namespace dedc
