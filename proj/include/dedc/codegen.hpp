#pragma once

#include <string>
#include <vector>

#include "dedc/analyzer.hpp"

namespace dedc {

struct CodegenOptions {
    /// Include `Arduino.h`; when false the host shim header is included instead.
    bool arduino_header = true;
    std::string shim_header = "arduino_shim.h";
};

struct EmittedUnit {
    std::string source_text;
    std::vector<std::string> entry_points;      // setup, loop
    std::vector<std::string> required_headers;  // in include order
};

EmittedUnit emit_program(const AnalyzedProgram& program, const CodegenOptions& options = {});

/// Buffer switching, value encoding, finders, readers and inserters for every predicate.
std::string emit_access_functions(const CompileLayout& layout);

/// One rule as a C function. `function_name` is e.g. `deductive_rule_1`.
std::string emit_rule_function(const AnalyzedProgram& program, const RulePlan& rule, const std::string& function_name);

/// C type holding values of `t` (`uint8_t`, `int16_t`, `uint32_t`).
std::string c_type(ValueType t);

}  // namespace dedc
