#include "dedc/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "dedc/codegen.hpp"
#include "dedc/pipeline.hpp"
#include "dedc/simulator.hpp"
#include "dedc/trace.hpp"

namespace dedc {

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

std::optional<std::string> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void print_diagnostics(const std::string& file, const std::vector<Diagnostic>& diags, std::ostream& err) {
    for (const auto& d : diags) err << format_diagnostic(file, d) << '\n';
}

struct Settings {
    std::string input;
    std::string output;
    std::string trace;
    std::size_t buffer_size = kDefaultBufferSize;
    std::size_t max_steps = kDefaultMaxSteps;
    bool no_arduino_header = false;
    bool dump_facts = false;
};

int load(const Settings& s, std::ostream& err, FrontendResult& result) {
    auto source = read_file(s.input);
    if (!source) {
        err << "error: cannot read " << s.input << '\n';
        return kUsage;
    }
    result = run_frontend(*source, AnalyzeOptions{s.buffer_size});
    print_diagnostics(s.input, result.diagnostics, err);
    return kOk;
}

int cmd_check(const Settings& s, std::ostream&, std::ostream& err) {
    FrontendResult r;
    if (int rc = load(s, err, r)) return rc;
    return r.ok() ? kOk : kFailed;
}

int cmd_expand(const Settings& s, std::ostream& out, std::ostream& err) {
    FrontendResult r;
    if (int rc = load(s, err, r)) return rc;
    if (!r.expanded || has_errors(r.diagnostics)) {
        // Expansion alone is enough to print; analysis errors still fail the command.
        if (r.expanded) out << to_source(*r.expanded);
        return kFailed;
    }
    out << to_source(*r.expanded);
    return kOk;
}

int cmd_compile(const Settings& s, std::ostream& out, std::ostream& err) {
    FrontendResult r;
    if (int rc = load(s, err, r)) return rc;
    if (!r.ok()) return kFailed;
    CodegenOptions options;
    options.arduino_header = !s.no_arduino_header;
    EmittedUnit unit = emit_program(*r.analyzed, options);
    if (s.output.empty() || s.output == "-") {
        out << unit.source_text;
        return kOk;
    }
    std::ofstream file(s.output, std::ios::binary);
    if (!file || !(file << unit.source_text)) {
        err << "error: cannot write " << s.output << '\n';
        return kFailed;
    }
    return kOk;
}

int cmd_run(const Settings& s, std::ostream& out, std::ostream& err) {
    auto trace_text = read_file(s.trace);
    if (!trace_text) {
        err << "error: cannot read " << s.trace << '\n';
        return kUsage;
    }
    auto trace = parse_trace(*trace_text);
    print_diagnostics(s.trace, trace.diagnostics, err);
    if (!trace.ok()) return kFailed;

    FrontendResult r;
    if (int rc = load(s, err, r)) return rc;
    if (!r.ok()) return kFailed;

    SimOptions options;
    options.max_steps = s.max_steps;
    options.record_fact_dumps = s.dump_facts;
    RunResult result = run_trace(*r.analyzed, *trace, options);
    out << result.log.text();
    for (const auto& line : result.fact_dumps) err << line << '\n';
    return result.faulted ? kFailed : kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compiler and simulator for Datalog programs on Arduino", "dedc"};
    app.require_subcommand(1);
    Settings s;

    auto* check = app.add_subcommand("check", "Parse, expand and analyze a program; print diagnostics");
    check->add_option("file", s.input, "Program (.dl)")->required();

    auto* expand = app.add_subcommand("expand", "Print the program after macro expansion");
    expand->add_option("file", s.input, "Program (.dl)")->required();

    auto* compile = app.add_subcommand("compile", "Generate Arduino C code");
    compile->add_option("file", s.input, "Program (.dl)")->required();
    compile->add_option("-o,--output", s.output, "Output file (default: standard output)");
    compile->add_option("--buffer-size", s.buffer_size, "Bytes per fact buffer")->check(CLI::Range(1, 65535));
    compile->add_flag("--no-arduino-header", s.no_arduino_header, "Include the host shim header instead of Arduino.h");

    auto* run = app.add_subcommand("run", "Simulate a program against a trace");
    run->add_option("file", s.input, "Program (.dl)")->required();
    run->add_option("--trace", s.trace, "Trace script")->required();
    run->add_option("--buffer-size", s.buffer_size, "Bytes per fact buffer")->check(CLI::Range(1, 65535));
    run->add_option("--max-steps", s.max_steps, "Stop after this many steps")->check(CLI::PositiveNumber);
    run->add_flag("--dump-facts", s.dump_facts, "Print the facts of every step to standard error");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kUsage;
    }

    if (*check) return cmd_check(s, out, err);
    if (*expand) return cmd_expand(s, out, err);
    if (*compile) return cmd_compile(s, out, err);
    return cmd_run(s, out, err);
}

}  // namespace dedc
