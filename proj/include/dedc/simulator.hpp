#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dedc/analyzer.hpp"
#include "dedc/fact_store.hpp"
#include "dedc/trace.hpp"

namespace dedc {

inline constexpr std::size_t kDefaultMaxSteps = 100000;

enum class PinMode : std::uint8_t { Unset, Input, Output };

/// Pins, clock and scripted inputs of a simulated board.
struct VirtualBoard {
    std::map<int, PinMode> pin_modes;
    std::map<int, int> pin_levels;     // what digitalRead sees
    std::map<int, int> output_levels;  // last digitalWrite per pin
    std::uint32_t clock_ms = 0;
    std::uint32_t tick_ms = kDefaultTickMs;
    std::vector<PinEvent> script;
    std::size_t next_event = 0;
    std::map<std::string, std::int64_t> constants{
        {"HIGH", 1}, {"LOW", 0}, {"INPUT", 0}, {"OUTPUT", 1}, {"INPUT_PULLUP", 2}, {"LED_BUILTIN", 13}};

    VirtualBoard() = default;
    explicit VirtualBoard(const TraceScript& trace);

    /// Moves the clock forward one tick (wrapping like millis) and applies due scripted events.
    void advance();
    PinMode mode(int pin) const;
    int level(int pin) const;
};

enum class EventKind : std::uint8_t { PinMode, DigitalWrite, Warning, Fault, StepMarker };

struct Event {
    EventKind kind = EventKind::StepMarker;
    std::uint32_t time_ms = 0;
    int pin = 0;
    int value = 0;  // mode or level
    std::string text;
    std::uint64_t step = 0;

    /// One log line without the newline; empty for step markers.
    std::string format() const;
    bool operator==(const Event&) const = default;
};

class EventLog {
public:
    void append(Event e) { events_.push_back(std::move(e)); }
    const std::vector<Event>& events() const { return events_; }
    std::vector<Event> of_kind(EventKind k) const;
    std::size_t size() const { return events_.size(); }
    /// Newline-terminated lines for every printable event.
    std::string text() const;

private:
    std::vector<Event> events_;
};

/// Raised by an IO binding to stop the run with a FAULT line.
class SimulationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments of one IO action. Read parameters arrive filled in; the binding stores a value for
/// each Set parameter.
struct IoCall {
    const IoDefinition& definition;
    std::vector<std::int64_t> args;  // one per parameter
    VirtualBoard& board;
    EventLog& log;

    void warn(std::string text);
};

using IoHandler = std::function<void(IoCall&)>;

/// Native implementations of the standard library IO predicates.
std::map<std::string, IoHandler> standard_io_handlers();

struct StepReport {
    std::uint64_t step = 0;
    std::uint32_t clock_ms = 0;
    std::size_t derived_facts = 0;  // inserted into the current buffer during deduction
    std::size_t next_facts = 0;     // inserted into the next buffer
    std::size_t events = 0;
    bool faulted = false;
};

struct SimOptions {
    std::size_t max_steps = kDefaultMaxSteps;
    bool record_fact_dumps = false;
};

/// Interprets an analyzed program step by step. Rule bodies are evaluated by scanning the live
/// buffer with a cursor, the same way the generated C does, so facts and IO actions appear in the
/// same order on both.
class Simulator {
public:
    Simulator(const AnalyzedProgram& program, const TraceScript& trace, SimOptions options = {});

    void register_io(const std::string& name, IoHandler handler);

    /// Seeds the store with the timestamp 0 facts and resets board and log.
    void reset();

    StepReport step();
    void run_deduction_phase();
    void run_output_phase();
    void run_induction_phase();
    void run_input_phase();

    /// Steps until the trace end time, the step limit, or a fault. Always runs step 0.
    void run();

    const EventLog& log() const { return log_; }
    const FactStore& store() const { return store_; }
    VirtualBoard& board() { return board_; }
    std::uint64_t steps_done() const { return step_; }
    bool faulted() const { return faulted_; }
    /// `step <n>: facts` per completed step, taken after deduction.
    const std::vector<std::string>& fact_dumps() const { return dumps_; }

private:
    struct Frame;

    std::size_t eval_rule(const RulePlan& rule, BufferId target);
    void eval_steps(const RulePlan& rule, std::size_t index, Frame& frame, BufferId target, std::size_t& inserted);
    std::int64_t term_value(const Term& t, const Frame& frame) const;
    void run_io(const IoStep& step, Frame& frame);
    void fault(const std::string& text);

    const AnalyzedProgram& program_;
    TraceScript trace_;
    SimOptions options_;
    FactStore store_;
    VirtualBoard board_;
    EventLog log_;
    std::map<std::string, IoHandler> handlers_;
    std::vector<std::string> dumps_;
    std::uint64_t step_ = 0;
    bool faulted_ = false;
    std::size_t derived_ = 0;
    std::size_t next_inserted_ = 0;
};

struct RunResult {
    EventLog log;
    std::vector<std::string> fact_dumps;
    std::uint64_t steps = 0;
    bool faulted = false;
};

RunResult run_trace(const AnalyzedProgram& program, const TraceScript& trace, const SimOptions& options = {});

}  // namespace dedc
