#include "dedc/simulator.hpp"

#include <algorithm>

namespace dedc {

VirtualBoard::VirtualBoard(const TraceScript& trace)
    : pin_levels(trace.initial_levels), tick_ms(trace.tick_ms), script(trace.events) {}

void VirtualBoard::advance() {
    clock_ms += tick_ms;
    while (next_event < script.size() && script[next_event].time_ms <= clock_ms) {
        pin_levels[script[next_event].pin] = script[next_event].level;
        ++next_event;
    }
}

PinMode VirtualBoard::mode(int pin) const {
    auto it = pin_modes.find(pin);
    return it == pin_modes.end() ? PinMode::Unset : it->second;
}

int VirtualBoard::level(int pin) const {
    auto it = pin_levels.find(pin);
    return it == pin_levels.end() ? 0 : it->second;
}

std::string Event::format() const {
    std::string t = "[t=" + std::to_string(time_ms) + "] ";
    switch (kind) {
        case EventKind::PinMode: {
            std::string mode = value == 0 ? "INPUT" : value == 1 ? "OUTPUT" : value == 2 ? "INPUT_PULLUP" : std::to_string(value);
            return t + "pinMode(" + std::to_string(pin) + ", " + mode + ")";
        }
        case EventKind::DigitalWrite:
            return t + "digitalWrite(" + std::to_string(pin) + ", " + (value ? "HIGH" : "LOW") + ")";
        case EventKind::Warning: return t + "WARN " + text;
        case EventKind::Fault: return t + "FAULT " + text;
        case EventKind::StepMarker: return {};
    }
    return {};
}

std::vector<Event> EventLog::of_kind(EventKind k) const {
    std::vector<Event> out;
    std::copy_if(events_.begin(), events_.end(), std::back_inserter(out), [&](const Event& e) { return e.kind == k; });
    return out;
}

std::string EventLog::text() const {
    std::string out;
    for (const auto& e : events_) {
        if (e.kind == EventKind::StepMarker) continue;
        out += e.format();
        out += '\n';
    }
    return out;
}

void IoCall::warn(std::string text) {
    log.append({EventKind::Warning, board.clock_ms, 0, 0, std::move(text), 0});
}

std::map<std::string, IoHandler> standard_io_handlers() {
    std::map<std::string, IoHandler> h;
    auto set_mode = [](IoCall& c, int mode) {
        int pin = static_cast<int>(c.args[0]);
        c.board.pin_modes[pin] = mode == 1 ? PinMode::Output : PinMode::Input;
        c.log.append({EventKind::PinMode, c.board.clock_ms, pin, mode, {}, 0});
    };
    h["pinIn"] = [set_mode](IoCall& c) { set_mode(c, 0); };
    h["pinOut"] = [set_mode](IoCall& c) { set_mode(c, 1); };
    h["digitalWrite"] = [](IoCall& c) {
        int pin = static_cast<int>(c.args[0]);
        int level = c.args[1] != 0 ? 1 : 0;
        if (c.board.mode(pin) != PinMode::Output)
            c.warn("digitalWrite on pin " + std::to_string(pin) + " not configured as OUTPUT");
        c.board.output_levels[pin] = level;
        c.log.append({EventKind::DigitalWrite, c.board.clock_ms, pin, level, {}, 0});
    };
    h["digitalRead"] = [](IoCall& c) {
        int pin = static_cast<int>(c.args[0]);
        if (c.board.mode(pin) != PinMode::Input)
            c.warn("digitalRead on pin " + std::to_string(pin) + " not configured as INPUT");
        c.args[1] = c.board.level(pin);
    };
    h["millis"] = [](IoCall& c) { c.args[0] = c.board.clock_ms; };
    return h;
}

struct Simulator::Frame {
    std::map<std::string, std::int64_t> values;
};

Simulator::Simulator(const AnalyzedProgram& program, const TraceScript& trace, SimOptions options)
    : program_(program),
      trace_(trace),
      options_(options),
      store_(program.layout),
      board_(trace),
      handlers_(standard_io_handlers()) {
    reset();
}

void Simulator::register_io(const std::string& name, IoHandler handler) { handlers_[name] = std::move(handler); }

void Simulator::fault(const std::string& text) {
    log_.append({EventKind::Fault, board_.clock_ms, 0, 0, text, step_});
    faulted_ = true;
}

void Simulator::reset() {
    store_ = FactStore(program_.layout);
    board_ = VirtualBoard(trace_);
    log_ = EventLog();
    dumps_.clear();
    step_ = 0;
    faulted_ = false;

    auto check_named = [&](const Term& t) {
        if (t.is_named() && !board_.constants.count(t.constant_name()) && !faulted_)
            fault("unknown constant #" + t.constant_name());
    };
    for (const auto& rule : program_.rules) {
        for (const auto& item : rule.rule.body) {
            if (const auto* l = std::get_if<Literal>(&item)) {
                for (const auto& t : l->args) check_named(t);
            } else {
                const auto& c = std::get<Comparison>(item);
                std::function<void(const Expr&)> walk = [&](const Expr& e) {
                    if (e.is_leaf()) check_named(*e.leaf);
                    for (const auto& ch : e.children) walk(ch);
                };
                walk(c.lhs);
                walk(c.rhs);
            }
        }
        for (const auto& t : rule.rule.head.args) check_named(t);
    }
    if (faulted_) return;

    try {
        for (const auto& f : program_.program.facts) {
            const PredicateLayout* p = program_.layout.find(f.predicate);
            store_.insert_fact(BufferId::Current, p->number, f.args);
        }
    } catch (const FactStoreError& e) {
        fault(e.what());
    }
}

std::int64_t Simulator::term_value(const Term& t, const Frame& frame) const {
    if (t.is_integer()) return t.integer_value();
    if (t.is_named()) return board_.constants.at(t.constant_name());
    return frame.values.at(t.var_name());
}

void Simulator::run_io(const IoStep& step, Frame& frame) {
    const IoDefinition& def = program_.io(step);
    auto handler = handlers_.find(def.name);
    if (handler == handlers_.end()) throw SimulationFault("no simulation binding for IO predicate #" + def.name);
    IoCall call{def, std::vector<std::int64_t>(step.args.size(), 0), board_, log_};
    for (std::size_t i = 0; i < step.args.size(); ++i)
        if (step.args[i].mode == ParamMode::Read) call.args[i] = term_value(step.args[i].term, frame);
    handler->second(call);
    for (std::size_t i = 0; i < step.args.size(); ++i) {
        const IoArg& a = step.args[i];
        if (a.mode == ParamMode::Set) frame.values[a.term.var_name()] = convert_to(*a.var_type, call.args[i]);
    }
}

void Simulator::eval_steps(const RulePlan& rule, std::size_t index, Frame& frame, BufferId target,
                           std::size_t& inserted) {
    if (index == rule.steps.size()) {
        if (rule.action) {
            run_io(*rule.action, frame);
            return;
        }
        const HeadInsert& head = *rule.insert;
        std::vector<std::int64_t> args;
        for (const auto& a : head.args) args.push_back(term_value(a.term, frame));
        if (store_.insert_fact(target, head.number, args)) ++inserted;
        return;
    }

    const PlanStep& step = rule.steps[index];
    if (const auto* guard = std::get_if<GuardStep>(&step)) {
        auto value = [&](const Term& t) { return term_value(t, frame); };
        if (compare_raw(guard->domain, guard->comparison.op, eval_raw(guard->comparison.lhs, value),
                        eval_raw(guard->comparison.rhs, value)))
            eval_steps(rule, index + 1, frame, target, inserted);
        return;
    }
    if (const auto* io = std::get_if<IoStep>(&step)) {
        run_io(*io, frame);
        eval_steps(rule, index + 1, frame, target, inserted);
        return;
    }
    if (const auto* probe = std::get_if<ProbeStep>(&step)) {
        std::vector<std::int64_t> key;
        for (const auto& a : probe->args) key.push_back(term_value(a.term, frame));
        if (!store_.find_fact(BufferId::Current, probe->number, probe->pattern, key))
            eval_steps(rule, index + 1, frame, target, inserted);
        return;
    }

    const auto& scan = std::get<ScanStep>(step);
    std::vector<std::int64_t> key;
    for (const auto& a : scan.args)
        if (a.action == ArgAction::Constant || a.action == ArgAction::Bound) key.push_back(term_value(a.term, frame));
    const std::size_t size = program_.layout.by_number(scan.number).fact_size;
    std::size_t cursor = 0;
    while (auto found = store_.find_fact(BufferId::Current, scan.number, scan.pattern, key, cursor)) {
        bool match = true;
        std::vector<std::string> bound_here;
        for (std::size_t i = 0; i < scan.args.size() && match; ++i) {
            const PlannedArg& a = scan.args[i];
            if (a.action == ArgAction::Bind) {
                frame.values[a.term.var_name()] = store_.read_arg(BufferId::Current, *found, i);
                bound_here.push_back(a.term.var_name());
            } else if (a.action == ArgAction::Check) {
                match = store_.read_arg(BufferId::Current, *found, i) == frame.values.at(a.term.var_name());
            }
        }
        if (match) eval_steps(rule, index + 1, frame, target, inserted);
        for (const auto& v : bound_here) frame.values.erase(v);
        cursor = *found + size;
    }
}

std::size_t Simulator::eval_rule(const RulePlan& rule, BufferId target) {
    Frame frame;
    std::size_t inserted = 0;
    eval_steps(rule, 0, frame, target, inserted);
    return inserted;
}

void Simulator::run_deduction_phase() {
    for (int stratum : program_.deductive_strata()) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& rule : program_.rules) {
                if (rule.kind != RuleKind::Deductive || rule.stratum != stratum) continue;
                std::size_t n = eval_rule(rule, BufferId::Current);
                derived_ += n;
                changed = changed || n > 0;
            }
        }
    }
}

void Simulator::run_output_phase() {
    for (const auto& rule : program_.rules)
        if (rule.kind == RuleKind::Output) eval_rule(rule, BufferId::Next);
}

void Simulator::run_induction_phase() {
    for (const auto& rule : program_.rules)
        if (rule.kind == RuleKind::Inductive) next_inserted_ += eval_rule(rule, BufferId::Next);
}

void Simulator::run_input_phase() {
    for (const auto& rule : program_.rules)
        if (rule.kind == RuleKind::Input) next_inserted_ += eval_rule(rule, BufferId::Next);
}

StepReport Simulator::step() {
    StepReport report;
    report.step = step_;
    if (faulted_) {
        report.faulted = true;
        return report;
    }
    const std::size_t events_before = log_.size();
    derived_ = 0;
    next_inserted_ = 0;
    board_.advance();
    log_.append({EventKind::StepMarker, board_.clock_ms, 0, 0, {}, step_});
    try {
        run_deduction_phase();
        if (options_.record_fact_dumps)
            dumps_.push_back("step " + std::to_string(step_) + ": " + store_.dump(BufferId::Current));
        run_output_phase();
        run_induction_phase();
        run_input_phase();
        store_.switch_buffers();
    } catch (const FactStoreError& e) {
        fault(e.what());
    } catch (const SimulationFault& e) {
        fault(e.what());
    }
    report.clock_ms = board_.clock_ms;
    report.derived_facts = derived_;
    report.next_facts = next_inserted_;
    report.events = log_.size() - events_before - 1;
    report.faulted = faulted_;
    if (!faulted_) ++step_;
    return report;
}

void Simulator::run() {
    if (faulted_) return;
    do {
        step();
    } while (!faulted_ && board_.clock_ms < trace_.end_ms && step_ < options_.max_steps);
}

RunResult run_trace(const AnalyzedProgram& program, const TraceScript& trace, const SimOptions& options) {
    Simulator sim(program, trace, options);
    sim.run();
    return {sim.log(), sim.fact_dumps(), sim.steps_done(), sim.faulted()};
}

}  // namespace dedc
