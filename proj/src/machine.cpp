#include "kamio/machine.hpp"

#include <algorithm>

namespace kamio {

bool is_bit_string(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

ExecutionContext::ExecutionContext(Process p, std::string in, std::string out)
    : process(std::move(p)), input(std::move(in)), output(std::move(out)) {
    if (!is_bit_string(input)) throw Error("input '" + input + "' is not a bit string");
    if (!is_bit_string(output)) throw Error("output '" + output + "' is not a bit string");
}

bool operator==(const ExecutionContext& a, const ExecutionContext& b) {
    return a.input == b.input && a.output == b.output && alpha_equal(a.process, b.process);
}

std::optional<Process> eval_step(const Process& p) {
    if (p.is_top()) return std::nullopt;
    const Term& t = p.term();
    const Stack& s = p.stack();
    switch (t.kind()) {
        case TermKind::App:  // push
            return Process(t.fun(), s.push(t.arg()));
        case TermKind::Lam:  // pop
            if (s.empty()) return std::nullopt;
            return Process(substitute(t.body(), t.name(), s.head()), s.tail());
        case TermKind::CallCC: {  // save
            if (s.empty()) return std::nullopt;
            Stack rest = s.tail();
            return Process(s.head(), rest.push(Term::kont(rest)));
        }
        case TermKind::Kont:  // restore
            if (s.empty()) return std::nullopt;
            return Process(s.head(), t.saved());
        default:
            return std::nullopt;
    }
}

namespace {

struct Step {
    Action action;
    Process next;
};

// The unique ⇝ step of a process given the next input bit ('\0' for empty input).
std::optional<Step> machine_step(const Process& p, char input_head) {
    if (p.is_top()) return std::nullopt;
    if (auto q = eval_step(p)) return Step{Action::Tau, std::move(*q)};
    const Term& t = p.term();
    const Stack& s = p.stack();
    switch (t.kind()) {
        case TermKind::Read:
            if (s.size() < 3) return std::nullopt;
            if (input_head == '0') return Step{Action::R0, Process(s.at(0), s.drop(3))};
            if (input_head == '1') return Step{Action::R1, Process(s.at(1), s.drop(3))};
            return Step{Action::REps, Process(s.at(2), s.drop(3))};
        case TermKind::Write0:
            if (s.empty()) return std::nullopt;
            return Step{Action::W0, Process(s.head(), s.tail())};
        case TermKind::Write1:
            if (s.empty()) return std::nullopt;
            return Step{Action::W1, Process(s.head(), s.tail())};
        case TermKind::End:
            return Step{Action::E, Process::top()};
        default:
            return std::nullopt;
    }
}

}  // namespace

std::optional<Transition> exec_transition(const ExecutionContext& c) {
    char head = c.input.empty() ? '\0' : c.input.front();
    auto step = machine_step(c.process, head);
    if (!step) return std::nullopt;
    ExecutionContext next;
    next.process = std::move(step->next);
    next.input = c.input;
    next.output = c.output;
    switch (step->action) {
        case Action::R0:
        case Action::R1:
            next.input.erase(0, 1);
            break;
        case Action::W0:
            next.output.insert(next.output.begin(), '0');
            break;
        case Action::W1:
            next.output.insert(next.output.begin(), '1');
            break;
        default:
            break;
    }
    return Transition{step->action, std::move(next)};
}

std::optional<ExecutionContext> exec_step(const ExecutionContext& c) {
    auto t = exec_transition(c);
    if (!t) return std::nullopt;
    return std::move(t->next);
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Terminated: return "terminated";
        case Outcome::Stuck: return "stuck";
        case Outcome::FuelExhausted: return "fuel";
    }
    return "?";
}

std::vector<Action> RunResult::labels() const {
    std::vector<Action> out;
    for (Action a : trace)
        if (a != Action::Tau) out.push_back(a);
    return out;
}

RunResult run(const ExecutionContext& c, std::uint64_t fuel) {
    RunResult result{Outcome::FuelExhausted, {}, {}, 0};
    Process p = c.process;
    std::size_t consumed = 0;
    std::string written;  // oldest bit first
    auto finish = [&](Outcome o) {
        result.outcome = o;
        std::string output(written.rbegin(), written.rend());
        output += c.output;
        result.final.process = std::move(p);
        result.final.input = c.input.substr(consumed);
        result.final.output = std::move(output);
        return std::move(result);
    };
    while (true) {
        if (p.is_top()) return finish(Outcome::Terminated);
        char head = consumed < c.input.size() ? c.input[consumed] : '\0';
        auto step = machine_step(p, head);
        if (!step) return finish(Outcome::Stuck);
        if (result.steps == fuel) return finish(Outcome::FuelExhausted);
        switch (step->action) {
            case Action::R0:
            case Action::R1: ++consumed; break;
            case Action::W0: written.push_back('0'); break;
            case Action::W1: written.push_back('1'); break;
            default: break;
        }
        result.trace.push_back(step->action);
        ++result.steps;
        p = std::move(step->next);
    }
}

std::string bin(std::uint64_t n) {
    std::string out;
    for (; n > 0; n >>= 1) out.push_back(n & 1 ? '1' : '0');
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<std::uint64_t> unbin(std::string_view bits) {
    if (!is_bit_string(bits) || (!bits.empty() && bits.front() == '0') || bits.size() > 64)
        return std::nullopt;
    std::uint64_t n = 0;
    for (char c : bits) n = (n << 1) | static_cast<std::uint64_t>(c == '1');
    return n;
}

Verdict implements_on(const Process& p, const FunctionTable& table, std::uint64_t fuel) {
    std::optional<Verdict> unknown;
    for (const auto& [n, m] : table) {
        RunResult r = run(ExecutionContext(p, bin(n), ""), fuel);
        const std::string expected = bin(m);
        if (r.outcome == Outcome::Terminated && r.final.input.empty() && r.final.output == expected)
            continue;
        Witness w;
        w.row = n;
        w.input = bin(n);
        w.process = r.final.process;
        if (r.outcome == Outcome::FuelExhausted) {
            if (!unknown) {
                w.detail = "row " + std::to_string(n) + ": fuel exhausted after " +
                           std::to_string(r.steps) + " steps";
                unknown = Verdict::unknown(UnknownReason::Fuel, std::move(w));
            }
            continue;
        }
        w.actions = r.labels();
        w.detail = "row " + std::to_string(n) + ": " + to_string(r.outcome) + " with input '" +
                   r.final.input + "' output '" + r.final.output + "', expected output '" + expected +
                   "'";
        Verdict v = Verdict::refuted(std::move(w));
        v.note = "checked on a finite table";
        return v;
    }
    Verdict v = unknown ? std::move(*unknown) : Verdict::verified();
    v.note = "checked on a finite table";
    return v;
}

}  // namespace kamio
