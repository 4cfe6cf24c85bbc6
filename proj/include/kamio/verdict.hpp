#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kamio/syntax.hpp"

namespace kamio {

/// Labels of the transition system plus the silent action.
enum class Action : std::uint8_t { Tau, R0, R1, REps, W0, W1, E };

std::string to_string(Action a);
/// Parses the trace vocabulary (tau, r0, r1, reps, w0, w1, e).
std::optional<Action> parse_action(std::string_view word);

enum class Status : std::uint8_t { Verified, Refuted, Unknown };
enum class UnknownReason : std::uint8_t { None, Fuel, Depth };

std::string to_string(Status s);
std::string to_string(UnknownReason r);

/// Counterexample data carried by a Refuted (or Unknown) verdict. Only the
/// fields relevant to the producing check are set.
struct Witness {
    std::vector<Action> actions;           // distinguishing action prefix / offending trace
    std::optional<std::uint64_t> row;      // function-table row
    std::optional<std::string> input;      // input string that exposed the failure
    std::optional<std::string> index;      // predicate index
    std::optional<Stack> stack;            // refuting stack
    std::vector<Term> tuple;               // realizer tuple of an entailment check
    std::optional<Process> process;        // offending process
    std::string detail;                    // human-readable summary

    bool empty() const {
        return actions.empty() && !row && !input && !index && !stack && tuple.empty() && !process &&
               detail.empty();
    }
};

/// Three-valued answer of every semi-decidable check.
struct Verdict {
    Status status = Status::Unknown;
    UnknownReason reason = UnknownReason::None;
    /// Verified only against a finite sample of an infinite set.
    bool sampled = false;
    Witness witness;
    /// Approximation caveat (e.g. finite function table).
    std::string note;

    static Verdict verified() {
        Verdict v;
        v.status = Status::Verified;
        return v;
    }
    static Verdict refuted(Witness w) {
        Verdict v;
        v.status = Status::Refuted;
        v.witness = std::move(w);
        return v;
    }
    static Verdict unknown(UnknownReason r, Witness w = {}) {
        Verdict v;
        v.reason = r;
        v.witness = std::move(w);
        return v;
    }

    bool is_verified() const { return status == Status::Verified; }
    bool is_refuted() const { return status == Status::Refuted; }
    bool is_unknown() const { return status == Status::Unknown; }
};

std::string describe(const Verdict& v);

}  // namespace kamio
