#pragma once

// Effect-free evaluation (push/pop/save/restore) and the execution relation
// on (process, input, output) triples.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kamio/syntax.hpp"
#include "kamio/verdict.hpp"

namespace kamio {

inline constexpr std::uint64_t kDefaultRunFuel = 1'000'000;

/// Bit strings hold only '0' and '1'. The input head is the next bit to
/// read; the output head is the most recently written bit.
struct ExecutionContext {
    Process process;
    std::string input;
    std::string output;

    ExecutionContext() = default;
    /// Throws Error if input or output contain anything but 0/1.
    ExecutionContext(Process p, std::string in, std::string out);
};

bool operator==(const ExecutionContext& a, const ExecutionContext& b);

bool is_bit_string(std::string_view s);

/// One ≻ step, or nullopt when no evaluation rule applies.
std::optional<Process> eval_step(const Process& p);

struct Transition {
    Action action;
    ExecutionContext next;
};

/// One ⇝ step together with the action that produced it.
std::optional<Transition> exec_transition(const ExecutionContext& c);
std::optional<ExecutionContext> exec_step(const ExecutionContext& c);

enum class Outcome : std::uint8_t { Terminated, Stuck, FuelExhausted };

std::string to_string(Outcome o);

struct RunResult {
    Outcome outcome;
    ExecutionContext final;
    std::vector<Action> trace;
    std::uint64_t steps = 0;

    /// The trace without τ actions.
    std::vector<Action> labels() const;
};

/// Iterates exec_step at most `fuel` times.
RunResult run(const ExecutionContext& c, std::uint64_t fuel = kDefaultRunFuel);

/// Most-significant bit first; bin(0) is the empty string.
std::string bin(std::uint64_t n);
/// Inverse of bin on canonical strings (no leading zero); nullopt otherwise.
std::optional<std::uint64_t> unbin(std::string_view bits);

using FunctionTable = std::map<std::uint64_t, std::uint64_t>;

/// Checks (p, bin(n), "") ⇝* (TOP, "", bin(m)) for every row n ↦ m.
/// Refuted carries the row and its RunResult summary; Unknown the first
/// row that ran out of fuel.
Verdict implements_on(const Process& p, const FunctionTable& table,
                      std::uint64_t fuel = kDefaultRunFuel);

}  // namespace kamio
