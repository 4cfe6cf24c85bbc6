#pragma once

// The labeled transition system on processes, fuel-bounded observables,
// weak bisimilarity, TOP-equivalence and β-contraction at positions.

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "kamio/machine.hpp"
#include "kamio/syntax.hpp"
#include "kamio/verdict.hpp"

namespace kamio {

inline constexpr std::uint64_t kDefaultObserveFuel = 100'000;
inline constexpr std::uint64_t kDefaultDepth = 16;

/// All transitions of p: τ steps agree with eval_step, read offers three
/// branches, TOP has none.
std::vector<std::pair<Action, Process>> lts_step(const Process& p);

/// Result of following the deterministic τ-chain of a process.
struct Observable {
    enum class Kind : std::uint8_t {
        Menu,     // labeled transitions available at `resting`
        Silent,   // stuck, TOP, or a τ-cycle was found
        Unknown,  // fuel ran out first
    };
    Kind kind;
    std::map<Action, Process> menu;
    std::uint64_t tau_steps = 0;
    /// Last process of the chain (the one offering the menu, when Menu).
    Process resting;
    /// Silent because a τ-cycle was detected (as opposed to stuck/TOP).
    bool diverges = false;
};

Observable observable(const Process& p, std::uint64_t fuel = kDefaultObserveFuel);

/// Bounded weak-bisimulation check. `depth` bounds visible actions along a
/// branch, `fuel` bounds τ steps per observable. Refuted carries the
/// distinguishing action sequence.
Verdict weak_bisim(const Process& p, const Process& q, std::uint64_t depth = kDefaultDepth,
                   std::uint64_t fuel = kDefaultObserveFuel);

/// Positions of all subterms of the form (\x. u) v, left to right (head
/// term first, then stack entries top-down; function before argument).
std::vector<Position> beta_redexes(const Process& host);

/// Contracts the redex at `at`. Throws InvalidPosition if there is none.
Process beta_contract(const Process& host, const Position& at);

/// TOP-equivalence of two execution contexts under a shared fuel budget.
Verdict top_equiv(const ExecutionContext& a, const ExecutionContext& b,
                  std::uint64_t fuel = kDefaultRunFuel);

}  // namespace kamio
