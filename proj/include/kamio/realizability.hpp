#pragma once

// Desk-scale classical realizability over the I/O machine: poles built from
// seeds or from I/O specifications, truth values as finite stack sets,
// realizer and entailment checking, and the consistency probe.
//
// Every quantifier over an infinite set (all stacks, all realizers, the whole
// domain of a function) is replaced by a finite sample; verdicts obtained
// against such samples are flagged `sampled` or carry a `note`.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kamio/machine.hpp"
#include "kamio/syntax.hpp"
#include "kamio/verdict.hpp"

namespace kamio {

inline constexpr std::uint64_t kDefaultPoleFuel = 100'000;

// --- poles ------------------------------------------------------------------

struct Pole;

/// Processes whose ≻-chain reaches one of the seeds within `fuel` steps.
/// Saturated by construction.
struct FinitePole {
    std::vector<Process> seeds;
    std::uint64_t fuel = kDefaultPoleFuel;
};

/// Processes implementing the function on the listed rows.
struct FunctionPole {
    FunctionTable table;
    std::uint64_t fuel = kDefaultRunFuel;
};

enum class TraceSpec : std::uint8_t {
    Copy,              // r b1 w b1 ... r bk w bk reps e
    ReadAllThenWrite,  // r b1 ... r bk reps, then writes, then e; output equals the input
};

/// Processes whose visible trace conforms to `spec` on every input of
/// length <= max_input_len. With `canonical_inputs_only` the inputs are
/// restricted to the strings bin(n).
struct TracePole {
    TraceSpec spec = TraceSpec::Copy;
    std::size_t max_input_len = 4;
    std::uint64_t fuel = kDefaultRunFuel;
    bool canonical_inputs_only = false;
};

struct UnionPole {
    std::vector<Pole> members;
};

struct Pole {
    std::variant<FinitePole, FunctionPole, TracePole, UnionPole> kind;
};

Verdict pole_member(const Pole& pole, const Process& p);

// --- truth values and predicates -------------------------------------------

struct TruthValue {
    std::vector<Stack> stacks;
    /// The stacks are a sample of all stacks (the falsity value).
    bool all_stacks = false;

    static TruthValue of(std::vector<Stack> stacks) { return TruthValue{std::move(stacks), false}; }
    static TruthValue bottom(std::vector<Stack> sample) { return TruthValue{std::move(sample), true}; }
};

/// Union with duplicates (up to α) removed.
TruthValue unite(const TruthValue& a, const TruthValue& b);

/// Terms designated as realizers of some truth value.
struct RealizerList {
    std::vector<Term> terms;
};

using Index = std::string;

struct Predicate {
    std::vector<Index> index_set;
    std::map<Index, TruthValue> values;

    /// Throws Error if `i` is not in the index set.
    const TruthValue& at(const Index& i) const;
    static Predicate constant(std::vector<Index> index_set, const TruthValue& value);
};

/// Throws Error unless `values` covers exactly `index_set`.
void validate(const Predicate& p);

/// Throws ClosednessError for open terms.
Verdict realizes(const Pole& pole, const Term& t, const TruthValue& s);

/// {u · π | u in realizers, π in consequent}
TruthValue implication(const RealizerList& realizers_of_antecedent, const TruthValue& consequent);

using IndexMap = std::map<Index, Index>;

/// result(i) = union of θ(j) over f(j) = i, for i in `target`.
Predicate forall_along(const IndexMap& f, const Predicate& theta, const std::vector<Index>& target);

/// result(j) = φ(f(j)) for every j in the domain of f.
Predicate reindex(const IndexMap& f, const Predicate& phi);

// --- derived connectives ----------------------------------------------------

enum class Connective : std::uint8_t { Top, And, Or, Not };

class MissingRealizers : public Error {
public:
    using Error::Error;
};

/// Realizer lists for the antecedents an encoding needs.
struct Antecedents {
    std::optional<RealizerList> bottom;         // Top: ⊥ ⇒ ⊥
    std::optional<RealizerList> lhs;            // Not, And, Or
    std::optional<RealizerList> rhs;            // And
    std::optional<RealizerList> lhs_implies;    // And: φ ⇒ (ψ ⇒ ⊥); Or: φ ⇒ ⊥
};

/// Top ≡ ⊥⇒⊥, Not φ ≡ φ⇒⊥, And ≡ (φ⇒(ψ⇒⊥))⇒⊥, Or ≡ (φ⇒⊥)⇒ψ.
/// `operands` holds φ (and ψ for Or); only the realizer lists of φ and ψ
/// enter the And encoding.
TruthValue encode(Connective c, const TruthValue& bottom, const std::vector<TruthValue>& operands,
                  const Antecedents& realizers);

// --- entailment -------------------------------------------------------------

struct Hypothesis {
    Predicate predicate;
    /// Known realizers of predicate(i), per index.
    std::map<Index, RealizerList> realizers;
};

struct Sequent {
    std::vector<Hypothesis> hypotheses;
    Predicate conclusion;
    Term candidate;
};

/// Throws NotProofLike / ClosednessError / Error when the sequent is not
/// well formed.
void validate(const Sequent& seq);

/// Checks candidate ⋆ u1 · ... · un · π in the pole for every index, every
/// tuple of listed realizers and every π in the conclusion. Refuted carries
/// the first failing (index, tuple, π) in enumeration order.
Verdict check_entailment(const Pole& pole, const Sequent& seq);

/// Checks that every listed realizer of the hypothesis realizes its truth value.
Verdict audit_realizers(const Pole& pole, const Hypothesis& h);

namespace rules {
struct Ax {};
struct BotE {
    Term t;
};
struct ImpI {
    Term t;
};
/// t realizes Δ ⊢ ψ ⇒ θ with |Δ| = m, u realizes Γ ⊢ ψ with |Γ| = n.
struct ImpE {
    Term t;
    Term u;
    std::size_t n;
    std::size_t m;
};
struct Weaken {
    Term t;
};
struct Contract {
    Term t;
};
/// sigma is a permutation of 1..n (1-based).
struct Exchange {
    Term t;
    std::vector<std::size_t> sigma;
};
struct Peirce {};
}  // namespace rules

using Rule = std::variant<rules::Ax, rules::BotE, rules::ImpI, rules::ImpE, rules::Weaken, rules::Contract,
                          rules::Exchange, rules::Peirce>;

/// The realizer of the rule's conclusion built from the realizers of its
/// hypotheses. Throws NotProofLike for effectful arguments.
Term rule_realizer(const Rule& rule);

// --- consistency ------------------------------------------------------------

struct ProbeResult {
    enum class Kind : std::uint8_t { WitnessFound, NoWitnessInSample, Unknown };
    Term candidate;
    Kind kind;
    std::optional<Stack> witness;
};

struct AuditedMember {
    Process member;
    bool contains_effect;
    bool contains_end;
};

struct ConsistencyReport {
    std::vector<ProbeResult> probes;
    std::vector<AuditedMember> audited;
    /// Every audited member other than TOP contains an effect constant.
    bool audit_passed = true;
};

std::string to_string(ProbeResult::Kind k);

/// Searches `stack_samples` for a stack refuting each candidate, and audits
/// every Verified member met on the way plus the Verified ones among
/// `extra_members`.
ConsistencyReport consistency_probe(const Pole& pole, const std::vector<Term>& candidates,
                                    const std::vector<Stack>& stack_samples,
                                    const std::vector<Process>& extra_members = {});

}  // namespace kamio
