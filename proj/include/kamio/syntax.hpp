#pragma once

// Terms, stacks and processes of the Krivine machine with I/O instructions,
// plus the concrete grammar used by the tools.

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kamio {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected,
               const std::string& found);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::vector<std::string> expected_;
};

class ClosednessError : public Error {
public:
    using Error::Error;
};

class NotProofLike : public Error {
public:
    using Error::Error;
};

/// Interned variable name. Comparison and hashing work on the id.
class Symbol {
public:
    /// The empty name.
    Symbol() = default;
    static Symbol intern(std::string_view name);

    const std::string& name() const;
    std::uint32_t id() const { return id_; }

    friend bool operator==(Symbol a, Symbol b) { return a.id_ == b.id_; }
    friend auto operator<=>(Symbol a, Symbol b) { return a.id_ <=> b.id_; }

private:
    explicit Symbol(std::uint32_t id) : id_(id) {}
    std::uint32_t id_ = 0;
};

enum class TermKind : std::uint8_t { Var, Lam, App, CallCC, Kont, Read, Write0, Write1, End };

/// Bit set of the constants occurring (anywhere) in a term.
enum ConstantMask : std::uint8_t {
    kHasRead = 1 << 0,
    kHasWrite0 = 1 << 1,
    kHasWrite1 = 1 << 2,
    kHasEnd = 1 << 3,
    kHasCallCC = 1 << 4,
    kHasKont = 1 << 5,
    kEffectMask = kHasRead | kHasWrite0 | kHasWrite1 | kHasEnd,
};

class Term;
class Stack;

namespace detail {
struct TermNode;
struct StackNode;
struct Access;
}  // namespace detail

/// Immutable, shared λ-term. Copies are cheap.
class Term {
public:
    static Term var(Symbol name);
    static Term var(std::string_view name) { return var(Symbol::intern(name)); }
    static Term lam(Symbol bound, Term body);
    static Term lam(std::string_view bound, Term body) { return lam(Symbol::intern(bound), std::move(body)); }
    static Term app(Term fun, Term arg);
    /// Left-nested application `head a1 a2 ...`.
    static Term apps(Term head, std::initializer_list<Term> args);
    static Term call_cc();
    static Term kont(Stack saved);
    static Term read();
    static Term write0();
    static Term write1();
    static Term end();

    TermKind kind() const;
    bool is(TermKind k) const { return kind() == k; }

    /// Var: the name. Lam: the bound name.
    Symbol name() const;
    const Term& body() const;
    const Term& fun() const;
    const Term& arg() const;
    const Stack& saved() const;

    /// Sorted, duplicate-free.
    const std::vector<Symbol>& free_variables() const;
    bool is_closed() const { return free_variables().empty(); }
    std::uint8_t constants() const;
    std::uint64_t size() const;

    /// α-invariant structural hash.
    std::uint64_t hash() const;

    bool same_node(const Term& other) const { return node_ == other.node_; }

private:
    Term() = default;
    explicit Term(std::shared_ptr<const detail::TermNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::TermNode> node_;

    friend struct detail::Access;
    friend struct detail::TermNode;
};

/// Immutable stack of closed terms terminated by the empty stack.
class Stack {
public:
    Stack() = default;  // ε

    static Stack from(const std::vector<Term>& entries);

    /// Returns `t · *this`. Throws ClosednessError if t is open.
    Stack push(Term t) const;

    bool empty() const { return node_ == nullptr; }
    std::size_t size() const;
    const Term& head() const;
    Stack tail() const;
    /// Entry i counted from the top.
    const Term& at(std::size_t i) const;
    /// Drop the first n entries.
    Stack drop(std::size_t n) const;
    std::vector<Term> entries() const;

    std::uint8_t constants() const;
    std::uint64_t hash() const;
    bool same_node(const Stack& other) const { return node_ == other.node_; }

private:
    explicit Stack(std::shared_ptr<const detail::StackNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const detail::StackNode> node_;

    friend struct detail::Access;
};

/// `t ⋆ π` with t closed, or the terminal process ⊤.
class Process {
public:
    /// ⊤
    Process() = default;
    /// Throws ClosednessError if `term` is open.
    Process(Term term, Stack stack);

    static Process top() { return Process(); }

    bool is_top() const { return !pair_.has_value(); }
    const Term& term() const;
    const Stack& stack() const;

    std::uint8_t constants() const;
    std::uint64_t hash() const;

private:
    struct Pair {
        Term term;
        Stack stack;
    };
    std::optional<Pair> pair_;
};

// --- structural predicates ------------------------------------------------

bool alpha_equal(const Term& a, const Term& b);
bool alpha_equal(const Stack& a, const Stack& b);
bool alpha_equal(const Process& a, const Process& b);

inline bool operator==(const Term& a, const Term& b) { return alpha_equal(a, b); }
inline bool operator==(const Stack& a, const Stack& b) { return alpha_equal(a, b); }
inline bool operator==(const Process& a, const Process& b) { return alpha_equal(a, b); }

struct ProcessHash {
    std::size_t operator()(const Process& p) const { return static_cast<std::size_t>(p.hash()); }
};

/// True iff t contains none of read, write0, write1, end (also inside continuations).
bool is_proof_like(const Term& t);
bool contains_effect(const Process& p);

std::vector<Symbol> free_variables(const Term& t);

/// A name not in `avoid`, derived from `base`.
Symbol fresh_symbol(Symbol base, const std::vector<Symbol>& avoid);

/// Capture-avoiding substitution body[arg/name].
Term substitute(const Term& body, Symbol name, const Term& arg);

// --- positions --------------------------------------------------------------

struct PathStep {
    enum class Kind : std::uint8_t {
        Head,        // process: the head term
        StackEntry,  // process or continuation: entry `index` of the stack
        Body,        // abstraction body
        Fun,         // application function
        Arg,         // application argument
    };
    Kind kind;
    std::size_t index = 0;

    friend bool operator==(const PathStep&, const PathStep&) = default;
};

/// Path from a process to one of its subterms. The first step is Head or
/// StackEntry; StackEntry after a term step descends into a continuation.
using Position = std::vector<PathStep>;

class InvalidPosition : public Error {
public:
    using Error::Error;
};

std::optional<Term> subterm_at(const Process& host, const Position& at);
/// Replaces the subterm at `at` by `replacement` (no capture checks: the
/// caller guarantees the replacement has no more free variables than the hole).
Process replace_at(const Process& host, const Position& at, const Term& replacement);

std::string to_string(const Position& at);

// --- concrete syntax --------------------------------------------------------

/// Name bindings resolved into free identifiers after parsing.
using Definitions = std::map<std::string, Term, std::less<>>;

Term parse_term(std::string_view text, const Definitions& defs = {});
Stack parse_stack(std::string_view text, const Definitions& defs = {});
Process parse_process(std::string_view text, const Definitions& defs = {});

/// Parses a sequence of `name = term ;` definitions; later definitions may
/// refer to earlier ones.
std::vector<std::pair<std::string, Term>> parse_definitions(std::string_view text,
                                                            const Definitions& defs = {});

std::string print(const Term& t);
std::string print(const Stack& s);
std::string print(const Process& p);

bool is_reserved_word(std::string_view word);

}  // namespace kamio
