#include "kamio/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "kamio/combinators.hpp"

namespace kamio {

// ---------------------------------------------------------------------------
// errors

namespace {

std::string format_parse_error(std::size_t line, std::size_t column,
                               const std::vector<std::string>& expected, const std::string& found) {
    std::ostringstream out;
    out << line << ":" << column << ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i > 0) out << (i + 1 == expected.size() ? " or " : ", ");
        out << expected[i];
    }
    out << ", found " << found;
    return out.str();
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, std::vector<std::string> expected,
                       const std::string& found)
    : Error(format_parse_error(line, column, expected, found)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

// ---------------------------------------------------------------------------
// symbols

namespace {

struct SymbolTable {
    std::mutex mutex;
    std::deque<std::string> names{""};
    std::unordered_map<std::string, std::uint32_t> ids{{"", 0}};
};

SymbolTable& symbol_table() {
    static SymbolTable table;
    return table;
}

}  // namespace

Symbol Symbol::intern(std::string_view name) {
    auto& table = symbol_table();
    std::lock_guard lock(table.mutex);
    auto it = table.ids.find(std::string(name));
    if (it != table.ids.end()) return Symbol(it->second);
    auto id = static_cast<std::uint32_t>(table.names.size());
    table.names.emplace_back(name);
    table.ids.emplace(std::string(name), id);
    return Symbol(id);
}

const std::string& Symbol::name() const {
    auto& table = symbol_table();
    std::lock_guard lock(table.mutex);
    return table.names[id_];
}

// ---------------------------------------------------------------------------
// nodes

namespace detail {

struct TermNode {
    TermKind kind;
    Symbol name;
    Term first;   // Lam body, App fun
    Term second;  // App arg
    Stack saved;
    std::vector<Symbol> free;
    std::uint8_t constants = 0;
    std::uint64_t size = 1;
    mutable std::atomic<std::uint64_t> hash{0};
    mutable std::atomic<bool> hashed{false};

    explicit TermNode(TermKind k) : kind(k) {}
};

struct StackNode {
    Term head;
    std::shared_ptr<const StackNode> tail;
    std::size_t size;
    std::uint8_t constants;
    mutable std::atomic<std::uint64_t> hash{0};
    mutable std::atomic<bool> hashed{false};

    StackNode(Term h, std::shared_ptr<const StackNode> t)
        : head(std::move(h)),
          tail(std::move(t)),
          size(1 + (tail ? tail->size : 0)),
          constants(static_cast<std::uint8_t>(head.constants() | (tail ? tail->constants : 0))) {}
};

struct Access {
    static const TermNode& node(const Term& t) { return *t.node_; }
    static const StackNode* node(const Stack& s) { return s.node_.get(); }
    static Term make(std::shared_ptr<const TermNode> n) { return Term(std::move(n)); }
    static Stack make(std::shared_ptr<const StackNode> n) { return Stack(std::move(n)); }
};

}  // namespace detail

using detail::Access;
using detail::StackNode;
using detail::TermNode;

namespace {

std::vector<Symbol> merge_free(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    std::vector<Symbol> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool contains_symbol(const std::vector<Symbol>& sorted, Symbol s) {
    return std::binary_search(sorted.begin(), sorted.end(), s);
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = a + b;
    return r < a ? UINT64_MAX : r;
}

Term make_constant(TermKind kind, std::uint8_t mask) {
    auto node = std::make_shared<TermNode>(kind);
    node->constants = mask;
    return Access::make(std::move(node));
}

}  // namespace

Term Term::var(Symbol name) {
    auto node = std::make_shared<TermNode>(TermKind::Var);
    node->name = name;
    node->free = {name};
    return Term(std::move(node));
}

Term Term::lam(Symbol bound, Term body) {
    auto node = std::make_shared<TermNode>(TermKind::Lam);
    node->name = bound;
    node->free = body.free_variables();
    auto it = std::lower_bound(node->free.begin(), node->free.end(), bound);
    if (it != node->free.end() && *it == bound) node->free.erase(it);
    node->constants = body.constants();
    node->size = saturating_add(1, body.size());
    node->first = std::move(body);
    return Term(std::move(node));
}

Term Term::app(Term fun, Term arg) {
    auto node = std::make_shared<TermNode>(TermKind::App);
    node->free = merge_free(fun.free_variables(), arg.free_variables());
    node->constants = static_cast<std::uint8_t>(fun.constants() | arg.constants());
    node->size = saturating_add(1, saturating_add(fun.size(), arg.size()));
    node->first = std::move(fun);
    node->second = std::move(arg);
    return Term(std::move(node));
}

Term Term::apps(Term head, std::initializer_list<Term> args) {
    for (const auto& a : args) head = app(std::move(head), a);
    return head;
}

Term Term::call_cc() {
    static const Term t = make_constant(TermKind::CallCC, kHasCallCC);
    return t;
}
Term Term::read() {
    static const Term t = make_constant(TermKind::Read, kHasRead);
    return t;
}
Term Term::write0() {
    static const Term t = make_constant(TermKind::Write0, kHasWrite0);
    return t;
}
Term Term::write1() {
    static const Term t = make_constant(TermKind::Write1, kHasWrite1);
    return t;
}
Term Term::end() {
    static const Term t = make_constant(TermKind::End, kHasEnd);
    return t;
}

Term Term::kont(Stack saved) {
    auto node = std::make_shared<TermNode>(TermKind::Kont);
    node->constants = static_cast<std::uint8_t>(kHasKont | saved.constants());
    std::uint64_t size = 1;
    for (const StackNode* s = Access::node(saved); s != nullptr; s = s->tail.get())
        size = saturating_add(size, s->head.size());
    node->size = size;
    node->saved = std::move(saved);
    return Term(std::move(node));
}

TermKind Term::kind() const { return node_->kind; }
Symbol Term::name() const { return node_->name; }
const Term& Term::body() const { return node_->first; }
const Term& Term::fun() const { return node_->first; }
const Term& Term::arg() const { return node_->second; }
const Stack& Term::saved() const { return node_->saved; }
const std::vector<Symbol>& Term::free_variables() const { return node_->free; }
std::uint8_t Term::constants() const { return node_->constants; }
std::uint64_t Term::size() const { return node_->size; }

// ---------------------------------------------------------------------------
// stacks

Stack Stack::from(const std::vector<Term>& entries) {
    Stack s;
    for (auto it = entries.rbegin(); it != entries.rend(); ++it) s = s.push(*it);
    return s;
}

Stack Stack::push(Term t) const {
    if (!t.is_closed())
        throw ClosednessError("stack entry has free variable '" + t.free_variables().front().name() +
                              "'");
    return Stack(std::make_shared<const StackNode>(std::move(t), node_));
}

std::size_t Stack::size() const { return node_ ? node_->size : 0; }

const Term& Stack::head() const {
    if (!node_) throw Error("head of empty stack");
    return node_->head;
}

Stack Stack::tail() const {
    if (!node_) throw Error("tail of empty stack");
    return Stack(node_->tail);
}

const Term& Stack::at(std::size_t i) const {
    const StackNode* n = node_.get();
    for (; n != nullptr && i > 0; --i) n = n->tail.get();
    if (n == nullptr) throw Error("stack index out of range");
    return n->head;
}

Stack Stack::drop(std::size_t n) const {
    std::shared_ptr<const StackNode> cur = node_;
    for (; cur && n > 0; --n) cur = cur->tail;
    if (n > 0) throw Error("stack index out of range");
    return Stack(std::move(cur));
}

std::vector<Term> Stack::entries() const {
    std::vector<Term> out;
    out.reserve(size());
    for (const StackNode* n = node_.get(); n != nullptr; n = n->tail.get()) out.push_back(n->head);
    return out;
}

std::uint8_t Stack::constants() const { return node_ ? node_->constants : 0; }

// ---------------------------------------------------------------------------
// processes

Process::Process(Term term, Stack stack) {
    if (!term.is_closed())
        throw ClosednessError("process head has free variable '" +
                              term.free_variables().front().name() + "'");
    pair_ = Pair{std::move(term), std::move(stack)};
}

const Term& Process::term() const {
    if (!pair_) throw Error("TOP has no term");
    return pair_->term;
}

const Stack& Process::stack() const {
    if (!pair_) throw Error("TOP has no stack");
    return pair_->stack;
}

std::uint8_t Process::constants() const {
    if (!pair_) return 0;
    return static_cast<std::uint8_t>(pair_->term.constants() | pair_->stack.constants());
}

// ---------------------------------------------------------------------------
// hashing

namespace {

constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t hash_term(const Term& t, std::vector<Symbol>& env);

std::uint64_t hash_node(const Term& t, std::vector<Symbol>& env) {
    const TermNode& n = Access::node(t);
    switch (n.kind) {
        case TermKind::Var: {
            for (std::size_t i = env.size(); i-- > 0;)
                if (env[i] == n.name) return mix(1, env.size() - 1 - i);
            return mix(2, n.name.id());
        }
        case TermKind::Lam: {
            env.push_back(n.name);
            std::uint64_t h = mix(3, hash_term(n.first, env));
            env.pop_back();
            return h;
        }
        case TermKind::App:
            return mix(mix(4, hash_term(n.first, env)), hash_term(n.second, env));
        case TermKind::Kont:
            return mix(5, n.saved.hash());
        default:
            return mix(6, static_cast<std::uint64_t>(n.kind));
    }
}

std::uint64_t hash_term(const Term& t, std::vector<Symbol>& env) {
    const TermNode& n = Access::node(t);
    if (!n.free.empty()) return hash_node(t, env);
    if (n.hashed.load(std::memory_order_acquire)) return n.hash.load(std::memory_order_relaxed);
    std::vector<Symbol> empty;
    std::uint64_t h = hash_node(t, empty);
    n.hash.store(h, std::memory_order_relaxed);
    n.hashed.store(true, std::memory_order_release);
    return h;
}

}  // namespace

std::uint64_t Term::hash() const {
    std::vector<Symbol> env;
    return hash_term(*this, env);
}

std::uint64_t Stack::hash() const {
    if (!node_) return 0x51ac;
    if (node_->hashed.load(std::memory_order_acquire)) return node_->hash.load(std::memory_order_relaxed);
    // Iterative over the spine: collect unhashed suffix nodes first.
    std::vector<const StackNode*> pending;
    for (const StackNode* n = node_.get(); n != nullptr && !n->hashed.load(std::memory_order_acquire);
         n = n->tail.get())
        pending.push_back(n);
    for (auto it = pending.rbegin(); it != pending.rend(); ++it) {
        const StackNode* n = *it;
        std::uint64_t tail_hash = n->tail ? n->tail->hash.load(std::memory_order_relaxed) : 0x51ac;
        std::uint64_t h = mix(mix(7, n->head.hash()), tail_hash);
        n->hash.store(h, std::memory_order_relaxed);
        n->hashed.store(true, std::memory_order_release);
    }
    return node_->hash.load(std::memory_order_relaxed);
}

std::uint64_t Process::hash() const {
    if (!pair_) return 0x7090;
    return mix(mix(8, pair_->term.hash()), pair_->stack.hash());
}

// ---------------------------------------------------------------------------
// α-equivalence

namespace {

// Binder depth of `s` in env (innermost = 0), or -1 when free.
long binder_index(const std::vector<Symbol>& env, Symbol s) {
    for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == s) return static_cast<long>(env.size() - 1 - i);
    return -1;
}

bool alpha_equal_in(const Term& a, const Term& b, std::vector<Symbol>& env_a,
                    std::vector<Symbol>& env_b) {
    const TermNode& na = Access::node(a);
    const TermNode& nb = Access::node(b);
    bool both_closed = na.free.empty() && nb.free.empty();
    if (&na == &nb && (both_closed || env_a == env_b)) return true;
    if (na.kind != nb.kind) return false;
    if (both_closed && a.hash() != b.hash()) return false;
    switch (na.kind) {
        case TermKind::Var: {
            long ia = binder_index(env_a, na.name);
            long ib = binder_index(env_b, nb.name);
            if (ia < 0 && ib < 0) return na.name == nb.name;
            return ia == ib;
        }
        case TermKind::Lam: {
            env_a.push_back(na.name);
            env_b.push_back(nb.name);
            bool eq = alpha_equal_in(na.first, nb.first, env_a, env_b);
            env_a.pop_back();
            env_b.pop_back();
            return eq;
        }
        case TermKind::App:
            return alpha_equal_in(na.first, nb.first, env_a, env_b) &&
                   alpha_equal_in(na.second, nb.second, env_a, env_b);
        case TermKind::Kont:
            return alpha_equal(na.saved, nb.saved);
        default:
            return true;
    }
}

}  // namespace

bool alpha_equal(const Term& a, const Term& b) {
    std::vector<Symbol> env_a, env_b;
    return alpha_equal_in(a, b, env_a, env_b);
}

bool alpha_equal(const Stack& a, const Stack& b) {
    const StackNode* x = Access::node(a);
    const StackNode* y = Access::node(b);
    if (a.size() != b.size()) return false;
    if (x != y && x != nullptr && a.hash() != b.hash()) return false;
    for (; x != y; x = x->tail.get(), y = y->tail.get()) {
        if (!alpha_equal(x->head, y->head)) return false;
    }
    return true;
}

bool alpha_equal(const Process& a, const Process& b) {
    if (a.is_top() || b.is_top()) return a.is_top() == b.is_top();
    return alpha_equal(a.term(), b.term()) && alpha_equal(a.stack(), b.stack());
}

// ---------------------------------------------------------------------------
// predicates and substitution

bool is_proof_like(const Term& t) { return (t.constants() & kEffectMask) == 0; }

bool contains_effect(const Process& p) { return (p.constants() & kEffectMask) != 0; }

std::vector<Symbol> free_variables(const Term& t) { return t.free_variables(); }

Symbol fresh_symbol(Symbol base, const std::vector<Symbol>& avoid) {
    std::string stem = base.name();
    while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
    if (stem.empty()) stem = "v";
    for (std::uint64_t i = 1;; ++i) {
        Symbol candidate = Symbol::intern(stem + std::to_string(i));
        if (std::find(avoid.begin(), avoid.end(), candidate) == avoid.end() &&
            !is_reserved_word(candidate.name()))
            return candidate;
    }
}

Term substitute(const Term& body, Symbol name, const Term& arg) {
    if (!contains_symbol(body.free_variables(), name)) return body;
    switch (body.kind()) {
        case TermKind::Var:
            return arg;
        case TermKind::App:
            return Term::app(substitute(body.fun(), name, arg), substitute(body.arg(), name, arg));
        case TermKind::Lam: {
            Symbol bound = body.name();
            Term inner = body.body();
            if (contains_symbol(arg.free_variables(), bound)) {
                std::vector<Symbol> avoid = merge_free(arg.free_variables(), inner.free_variables());
                avoid.push_back(name);
                Symbol renamed = fresh_symbol(bound, avoid);
                inner = substitute(inner, bound, Term::var(renamed));
                bound = renamed;
            }
            return Term::lam(bound, substitute(inner, name, arg));
        }
        default:
            // Constants and continuations are closed.
            return body;
    }
}

// ---------------------------------------------------------------------------
// positions

namespace {

std::optional<Term> descend(const Term& t, const Position& at, std::size_t i) {
    if (i == at.size()) return t;
    const PathStep& step = at[i];
    switch (step.kind) {
        case PathStep::Kind::Body:
            if (!t.is(TermKind::Lam)) return std::nullopt;
            return descend(t.body(), at, i + 1);
        case PathStep::Kind::Fun:
            if (!t.is(TermKind::App)) return std::nullopt;
            return descend(t.fun(), at, i + 1);
        case PathStep::Kind::Arg:
            if (!t.is(TermKind::App)) return std::nullopt;
            return descend(t.arg(), at, i + 1);
        case PathStep::Kind::StackEntry:
            if (!t.is(TermKind::Kont) || step.index >= t.saved().size()) return std::nullopt;
            return descend(t.saved().at(step.index), at, i + 1);
        case PathStep::Kind::Head:
            return std::nullopt;
    }
    return std::nullopt;
}

Stack replace_entry(const Stack& s, std::size_t index, const Term& entry) {
    std::vector<Term> prefix;
    for (std::size_t k = 0; k < index; ++k) prefix.push_back(s.at(k));
    Stack out = s.drop(index + 1).push(entry);
    for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) out = out.push(*it);
    return out;
}

Term rebuild(const Term& t, const Position& at, std::size_t i, const Term& replacement) {
    if (i == at.size()) return replacement;
    const PathStep& step = at[i];
    switch (step.kind) {
        case PathStep::Kind::Body:
            if (!t.is(TermKind::Lam)) break;
            return Term::lam(t.name(), rebuild(t.body(), at, i + 1, replacement));
        case PathStep::Kind::Fun:
            if (!t.is(TermKind::App)) break;
            return Term::app(rebuild(t.fun(), at, i + 1, replacement), t.arg());
        case PathStep::Kind::Arg:
            if (!t.is(TermKind::App)) break;
            return Term::app(t.fun(), rebuild(t.arg(), at, i + 1, replacement));
        case PathStep::Kind::StackEntry:
            if (!t.is(TermKind::Kont) || step.index >= t.saved().size()) break;
            return Term::kont(replace_entry(
                t.saved(), step.index, rebuild(t.saved().at(step.index), at, i + 1, replacement)));
        case PathStep::Kind::Head:
            break;
    }
    throw InvalidPosition("position " + to_string(at) + " does not exist");
}

}  // namespace

std::optional<Term> subterm_at(const Process& host, const Position& at) {
    if (host.is_top() || at.empty()) return std::nullopt;
    const PathStep& first = at.front();
    if (first.kind == PathStep::Kind::Head) return descend(host.term(), at, 1);
    if (first.kind == PathStep::Kind::StackEntry && first.index < host.stack().size())
        return descend(host.stack().at(first.index), at, 1);
    return std::nullopt;
}

Process replace_at(const Process& host, const Position& at, const Term& replacement) {
    if (host.is_top() || at.empty())
        throw InvalidPosition("position " + to_string(at) + " does not exist");
    const PathStep& first = at.front();
    if (first.kind == PathStep::Kind::Head)
        return Process(rebuild(host.term(), at, 1, replacement), host.stack());
    if (first.kind == PathStep::Kind::StackEntry && first.index < host.stack().size()) {
        const Stack& s = host.stack();
        return Process(host.term(),
                       replace_entry(s, first.index, rebuild(s.at(first.index), at, 1, replacement)));
    }
    throw InvalidPosition("position " + to_string(at) + " does not exist");
}

std::string to_string(const Position& at) {
    std::string out = "[";
    for (std::size_t i = 0; i < at.size(); ++i) {
        if (i > 0) out += ' ';
        switch (at[i].kind) {
            case PathStep::Kind::Head: out += "head"; break;
            case PathStep::Kind::StackEntry: out += "stack" + std::to_string(at[i].index); break;
            case PathStep::Kind::Body: out += "body"; break;
            case PathStep::Kind::Fun: out += "fun"; break;
            case PathStep::Kind::Arg: out += "arg"; break;
        }
    }
    return out + "]";
}

// ---------------------------------------------------------------------------
// lexer

namespace {

constexpr std::string_view kReserved[] = {"cc", "read", "write0", "write1", "end", "nil", "TOP", "kont"};

enum class Tok { Lambda, Dot, LParen, RParen, LBrace, RBrace, Star, Cons, Numeral, Ident, Equals, Semi, Eof };

struct Token {
    Tok kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

std::string describe(const Token& t) {
    if (t.kind == Tok::Eof) return "end of input";
    return "'" + t.text + "'";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1, column = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token tok{Tok::Eof, std::string(1, c), line, column};
        switch (c) {
            case '\\': tok.kind = Tok::Lambda; break;
            case '.': tok.kind = Tok::Dot; break;
            case '(': tok.kind = Tok::LParen; break;
            case ')': tok.kind = Tok::RParen; break;
            case '{': tok.kind = Tok::LBrace; break;
            case '}': tok.kind = Tok::RBrace; break;
            case '*': tok.kind = Tok::Star; break;
            case '=': tok.kind = Tok::Equals; break;
            case ';': tok.kind = Tok::Semi; break;
            case ':':
                if (i + 1 < text.size() && text[i + 1] == ':') {
                    tok.kind = Tok::Cons;
                    tok.text = "::";
                }
                break;
            case '#': {
                std::size_t j = i + 1;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
                if (j == i + 1) throw ParseError(line, column, {"natural number after '#'"}, "'#'");
                tok.kind = Tok::Numeral;
                tok.text = std::string(text.substr(i, j - i));
                break;
            }
            default:
                if (ident_start(c)) {
                    std::size_t j = i;
                    while (j < text.size() && ident_char(text[j])) ++j;
                    tok.kind = Tok::Ident;
                    tok.text = std::string(text.substr(i, j - i));
                }
                break;
        }
        if (tok.kind == Tok::Eof) throw ParseError(line, column, {"a token"}, "'" + tok.text + "'");
        advance(tok.text.size());
        out.push_back(std::move(tok));
    }
    out.push_back(Token{Tok::Eof, "", line, column});
    return out;
}

// ---------------------------------------------------------------------------
// parser

constexpr std::uint64_t kMaxNumeralLiteral = 1 << 16;

class Parser {
public:
    Parser(std::string_view text, const Definitions& defs) : tokens_(tokenize(text)), defs_(defs) {}

    Term term() {
        if (peek().kind == Tok::Lambda) return abstraction();
        return application();
    }

    Stack stack() {
        std::vector<Term> entries;
        while (!(peek().kind == Tok::Ident && peek().text == "nil")) {
            const Token& at = peek();
            Term t = term();
            if (!t.is_closed())
                throw ClosednessError(position(at) + "stack entry has free variable '" +
                                      t.free_variables().front().name() + "'");
            entries.push_back(std::move(t));
            expect(Tok::Cons, "'::'");
        }
        next();  // nil
        return Stack::from(entries);
    }

    Process process() {
        if (peek().kind == Tok::Ident && peek().text == "TOP") {
            next();
            return Process::top();
        }
        const Token& at = peek();
        Term head = term();
        if (!head.is_closed())
            throw ClosednessError(position(at) + "process head has free variable '" +
                                  head.free_variables().front().name() + "'");
        expect(Tok::Star, "'*'");
        return Process(std::move(head), stack());
    }

    std::vector<std::pair<std::string, Term>> definitions() {
        std::vector<std::pair<std::string, Term>> out;
        Definitions scope = defs_;
        while (peek().kind != Tok::Eof) {
            const Token& name = peek();
            if (name.kind != Tok::Ident || is_reserved_word(name.text))
                fail({"definition name"});
            std::string key = next().text;
            expect(Tok::Equals, "'='");
            Definitions saved = defs_;
            defs_ = scope;
            Term body = term();
            defs_ = saved;
            if (!body.is_closed())
                throw ClosednessError(position(name) + "definition of '" + key +
                                      "' has free variable '" + body.free_variables().front().name() +
                                      "'");
            expect(Tok::Semi, "';'");
            scope.insert_or_assign(key, body);
            out.emplace_back(std::move(key), std::move(body));
        }
        return out;
    }

    void finish() {
        if (peek().kind != Tok::Eof) fail({"end of input"});
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& next() { return tokens_[pos_++]; }

    static std::string position(const Token& t) {
        return std::to_string(t.line) + ":" + std::to_string(t.column) + ": ";
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        throw ParseError(peek().line, peek().column, std::move(expected), describe(peek()));
    }

    void expect(Tok kind, const std::string& what) {
        if (peek().kind != kind) fail({what});
        next();
    }

    Symbol binder() {
        if (peek().kind != Tok::Ident || is_reserved_word(peek().text)) fail({"variable name"});
        return Symbol::intern(next().text);
    }

    Term abstraction() {
        next();  // '\'
        std::vector<Symbol> names{binder()};
        while (peek().kind == Tok::Ident) names.push_back(binder());
        expect(Tok::Dot, "'.'");
        for (Symbol s : names) bound_.push_back(s);
        Term body = term();
        bound_.resize(bound_.size() - names.size());
        for (auto it = names.rbegin(); it != names.rend(); ++it) body = Term::lam(*it, std::move(body));
        return body;
    }

    bool atom_starts() const {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::LParen:
            case Tok::Numeral:
                return true;
            case Tok::Ident:
                return t.text != "nil" && t.text != "TOP";
            default:
                return false;
        }
    }

    Term application() {
        if (!atom_starts()) fail({"term"});
        Term head = atom();
        while (atom_starts()) head = Term::app(std::move(head), atom());
        return head;
    }

    Term atom() {
        const Token& t = next();
        switch (t.kind) {
            case Tok::LParen: {
                Term inner = term();
                expect(Tok::RParen, "')'");
                return inner;
            }
            case Tok::Numeral: {
                std::uint64_t n = 0;
                auto [ptr, ec] = std::from_chars(t.text.data() + 1, t.text.data() + t.text.size(), n);
                if (ec != std::errc() || n > kMaxNumeralLiteral)
                    throw ParseError(t.line, t.column, {"numeral literal <= 65536"}, describe(t));
                return church(n);
            }
            case Tok::Ident:
                return identifier(t);
            default:
                break;
        }
        --pos_;
        fail({"term"});
    }

    Term identifier(const Token& t) {
        const std::string& w = t.text;
        if (w == "cc") return Term::call_cc();
        if (w == "read") return Term::read();
        if (w == "write0") return Term::write0();
        if (w == "write1") return Term::write1();
        if (w == "end") return Term::end();
        if (w == "kont") {
            expect(Tok::LBrace, "'{'");
            Stack saved = stack();
            expect(Tok::RBrace, "'}'");
            return Term::kont(std::move(saved));
        }
        Symbol s = Symbol::intern(w);
        if (std::find(bound_.begin(), bound_.end(), s) == bound_.end()) {
            auto it = defs_.find(w);
            if (it != defs_.end()) return it->second;
        }
        return Term::var(s);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    Definitions defs_;
    std::vector<Symbol> bound_;
};

}  // namespace

bool is_reserved_word(std::string_view word) {
    return std::find(std::begin(kReserved), std::end(kReserved), word) != std::end(kReserved);
}

Term parse_term(std::string_view text, const Definitions& defs) {
    Parser p(text, defs);
    Term t = p.term();
    p.finish();
    return t;
}

Stack parse_stack(std::string_view text, const Definitions& defs) {
    Parser p(text, defs);
    Stack s = p.stack();
    p.finish();
    return s;
}

Process parse_process(std::string_view text, const Definitions& defs) {
    Parser p(text, defs);
    Process proc = p.process();
    p.finish();
    return proc;
}

std::vector<std::pair<std::string, Term>> parse_definitions(std::string_view text,
                                                            const Definitions& defs) {
    Parser p(text, defs);
    return p.definitions();
}

// ---------------------------------------------------------------------------
// printer

namespace {

enum class Slot { Top, Fun, Arg };

void print_stack(const Stack& s, std::string& out);

void print_term(const Term& t, Slot slot, std::string& out) {
    switch (t.kind()) {
        case TermKind::Var: out += t.name().name(); return;
        case TermKind::CallCC: out += "cc"; return;
        case TermKind::Read: out += "read"; return;
        case TermKind::Write0: out += "write0"; return;
        case TermKind::Write1: out += "write1"; return;
        case TermKind::End: out += "end"; return;
        case TermKind::Kont:
            out += "kont{";
            print_stack(t.saved(), out);
            out += "}";
            return;
        case TermKind::Lam:
            if (slot != Slot::Top) out += '(';
            out += '\\';
            out += t.name().name();
            out += ". ";
            print_term(t.body(), Slot::Top, out);
            if (slot != Slot::Top) out += ')';
            return;
        case TermKind::App:
            if (slot == Slot::Arg) out += '(';
            print_term(t.fun(), Slot::Fun, out);
            out += ' ';
            print_term(t.arg(), Slot::Arg, out);
            if (slot == Slot::Arg) out += ')';
            return;
    }
}

void print_stack(const Stack& s, std::string& out) {
    for (const Term& t : s.entries()) {
        print_term(t, Slot::Top, out);
        out += " :: ";
    }
    out += "nil";
}

}  // namespace

std::string print(const Term& t) {
    std::string out;
    print_term(t, Slot::Top, out);
    return out;
}

std::string print(const Stack& s) {
    std::string out;
    print_stack(s, out);
    return out;
}

std::string print(const Process& p) {
    if (p.is_top()) return "TOP";
    std::string out;
    print_term(p.term(), Slot::Top, out);
    out += " * ";
    print_stack(p.stack(), out);
    return out;
}

}  // namespace kamio
