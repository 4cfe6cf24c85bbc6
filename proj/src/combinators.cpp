#include "kamio/combinators.hpp"

namespace kamio {

namespace {

constexpr std::string_view kPrelude = R"(-- Library combinators.
-- Church numerals: #n = \f. \x. f (... (f x)).

S = \n f x. f (n f x);
B = \n f x. n (\y. f (f y)) x;
C = \n. S (B n);
-- floor(n/2): iterate (a, b) -> (b, a+1) from (0, 0), keep the first component
H = \n. n (\p. p (\a b k. k b (S a))) (\k. k #0 #0) (\a b. a);
Z = \n s t. n (\z. t) s;
-- parity by iterated boolean negation starting from true
E = \n s t. n (\b x y. b y x) (\x y. x) s t;
Y = \f. (\x. f (x x)) (\x. f (x x));
F = \h y. h (S y);
Q = \x n. read (x (B n)) (x (C n)) n;
R = Y Q #0;
V = \x n. Z n end (E n (write0 x (H n)) (write1 x (H n)));
W = Y V;
)";

struct Prelude {
    Definitions definitions;
    CombinatorSet set;
};

const Prelude& prelude() {
    static const Prelude p = [] {
        Definitions defs;
        for (auto& [name, term] : parse_definitions(kPrelude)) defs.insert_or_assign(name, term);
        auto get = [&](const char* name) { return defs.at(name); };
        CombinatorSet set{get("B"), get("C"), get("H"), get("S"), get("E"), get("Z"),
                          get("Y"), get("F"), get("Q"), get("R"), get("V"), get("W")};
        return Prelude{std::move(defs), std::move(set)};
    }();
    return p;
}

}  // namespace

Term church(std::uint64_t n) {
    static const Symbol f = Symbol::intern("f");
    static const Symbol x = Symbol::intern("x");
    Term body = Term::var(x);
    Term fv = Term::var(f);
    for (std::uint64_t i = 0; i < n; ++i) body = Term::app(fv, body);
    return Term::lam(f, Term::lam(x, body));
}

const CombinatorSet& combinators() { return prelude().set; }

std::string_view prelude_source() { return kPrelude; }

const Definitions& prelude_definitions() { return prelude().definitions; }

std::optional<std::uint64_t> decode_numeral(const Term& t, std::uint64_t fuel) {
    if (!t.is_closed()) throw ClosednessError("decode_numeral needs a closed term");
    RunResult r = run(ExecutionContext(Process(Term::app(combinators().W, t), Stack()), "", ""), fuel);
    if (r.outcome != Outcome::Terminated) return std::nullopt;
    auto n = unbin(r.final.output);
    if (!n) throw MalformedOutput("writer produced non-canonical output '" + r.final.output + "'");
    return n;
}

Stack writer_tail() {
    static const Stack tail = Stack::from({combinators().F, combinators().W, church(0)});
    return tail;
}

Process storage_apply(const Term& t, std::uint64_t n) {
    return Process(church(n), writer_tail().push(church(0)).push(t).push(combinators().F));
}

Process compile_function(const Term& t) {
    if (!t.is_closed()) throw ClosednessError("compile_function needs a closed term");
    if (!is_proof_like(t)) throw NotProofLike("compile_function needs a proof-like term: " + print(t));
    return reader_process(writer_tail().push(church(0)).push(t).push(combinators().F));
}

Process reader_process(const Stack& tail) { return Process(combinators().R, tail); }

}  // namespace kamio
