#include <doctest.h>

#include <fstream>
#include <sstream>

#include "kamio/combinators.hpp"
#include "kamio/equivalence.hpp"

using namespace kamio;

namespace {

Term T(const char* text) { return parse_term(text, prelude_definitions()); }

std::string run_output(const Process& p, const std::string& input = "") {
    RunResult r = run(ExecutionContext(p, input, ""), kDefaultRunFuel);
    REQUIRE(r.outcome == Outcome::Terminated);
    CHECK(r.final.input == "");
    return r.final.output;
}

}  // namespace

TEST_SUITE("combinators") {
    TEST_CASE("church numerals") {
        CHECK(church(0) == parse_term("\\f. \\x. x"));
        CHECK(church(2) == parse_term("\\f. \\x. f (f x)"));
        for (std::uint64_t n : {0, 1, 5, 40}) CHECK(is_proof_like(church(n)));
        CHECK(church(10).is_closed());
    }

    TEST_CASE("combinator set invariants") {
        const CombinatorSet& c = combinators();
        for (const Term* t : {&c.B, &c.C, &c.H, &c.S, &c.E, &c.Z, &c.Y, &c.F, &c.Q, &c.R, &c.V, &c.W})
            CHECK(t->is_closed());
        for (const Term* t : {&c.B, &c.C, &c.H, &c.S, &c.E, &c.Z, &c.Y, &c.F}) CHECK(is_proof_like(*t));
        CHECK((c.Q.constants() & kHasRead) != 0);
        CHECK((c.R.constants() & kHasRead) != 0);
        for (const Term* t : {&c.V, &c.W}) {
            CHECK((t->constants() & kHasWrite0) != 0);
            CHECK((t->constants() & kHasWrite1) != 0);
            CHECK((t->constants() & kHasEnd) != 0);
        }
        CHECK(prelude_definitions().size() == 12);
    }

    TEST_CASE("decode numerals") {
        CHECK(decode_numeral(church(5)) == 5u);
        CHECK(decode_numeral(Term::app(combinators().B, church(3))) == 6u);
        CHECK(decode_numeral(church(0)) == 0u);
        // \x. x is η-equivalent to #1 and the writer treats it as such.
        CHECK(decode_numeral(parse_term("\\x. x")) == 1u);
        CHECK_FALSE(decode_numeral(parse_term("\\f. \\x. x"), 3));
        CHECK_FALSE(decode_numeral(parse_term("\\f. \\x. read")));
        CHECK_THROWS_AS(decode_numeral(parse_term("x")), ClosednessError);
    }

    TEST_CASE("malformed writer output") {
        // feeds the writer a term that writes a leading zero before behaving like #1
        Term odd = parse_term("\\f. \\x. write0 (f x)");
        CHECK_THROWS_AS(decode_numeral(odd), MalformedOutput);
    }

    TEST_CASE("arithmetic contracts") {
        for (std::uint64_t n = 0; n <= 12; ++n) {
            CAPTURE(n);
            CHECK(decode_numeral(Term::app(combinators().B, church(n))) == 2 * n);
            CHECK(decode_numeral(Term::app(combinators().C, church(n))) == 2 * n + 1);
            CHECK(decode_numeral(Term::app(combinators().H, church(n))) == n / 2);
            CHECK(decode_numeral(Term::app(combinators().S, church(n))) == n + 1);
            CHECK(decode_numeral(Term::apps(combinators().Z, {church(n), church(7), church(9)})) == (n == 0 ? 7u : 9u));
            CHECK(decode_numeral(Term::apps(combinators().E, {church(n), church(7), church(9)})) ==
                  (n % 2 == 0 ? 7u : 9u));
        }
    }

    TEST_CASE("fixed point unfolds") {
        // Y t behaves like t (Y t): both write through t once and stop.
        Term t = T("\\k. write1 end");
        CHECK(run_output(Process(Term::app(combinators().Y, t), Stack())) == "1");
        CHECK(top_equiv(ExecutionContext(Process(Term::app(combinators().Y, t), Stack()), "", ""),
                        ExecutionContext(Process(Term::app(t, Term::app(combinators().Y, t)), Stack()), "", ""))
                  .is_verified());
    }

    TEST_CASE("storage operator") {
        CHECK(run_output(storage_apply(T("\\x. x"), 4)) == bin(4));
        CHECK(run_output(storage_apply(T("S"), 4)) == bin(5));
        CHECK(run_output(storage_apply(T("B"), 0)) == "");
        Process p = storage_apply(T("S"), 2);
        CHECK(p.term() == church(2));
        CHECK(p.stack().size() == 6);
    }

    TEST_CASE("compile function") {
        Process id = compile_function(T("\\x. x"));
        CHECK(id.term() == combinators().R);
        CHECK(id.stack() == Stack::from({combinators().F, T("\\x. x"), church(0), combinators().F, combinators().W,
                                         church(0)}));
        CHECK(run_output(id, "10") == "10");
        CHECK(run_output(compile_function(T("S")), "11") == "100");
        Process dbl = compile_function(T("\\n. n (\\m. S (S m)) #0"));
        FunctionTable table;
        for (std::uint64_t n = 0; n <= 8; ++n) table[n] = 2 * n;
        CHECK(implements_on(dbl, table).is_verified());
        CHECK_THROWS_AS(compile_function(T("\\x. write0 x")), NotProofLike);
        CHECK_THROWS_AS(compile_function(parse_term("\\x. y")), ClosednessError);
    }

    TEST_CASE("reader") {
        Process r6 = reader_process(writer_tail());
        CHECK(run_output(r6, bin(6)) == bin(6));
        CHECK(run_output(r6, "") == "");
        for (std::uint64_t n = 0; n <= 16; ++n) {
            CAPTURE(n);
            CHECK(top_equiv(ExecutionContext(reader_process(writer_tail()), bin(n), "1"),
                            ExecutionContext(Process(church(n), writer_tail()), "", "1"))
                      .is_verified());
        }
    }

    TEST_CASE("writer leaves input alone") {
        for (std::uint64_t n : {0, 3, 17}) {
            RunResult r = run(ExecutionContext(Process(Term::app(combinators().W, church(n)), Stack()), "0110", ""));
            CHECK(r.outcome == Outcome::Terminated);
            CHECK(r.final.input == "0110");
            CHECK(r.final.output == bin(n));
        }
    }

    TEST_CASE("shipped prelude matches the built-in one") {
        std::ifstream in(std::string(KAMIO_SOURCE_DIR) + "/share/prelude.kam");
        REQUIRE(in);
        std::ostringstream ss;
        ss << in.rdbuf();
        CHECK(ss.str() == prelude_source());
    }
}
