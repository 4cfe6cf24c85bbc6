// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "generators.hpp"
#include "kamio/combinators.hpp"
#include "kamio/equivalence.hpp"
#include "kamio/machine.hpp"
#include "kamio/realizability.hpp"
#include "realizer_battery.hpp"

using namespace kamio;
using namespace kamio::testing;

namespace {

/// Collects the first few failure messages of a criterion.
struct Report {
    int failures = 0;
    std::vector<std::string> messages;
    std::string summary;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        ++failures;
        if (messages.size() < 5) messages.push_back(what);
    }
};

Process P(const char* text) { return parse_process(text, prelude_definitions()); }
Term T(const char* text) { return parse_term(text, prelude_definitions()); }

using C = ExecutionContext;

// --- 1 ---------------------------------------------------------------------

void rule_fidelity(Report& r) {
    auto eval = [&](const char* from, const char* to, const char* name) {
        auto next = eval_step(P(from));
        r.check(next && *next == P(to), std::string("eval ") + name);
    };
    eval("(\\x. x) end * write0 :: nil", "\\x. x * end :: write0 :: nil", "push");
    eval("\\x. x write1 * end :: write0 :: nil", "end write1 * write0 :: nil", "pop");
    eval("cc * (\\k. k) :: end :: nil", "\\k. k * kont{end :: nil} :: end :: nil", "save");
    eval("kont{write0 :: nil} * end :: read :: nil", "end * write0 :: nil", "restore");

    auto exec = [&](C from, C to, Action a, const char* name) {
        auto t = exec_transition(from);
        r.check(t && t->action == a && t->next == to, std::string("exec ") + name);
    };
    Process rd = P("read * write0 :: write1 :: end :: cc :: nil");
    exec(C(P("(\\x. x) end * nil"), "01", "1"), C(P("\\x. x * end :: nil"), "01", "1"), Action::Tau, "tau");
    exec(C(rd, "01", "1"), C(P("write0 * cc :: nil"), "1", "1"), Action::R0, "r0");
    exec(C(rd, "10", "1"), C(P("write1 * cc :: nil"), "0", "1"), Action::R1, "r1");
    exec(C(rd, "", "1"), C(P("end * cc :: nil"), "", "1"), Action::REps, "reps");
    exec(C(P("write0 * end :: cc :: nil"), "1", "1"), C(P("end * cc :: nil"), "1", "01"), Action::W0, "w0");
    exec(C(P("write1 * end :: cc :: nil"), "1", "0"), C(P("end * cc :: nil"), "1", "10"), Action::W1, "w1");
    exec(C(P("end * read :: nil"), "10", "1"), C(Process::top(), "10", "1"), Action::E, "e");

    auto lts = [&](const char* from, std::vector<std::pair<Action, Process>> want, const char* name) {
        r.check(lts_step(P(from)) == want, std::string("lts ") + name);
    };
    using A = Action;
    lts("(\\x. x) end * nil", {{A::Tau, P("\\x. x * end :: nil")}}, "push");
    lts("\\x. x write1 * end :: nil", {{A::Tau, P("end write1 * nil")}}, "pop");
    lts("cc * (\\k. k) :: nil", {{A::Tau, P("\\k. k * kont{nil} :: nil")}}, "save");
    lts("kont{write0 :: nil} * end :: nil", {{A::Tau, P("end * write0 :: nil")}}, "restore");
    lts("read * write0 :: write1 :: end :: cc :: nil",
        {{A::R0, P("write0 * cc :: nil")}, {A::R1, P("write1 * cc :: nil")}, {A::REps, P("end * cc :: nil")}},
        "read");
    lts("write0 * end :: nil", {{A::W0, P("end * nil")}}, "w0");
    lts("write1 * end :: nil", {{A::W1, P("end * nil")}}, "w1");
    lts("end * cc :: nil", {{A::E, Process::top()}}, "e");
    r.summary = "4 evaluation, 7 execution, 10 transition goldens";
}

// --- 2 ---------------------------------------------------------------------

void determinism(Report& r) {
    Generator gen(101);
    int terminated = 0;
    for (int i = 0; i < 1000; ++i) {
        C c(gen.process(1 + gen.below(30)), gen.bits(6), gen.bits(4));
        auto a = exec_step(c);
        auto b = exec_step(c);
        r.check(a.has_value() == b.has_value() && (!a || *a == *b), "exec_step not functional at #" + std::to_string(i));

        RunResult run_result = run(c, 2000);
        if (run_result.outcome == Outcome::Terminated) ++terminated;
        // replay through the transition system, resolving reads by the input
        std::vector<Action> labels;
        Process p = c.process;
        std::string input = c.input;
        for (std::uint64_t k = 0; k < run_result.steps; ++k) {
            auto steps = lts_step(p);
            if (steps.empty()) break;
            std::size_t pick = 0;
            if (steps[0].first == Action::R0) pick = input.empty() ? 2 : (input[0] == '0' ? 0 : 1);
            if (steps.size() == 3 && !input.empty()) input.erase(0, 1);
            if (steps[pick].first != Action::Tau) labels.push_back(steps[pick].first);
            p = steps[pick].second;
        }
        r.check(labels == run_result.labels(), "label mismatch at #" + std::to_string(i));
        r.check(p == run_result.final.process, "final process mismatch at #" + std::to_string(i));
    }
    r.summary = "1000 contexts, " + std::to_string(terminated) + " terminated";
}

// --- 3 ---------------------------------------------------------------------

void combinator_contracts(Report& r) {
    const CombinatorSet& k = combinators();
    constexpr std::uint64_t fuel = 1'000'000;
    for (std::uint64_t n = 0; n <= 64; ++n) {
        std::string at = " at n=" + std::to_string(n);
        r.check(decode_numeral(Term::app(k.B, church(n)), fuel) == 2 * n, "B" + at);
        r.check(decode_numeral(Term::app(k.C, church(n)), fuel) == 2 * n + 1, "C" + at);
        r.check(decode_numeral(Term::app(k.H, church(n)), fuel) == n / 2, "H" + at);
        r.check(decode_numeral(Term::app(k.S, church(n)), fuel) == n + 1, "S" + at);
        r.check(decode_numeral(Term::apps(k.Z, {church(n), church(7), church(9)}), fuel) == (n == 0 ? 7u : 9u),
                "Z" + at);
        r.check(decode_numeral(Term::apps(k.E, {church(n), church(7), church(9)}), fuel) == (n % 2 == 0 ? 7u : 9u),
                "E" + at);
    }
    r.summary = "B C H S Z E for n <= 64";
}

// --- 4, 5 ------------------------------------------------------------------

void reader_lemma(Report& r) {
    for (std::uint64_t n = 0; n <= 64; ++n) {
        for (const char* o : {"", "10"}) {
            Verdict v = top_equiv(C(reader_process(writer_tail()), bin(n), o), C(Process(church(n), writer_tail()), "", o));
            r.check(v.is_verified(), "n=" + std::to_string(n) + " o=" + o + ": " + describe(v));
        }
    }
    r.summary = "n <= 64, two output prefixes";
}

void writer_lemma(Report& r) {
    Generator gen(202);
    std::vector<std::string> inputs{""};
    while (inputs.size() < 5) inputs.push_back(gen.bits(8));
    std::vector<Stack> pis{Stack(), stack("read :: cc :: nil")};
    for (std::uint64_t n = 0; n <= 64; ++n) {
        for (const std::string& iota : inputs) {
            for (const Stack& pi : pis) {
                RunResult res = run(C(Process(Term::app(combinators().W, church(n)), pi), iota, ""));
                r.check(res.outcome == Outcome::Terminated && res.final == C(Process::top(), iota, bin(n)),
                        "n=" + std::to_string(n) + " input=" + iota + " stack=" + print(pi));
            }
        }
    }
    r.summary = "n <= 64, 5 inputs, 2 stacks";
}

// --- 6, 7 ------------------------------------------------------------------

void storage_law(Report& r) {
    for (const char* name : {"\\x. x", "S", "B"}) {
        Term t = T(name);
        for (std::uint64_t n = 0; n <= 32; ++n) {
            RunResult stored = run(C(storage_apply(t, n), "", ""));
            RunResult direct = run(C(Process(Term::app(t, church(n)), writer_tail()), "", ""));
            r.check(stored.outcome == Outcome::Terminated && direct.outcome == Outcome::Terminated &&
                        stored.final == direct.final,
                    std::string(name) + " n=" + std::to_string(n));
        }
    }
    r.summary = "identity, S, B for n <= 32";
}

struct Cli {
    int code;
    std::string out;
};

Cli cli(const std::string& args) {
    std::string cmd = std::string(KAMIO_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    std::array<char, 4096> buf{};
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

void turing_demo(Report& r) {
    auto dir = std::filesystem::temp_directory_path() / "kamio-acceptance";
    std::filesystem::create_directories(dir);
    struct Case {
        const char* name;
        const char* source;
        std::uint64_t (*f)(std::uint64_t);
    };
    for (Case c : {Case{"identity", "\\n. n", [](std::uint64_t n) { return n; }},
                   Case{"successor", "S", [](std::uint64_t n) { return n + 1; }},
                   Case{"double", "\\n. n (\\m. S (S m)) #0", [](std::uint64_t n) { return 2 * n; }}}) {
        auto lam = dir / (std::string(c.name) + ".lam");
        auto kam = dir / (std::string(c.name) + ".kam");
        auto tsv = dir / (std::string(c.name) + ".tsv");
        std::ofstream(lam) << c.source << "\n";
        {
            std::ofstream table(tsv);
            for (std::uint64_t n = 0; n <= 32; ++n) table << n << "\t" << c.f(n) << "\n";
        }
        Cli compiled = cli("compile-fn " + lam.string() + " --prelude -o " + kam.string());
        r.check(compiled.code == 0, std::string(c.name) + ": compile-fn failed: " + compiled.out);
        Cli verified = cli("verify-impl " + kam.string() + " --table " + tsv.string() + " --format json");
        r.check(verified.code == 0, std::string(c.name) + ": verify-impl exit " + std::to_string(verified.code));
        try {
            auto j = nlohmann::json::parse(verified.out);
            r.check(j["status"] == "verified", std::string(c.name) + ": status");
            r.check(j["rows"].size() == 33, std::string(c.name) + ": row count");
            for (const auto& row : j["rows"]) {
                std::uint64_t n = row["n"];
                r.check(row["output"] == bin(c.f(n)), std::string(c.name) + ": output at n=" + std::to_string(n));
            }
        } catch (const std::exception& e) {
            r.check(false, std::string(c.name) + ": unreadable output: " + e.what());
        }
    }
    r.summary = "identity, successor, double on n <= 32 via the CLI";
}

// --- 8, 9 ------------------------------------------------------------------

void gamma_equivalence(Report& r) {
    Generator gen(303);
    int total = 0, verified = 0, unresolved = 0;
    while (total < 100) {
        Process p = gen.process(1 + gen.below(30));
        auto redexes = beta_redexes(p);
        if (redexes.empty()) continue;
        ++total;
        Process q = beta_contract(p, redexes[gen.below(redexes.size())]);
        Verdict v = weak_bisim(p, q, 8, kDefaultObserveFuel);
        r.check(!v.is_refuted(), "refuted: " + print(p) + " vs " + print(q));
        if (v.is_verified()) {
            ++verified;
        } else if (v.reason == UnknownReason::Fuel) {
            ++unresolved;
        } else {
            r.check(false, "unknown (" + to_string(v.reason) + ") with resolved observables: " + print(p));
        }
    }
    r.summary = std::to_string(verified) + " verified, " + std::to_string(unresolved) + " fuel-bounded";
}

void corollary_bridge(Report& r) {
    Generator gen(404);
    int pairs = 0, verified = 0, attempts = 0;
    while (pairs < 50 && attempts < 100000) {
        ++attempts;
        Process p = gen.process(1 + gen.below(30));
        auto redexes = beta_redexes(p);
        if (redexes.empty()) continue;
        Process q = beta_contract(p, redexes[gen.below(redexes.size())]);
        std::string iota = gen.bits(6);
        std::string o = gen.bits(3);
        if (!weak_bisim(p, q, iota.size() + 2, kDefaultObserveFuel).is_verified()) continue;
        ++pairs;
        Verdict v = top_equiv(C(p, iota, o), C(q, iota, o));
        r.check(!v.is_refuted(), "refuted on input " + iota + ": " + print(p) + " vs " + print(q));
        if (v.is_verified()) ++verified;
    }
    r.check(pairs == 50, "only " + std::to_string(pairs) + " bisimilar pairs found");
    r.summary = std::to_string(pairs) + " pairs, " + std::to_string(verified) + " verified";
}

// --- 10, 11, 12 ------------------------------------------------------------

void copy_pole(Report& r) {
    Process copy = P("Y * (\\x. read (write0 x) (write1 x) end) :: nil");
    Verdict v = pole_member(Pole{TracePole{TraceSpec::Copy, 8, kDefaultRunFuel, false}}, copy);
    r.check(v.is_verified(), describe(v));
    r.summary = "inputs of length <= 8";
}

void rule_realizers(Report& r) {
    int scenarios = 0;
    for (const BatteryScenario& s : finite_pole_battery()) {
        ++scenarios;
        for (const Hypothesis& h : s.audits) r.check(audit_realizers(s.pole, h).is_verified(), s.name + ": audit");
        Verdict v = check_entailment(s.pole, s.sequent);
        r.check(v.is_verified(), s.name + ": " + describe(v));
    }
    r.check(scenarios == 10, "battery size " + std::to_string(scenarios));

    std::vector<Stack> rhos{stack("nil"), stack("end :: nil"), stack("cc :: (\\x. x) :: nil")};
    int properties = 0;
    for (const ContinuationCase& c : continuation_cases()) {
        for (const Term& t : c.realizers.terms) {
            r.check(!realizes(c.pole, t, c.value).is_refuted(), c.name + ": realizer");
            ++properties;
        }
        for (const Stack& pi : c.value.stacks) {
            Term k = Term::kont(pi);
            r.check(!realizes(c.pole, k, implication(c.realizers, bottom_sample())).is_refuted(), c.name + ": k_pi");
            ++properties;
            for (const Term& t : c.realizers.terms)
                for (const Stack& rho : rhos) {
                    auto next = eval_step(Process(k, rho.push(t)));
                    r.check(next && *next == Process(t, pi), c.name + ": restore");
                    ++properties;
                }
        }
    }
    r.summary = std::to_string(scenarios) + " scenarios, " + std::to_string(properties) + " continuation checks";
}

void consistency(Report& r) {
    FunctionTable table;
    for (std::uint64_t n = 0; n <= 8; ++n) table[n] = n;
    Pole pole{FunctionPole{table, kDefaultRunFuel}};
    std::vector<Term> candidates{T("\\x. x"), T("\\x y. x"), Term::call_cc()};
    std::vector<Stack> samples{stack("nil"), stack("end :: nil"), stack("(\\x. x) :: nil"),
                               parse_stack("R :: F :: (\\n. n) :: #0 :: F :: W :: #0 :: nil", prelude_definitions())};
    ConsistencyReport report = consistency_probe(pole, candidates, samples, {compile_function(T("\\n. n"))});
    for (const ProbeResult& p : report.probes)
        r.check(p.kind == ProbeResult::Kind::WitnessFound, print(p.candidate) + ": " + to_string(p.kind));
    r.check(report.probes.size() == 3, "probe count");
    r.check(report.audit_passed, "audit failed");
    r.check(!report.audited.empty(), "no member audited");
    for (const AuditedMember& m : report.audited)
        r.check(m.member.is_top() || m.contains_end, "member without end: " + print(m.member));
    r.summary = std::to_string(report.audited.size()) + " members audited";
}

struct Criterion {
    int number;
    const char* name;
    double limit;
    std::function<void(Report&)> body;
};

}  // namespace

int main() {
    std::vector<Criterion> criteria{
        {1, "rule fidelity", 1, rule_fidelity},
        {2, "determinism", 5, determinism},
        {3, "combinator contracts", 30, combinator_contracts},
        {4, "reader lemma", 30, reader_lemma},
        {5, "writer lemma", 30, writer_lemma},
        {6, "storage law", 30, storage_law},
        {7, "compiled functions", 60, turing_demo},
        {8, "gamma equivalence", 60, gamma_equivalence},
        {9, "top equivalence of bisimilar pairs", 60, corollary_bridge},
        {10, "copy pole", 60, copy_pole},
        {11, "rule realizers", 30, rule_realizers},
        {12, "consistency", 30, consistency},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        Report r;
        auto start = std::chrono::steady_clock::now();
        try {
            c.body(r);
        } catch (const std::exception& e) {
            r.check(false, std::string("exception: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.limit) r.check(false, "time limit exceeded");
        bool ok = r.failures == 0;
        if (!ok) ++failed;
        std::cout << (ok ? "PASS" : "FAIL") << " [" << c.number << "] " << c.name << " (" << std::fixed
                  << std::setprecision(3) << secs << " s / " << std::setprecision(0) << c.limit << " s)";
        if (!r.summary.empty()) std::cout << " " << r.summary;
        std::cout << "\n";
        for (const std::string& m : r.messages) std::cout << "    " << m << "\n";
        std::cout.flush();
    }
    return failed == 0 ? 0 : 1;
}
