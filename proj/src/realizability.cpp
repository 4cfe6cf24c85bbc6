#include "kamio/realizability.hpp"

#include <algorithm>
#include <unordered_set>

#include "kamio/equivalence.hpp"

namespace kamio {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Verdict finite_member(const FinitePole& pole, const Process& p) {
    std::unordered_set<Process, ProcessHash> seeds(pole.seeds.begin(), pole.seeds.end());
    std::unordered_set<Process, ProcessHash> seen;
    Process cur = p;
    for (std::uint64_t steps = 0;; ++steps) {
        if (seeds.contains(cur)) return Verdict::verified();
        auto next = eval_step(cur);
        Witness w;
        w.process = cur;
        if (!next) {
            w.detail = "evaluation stops after " + std::to_string(steps) + " steps without reaching a seed";
            return Verdict::refuted(std::move(w));
        }
        if (!seen.insert(cur).second) {
            w.detail = "evaluation cycles without reaching a seed";
            return Verdict::refuted(std::move(w));
        }
        if (steps == pole.fuel) {
            w.detail = "no seed within " + std::to_string(pole.fuel) + " steps";
            return Verdict::unknown(UnknownReason::Fuel, std::move(w));
        }
        cur = std::move(*next);
    }
}

std::vector<std::string> inputs_up_to(std::size_t max_len, bool canonical_only) {
    std::vector<std::string> out{""};
    for (std::size_t len = 1; len <= max_len; ++len) {
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << len); ++bits) {
            std::string s(len, '0');
            for (std::size_t k = 0; k < len; ++k)
                if (bits & (std::uint64_t{1} << (len - 1 - k))) s[k] = '1';
            if (canonical_only && s.front() == '0') continue;
            out.push_back(std::move(s));
        }
    }
    return out;
}

Action read_label(char bit) { return bit == '0' ? Action::R0 : Action::R1; }
Action write_label(char bit) { return bit == '0' ? Action::W0 : Action::W1; }

// Position of the first label violating the spec for `input`, or labels.size()
// when the labels are a conforming prefix. `complete` is set when the labels
// form a whole conforming trace.
std::size_t trace_conformance(TraceSpec spec, const std::string& input, const std::vector<Action>& labels,
                              bool& complete) {
    complete = false;
    std::vector<Action> expected;
    if (spec == TraceSpec::Copy) {
        for (char b : input) {
            expected.push_back(read_label(b));
            expected.push_back(write_label(b));
        }
        expected.push_back(Action::REps);
        expected.push_back(Action::E);
        std::size_t i = 0;
        for (; i < labels.size(); ++i)
            if (i >= expected.size() || labels[i] != expected[i]) return i;
        complete = labels.size() == expected.size();
        return i;
    }
    for (char b : input) expected.push_back(read_label(b));
    expected.push_back(Action::REps);
    std::size_t i = 0;
    for (; i < labels.size() && i < expected.size(); ++i)
        if (labels[i] != expected[i]) return i;
    for (; i < labels.size(); ++i) {
        if (labels[i] == Action::W0 || labels[i] == Action::W1) continue;
        if (labels[i] == Action::E && i + 1 == labels.size()) {
            complete = true;
            return labels.size();
        }
        return i;
    }
    return i;
}

Verdict trace_member(const TracePole& pole, const Process& p) {
    std::optional<Verdict> unknown;
    for (const std::string& input : inputs_up_to(pole.max_input_len, pole.canonical_inputs_only)) {
        RunResult r = run(ExecutionContext(p, input, ""), pole.fuel);
        std::vector<Action> labels = r.labels();
        bool complete = false;
        std::size_t bad = trace_conformance(pole.spec, input, labels, complete);
        Witness w;
        w.input = input;
        w.actions = labels;
        if (bad < labels.size()) {
            w.actions.resize(bad + 1);
            w.detail = "trace deviates at action " + std::to_string(bad + 1);
            return Verdict::refuted(std::move(w));
        }
        if (r.outcome == Outcome::FuelExhausted) {
            if (!unknown) {
                w.detail = "fuel exhausted on a conforming prefix";
                unknown = Verdict::unknown(UnknownReason::Fuel, std::move(w));
            }
            continue;
        }
        if (r.outcome == Outcome::Stuck || !complete) {
            w.process = r.final.process;
            w.detail = "run " + to_string(r.outcome) + " before completing the trace";
            return Verdict::refuted(std::move(w));
        }
        if (pole.spec == TraceSpec::ReadAllThenWrite && r.final.output != input) {
            w.detail = "output '" + r.final.output + "' differs from the input";
            return Verdict::refuted(std::move(w));
        }
    }
    Verdict v = unknown ? std::move(*unknown) : Verdict::verified();
    v.note = "checked on inputs of length <= " + std::to_string(pole.max_input_len);
    return v;
}

}  // namespace

Verdict pole_member(const Pole& pole, const Process& p) {
    return std::visit(overloaded{
                          [&](const FinitePole& f) { return finite_member(f, p); },
                          [&](const FunctionPole& f) { return implements_on(p, f.table, f.fuel); },
                          [&](const TracePole& t) { return trace_member(t, p); },
                          [&](const UnionPole& u) {
                              std::optional<Verdict> first_refuted;
                              bool any_unknown = false;
                              for (const Pole& member : u.members) {
                                  Verdict v = pole_member(member, p);
                                  if (v.is_verified()) return v;
                                  if (v.is_unknown()) any_unknown = true;
                                  if (v.is_refuted() && !first_refuted) first_refuted = std::move(v);
                              }
                              if (any_unknown || !first_refuted)
                                  return Verdict::unknown(UnknownReason::Fuel);
                              return std::move(*first_refuted);
                          },
                      },
                      pole.kind);
}

// ---------------------------------------------------------------------------

TruthValue unite(const TruthValue& a, const TruthValue& b) {
    TruthValue out{a.stacks, a.all_stacks || b.all_stacks};
    for (const Stack& s : b.stacks)
        if (std::none_of(out.stacks.begin(), out.stacks.end(), [&](const Stack& x) { return alpha_equal(x, s); }))
            out.stacks.push_back(s);
    return out;
}

const TruthValue& Predicate::at(const Index& i) const {
    auto it = values.find(i);
    if (it == values.end()) throw Error("predicate has no index '" + i + "'");
    return it->second;
}

Predicate Predicate::constant(std::vector<Index> index_set, const TruthValue& value) {
    Predicate p{std::move(index_set), {}};
    for (const Index& i : p.index_set) p.values.emplace(i, value);
    return p;
}

void validate(const Predicate& p) {
    for (const Index& i : p.index_set)
        if (!p.values.contains(i)) throw Error("predicate has no value at index '" + i + "'");
    if (p.values.size() != p.index_set.size()) throw Error("predicate has values outside its index set");
}

Verdict realizes(const Pole& pole, const Term& t, const TruthValue& s) {
    if (!t.is_closed()) throw ClosednessError("realizer must be closed: " + print(t));
    std::optional<Verdict> unknown;
    std::string note;
    for (const Stack& pi : s.stacks) {
        Verdict v = pole_member(pole, Process(t, pi));
        if (!v.note.empty()) note = v.note;
        if (v.is_refuted()) {
            v.witness.stack = pi;
            return v;
        }
        if (v.is_unknown() && !unknown) {
            v.witness.stack = pi;
            unknown = std::move(v);
        }
    }
    Verdict out = unknown ? std::move(*unknown) : Verdict::verified();
    out.note = note;
    if (out.is_verified() && s.all_stacks) out.sampled = true;
    return out;
}

TruthValue implication(const RealizerList& realizers_of_antecedent, const TruthValue& consequent) {
    TruthValue out;
    for (const Term& u : realizers_of_antecedent.terms)
        for (const Stack& pi : consequent.stacks) out.stacks.push_back(pi.push(u));
    return out;
}

Predicate forall_along(const IndexMap& f, const Predicate& theta, const std::vector<Index>& target) {
    for (const Index& j : theta.index_set)
        if (!f.contains(j)) throw Error("map is not defined on index '" + j + "'");
    Predicate out{target, {}};
    for (const Index& i : target) out.values.emplace(i, TruthValue{});
    for (const Index& j : theta.index_set) {
        const Index& i = f.at(j);
        auto it = out.values.find(i);
        if (it == out.values.end()) throw Error("index '" + i + "' is outside the target set");
        it->second = unite(it->second, theta.at(j));
    }
    return out;
}

Predicate reindex(const IndexMap& f, const Predicate& phi) {
    Predicate out;
    for (const auto& [j, i] : f) {
        out.index_set.push_back(j);
        out.values.emplace(j, phi.at(i));
    }
    return out;
}

TruthValue encode(Connective c, const TruthValue& bottom, const std::vector<TruthValue>& operands,
                  const Antecedents& realizers) {
    auto need = [](const std::optional<RealizerList>& list, const char* what) -> const RealizerList& {
        if (!list) throw MissingRealizers(std::string("missing realizers for ") + what);
        return *list;
    };
    switch (c) {
        case Connective::Top:
            return implication(need(realizers.bottom, "the falsity antecedent"), bottom);
        case Connective::Not:
            return implication(need(realizers.lhs, "the negated formula"), bottom);
        case Connective::And:
            // (φ ⇒ (ψ ⇒ ⊥)) ⇒ ⊥; the inner implication needs only ψ's realizers
            // to be formed, its own realizers come from lhs_implies.
            need(realizers.lhs, "the left conjunct");
            need(realizers.rhs, "the right conjunct");
            return implication(need(realizers.lhs_implies, "phi => (psi => bottom)"), bottom);
        case Connective::Or:
            if (operands.size() < 2) throw Error("disjunction needs two operands");
            return implication(need(realizers.lhs_implies, "phi => bottom"), operands[1]);
    }
    throw Error("unknown connective");
}

// ---------------------------------------------------------------------------

void validate(const Sequent& seq) {
    validate(seq.conclusion);
    if (!seq.candidate.is_closed()) throw ClosednessError("candidate must be closed: " + print(seq.candidate));
    if (!is_proof_like(seq.candidate))
        throw NotProofLike("candidate is not proof-like: " + print(seq.candidate));
    for (const Hypothesis& h : seq.hypotheses) {
        validate(h.predicate);
        if (h.predicate.index_set != seq.conclusion.index_set)
            throw Error("hypothesis and conclusion have different index sets");
        for (const Index& i : seq.conclusion.index_set)
            if (!h.realizers.contains(i)) throw Error("no realizer list at index '" + i + "'");
    }
}

Verdict check_entailment(const Pole& pole, const Sequent& seq) {
    validate(seq);
    std::optional<Verdict> unknown;
    bool sampled = false;
    std::string note;
    for (const Index& i : seq.conclusion.index_set) {
        const TruthValue& psi = seq.conclusion.at(i);
        sampled = sampled || psi.all_stacks;
        std::vector<const std::vector<Term>*> lists;
        for (const Hypothesis& h : seq.hypotheses) lists.push_back(&h.realizers.at(i).terms);
        if (std::any_of(lists.begin(), lists.end(), [](auto* l) { return l->empty(); })) continue;
        std::vector<std::size_t> choice(lists.size(), 0);
        while (true) {
            std::vector<Term> tuple;
            for (std::size_t k = 0; k < lists.size(); ++k) tuple.push_back((*lists[k])[choice[k]]);
            for (const Stack& pi : psi.stacks) {
                Stack s = pi;
                for (auto it = tuple.rbegin(); it != tuple.rend(); ++it) s = s.push(*it);
                Verdict v = pole_member(pole, Process(seq.candidate, s));
                if (!v.note.empty()) note = v.note;
                if (v.is_verified()) continue;
                v.witness.index = i;
                v.witness.tuple = tuple;
                v.witness.stack = pi;
                if (v.is_refuted()) return v;
                if (!unknown) unknown = std::move(v);
            }
            std::size_t k = lists.size();
            while (k > 0 && ++choice[k - 1] == lists[k - 1]->size()) choice[--k] = 0;
            if (k == 0) break;
        }
    }
    Verdict out = unknown ? std::move(*unknown) : Verdict::verified();
    out.note = note;
    if (out.is_verified() && sampled) out.sampled = true;
    return out;
}

Verdict audit_realizers(const Pole& pole, const Hypothesis& h) {
    std::optional<Verdict> unknown;
    for (const Index& i : h.predicate.index_set) {
        auto it = h.realizers.find(i);
        if (it == h.realizers.end()) continue;
        for (const Term& u : it->second.terms) {
            Verdict v = realizes(pole, u, h.predicate.at(i));
            if (v.is_verified()) continue;
            v.witness.index = i;
            v.witness.tuple = {u};
            if (v.is_refuted()) return v;
            if (!unknown) unknown = std::move(v);
        }
    }
    return unknown ? std::move(*unknown) : Verdict::verified();
}

// ---------------------------------------------------------------------------

namespace {

void require_pure(const Term& t, const char* role) {
    if (!t.is_closed()) throw ClosednessError(std::string(role) + " must be closed: " + print(t));
    if (!is_proof_like(t)) throw NotProofLike(std::string(role) + " is not proof-like: " + print(t));
}

Symbol numbered(const char* stem, std::size_t k) { return Symbol::intern(stem + std::to_string(k)); }

Term lams(const std::vector<Symbol>& binders, Term body) {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = Term::lam(*it, std::move(body));
    return body;
}

}  // namespace

Term rule_realizer(const Rule& rule) {
    static const Symbol x = Symbol::intern("x");
    return std::visit(
        overloaded{
            [](const rules::Ax&) { return Term::lam(x, Term::var(x)); },
            [](const rules::BotE& r) {
                require_pure(r.t, "hypothesis realizer");
                return r.t;
            },
            [](const rules::ImpI& r) {
                require_pure(r.t, "hypothesis realizer");
                return r.t;
            },
            [](const rules::ImpE& r) {
                require_pure(r.t, "implication realizer");
                require_pure(r.u, "antecedent realizer");
                std::vector<Symbol> xs, ys;
                for (std::size_t k = 1; k <= r.n; ++k) xs.push_back(numbered("x", k));
                for (std::size_t k = 1; k <= r.m; ++k) ys.push_back(numbered("y", k));
                Term inner = r.u;
                for (Symbol s : xs) inner = Term::app(inner, Term::var(s));
                Term body = r.t;
                for (Symbol s : ys) body = Term::app(body, Term::var(s));
                body = Term::app(body, inner);
                std::vector<Symbol> binders = xs;
                binders.insert(binders.end(), ys.begin(), ys.end());
                return lams(binders, body);
            },
            [](const rules::Weaken& r) {
                require_pure(r.t, "hypothesis realizer");
                return Term::lam(x, r.t);
            },
            [](const rules::Contract& r) {
                require_pure(r.t, "hypothesis realizer");
                return Term::lam(x, Term::apps(r.t, {Term::var(x), Term::var(x)}));
            },
            [](const rules::Exchange& r) {
                require_pure(r.t, "hypothesis realizer");
                std::vector<std::size_t> sorted = r.sigma;
                std::sort(sorted.begin(), sorted.end());
                for (std::size_t k = 0; k < sorted.size(); ++k)
                    if (sorted[k] != k + 1) throw Error("sigma is not a permutation of 1..n");
                std::vector<Symbol> binders;
                for (std::size_t s : r.sigma) binders.push_back(numbered("x", s));
                Term body = r.t;
                for (std::size_t k = 1; k <= r.sigma.size(); ++k) body = Term::app(body, Term::var(numbered("x", k)));
                return lams(binders, body);
            },
            [](const rules::Peirce&) { return Term::call_cc(); },
        },
        rule);
}

// ---------------------------------------------------------------------------

std::string to_string(ProbeResult::Kind k) {
    switch (k) {
        case ProbeResult::Kind::WitnessFound: return "witness_found";
        case ProbeResult::Kind::NoWitnessInSample: return "no_witness_in_sample";
        case ProbeResult::Kind::Unknown: return "unknown";
    }
    return "?";
}

ConsistencyReport consistency_probe(const Pole& pole, const std::vector<Term>& candidates,
                                    const std::vector<Stack>& stack_samples,
                                    const std::vector<Process>& extra_members) {
    for (const Term& t : candidates) require_pure(t, "candidate");
    ConsistencyReport report;
    auto audit = [&](const Process& member) {
        AuditedMember a{member, contains_effect(member), (member.constants() & kHasEnd) != 0};
        if (!member.is_top() && !a.contains_effect) report.audit_passed = false;
        report.audited.push_back(std::move(a));
    };
    for (const Term& t : candidates) {
        ProbeResult probe{t, ProbeResult::Kind::NoWitnessInSample, std::nullopt};
        bool unknown = false;
        for (const Stack& pi : stack_samples) {
            Process p(t, pi);
            Verdict v = pole_member(pole, p);
            if (v.is_refuted()) {
                if (!probe.witness) probe.witness = pi;
            } else if (v.is_verified()) {
                audit(p);
            } else {
                unknown = true;
            }
        }
        if (probe.witness)
            probe.kind = ProbeResult::Kind::WitnessFound;
        else if (unknown)
            probe.kind = ProbeResult::Kind::Unknown;
        report.probes.push_back(std::move(probe));
    }
    for (const Process& p : extra_members)
        if (pole_member(pole, p).is_verified()) audit(p);
    return report;
}

}  // namespace kamio
