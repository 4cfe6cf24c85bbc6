#include "kamio/scenario.hpp"

namespace kamio {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

const json& field(const json& j, const char* key) {
    if (!j.is_object()) throw SchemaError("expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
    return *it;
}

const json& array_field(const json& j, const char* key) {
    const json& a = field(j, key);
    if (!a.is_array()) throw SchemaError(std::string("field '") + key + "' must be an array");
    return a;
}

std::string string_of(const json& j, const char* what) {
    if (!j.is_string()) throw SchemaError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

std::uint64_t natural_of(const json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw SchemaError(std::string(what) + " must be a natural number");
    return j.get<std::uint64_t>();
}

std::uint64_t natural_or(const json& j, const char* key, std::uint64_t fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : natural_of(*it, key);
}

bool bool_or(const json& j, const char* key, bool fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) throw SchemaError(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
}

std::vector<Term> terms_of(const json& a, const Definitions& defs) {
    if (!a.is_array()) throw SchemaError("expected an array of terms");
    std::vector<Term> out;
    for (const json& t : a) out.push_back(parse_term(string_of(t, "term"), defs));
    return out;
}

std::vector<Stack> stacks_of(const json& a, const Definitions& defs) {
    if (!a.is_array()) throw SchemaError("expected an array of stacks");
    std::vector<Stack> out;
    for (const json& s : a) out.push_back(parse_stack(string_of(s, "stack"), defs));
    return out;
}

std::vector<Process> processes_of(const json& a, const Definitions& defs) {
    if (!a.is_array()) throw SchemaError("expected an array of processes");
    std::vector<Process> out;
    for (const json& p : a) out.push_back(parse_process(string_of(p, "process"), defs));
    return out;
}

TruthValue truth_value_of(const json& j, const Definitions& defs) {
    return TruthValue{stacks_of(field(j, "stacks"), defs), bool_or(j, "all_stacks", false)};
}

Predicate predicate_of(const json& a, const Definitions& defs) {
    if (!a.is_array()) throw SchemaError("a predicate is an array of {index, stacks}");
    Predicate p;
    for (const json& entry : a) {
        Index i = string_of(field(entry, "index"), "index");
        if (p.values.contains(i)) throw SchemaError("duplicate index '" + i + "'");
        p.index_set.push_back(i);
        p.values.emplace(i, truth_value_of(entry, defs));
    }
    return p;
}

std::vector<std::string> strings(const std::vector<Term>& ts) {
    std::vector<std::string> out;
    for (const Term& t : ts) out.push_back(print(t));
    return out;
}

std::vector<std::string> strings(const std::vector<Stack>& ss) {
    std::vector<std::string> out;
    for (const Stack& s : ss) out.push_back(print(s));
    return out;
}

json predicate_json(const Predicate& p) {
    json a = json::array();
    for (const Index& i : p.index_set) {
        const TruthValue& v = p.at(i);
        a.push_back({{"index", i}, {"stacks", strings(v.stacks)}, {"all_stacks", v.all_stacks}});
    }
    return a;
}

std::string trace_spec_name(TraceSpec s) { return s == TraceSpec::Copy ? "copy" : "read_all_then_write"; }

EntailmentScenario entailment_of(const json& j, Pole pole, const Definitions& defs) {
    Sequent seq{{}, predicate_of(array_field(j, "predicates"), defs),
                parse_term(string_of(field(j, "candidate"), "candidate"), defs)};

    const json& realizers = field(j, "realizers");
    if (!realizers.is_object()) throw SchemaError("'realizers' maps each index to per-hypothesis term lists");
    std::optional<std::size_t> arity;
    for (const Index& i : seq.conclusion.index_set) {
        auto it = realizers.find(i);
        if (it == realizers.end()) throw SchemaError("no realizers for index '" + i + "'");
        if (!it->is_array()) throw SchemaError("realizers of '" + i + "' must be an array");
        if (arity && *arity != it->size()) throw SchemaError("indices disagree on the number of hypotheses");
        arity = it->size();
    }
    for (auto it = realizers.begin(); it != realizers.end(); ++it)
        if (!seq.conclusion.values.contains(it.key()))
            throw SchemaError("realizers given for unknown index '" + it.key() + "'");
    std::size_t n = arity.value_or(0);

    const json* hyps = j.contains("hypotheses") ? &array_field(j, "hypotheses") : nullptr;
    if (hyps && hyps->size() != n) throw SchemaError("'hypotheses' and 'realizers' disagree on the number of hypotheses");
    for (std::size_t k = 0; k < n; ++k) {
        Hypothesis h;
        if (hyps) {
            h.predicate = predicate_of((*hyps)[k], defs);
        } else {
            h.predicate = Predicate::constant(seq.conclusion.index_set, TruthValue{});
        }
        for (const Index& i : seq.conclusion.index_set)
            h.realizers.emplace(i, RealizerList{terms_of(realizers.at(i)[k], defs)});
        seq.hypotheses.push_back(std::move(h));
    }
    validate(seq);
    return EntailmentScenario{std::move(pole), std::move(seq)};
}

}  // namespace

Pole pole_from_json(const json& j, const Definitions& defs, std::uint64_t default_fuel) {
    std::string type = string_of(field(j, "type"), "pole type");
    if (type == "finite") {
        return Pole{FinitePole{processes_of(field(j, "seeds"), defs), natural_or(j, "fuel", default_fuel)}};
    }
    if (type == "function") {
        FunctionPole f;
        f.fuel = natural_or(j, "fuel", default_fuel);
        for (const json& row : array_field(j, "table")) {
            if (!row.is_array() || row.size() != 2) throw SchemaError("table rows are [n, m] pairs");
            std::uint64_t n = natural_of(row[0], "table entry");
            if (!f.table.emplace(n, natural_of(row[1], "table entry")).second)
                throw SchemaError("duplicate table row " + std::to_string(n));
        }
        return Pole{std::move(f)};
    }
    if (type == "trace") {
        TracePole t;
        std::string spec = string_of(field(j, "spec"), "trace spec");
        if (spec == "copy")
            t.spec = TraceSpec::Copy;
        else if (spec == "read_all_then_write")
            t.spec = TraceSpec::ReadAllThenWrite;
        else
            throw SchemaError("unknown trace spec '" + spec + "'");
        t.max_input_len = natural_or(j, "max_input_len", t.max_input_len);
        if (t.max_input_len > 20) throw SchemaError("max_input_len above 20");
        t.fuel = natural_or(j, "fuel", default_fuel);
        t.canonical_inputs_only = bool_or(j, "canonical_inputs_only", false);
        return Pole{t};
    }
    if (type == "union") {
        UnionPole u;
        for (const json& m : array_field(j, "members")) u.members.push_back(pole_from_json(m, defs, default_fuel));
        return Pole{std::move(u)};
    }
    throw SchemaError("unknown pole type '" + type + "'");
}

Scenario scenario_from_json(const json& j, const Definitions& defs) {
    try {
        if (!j.is_object()) throw SchemaError("a scenario is a JSON object");
        std::string kind = j.contains("kind") ? string_of(j.at("kind"), "kind") : "entailment";
        std::uint64_t fuel = natural_or(j, "fuel", kDefaultPoleFuel);
        Pole pole = pole_from_json(field(j, "pole"), defs, fuel);
        if (kind == "entailment") return entailment_of(j, std::move(pole), defs);
        if (kind == "realizes") {
            Term t = parse_term(string_of(field(j, "term"), "term"), defs);
            if (!t.is_closed()) throw ClosednessError("realizer must be closed: " + print(t));
            return RealizesScenario{std::move(pole), t, truth_value_of(field(j, "truth_value"), defs)};
        }
        if (kind == "consistency") {
            ConsistencyScenario c{std::move(pole), terms_of(field(j, "candidates"), defs),
                                  stacks_of(field(j, "stack_samples"), defs), {}};
            if (j.contains("members")) c.members = processes_of(j.at("members"), defs);
            for (const Term& t : c.candidates) {
                if (!t.is_closed()) throw ClosednessError("candidate must be closed: " + print(t));
                if (!is_proof_like(t)) throw NotProofLike("candidate is not proof-like: " + print(t));
            }
            return c;
        }
        throw SchemaError("unknown scenario kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw SchemaError(e.what());
    }
}

json to_json(const Pole& p) {
    return std::visit(overloaded{
                          [](const FinitePole& f) -> json {
                              std::vector<std::string> seeds;
                              for (const Process& s : f.seeds) seeds.push_back(print(s));
                              return {{"type", "finite"}, {"seeds", seeds}, {"fuel", f.fuel}};
                          },
                          [](const FunctionPole& f) -> json {
                              json rows = json::array();
                              for (auto [n, m] : f.table) rows.push_back({n, m});
                              return {{"type", "function"}, {"table", rows}, {"fuel", f.fuel}};
                          },
                          [](const TracePole& t) -> json {
                              return {{"type", "trace"},
                                      {"spec", trace_spec_name(t.spec)},
                                      {"max_input_len", t.max_input_len},
                                      {"canonical_inputs_only", t.canonical_inputs_only},
                                      {"fuel", t.fuel}};
                          },
                          [](const UnionPole& u) -> json {
                              json members = json::array();
                              for (const Pole& m : u.members) members.push_back(to_json(m));
                              return {{"type", "union"}, {"members", members}};
                          },
                      },
                      p.kind);
}

json to_json(const Scenario& s) {
    return std::visit(overloaded{
                          [](const EntailmentScenario& e) -> json {
                              const Sequent& seq = e.sequent;
                              json realizers = json::object();
                              for (const Index& i : seq.conclusion.index_set) {
                                  json per = json::array();
                                  for (const Hypothesis& h : seq.hypotheses)
                                      per.push_back(strings(h.realizers.at(i).terms));
                                  realizers[i] = per;
                              }
                              json hyps = json::array();
                              for (const Hypothesis& h : seq.hypotheses) hyps.push_back(predicate_json(h.predicate));
                              return {{"kind", "entailment"},
                                      {"pole", to_json(e.pole)},
                                      {"predicates", predicate_json(seq.conclusion)},
                                      {"realizers", realizers},
                                      {"hypotheses", hyps},
                                      {"candidate", print(seq.candidate)}};
                          },
                          [](const RealizesScenario& r) -> json {
                              return {{"kind", "realizes"},
                                      {"pole", to_json(r.pole)},
                                      {"term", print(r.term)},
                                      {"truth_value",
                                       {{"stacks", strings(r.value.stacks)}, {"all_stacks", r.value.all_stacks}}}};
                          },
                          [](const ConsistencyScenario& c) -> json {
                              std::vector<std::string> members;
                              for (const Process& p : c.members) members.push_back(print(p));
                              return {{"kind", "consistency"},
                                      {"pole", to_json(c.pole)},
                                      {"candidates", strings(c.candidates)},
                                      {"stack_samples", strings(c.stack_samples)},
                                      {"members", members}};
                          },
                      },
                      s);
}

json to_json(const Witness& w) {
    json j = json::object();
    if (!w.actions.empty()) {
        std::vector<std::string> acts;
        for (Action a : w.actions) acts.push_back(to_string(a));
        j["actions"] = acts;
    }
    if (w.row) j["row"] = *w.row;
    if (w.input) j["input"] = *w.input;
    if (w.index) j["index"] = *w.index;
    if (w.stack) j["stack"] = print(*w.stack);
    if (!w.tuple.empty()) j["tuple"] = strings(w.tuple);
    if (w.process) j["process"] = print(*w.process);
    if (!w.detail.empty()) j["detail"] = w.detail;
    return j;
}

json to_json(const Verdict& v) {
    json j = {{"status", to_string(v.status)}};
    if (v.is_unknown()) j["reason"] = to_string(v.reason);
    if (v.sampled) j["sampled"] = true;
    if (!v.note.empty()) j["note"] = v.note;
    if (!v.witness.empty()) j["witness"] = to_json(v.witness);
    return j;
}

json to_json(const RunResult& r) {
    std::vector<std::string> trace;
    for (Action a : r.trace) trace.push_back(to_string(a));
    return {{"outcome", to_string(r.outcome)},
            {"process", print(r.final.process)},
            {"input", r.final.input},
            {"output", r.final.output},
            {"steps", r.steps},
            {"trace", trace}};
}

json to_json(const ConsistencyReport& r) {
    json probes = json::array();
    for (const ProbeResult& p : r.probes) {
        json e = {{"candidate", print(p.candidate)}, {"kind", to_string(p.kind)}};
        if (p.witness) e["witness"] = print(*p.witness);
        probes.push_back(e);
    }
    json audited = json::array();
    for (const AuditedMember& m : r.audited)
        audited.push_back(
            {{"member", print(m.member)}, {"contains_effect", m.contains_effect}, {"contains_end", m.contains_end}});
    return {{"probes", probes}, {"audited", audited}, {"audit_passed", r.audit_passed}};
}

json run_scenario(const Scenario& s, Status& status) {
    return std::visit(overloaded{
                          [&](const EntailmentScenario& e) -> json {
                              Verdict v = check_entailment(e.pole, e.sequent);
                              status = v.status;
                              return to_json(v);
                          },
                          [&](const RealizesScenario& r) -> json {
                              Verdict v = realizes(r.pole, r.term, r.value);
                              status = v.status;
                              return to_json(v);
                          },
                          [&](const ConsistencyScenario& c) -> json {
                              ConsistencyReport rep = consistency_probe(c.pole, c.candidates, c.stack_samples, c.members);
                              bool all_found = true, any_unknown = false;
                              for (const ProbeResult& p : rep.probes) {
                                  all_found = all_found && p.kind == ProbeResult::Kind::WitnessFound;
                                  any_unknown = any_unknown || p.kind == ProbeResult::Kind::Unknown;
                              }
                              if (all_found && rep.audit_passed)
                                  status = Status::Verified;
                              else if (any_unknown && rep.audit_passed)
                                  status = Status::Unknown;
                              else
                                  status = Status::Refuted;
                              json j = to_json(rep);
                              j["status"] = to_string(status);
                              return j;
                          },
                      },
                      s);
}

}  // namespace kamio
