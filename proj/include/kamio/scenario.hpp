#pragma once

// JSON encodings of poles, realizability scenarios, run results and verdicts.
//
// Scenario layout:
//   {"kind": "entailment" | "realizes" | "consistency",
//    "fuel": N,
//    "pole": {"type": "finite", "seeds": [proc...], "fuel": N}
//          | {"type": "function", "table": [[n, m]...], "fuel": N}
//          | {"type": "trace", "spec": "copy" | "read_all_then_write",
//             "max_input_len": N, "canonical_inputs_only": bool, "fuel": N}
//          | {"type": "union", "members": [pole...]},
//    entailment:  "predicates": [{"index": i, "stacks": [stack...], "all_stacks": bool}...],
//                 "realizers": {i: [[term...] per hypothesis]},
//                 "hypotheses": [[{"index", "stacks", "all_stacks"}...] per hypothesis],
//                 "candidate": term
//    realizes:    "term": term, "truth_value": {"stacks": [...], "all_stacks": bool}
//    consistency: "candidates": [term...], "stack_samples": [stack...], "members": [proc...]}
//
// Terms, stacks and processes are strings in the concrete syntax, resolved
// against the definitions passed in.

#include <string>
#include <variant>

#include <json.hpp>

#include "kamio/machine.hpp"
#include "kamio/realizability.hpp"
#include "kamio/verdict.hpp"

namespace kamio {

class SchemaError : public Error {
public:
    using Error::Error;
};

struct EntailmentScenario {
    Pole pole;
    Sequent sequent;
};

struct RealizesScenario {
    Pole pole;
    Term term;
    TruthValue value;
};

struct ConsistencyScenario {
    Pole pole;
    std::vector<Term> candidates;
    std::vector<Stack> stack_samples;
    std::vector<Process> members;
};

using Scenario = std::variant<EntailmentScenario, RealizesScenario, ConsistencyScenario>;

/// Throws SchemaError for malformed documents and the parser's errors for
/// malformed terms.
Scenario scenario_from_json(const nlohmann::json& j, const Definitions& defs);
Pole pole_from_json(const nlohmann::json& j, const Definitions& defs, std::uint64_t default_fuel);

nlohmann::json to_json(const Pole& p);
nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const RunResult& r);
nlohmann::json to_json(const ConsistencyReport& r);

/// Runs the check the scenario asks for and returns its JSON report.
/// `status` receives the overall status (consistency: Verified when every
/// probe found a witness and the audit passed, Refuted otherwise).
nlohmann::json run_scenario(const Scenario& s, Status& status);

}  // namespace kamio
