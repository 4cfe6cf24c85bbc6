#include <doctest.h>

#include <fstream>

#include "kamio/combinators.hpp"
#include "kamio/scenario.hpp"

using namespace kamio;
using nlohmann::json;

namespace {

json sample(const char* name) {
    std::ifstream in(std::string(KAMIO_SOURCE_DIR) + "/samples/" + name);
    REQUIRE(in);
    return json::parse(in);
}

Status status_of(const json& j) {
    Status s = Status::Unknown;
    run_scenario(scenario_from_json(j, prelude_definitions()), s);
    return s;
}

}  // namespace

TEST_SUITE("scenario") {
    TEST_CASE("ax and peirce samples") {
        CHECK(status_of(sample("ax.json")) == Status::Verified);
        CHECK(status_of(sample("peirce.json")) == Status::Verified);
        CHECK(status_of(sample("copy_pole.json")) == Status::Verified);
    }

    TEST_CASE("effectful candidate is rejected") {
        CHECK_THROWS_AS(scenario_from_json(sample("effectful.json"), {}), NotProofLike);
    }

    TEST_CASE("consistency sample") {
        Status s = Status::Unknown;
        json report = run_scenario(scenario_from_json(sample("consistency.json"), prelude_definitions()), s);
        CHECK(s == Status::Verified);
        REQUIRE(report["probes"].size() == 3);
        for (const json& p : report["probes"]) CHECK(p["kind"] == "witness_found");
        REQUIRE(report["audited"].size() >= 1);
        for (const json& m : report["audited"]) CHECK(m["contains_end"] == true);
    }

    TEST_CASE("refuted entailment carries a witness") {
        json j = sample("ax.json");
        j["realizers"]["i"][0].push_back("cc");
        Status s = Status::Unknown;
        json out = run_scenario(scenario_from_json(j, {}), s);
        CHECK(s == Status::Refuted);
        CHECK(out["witness"]["index"] == "i");
        CHECK(out["witness"]["tuple"][0] == "cc");
        CHECK(out["witness"]["stack"] == "nil");
    }

    TEST_CASE("schema violations") {
        json base = sample("ax.json");
        auto broken = [&](auto edit) {
            json j = base;
            edit(j);
            return j;
        };
        CHECK_THROWS_AS(scenario_from_json(json::array(), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j.erase("pole"); }), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["kind"] = "proof"; }), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["pole"]["type"] = "magic"; }), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["fuel"] = -3; }), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["realizers"] = json::array(); }), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["realizers"]["zz"] = json::array(); }), {}),
                        SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["hypotheses"] = json::array(); }), {}), SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["predicates"][0]["stacks"] = 3; }), {}),
                        SchemaError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["candidate"] = "(\\x. x"; }), {}), ParseError);
        CHECK_THROWS_AS(scenario_from_json(broken([](json& j) { j["pole"]["seeds"][0] = "x * nil"; }), {}),
                        ClosednessError);
        json table = {{"type", "function"}, {"table", {{1, 2}, {1, 3}}}};
        CHECK_THROWS_AS(pole_from_json(table, {}, 10), SchemaError);
        json trace = {{"type", "trace"}, {"spec", "echo"}};
        CHECK_THROWS_AS(pole_from_json(trace, {}, 10), SchemaError);
    }

    TEST_CASE("scenario round trip") {
        for (const char* name : {"ax.json", "peirce.json", "copy_pole.json", "consistency.json"}) {
            CAPTURE(name);
            Scenario s = scenario_from_json(sample(name), prelude_definitions());
            json once = to_json(s);
            json twice = to_json(scenario_from_json(once, {}));
            CHECK(once == twice);
        }
    }

    TEST_CASE("pole round trip") {
        json j = {{"type", "union"},
                  {"members",
                   {{{"type", "finite"}, {"seeds", {"end * nil"}}, {"fuel", 5}},
                    {{"type", "trace"},
                     {"spec", "read_all_then_write"},
                     {"max_input_len", 3},
                     {"canonical_inputs_only", true},
                     {"fuel", 7}},
                    {{"type", "function"}, {"table", {{0, 1}}}, {"fuel", 9}}}}};
        CHECK(to_json(pole_from_json(j, {}, 1)) == j);
    }

    TEST_CASE("run result json") {
        RunResult r = run(ExecutionContext(parse_process("write0 (write1 end) * nil"), "", ""), 10);
        json j = to_json(r);
        CHECK(j["outcome"] == "terminated");
        CHECK(j["process"] == "TOP");
        CHECK(j["output"] == "10");
        CHECK(j["steps"] == 5);
        CHECK(j["trace"] == json({"tau", "w0", "tau", "w1", "e"}));
    }

    TEST_CASE("verdict json") {
        Witness w;
        w.actions = {Action::W0};
        w.input = "1";
        Verdict v = Verdict::refuted(w);
        json j = to_json(v);
        CHECK(j["status"] == "refuted");
        CHECK(j["witness"]["actions"] == json({"w0"}));
        CHECK(j["witness"]["input"] == "1");
        CHECK(to_json(Verdict::unknown(UnknownReason::Depth))["reason"] == "depth");
        CHECK_FALSE(to_json(Verdict::verified()).contains("witness"));
    }
}
