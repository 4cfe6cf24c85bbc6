#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kamio/combinators.hpp"
#include "kamio/equivalence.hpp"
#include "kamio/machine.hpp"
#include "kamio/realizability.hpp"
#include "kamio/scenario.hpp"
#include "kamio/syntax.hpp"

using namespace kamio;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kError = 1, kRefuted = 2, kUnknown = 3 };

struct Config {
    std::uint64_t fuel = kDefaultRunFuel;
    bool fuel_given = false;
    std::uint64_t depth = kDefaultDepth;
    bool prelude = false;
    std::string prelude_path;
    std::string format = "text";
    bool json() const { return format == "json"; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Definitions definitions(const Config& cfg) {
    Definitions defs;
    if (cfg.prelude) defs = prelude_definitions();
    if (!cfg.prelude_path.empty())
        for (auto& [name, term] : parse_definitions(read_file(cfg.prelude_path), defs))
            defs.insert_or_assign(name, term);
    return defs;
}

std::string join(const std::vector<Action>& actions) {
    std::string out;
    for (Action a : actions) {
        if (!out.empty()) out += ' ';
        out += to_string(a);
    }
    return out;
}

int exit_for(Status s) {
    switch (s) {
        case Status::Verified: return kOk;
        case Status::Refuted: return kRefuted;
        case Status::Unknown: return kUnknown;
    }
    return kError;
}

int report_verdict(const Config& cfg, const Verdict& v) {
    if (cfg.json())
        std::cout << to_json(v).dump(2) << '\n';
    else
        std::cout << describe(v) << '\n';
    return exit_for(v.status);
}

int cmd_parse(const Config& cfg, const std::string& file, const std::string& as) {
    Definitions defs = definitions(cfg);
    std::string text = read_file(file);
    std::string printed;
    if (as == "term")
        printed = print(parse_term(text, defs));
    else if (as == "stack")
        printed = print(parse_stack(text, defs));
    else
        printed = print(parse_process(text, defs));
    if (cfg.json())
        std::cout << json{{"kind", as}, {"printed", printed}}.dump(2) << '\n';
    else
        std::cout << printed << '\n';
    return kOk;
}

int cmd_run(const Config& cfg, const std::string& file, const std::string& input, bool trace) {
    Process p = parse_process(read_file(file), definitions(cfg));
    RunResult r = run(ExecutionContext(p, input, ""), cfg.fuel);
    if (cfg.json()) {
        json j = to_json(r);
        if (!trace) j.erase("trace");
        std::vector<std::string> labels;
        for (Action a : r.labels()) labels.push_back(to_string(a));
        j["labels"] = labels;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "outcome: " << to_string(r.outcome) << '\n'
                  << "process: " << print(r.final.process) << '\n'
                  << "input: " << r.final.input << '\n'
                  << "output: " << r.final.output << '\n'
                  << "steps: " << r.steps << '\n'
                  << "labels: " << join(r.labels()) << '\n';
        if (trace) {
            std::cout << "trace:\n";
            for (Action a : r.trace) std::cout << to_string(a) << '\n';
        }
    }
    switch (r.outcome) {
        case Outcome::Terminated: return kOk;
        case Outcome::Stuck: return kRefuted;
        case Outcome::FuelExhausted: return kUnknown;
    }
    return kError;
}

int cmd_bisim(const Config& cfg, const std::string& a, const std::string& b) {
    Definitions defs = definitions(cfg);
    Process p = parse_process(read_file(a), defs);
    Process q = parse_process(read_file(b), defs);
    return report_verdict(cfg, weak_bisim(p, q, cfg.depth, cfg.fuel));
}

int cmd_topequiv(const Config& cfg, const std::string& a, const std::string& b, const std::string& input,
                 const std::string& output, const std::optional<std::string>& input_b,
                 const std::optional<std::string>& output_b) {
    Definitions defs = definitions(cfg);
    ExecutionContext ca(parse_process(read_file(a), defs), input, output);
    ExecutionContext cb(parse_process(read_file(b), defs), input_b.value_or(input), output_b.value_or(output));
    return report_verdict(cfg, top_equiv(ca, cb, cfg.fuel));
}

int cmd_compile_fn(const Config& cfg, const std::string& file, const std::string& out) {
    Process p = compile_function(parse_term(read_file(file), definitions(cfg)));
    std::string text = print(p) + '\n';
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f || !(f << text)) throw Error("cannot write '" + out + "'");
    }
    return kOk;
}

FunctionTable read_table(const std::string& path) {
    FunctionTable table;
    std::istringstream in(read_file(path));
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto tab = line.find('\t');
        auto natural = [&](std::string_view s) {
            if (s.empty() || s.find_first_not_of("0123456789") != std::string_view::npos || s.size() > 19)
                throw Error(path + ":" + std::to_string(lineno) + ": expected 'n<TAB>m' with naturals n and m");
            return std::stoull(std::string(s));
        };
        if (tab == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected 'n<TAB>m' with naturals n and m");
        std::uint64_t n = natural(std::string_view(line).substr(0, tab));
        std::uint64_t m = natural(std::string_view(line).substr(tab + 1));
        if (!table.emplace(n, m).second)
            throw Error(path + ":" + std::to_string(lineno) + ": duplicate row " + std::to_string(n));
    }
    return table;
}

int cmd_verify_impl(const Config& cfg, const std::string& file, const std::string& table_path) {
    Process p = parse_process(read_file(file), definitions(cfg));
    FunctionTable table = read_table(table_path);
    json rows = json::array();
    for (auto [n, m] : table) {
        RunResult r = run(ExecutionContext(p, bin(n), ""), cfg.fuel);
        Verdict row = implements_on(p, FunctionTable{{n, m}}, cfg.fuel);
        if (cfg.json()) {
            rows.push_back({{"n", n},
                            {"expected", bin(m)},
                            {"outcome", to_string(r.outcome)},
                            {"output", r.final.output},
                            {"steps", r.steps},
                            {"status", to_string(row.status)}});
        } else {
            std::cout << n << "\t" << m << "\texpected '" << bin(m) << "'\tgot '" << r.final.output << "' ("
                      << to_string(r.outcome) << ", " << r.steps << " steps)\t" << to_string(row.status) << '\n';
        }
    }
    Verdict v = implements_on(p, table, cfg.fuel);
    if (cfg.json()) {
        json j = to_json(v);
        j["rows"] = rows;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << describe(v) << '\n';
    }
    return exit_for(v.status);
}

int cmd_realize(const Config& cfg, const std::string& file) {
    json doc;
    try {
        doc = json::parse(read_file(file));
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (cfg.fuel_given && doc.is_object() && !doc.contains("fuel")) doc["fuel"] = cfg.fuel;
    Scenario s = scenario_from_json(doc, definitions(cfg));
    Status status = Status::Unknown;
    json report = run_scenario(s, status);
    if (cfg.json()) {
        std::cout << report.dump(2) << '\n';
    } else if (std::holds_alternative<ConsistencyScenario>(s)) {
        for (const json& p : report["probes"]) {
            std::cout << "probe " << p["candidate"].get<std::string>() << ": " << p["kind"].get<std::string>();
            if (p.contains("witness")) std::cout << " (stack " << p["witness"].get<std::string>() << ")";
            std::cout << '\n';
        }
        for (const json& m : report["audited"])
            std::cout << "member " << m["member"].get<std::string>() << ": effect "
                      << (m["contains_effect"].get<bool>() ? "yes" : "no") << ", end "
                      << (m["contains_end"].get<bool>() ? "yes" : "no") << '\n';
        std::cout << "audit " << (report["audit_passed"].get<bool>() ? "passed" : "failed") << '\n'
                  << to_string(status) << '\n';
    } else {
        std::cout << report.dump(2) << '\n';
    }
    return exit_for(status);
}

int cmd_decode(const Config& cfg, const std::string& file) {
    Term t = parse_term(read_file(file), definitions(cfg));
    std::optional<std::uint64_t> n;
    try {
        n = decode_numeral(t, cfg.fuel);
    } catch (const MalformedOutput& e) {
        if (cfg.json())
            std::cout << json{{"status", "malformed"}, {"detail", e.what()}}.dump(2) << '\n';
        else
            std::cout << "malformed: " << e.what() << '\n';
        return kRefuted;
    }
    if (cfg.json()) {
        json j = {{"status", n ? "decoded" : "unknown"}};
        if (n) j["value"] = *n;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << (n ? std::to_string(*n) : std::string("unknown: no clean termination within fuel")) << '\n';
    }
    return n ? kOk : kUnknown;
}

int cmd_prelude_list(const Config& cfg) {
    Definitions defs = prelude_definitions();
    if (!cfg.prelude_path.empty())
        for (auto& [name, term] : parse_definitions(read_file(cfg.prelude_path), defs))
            defs.insert_or_assign(name, term);
    if (cfg.json()) {
        json j = json::object();
        for (const auto& [name, term] : defs) j[name] = print(term);
        std::cout << j.dump(2) << '\n';
    } else {
        for (const auto& [name, term] : defs) std::cout << name << " = " << print(term) << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"kamio: Krivine machine with I/O, bisimulation and realizability checks"};
    app.require_subcommand(1);

    Config cfg;
    if (const char* env = std::getenv("KAMIO_FUEL")) {
        try {
            cfg.fuel = std::stoull(env);
        } catch (const std::exception&) {
            std::cerr << "error: KAMIO_FUEL is not a natural number\n";
            return kError;
        }
    }

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--fuel", cfg.fuel, "step budget")->each([&](const std::string&) { cfg.fuel_given = true; });
        sub->add_flag("--prelude", cfg.prelude, "bring the library combinators into scope");
        sub->add_option("--prelude-file", cfg.prelude_path, "file of 'name = term;' definitions");
        sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));
    };

    std::string file, file_b, input, output, table, out_path, as = "process";
    std::optional<std::string> input_b, output_b;
    bool trace = false;

    auto* parse = app.add_subcommand("parse", "parse and pretty-print a file");
    parse->add_option("file", file)->required();
    parse->add_option("--as", as, "syntactic category")->check(CLI::IsMember({"process", "term", "stack"}));
    add_common(parse);

    auto* run_cmd = app.add_subcommand("run", "execute a process");
    auto* trace_cmd = app.add_subcommand("trace", "execute a process and print its full trace");
    for (auto* sub : {run_cmd, trace_cmd}) {
        sub->add_option("file", file)->required();
        sub->add_option("--input", input, "input bit string");
        add_common(sub);
    }
    run_cmd->add_flag("--trace", trace, "print every action, τ included");

    auto* bisim = app.add_subcommand("bisim", "bounded weak bisimulation check");
    auto* topequiv = app.add_subcommand("topequiv", "TOP-equivalence of two execution contexts");
    for (auto* sub : {bisim, topequiv}) {
        sub->add_option("file_a", file)->required();
        sub->add_option("file_b", file_b)->required();
        add_common(sub);
    }
    bisim->add_option("--depth", cfg.depth, "bound on visible actions per branch");
    topequiv->add_option("--input", input, "input of both contexts");
    topequiv->add_option("--output", output, "initial output of both contexts");
    topequiv->add_option("--input-b", input_b, "input of the second context");
    topequiv->add_option("--output-b", output_b, "initial output of the second context");

    auto* compile = app.add_subcommand("compile-fn", "compile a numeral function to an I/O process");
    compile->add_option("file", file)->required();
    compile->add_option("-o,--output", out_path, "output file (stdout when absent)");
    add_common(compile);

    auto* verify = app.add_subcommand("verify-impl", "check a process against a function table");
    verify->add_option("file", file)->required();
    verify->add_option("--table", table, "TSV file of n<TAB>m rows")->required();
    add_common(verify);

    auto* realize = app.add_subcommand("realize", "check a realizability scenario");
    realize->add_option("scenario", file)->required();
    add_common(realize);

    auto* decode = app.add_subcommand("decode", "decode a numeral through the writer");
    decode->add_option("file", file)->required();
    add_common(decode);

    auto* prelude_list = app.add_subcommand("prelude-list", "list the library combinators");
    prelude_list->add_option("--prelude-file", cfg.prelude_path, "additional definitions");
    prelude_list->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (!is_bit_string(input) || !is_bit_string(output) || (input_b && !is_bit_string(*input_b)) ||
            (output_b && !is_bit_string(*output_b)))
            throw Error("bit strings may only contain 0 and 1");
        if (parse->parsed()) return cmd_parse(cfg, file, as);
        if (run_cmd->parsed()) return cmd_run(cfg, file, input, trace);
        if (trace_cmd->parsed()) return cmd_run(cfg, file, input, true);
        if (bisim->parsed()) return cmd_bisim(cfg, file, file_b);
        if (topequiv->parsed()) return cmd_topequiv(cfg, file, file_b, input, output, input_b, output_b);
        if (compile->parsed()) return cmd_compile_fn(cfg, file, out_path);
        if (verify->parsed()) return cmd_verify_impl(cfg, file, table);
        if (realize->parsed()) return cmd_realize(cfg, file);
        if (decode->parsed()) return cmd_decode(cfg, file);
        if (prelude_list->parsed()) return cmd_prelude_list(cfg);
    } catch (const ParseError& e) {
        std::cerr << file << ": " << e.what() << '\n';
        return kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}
