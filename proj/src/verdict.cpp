#include "kamio/verdict.hpp"

namespace kamio {

std::string to_string(Action a) {
    switch (a) {
        case Action::Tau: return "tau";
        case Action::R0: return "r0";
        case Action::R1: return "r1";
        case Action::REps: return "reps";
        case Action::W0: return "w0";
        case Action::W1: return "w1";
        case Action::E: return "e";
    }
    return "?";
}

std::optional<Action> parse_action(std::string_view word) {
    for (Action a : {Action::Tau, Action::R0, Action::R1, Action::REps, Action::W0, Action::W1, Action::E})
        if (to_string(a) == word) return a;
    return std::nullopt;
}

std::string to_string(Status s) {
    switch (s) {
        case Status::Verified: return "verified";
        case Status::Refuted: return "refuted";
        case Status::Unknown: return "unknown";
    }
    return "?";
}

std::string to_string(UnknownReason r) {
    switch (r) {
        case UnknownReason::None: return "none";
        case UnknownReason::Fuel: return "fuel";
        case UnknownReason::Depth: return "depth";
    }
    return "?";
}

std::string describe(const Verdict& v) {
    std::string out = to_string(v.status);
    if (v.is_verified() && v.sampled) out += " (sampled)";
    if (v.is_unknown()) out += " (" + to_string(v.reason) + ")";
    const Witness& w = v.witness;
    if (!w.actions.empty()) {
        out += " [";
        for (std::size_t i = 0; i < w.actions.size(); ++i) {
            if (i > 0) out += ' ';
            out += to_string(w.actions[i]);
        }
        out += "]";
    }
    if (w.index) out += " index=" + *w.index;
    if (w.stack) out += " stack=" + print(*w.stack);
    if (w.input) out += " input='" + *w.input + "'";
    if (!w.detail.empty()) out += ": " + w.detail;
    if (!v.note.empty()) out += " (" + v.note + ")";
    return out;
}

}  // namespace kamio
