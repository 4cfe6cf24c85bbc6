#include "kamio/equivalence.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

namespace kamio {

namespace {

// Labeled (non-τ) transitions available at p.
std::map<Action, Process> labeled_transitions(const Process& p) {
    std::map<Action, Process> out;
    if (p.is_top()) return out;
    const Term& t = p.term();
    const Stack& s = p.stack();
    switch (t.kind()) {
        case TermKind::Read:
            if (s.size() >= 3) {
                Stack rest = s.drop(3);
                out.emplace(Action::R0, Process(s.at(0), rest));
                out.emplace(Action::R1, Process(s.at(1), rest));
                out.emplace(Action::REps, Process(s.at(2), rest));
            }
            break;
        case TermKind::Write0:
            if (!s.empty()) out.emplace(Action::W0, Process(s.head(), s.tail()));
            break;
        case TermKind::Write1:
            if (!s.empty()) out.emplace(Action::W1, Process(s.head(), s.tail()));
            break;
        case TermKind::End:
            out.emplace(Action::E, Process::top());
            break;
        default:
            break;
    }
    return out;
}

}  // namespace

std::vector<std::pair<Action, Process>> lts_step(const Process& p) {
    std::vector<std::pair<Action, Process>> out;
    if (auto q = eval_step(p)) {
        out.emplace_back(Action::Tau, std::move(*q));
        return out;
    }
    for (auto& [a, q] : labeled_transitions(p)) out.emplace_back(a, q);
    return out;
}

Observable observable(const Process& p, std::uint64_t fuel) {
    Observable obs{Observable::Kind::Unknown, {}, 0, p, false};
    std::unordered_set<Process, ProcessHash> seen;
    Process cur = p;
    while (true) {
        obs.resting = cur;
        if (cur.is_top()) {
            obs.kind = Observable::Kind::Silent;
            return obs;
        }
        auto menu = labeled_transitions(cur);
        if (!menu.empty()) {
            obs.kind = Observable::Kind::Menu;
            obs.menu = std::move(menu);
            return obs;
        }
        auto next = eval_step(cur);
        if (!next) {
            obs.kind = Observable::Kind::Silent;
            return obs;
        }
        if (!seen.insert(cur).second) {
            obs.kind = Observable::Kind::Silent;
            obs.diverges = true;
            return obs;
        }
        if (obs.tau_steps == fuel) {
            obs.kind = Observable::Kind::Unknown;
            return obs;
        }
        cur = std::move(*next);
        ++obs.tau_steps;
    }
}

namespace {

class BisimSearch {
public:
    BisimSearch(std::uint64_t fuel) : fuel_(fuel) {}

    Verdict explore(const Process& p, const Process& q, std::uint64_t depth, std::vector<Action>& prefix) {
        if (alpha_equal(p, q)) return Verdict::verified();
        if (!assume(p, q)) return Verdict::verified();

        Observable op = observable(p, fuel_);
        Observable oq = observable(q, fuel_);
        if (op.kind == Observable::Kind::Unknown || oq.kind == Observable::Kind::Unknown) {
            Witness w;
            w.actions = prefix;
            w.process = op.kind == Observable::Kind::Unknown ? op.resting : oq.resting;
            w.detail = "observable did not resolve within fuel";
            return Verdict::unknown(UnknownReason::Fuel, std::move(w));
        }
        bool p_silent = op.kind == Observable::Kind::Silent;
        bool q_silent = oq.kind == Observable::Kind::Silent;
        if (p_silent && q_silent) return Verdict::verified();
        if (p_silent != q_silent) {
            const auto& menu = p_silent ? oq.menu : op.menu;
            Witness w;
            w.actions = prefix;
            w.actions.push_back(menu.begin()->first);
            w.detail = std::string(p_silent ? "left" : "right") + " side is silent";
            return Verdict::refuted(std::move(w));
        }
        if (auto diff = first_difference(op.menu, oq.menu)) {
            Witness w;
            w.actions = prefix;
            w.actions.push_back(diff->first);
            w.detail = std::string("action offered only by the ") + (diff->second ? "left" : "right");
            return Verdict::refuted(std::move(w));
        }
        if (depth == 0) {
            Witness w;
            w.actions = prefix;
            w.detail = "depth bound reached";
            return Verdict::unknown(UnknownReason::Depth, std::move(w));
        }

        std::optional<Verdict> pending;
        for (const auto& [action, p_next] : op.menu) {
            prefix.push_back(action);
            Verdict v = explore(p_next, oq.menu.at(action), depth - 1, prefix);
            prefix.pop_back();
            if (v.is_refuted()) return v;
            if (v.is_unknown() && !pending) pending = std::move(v);
        }
        return pending ? std::move(*pending) : Verdict::verified();
    }

private:
    // Records (p, q) as assumed related; false if it already was.
    bool assume(const Process& p, const Process& q) {
        std::uint64_t key = p.hash() * 0x100000001b3ULL ^ q.hash();
        auto& bucket = visited_[key];
        for (const auto& [a, b] : bucket)
            if (alpha_equal(a, p) && alpha_equal(b, q)) return false;
        bucket.emplace_back(p, q);
        return true;
    }

    // Smallest action in the symmetric difference of the key sets; the flag
    // is true when the left menu offers it.
    static std::optional<std::pair<Action, bool>> first_difference(const std::map<Action, Process>& left,
                                                                   const std::map<Action, Process>& right) {
        std::optional<std::pair<Action, bool>> best;
        for (const auto& [a, _] : left)
            if (!right.contains(a) && (!best || a < best->first)) best = {a, true};
        for (const auto& [a, _] : right)
            if (!left.contains(a) && (!best || a < best->first)) best = {a, false};
        return best;
    }

    std::uint64_t fuel_;
    std::unordered_map<std::uint64_t, std::vector<std::pair<Process, Process>>> visited_;
};

void collect_redexes(const Term& t, Position& path, std::vector<Position>& out) {
    switch (t.kind()) {
        case TermKind::App:
            if (t.fun().is(TermKind::Lam)) out.push_back(path);
            path.push_back({PathStep::Kind::Fun});
            collect_redexes(t.fun(), path, out);
            path.back() = {PathStep::Kind::Arg};
            collect_redexes(t.arg(), path, out);
            path.pop_back();
            return;
        case TermKind::Lam:
            path.push_back({PathStep::Kind::Body});
            collect_redexes(t.body(), path, out);
            path.pop_back();
            return;
        case TermKind::Kont: {
            std::size_t i = 0;
            for (const Term& entry : t.saved().entries()) {
                path.push_back({PathStep::Kind::StackEntry, i++});
                collect_redexes(entry, path, out);
                path.pop_back();
            }
            return;
        }
        default:
            return;
    }
}

}  // namespace

Verdict weak_bisim(const Process& p, const Process& q, std::uint64_t depth, std::uint64_t fuel) {
    BisimSearch search(fuel);
    std::vector<Action> prefix;
    return search.explore(p, q, depth, prefix);
}

std::vector<Position> beta_redexes(const Process& host) {
    std::vector<Position> out;
    if (host.is_top()) return out;
    Position path{{PathStep::Kind::Head}};
    collect_redexes(host.term(), path, out);
    std::size_t i = 0;
    for (const Term& entry : host.stack().entries()) {
        Position at{{PathStep::Kind::StackEntry, i++}};
        collect_redexes(entry, at, out);
    }
    return out;
}

Process beta_contract(const Process& host, const Position& at) {
    auto redex = subterm_at(host, at);
    if (!redex || !redex->is(TermKind::App) || !redex->fun().is(TermKind::Lam))
        throw InvalidPosition("no beta-redex at " + to_string(at));
    const Term& lam = redex->fun();
    return replace_at(host, at, substitute(lam.body(), lam.name(), redex->arg()));
}

namespace {

enum class Fate { Terminates, NeverTerminates, Undecided };

Fate classify(const RunResult& r, std::uint64_t fuel) {
    switch (r.outcome) {
        case Outcome::Terminated: return Fate::Terminates;
        case Outcome::Stuck: return Fate::NeverTerminates;
        case Outcome::FuelExhausted:
            // A silent residual never performs e, hence never reaches TOP.
            return observable(r.final.process, fuel).kind == Observable::Kind::Silent ? Fate::NeverTerminates
                                                                                      : Fate::Undecided;
    }
    return Fate::Undecided;
}

}  // namespace

Verdict top_equiv(const ExecutionContext& a, const ExecutionContext& b, std::uint64_t fuel) {
    RunResult ra = run(a, fuel);
    RunResult rb = run(b, fuel);
    Fate fa = classify(ra, fuel);
    Fate fb = classify(rb, fuel);
    if (fa == Fate::Undecided || fb == Fate::Undecided) {
        Witness w;
        w.detail = std::string(fa == Fate::Undecided ? "left" : "right") + " context undecided within fuel";
        return Verdict::unknown(UnknownReason::Fuel, std::move(w));
    }
    if (fa == Fate::NeverTerminates && fb == Fate::NeverTerminates) return Verdict::verified();
    auto summary = [](const RunResult& r) {
        if (r.outcome != Outcome::Terminated) return std::string("never reaches TOP");
        return "(TOP, '" + r.final.input + "', '" + r.final.output + "')";
    };
    if (fa == Fate::Terminates && fb == Fate::Terminates && ra.final.input == rb.final.input &&
        ra.final.output == rb.final.output)
        return Verdict::verified();
    Witness w;
    w.detail = "left " + summary(ra) + ", right " + summary(rb);
    return Verdict::refuted(std::move(w));
}

}  // namespace kamio
