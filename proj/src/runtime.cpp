#include "enforcemint/runtime.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

namespace enforcemint {

const char* rule_name(Rule r) {
    switch (r) {
        case Rule::Allow: return "allow";
        case Rule::Suppress: return "suppress";
        case Rule::Insert: return "insert";
        case Rule::Plain: return "plain";
        case Rule::ChnSync: return "chnsync";
        case Rule::TimeSync: return "timesync";
    }
    return "?";
}

Monitored Monitored::make(std::shared_ptr<const EditAutomaton> a, std::shared_ptr<const Controller> c) {
    Monitored m;
    m.state = a ? a->initial : 0;
    m.proc = c->start();
    m.aut = std::move(a);
    m.ctrl = std::move(c);
    return m;
}

namespace {

// completion_distance per automaton, kept while the automaton is alive
const std::vector<std::uint32_t>& distances(const std::shared_ptr<const EditAutomaton>& a) {
    struct Entry {
        std::weak_ptr<const EditAutomaton> owner;
        std::vector<std::uint32_t> d;
    };
    static std::map<const EditAutomaton*, Entry> cache;
    auto it = cache.find(a.get());
    if (it == cache.end() || it->second.owner.lock() != a) {
        for (auto j = cache.begin(); j != cache.end();) j = j->second.owner.expired() ? cache.erase(j) : std::next(j);
        it = cache.insert_or_assign(a.get(), Entry{a, completion_distance(*a)}).first;
    }
    return it->second.d;
}

}  // namespace

std::vector<MStep> mstep(const Monitored& m, const SensorGate& gate) {
    std::vector<MStep> out;
    auto push = [&](MStep s) {
        for (const auto& o : out)
            if (o.action == s.action && o.rule == s.rule && o.state == s.state && o.proc == s.proc) return;
        out.push_back(s);
    };
    for (const auto& [alpha, next] : ctrl_steps(m.proc, *m.ctrl)) {
        if (alpha.kind() == Kind::Sensor && gate && !gate(alpha)) continue;
        if (!m.aut) {
            push({alpha, Rule::Plain, alpha, 0, next});
            continue;
        }
        const AutState& st = m.aut->states[m.state];
        if (st.go) {
            if (contains(m.aut->alphabet, alpha)) push({alpha, Rule::Allow, alpha, m.state, next});
            continue;
        }
        bool allowed = false;
        for (const auto& arm : st.arms)
            if (arm.label.op == EditOp::Allow && arm.label.action == alpha) {
                allowed = true;
                push({alpha, Rule::Allow, alpha, arm.to, next});
            }
        for (const auto& arm : st.arms)
            if (arm.label.op == EditOp::Suppress && arm.label.action == alpha)
                push({Action::tau(), Rule::Suppress, alpha, arm.to, next});
        if (allowed) continue;
        // the controller is frozen while the automaton emits in its place;
        // the monitor commits to the insertion that closes the cycle soonest
        const Arm* best = nullptr;
        for (const auto& arm : st.arms) {
            if (arm.label.op != EditOp::Insert || arm.label.action != alpha) continue;
            if (!best || distances(m.aut)[arm.to] < distances(m.aut)[best->to]) best = &arm;
        }
        if (best) push({best->label.inserted, Rule::Insert, alpha, best->to, m.proc});
    }
    return out;
}

NetState Network::initial() const {
    NetState s;
    for (const auto& n : nodes) {
        s.aut.push_back(n.aut ? n.aut->initial : 0);
        s.proc.push_back(n.ctrl->start());
    }
    return s;
}

Monitored Network::node_view(const NetState& s, std::size_t i) const {
    Monitored m;
    m.aut = nodes[i].aut;
    m.ctrl = nodes[i].ctrl;
    m.state = s.aut[i];
    m.proc = s.proc[i];
    return m;
}

namespace {

std::vector<std::vector<MStep>> all_moves(const Network& n, const NetState& s, const std::vector<SensorGate>* gates) {
    std::vector<std::vector<MStep>> moves(n.nodes.size());
    for (std::size_t i = 0; i < n.nodes.size(); ++i) {
        SensorGate g = gates && i < gates->size() ? (*gates)[i] : SensorGate{};
        moves[i] = mstep(n.node_view(s, i), g);
    }
    return moves;
}

NetState apply_moves(NetState s, const std::vector<NodeMove>& moves) {
    for (const auto& m : moves) {
        s.aut[m.node] = m.move.state;
        s.proc[m.node] = m.move.proc;
    }
    return s;
}

}  // namespace

std::vector<NetStep> Network::steps(const NetState& s, const std::vector<SensorGate>* gates) const {
    auto moves = all_moves(*this, s, gates);
    std::vector<NetStep> out;
    auto emit = [&](Action a, Rule r, std::vector<NodeMove> ms, int prio) {
        NetState next = apply_moves(s, ms);
        out.push_back({a, r, std::move(ms), std::move(next), prio});
    };

    // channel synchronisations, in node order
    for (std::size_t i = 0; i < moves.size(); ++i)
        for (const auto& mi : moves[i]) {
            if (!mi.action.is_channel()) continue;
            for (std::size_t j = i + 1; j < moves.size(); ++j)
                for (const auto& mj : moves[j])
                    if (mj.action == mi.action.complement())
                        emit(Action::tau(), Rule::ChnSync, std::vector<NodeMove>{NodeMove{i, mi}, NodeMove{j, mj}}, 0);
        }
    for (std::size_t i = 0; i < moves.size(); ++i)
        for (const auto& m : moves[i]) {
            if (m.action.is_tau()) {
                emit(Action::tau(), m.rule, std::vector<NodeMove>{NodeMove{i, m}}, 0);
            } else if (m.action.is_tick()) {
                continue;
            } else if (m.action.is_channel()) {
                bool alone = mode == ChannelMode::Open || (mode == ChannelMode::Lossy && m.action.kind() == Kind::Send);
                if (alone) emit(m.action, m.rule, std::vector<NodeMove>{NodeMove{i, m}}, 2);
            } else {
                emit(m.action, m.rule, std::vector<NodeMove>{NodeMove{i, m}}, 1);
            }
        }

    // time passes only if every node agrees and nothing silent can happen
    bool any_tau = std::any_of(out.begin(), out.end(), [](const NetStep& st) { return st.action.is_tau(); });
    if (any_tau || moves.empty()) return out;
    std::vector<std::vector<MStep>> ticks(moves.size());
    for (std::size_t i = 0; i < moves.size(); ++i) {
        for (const auto& m : moves[i])
            if (m.action.is_tick()) ticks[i].push_back(m);
        if (ticks[i].empty()) return out;
    }
    std::vector<std::size_t> idx(moves.size(), 0);
    while (true) {
        std::vector<NodeMove> ms;
        for (std::size_t i = 0; i < moves.size(); ++i) ms.push_back({i, ticks[i][idx[i]]});
        NetState next = apply_moves(s, ms);
        next.clock = s.clock + 1;
        out.push_back({Action::tick(), Rule::TimeSync, std::move(ms), std::move(next), 3});
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] == ticks[k].size()) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return out;
}

bool Network::tau_enabled(const NetState& s, const std::vector<SensorGate>* gates) const {
    auto moves = all_moves(*this, s, gates);
    for (const auto& ms : moves) {
        for (const auto& m : ms)
            if (m.action.is_tau()) return true;
    }
    for (std::size_t i = 0; i < moves.size(); ++i)
        for (std::size_t j = 0; j < moves.size(); ++j) {
            if (i == j) continue;
            for (const auto& a : moves[i])
                for (const auto& b : moves[j])
                    if (a.action.kind() == Kind::Send && b.action.kind() == Kind::Recv &&
                        a.action.name() == b.action.name())
                        return true;
        }
    return false;
}

std::vector<NetStep> net_steps(const Network& n, const NetState& s) { return n.steps(s); }

TraceLog run(const Network& n, const SchedulerPolicy& policy, std::uint64_t horizon, const RunHooks& hooks,
             std::size_t max_steps_per_slot) {
    TraceLog log;
    log.per_node.resize(n.nodes.size());
    for (const auto& node : n.nodes) log.node_names.push_back(node.name);
    std::mt19937_64 rng(policy.seed);

    std::vector<SensorGate> gates;
    const std::vector<SensorGate>* gp = nullptr;
    if (hooks.sensor_available) {
        for (std::size_t i = 0; i < n.nodes.size(); ++i)
            gates.push_back([&hooks, i](Action a) { return hooks.sensor_available(i, a); });
        gp = &gates;
    }

    NetState s = n.initial();
    std::size_t in_slot = 0;
    std::size_t step_no = 0;
    while (true) {
        auto steps = n.steps(s, gp);
        if (s.clock >= horizon)
            steps.erase(std::remove_if(steps.begin(), steps.end(), [](const NetStep& st) { return st.action.is_tick(); }),
                        steps.end());
        if (steps.empty()) {
            log.stuck = s.clock < horizon;
            break;
        }
        if (++in_slot > max_steps_per_slot) {
            log.diverged = true;
            break;
        }
        int best = std::min_element(steps.begin(), steps.end(),
                                    [](const NetStep& a, const NetStep& b) { return a.priority < b.priority; })
                       ->priority;
        std::vector<std::size_t> cands;
        for (std::size_t i = 0; i < steps.size(); ++i)
            if (steps[i].priority == best) cands.push_back(i);
        std::size_t pick = cands.front();
        if (policy.tie_break == SchedulerPolicy::SeededRandom && cands.size() > 1)
            pick = cands[std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng)];
        NetStep& st = steps[pick];

        if (st.rule == Rule::TimeSync) {
            // audited separately from the filter that produced the step
            if (n.tau_enabled(s, gp)) ++log.timesync_with_tau;
            ++log.ticks;
            in_slot = 0;
            log.rows.push_back({step_no, st.next.clock, "all", Rule::TimeSync, Action::tick(), std::nullopt});
            for (auto& t : log.per_node) t.push_back(Action::tick());
        } else {
            for (const auto& m : st.moves) {
                std::optional<Action> why;
                if (m.move.rule == Rule::Insert) why = m.move.trigger;
                Rule r = st.rule == Rule::ChnSync ? Rule::ChnSync : m.move.rule;
                log.rows.push_back({step_no, s.clock, n.nodes[m.node].name, r, m.move.action, why});
                log.per_node[m.node].push_back(m.move.action);
            }
        }
        log.global.push_back(st.action);
        spdlog::trace("step {} clock {} {} {}", step_no, s.clock, rule_name(st.rule), st.action.str());
        s = st.next;
        ++step_no;
        if (hooks.on_step) hooks.on_step(st);
    }
    log.final_state = s;
    return log;
}

Trace project(const TraceLog& log, std::size_t node) {
    Trace t;
    for (auto a : log.per_node.at(node))
        if (!a.is_tau()) t.push_back(a);
    return t;
}

std::string to_csv(const TraceLog& log) {
    std::ostringstream os;
    os << "step,clock_tick,node,rule,action,inserted_for\n";
    for (const auto& r : log.rows) {
        os << r.step << ',' << r.clock << ',' << r.node << ',' << rule_name(r.rule) << ',' << r.action.str() << ',';
        if (r.inserted_for) os << r.inserted_for->str();
        os << '\n';
    }
    return os.str();
}

}  // namespace enforcemint
