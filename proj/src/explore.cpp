#include "enforcemint/explore.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

#include "enforcemint/synthesis.hpp"

namespace enforcemint {

namespace {

using Key = std::vector<std::uint64_t>;

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
        std::size_t h = k.size();
        for (auto v : k) h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

std::uint64_t ptr(const void* p) { return static_cast<std::uint64_t>(reinterpret_cast<std::uintptr_t>(p)); }

void put_set(Key& k, const StateSet& s) {
    k.push_back(s.size());
    for (int v : s) k.push_back(static_cast<std::uint64_t>(v));
}

// Breadth-first search that revisits a key only when reached at a smaller
// depth, so a depth bound stays exact.
class Visited {
public:
    bool admit(const Key& k, std::size_t depth) {
        auto [it, fresh] = seen_.emplace(k, depth);
        if (fresh) return true;
        if (depth < it->second) {
            it->second = depth;
            return true;
        }
        return false;
    }
    std::size_t size() const { return seen_.size(); }

private:
    std::unordered_map<Key, std::size_t, KeyHash> seen_;
};

Monitored at(const Monitored& base, int state, Proc proc) {
    Monitored m = base;
    m.state = state;
    m.proc = proc;
    return m;
}

std::uint32_t depth_of(Local p, std::map<Local, std::uint32_t>& memo) {
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    std::uint32_t d = 0;
    switch (p->kind) {
        case LKind::Eps: d = 0; break;
        case LKind::Seq: d = depth_of(p->lhs, memo) + depth_of(p->rhs, memo); break;
        case LKind::Inter: d = std::min(depth_of(p->lhs, memo), depth_of(p->rhs, memo)); break;
        case LKind::Union:
            for (const auto& b : p->branches) d = std::max(d, 1 + depth_of(b.body, memo));
            break;
    }
    memo.emplace(p, d);
    return d;
}

}  // namespace

std::uint32_t prop_depth(Local p) {
    std::map<Local, std::uint32_t> memo;
    return depth_of(p, memo);
}

std::uint32_t prop_depth(Global e) {
    if (e->kind == GKind::Star) return prop_depth(e->body);
    return std::min(prop_depth(e->lhs), prop_depth(e->rhs));
}

ExploreResult explore_soundness(const Monitored& m, const PropNfa& e, std::size_t depth) {
    struct Item {
        int state;
        Proc proc;
        StateSet sub;
        Trace trace;
    };
    ExploreResult r;
    Visited seen;
    std::deque<Item> work{{m.state, m.proc, e.start(), {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        if (it.trace.size() >= depth) continue;
        for (const auto& mv : mstep(at(m, it.state, it.proc))) {
            StateSet sub = mv.action.is_tau() ? it.sub : e.step(it.sub, mv.action);
            Trace t = it.trace;
            t.push_back(mv.action);
            if (!e.alive(sub)) {
                if (!r.witness) r.witness = t;
                ++r.violations;
                continue;
            }
            Key k{static_cast<std::uint64_t>(mv.state), ptr(mv.proc)};
            put_set(k, sub);
            if (seen.admit(k, t.size())) work.push_back({mv.state, mv.proc, std::move(sub), std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

ExploreResult explore_transparency(const Monitored& m, const PropNfa& e, std::size_t depth) {
    using MonSet = std::vector<std::pair<int, Proc>>;
    struct Item {
        Proc proc;
        StateSet sub;
        MonSet mon;
        Trace trace;
    };
    ExploreResult r;
    Visited seen;
    std::deque<Item> work{{m.proc, e.start(), {{m.state, m.proc}}, {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        if (it.trace.size() >= depth) continue;
        for (const auto& [alpha, next] : ctrl_steps(it.proc, *m.ctrl)) {
            StateSet sub = e.step(it.sub, alpha);
            if (!e.alive(sub)) continue;
            MonSet mon;
            for (const auto& [s, j] : it.mon)
                for (const auto& mv : mstep(at(m, s, j)))
                    if (mv.action == alpha) mon.push_back({mv.state, mv.proc});
            std::sort(mon.begin(), mon.end());
            mon.erase(std::unique(mon.begin(), mon.end()), mon.end());
            Trace t = it.trace;
            t.push_back(alpha);
            if (e.accepts(sub) && mon.empty()) {
                if (!r.witness) r.witness = t;
                ++r.violations;
            }
            Key k{ptr(next)};
            put_set(k, sub);
            k.push_back(mon.size());
            for (const auto& [s, j] : mon) {
                k.push_back(static_cast<std::uint64_t>(s));
                k.push_back(ptr(j));
            }
            if (seen.admit(k, t.size())) work.push_back({next, std::move(sub), std::move(mon), std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

ExploreResult explore_deadlock(const Monitored& m, std::size_t depth) {
    struct Item {
        int state;
        Proc proc;
        Trace trace;
    };
    ExploreResult r;
    Visited seen;
    seen.admit({static_cast<std::uint64_t>(m.state), ptr(m.proc)}, 0);
    std::deque<Item> work{{m.state, m.proc, {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        auto moves = mstep(at(m, it.state, it.proc));
        if (moves.empty()) {
            if (!r.witness) r.witness = it.trace;
            ++r.violations;
            continue;
        }
        if (it.trace.size() >= depth) continue;
        for (const auto& mv : moves) {
            Trace t = it.trace;
            t.push_back(mv.action);
            if (seen.admit({static_cast<std::uint64_t>(mv.state), ptr(mv.proc)}, t.size()))
                work.push_back({mv.state, mv.proc, std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

ExploreResult explore_divergence(const Monitored& m, std::size_t bound) {
    struct Item {
        int state;
        Proc proc;
        std::size_t since;
        Trace trace;
    };
    ExploreResult r;
    std::set<std::tuple<int, Proc, std::size_t>> seen{{m.state, m.proc, 0}};
    std::deque<Item> work{{m.state, m.proc, 0, {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        for (const auto& mv : mstep(at(m, it.state, it.proc))) {
            std::size_t since = mv.action.is_end() ? 0 : it.since + 1;
            Trace t = it.trace;
            t.push_back(mv.action);
            if (since >= bound) {
                if (!r.witness) r.witness = t;
                ++r.violations;
                continue;
            }
            // keep the witness short: only the suffix since the last end matters
            if (mv.action.is_end()) t.clear();
            if (seen.insert({mv.state, mv.proc, since}).second) work.push_back({mv.state, mv.proc, since, std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

ExploreResult explore_determinism(const Monitored& m, std::size_t depth) {
    struct Item {
        int state;
        Proc proc;
        Trace trace;
    };
    ExploreResult r;
    Visited seen;
    seen.admit({static_cast<std::uint64_t>(m.state), ptr(m.proc)}, 0);
    std::deque<Item> work{{m.state, m.proc, {}}};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        auto moves = mstep(at(m, it.state, it.proc));
        for (std::size_t i = 0; i < moves.size(); ++i)
            for (std::size_t j = i + 1; j < moves.size(); ++j)
                if (moves[i].action == moves[j].action && moves[i].state != moves[j].state) {
                    if (!r.witness) {
                        r.witness = it.trace;
                        r.witness->push_back(moves[i].action);
                    }
                    ++r.violations;
                }
        if (it.trace.size() >= depth) continue;
        for (const auto& mv : moves) {
            Trace t = it.trace;
            t.push_back(mv.action);
            if (seen.admit({static_cast<std::uint64_t>(mv.state), ptr(mv.proc)}, t.size()))
                work.push_back({mv.state, mv.proc, std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

namespace {

Key net_key(const NetState& s) {
    Key k;
    for (std::size_t i = 0; i < s.aut.size(); ++i) {
        k.push_back(static_cast<std::uint64_t>(s.aut[i]));
        k.push_back(ptr(s.proc[i]));
    }
    return k;
}

}  // namespace

NetworkResult explore_network_soundness(const Network& n, const std::vector<PropNfa>& props, std::size_t depth) {
    struct Item {
        NetState s;
        std::vector<StateSet> subs;
        Trace trace;
    };
    NetworkResult r;
    Visited seen;
    Item first{n.initial(), {}, {}};
    for (const auto& p : props) first.subs.push_back(p.start());
    std::deque<Item> work{std::move(first)};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        if (it.trace.size() >= depth) continue;
        for (auto& st : n.steps(it.s)) {
            if (st.rule == Rule::TimeSync && n.tau_enabled(it.s)) ++r.timesync_with_tau;
            auto subs = it.subs;
            bool bad = false;
            for (const auto& nm : st.moves) {
                Action a = nm.move.action;
                if (a.is_tau() || nm.node >= props.size()) continue;
                subs[nm.node] = props[nm.node].step(subs[nm.node], a);
                if (!props[nm.node].alive(subs[nm.node])) bad = true;
            }
            Trace t = it.trace;
            t.push_back(st.action);
            if (bad) {
                if (!r.witness) r.witness = t;
                ++r.soundness_violations;
                continue;
            }
            Key k = net_key(st.next);
            for (const auto& s : subs) put_set(k, s);
            if (seen.admit(k, t.size())) work.push_back({std::move(st.next), std::move(subs), std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

NetworkResult explore_network_transparency(const Network& monitored, const std::vector<PropNfa>& props,
                                           std::size_t depth) {
    using MonSet = std::vector<std::pair<int, Proc>>;
    Network go = monitored;
    for (auto& node : go.nodes) node.aut = nullptr;

    struct Item {
        NetState s;
        std::vector<StateSet> subs;
        std::vector<MonSet> mons;
        Trace trace;
    };
    NetworkResult r;
    Visited seen;
    Item first{go.initial(), {}, {}, {}};
    NetState mon0 = monitored.initial();
    for (std::size_t i = 0; i < monitored.nodes.size(); ++i) {
        first.subs.push_back(props[i].start());
        first.mons.push_back({{mon0.aut[i], mon0.proc[i]}});
    }
    std::deque<Item> work{std::move(first)};
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        if (it.trace.size() >= depth) continue;
        for (auto& st : go.steps(it.s)) {
            if (st.rule == Rule::TimeSync && go.tau_enabled(it.s)) ++r.timesync_with_tau;
            auto subs = it.subs;
            auto mons = it.mons;
            Trace t = it.trace;
            t.push_back(st.action);
            for (const auto& nm : st.moves) {
                std::size_t i = nm.node;
                Action a = nm.move.action;
                subs[i] = props[i].step(subs[i], a);
                MonSet next;
                for (const auto& [q, j] : mons[i])
                    for (const auto& mv : mstep(Monitored{monitored.nodes[i].aut, monitored.nodes[i].ctrl, q, j}))
                        if (mv.action == a) next.push_back({mv.state, mv.proc});
                std::sort(next.begin(), next.end());
                next.erase(std::unique(next.begin(), next.end()), next.end());
                mons[i] = std::move(next);
                if (props[i].alive(subs[i]) && props[i].accepts(subs[i]) && mons[i].empty()) {
                    if (!r.witness) r.witness = t;
                    ++r.transparency_violations;
                }
            }
            // a node whose projection left the language no longer constrains anything
            bool any_live = false;
            for (std::size_t i = 0; i < subs.size(); ++i) any_live |= props[i].alive(subs[i]);
            if (!any_live) continue;
            Key k = net_key(st.next);
            for (std::size_t i = 0; i < subs.size(); ++i) {
                put_set(k, subs[i]);
                k.push_back(mons[i].size());
                for (const auto& [q, j] : mons[i]) {
                    k.push_back(static_cast<std::uint64_t>(q));
                    k.push_back(ptr(j));
                }
            }
            if (seen.admit(k, t.size()))
                work.push_back({std::move(st.next), std::move(subs), std::move(mons), std::move(t)});
        }
    }
    r.states = seen.size();
    return r;
}

namespace gen {

Alphabet Pool::alphabet() const {
    std::vector<Action> v{Action::tick(), Action::end()};
    for (const auto* xs : {&sensors, &actuators, &sends, &recvs}) v.insert(v.end(), xs->begin(), xs->end());
    return make_alphabet(std::move(v));
}

Pool pool_for(std::size_t sensors, std::size_t actuators, std::size_t channels) {
    Pool p;
    for (std::size_t i = 0; i < sensors; ++i) p.sensors.push_back(Action::sensor("s" + std::to_string(i)));
    for (std::size_t i = 0; i < actuators; ++i) p.actuators.push_back(Action::actuator("a" + std::to_string(i)));
    for (std::size_t i = 0; i < channels; ++i) {
        p.sends.push_back(Action::send("ch" + std::to_string(i)));
        p.recvs.push_back(Action::recv("ch" + std::to_string(i)));
    }
    return p;
}

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

std::vector<Action> distinct(Rng& rng, std::vector<Action> v, int n) {
    std::shuffle(v.begin(), v.end(), rng);
    v.resize(std::min<std::size_t>(v.size(), static_cast<std::size_t>(n)));
    return v;
}

}  // namespace

namespace {

// A prefix without end: its words are followed by whatever comes after ';'.
Local random_open(Rng& rng, const std::vector<Action>& events, int depth) {
    if (depth <= 0 || events.empty() || coin(rng, 0.2)) return prop::eps();
    std::vector<Branch> br;
    for (auto ev : distinct(rng, events, uniform(rng, 1, 2))) br.push_back({ev, random_open(rng, events, depth - 1)});
    return prop::choice(std::move(br));
}

}  // namespace

Local random_local(Rng& rng, const std::vector<Action>& events, int depth, bool single_cycle) {
    if (depth <= 0 || events.empty()) return prop::event(Action::end());
    int shape = uniform(rng, 0, 9);
    if (shape == 0 && depth >= 2)
        return prop::inter(random_local(rng, events, depth - 1, single_cycle),
                           random_local(rng, events, depth - 1, single_cycle));
    if (shape == 1 && depth >= 2) {
        Local head = single_cycle || coin(rng, 0.5) ? random_open(rng, events, depth / 2)
                                                    : random_local(rng, events, depth / 2, false);
        return prop::seq(head, random_local(rng, events, depth / 2, single_cycle));
    }
    std::vector<Branch> br;
    int width = uniform(rng, 1, 3);
    for (auto ev : distinct(rng, events, width)) br.push_back({ev, random_local(rng, events, depth - 1, single_cycle)});
    if (coin(rng, 0.35)) br.push_back({Action::end(), prop::eps()});
    return prop::choice(std::move(br));
}

Global random_property(Rng& rng, const std::vector<Action>& events, int depth, bool allow_inter) {
    Global g = prop::star(random_local(rng, events, depth));
    if (allow_inter && coin(rng, 0.4)) g = prop::inter(g, prop::star(random_local(rng, events, depth)));
    return g;
}

namespace {

struct CtrlGen {
    Rng& rng;
    const Pool& pool;
    std::vector<std::string> names;
    int budget;

    Proc finish() { return proc::end(pick(rng, names)); }

    Proc act_phase() {
        if (pool.actuators.empty() || budget <= 0 || coin(rng, 0.4)) return finish();
        --budget;
        return proc::act(pick(rng, pool.actuators), act_phase());
    }

    Proc comm_phase(int nest) {
        int c = uniform(rng, 0, 3);
        if (nest > 0 && budget > 0 && c == 0 && !pool.sends.empty()) {
            --budget;
            return proc::chan_out(pick(rng, pool.sends), comm_phase(nest - 1), act_phase());
        }
        if (nest > 0 && budget > 0 && c == 1 && !pool.recvs.empty()) {
            --budget;
            std::vector<std::pair<Action, Proc>> br;
            for (auto r : distinct(rng, pool.recvs, uniform(rng, 1, 2))) br.push_back({r, comm_phase(nest - 1)});
            return proc::chan_in(std::move(br), act_phase());
        }
        return act_phase();
    }

    Proc sens_phase(int nest) {
        if (nest <= 0 || budget <= 0 || pool.sensors.empty() || coin(rng, 0.25)) return comm_phase(1);
        --budget;
        std::vector<std::pair<Action, Proc>> br;
        for (auto s : distinct(rng, pool.sensors, uniform(rng, 1, 3))) br.push_back({s, sens_phase(nest - 1)});
        return proc::sens(std::move(br), coin(rng, 0.5) ? sens_phase(nest - 1) : comm_phase(1));
    }
};

Proc lead_ticks(std::uint32_t ticks, Proc body) {
    for (std::uint32_t i = 0; i < ticks; ++i) body = proc::tick(body);
    return body;
}

}  // namespace

Controller random_controller(Rng& rng, const Pool& pool, std::uint32_t ticks, int equations) {
    Controller c;
    CtrlGen g{rng, pool, {}, 0};
    for (int i = 0; i < equations; ++i) g.names.push_back("X" + std::to_string(i));
    for (const auto& n : g.names) {
        g.budget = 5;
        c.define(n, lead_ticks(std::max<std::uint32_t>(ticks, 1), g.sens_phase(2)));
    }
    return c;
}

namespace {

struct Mutator {
    Rng& rng;
    const Pool& pool;
    std::vector<std::string> names;

    Proc any_action_then(Proc next) {
        switch (uniform(rng, 0, 2)) {
            case 0:
                if (!pool.actuators.empty()) return proc::act(pick(rng, pool.actuators), next);
                break;
            case 1:
                if (!pool.sensors.empty()) return proc::sens({{pick(rng, pool.sensors), next}}, next);
                break;
            default:
                if (!pool.sends.empty()) return proc::chan_out(pick(rng, pool.sends), next, next);
                break;
        }
        return next;
    }

    Proc walk(Proc p) {
        switch (p->kind) {
            case PKind::Var: return p;
            case PKind::Tick: return proc::tick(walk(p->next));
            case PKind::End:
                if (coin(rng, 0.15)) return any_action_then(proc::end(pick(rng, names)));
                return coin(rng, 0.1) ? proc::end(pick(rng, names)) : p;
            case PKind::Act: {
                if (coin(rng, 0.2)) return walk(p->next);  // dropped command
                Action a = coin(rng, 0.25) && !pool.actuators.empty() ? pick(rng, pool.actuators) : p->act;
                Proc rest = walk(p->next);
                if (coin(rng, 0.15)) rest = any_action_then(rest);
                return proc::act(a, rest);
            }
            case PKind::ChanOut:
                if (coin(rng, 0.15)) return walk(p->timeout);
                return proc::chan_out(p->act, walk(p->next), walk(p->timeout));
            case PKind::Sens:
            case PKind::ChanIn: {
                std::vector<std::pair<Action, Proc>> br;
                for (const auto& [a, q] : p->branches) br.push_back({a, walk(q)});
                if (br.size() > 1 && coin(rng, 0.3)) std::swap(br.front().second, br.back().second);
                Proc to = walk(p->timeout);
                if (coin(rng, 0.15)) to = any_action_then(to);
                return p->kind == PKind::Sens ? proc::sens(std::move(br), to) : proc::chan_in(std::move(br), to);
            }
        }
        return p;
    }
};

}  // namespace

Controller mutate(Rng& rng, const Controller& c, const Pool& pool) {
    Mutator m{rng, pool, {}};
    for (const auto& [n, b] : c.eqs) m.names.push_back(n);
    Controller out;
    for (const auto& [n, body] : c.eqs) out.define(n, m.walk(body));
    return out;
}

namespace {

// Trie of complete cycles: maps a proc to the local property of all its
// paths up to and including end.
struct Trie {
    std::map<Action, Trie> kids;
    bool closes = false;  // end seen here

    void add(const Trace& t, std::size_t i) {
        if (i == t.size()) return;
        if (t[i].is_end()) {
            closes = true;
            return;
        }
        kids[t[i]].add(t, i + 1);
    }

    Local build(Rng* rng, double drop) const {
        std::vector<Branch> br;
        for (const auto& [a, k] : kids) br.push_back({a, k.build(rng, drop)});
        if (closes) br.push_back({Action::end(), prop::eps()});
        if (rng && drop > 0 && br.size() > 1) {
            std::vector<Branch> kept;
            for (auto& b : br)
                if (!coin(*rng, drop)) kept.push_back(b);
            if (!kept.empty()) br = std::move(kept);
        }
        return prop::choice(std::move(br));
    }
};

void cycles(Proc p, const Controller& c, Trace& cur, std::vector<Trace>& out) {
    for (const auto& [a, next] : ctrl_steps(p, c)) {
        cur.push_back(a);
        if (a.is_end())
            out.push_back(cur);
        else
            cycles(next, c, cur, out);
        cur.pop_back();
    }
}

}  // namespace

Global cycle_property(const Controller& c, Rng* rng, double drop) {
    Trie root;
    for (const auto& [n, body] : c.eqs) {
        std::vector<Trace> out;
        Trace cur;
        cycles(body, c, cur, out);
        for (const auto& t : out) root.add(t, 0);
    }
    return prop::star(root.build(rng, drop));
}

}  // namespace gen

}  // namespace enforcemint
