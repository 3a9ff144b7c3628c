#include "enforcemint/automaton.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace enforcemint {

using nlohmann::json;

Action EditLabel::emitted() const {
    switch (op) {
        case EditOp::Allow: return action;
        case EditOp::Suppress: return Action::tau();
        case EditOp::Insert: return inserted;
    }
    return Action::tau();
}

std::string EditLabel::str() const {
    switch (op) {
        case EditOp::Allow: return action.str();
        case EditOp::Suppress: return "-" + action.str();
        case EditOp::Insert: return action.str() + ">" + inserted.str();
    }
    return "?";
}

bool EditLabel::operator<(const EditLabel& o) const {
    if (op != o.op) return op < o.op;
    if (action != o.action) return action < o.action;
    if (op == EditOp::Insert && inserted != o.inserted) return inserted < o.inserted;
    return false;
}

EditAutomaton EditAutomaton::go_automaton(const Alphabet& p) {
    EditAutomaton a;
    a.states.push_back({"go", true, {}});
    a.alphabet = p;
    return a;
}

int EditAutomaton::find(const std::string& name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].name == name) return static_cast<int>(i);
    return -1;
}

int AutomatonBuilder::fresh(std::string hint) {
    raw_.push_back({std::move(hint)});
    return static_cast<int>(raw_.size()) - 1;
}

void AutomatonBuilder::set_go(int s) {
    raw_[s].go = true;
    raw_[s].defined = true;
}

void AutomatonBuilder::define_empty(int s) { raw_[s].defined = true; }

void AutomatonBuilder::add_arm(int s, EditLabel l, int to) {
    raw_[s].arms.push_back({l, to});
    raw_[s].defined = true;
}

void AutomatonBuilder::alias(int s, int target) {
    raw_[s].alias = target;
    raw_[s].defined = true;
}

void AutomatonBuilder::mark_accepting(int s) { raw_[s].accepting = true; }

bool AutomatonBuilder::is_defined(int s) const { return raw_[s].defined; }

int AutomatonBuilder::resolve(int s) const {
    std::size_t hops = 0;
    while (raw_[s].alias) {
        s = *raw_[s].alias;
        if (++hops > raw_.size()) throw AutomatonError("unguarded recursion between automaton variables");
    }
    return s;
}

EditAutomaton AutomatonBuilder::finish(int initial, const Alphabet& alphabet, bool with_marks) const {
    // acceptance travels along aliases: X = Y with X a cycle boundary makes Y one
    std::vector<bool> acc(raw_.size(), false);
    for (std::size_t i = 0; i < raw_.size(); ++i)
        if (raw_[i].accepting) acc[resolve(static_cast<int>(i))] = true;

    std::vector<int> id(raw_.size(), -1);
    std::vector<int> order;
    auto visit = [&](int s) {
        s = resolve(s);
        if (!raw_[s].defined) throw AutomatonError("automaton state referenced but never defined");
        if (id[s] < 0) {
            id[s] = static_cast<int>(order.size());
            order.push_back(s);
        }
        return id[s];
    };
    visit(initial);
    EditAutomaton out;
    out.alphabet = alphabet;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const Raw& r = raw_[order[i]];
        AutState st;
        st.go = r.go;
        for (const auto& arm : r.arms) st.arms.push_back({arm.label, visit(arm.to)});
        out.states.push_back(std::move(st));
    }
    for (std::size_t i = 0; i < out.states.size(); ++i) out.states[i].name = "q" + std::to_string(i);
    if (with_marks) {
        std::vector<bool> marks(order.size());
        for (std::size_t i = 0; i < order.size(); ++i) marks[i] = acc[order[i]];
        out.accepting = std::move(marks);
    }
    return out;
}

std::vector<EditLabel> enabled(const EditAutomaton& a, int s) {
    if (s < 0 || static_cast<std::size_t>(s) >= a.size()) throw AutomatonError("dangling automaton state");
    std::vector<EditLabel> out;
    if (a.states[s].go) {
        for (auto x : a.alphabet) out.push_back(EditLabel::allow(x));
        return out;
    }
    for (const auto& arm : a.states[s].arms)
        if (std::find(out.begin(), out.end(), arm.label) == out.end()) out.push_back(arm.label);
    return out;
}

int step(const EditAutomaton& a, int s, const EditLabel& l) {
    if (s < 0 || static_cast<std::size_t>(s) >= a.size()) throw AutomatonError("dangling automaton state");
    const AutState& st = a.states[s];
    if (st.go) {
        if (l.op == EditOp::Allow && contains(a.alphabet, l.action)) return s;
        throw AutomatonError("label " + l.str() + " not enabled in go state");
    }
    for (const auto& arm : st.arms)
        if (arm.label == l) return arm.to;
    throw AutomatonError("label " + l.str() + " not enabled in state " + st.name);
}

namespace {
std::set<Action> suppressible(const Alphabet& p) {
    std::set<Action> out;
    for (auto x : p)
        if (!x.is_tick() && !x.is_end()) out.insert(x);
    return out;
}
}  // namespace

bool is_suppress_all(const EditAutomaton& a, int s, const Alphabet& p) {
    const AutState& st = a.states[s];
    if (st.go) return false;
    std::set<Action> seen;
    for (const auto& arm : st.arms) {
        if (arm.label.op != EditOp::Suppress || arm.to != s) return false;
        seen.insert(arm.label.action);
    }
    return seen == suppressible(p);
}

std::size_t reachable_state_count(const EditAutomaton& a) {
    std::vector<bool> seen(a.size(), false);
    std::deque<int> work{a.initial};
    seen[a.initial] = true;
    std::size_t n = 0;
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        ++n;
        for (const auto& arm : a.states[s].arms)
            if (!seen[arm.to]) {
                seen[arm.to] = true;
                work.push_back(arm.to);
            }
    }
    return n;
}

std::vector<std::uint32_t> completion_distance(const EditAutomaton& a) {
    constexpr std::uint32_t inf = std::numeric_limits<std::uint32_t>::max();
    const std::size_t n = a.size();
    std::vector<std::uint32_t> d(n, inf);
    std::vector<std::vector<int>> rev(n);
    std::deque<int> work;
    for (std::size_t s = 0; s < n; ++s) {
        bool done = a.states[s].go;
        for (const auto& arm : a.states[s].arms) {
            if (arm.label.op != EditOp::Allow) continue;
            if (arm.label.action.is_end()) done = true;
            else rev[arm.to].push_back(static_cast<int>(s));
        }
        if (done) {
            d[s] = 0;
            work.push_back(static_cast<int>(s));
        }
    }
    while (!work.empty()) {
        int t = work.front();
        work.pop_front();
        for (int s : rev[t])
            if (d[s] == inf) {
                d[s] = d[t] + 1;
                work.push_back(s);
            }
    }
    return d;
}

EditAutomaton suppress_all_automaton(const Alphabet& p) {
    EditAutomaton a;
    AutState st{"q0", false, {}};
    for (auto x : suppressible(p)) st.arms.push_back({EditLabel::suppress(x), 0});
    a.states.push_back(std::move(st));
    a.alphabet = p;
    a.accepting = std::vector<bool>{true};
    return a;
}

namespace {

// Allow arms of a state in declaration order; go allows all of P.
std::vector<std::pair<Action, int>> allows(const EditAutomaton& a, int s, const Alphabet& p) {
    std::vector<std::pair<Action, int>> out;
    if (a.states[s].go) {
        for (auto x : p) out.push_back({x, s});
        return out;
    }
    for (const auto& arm : a.states[s].arms)
        if (arm.label.op == EditOp::Allow) out.push_back({arm.label.action, arm.to});
    return out;
}

}  // namespace

EditAutomaton cross_product(const EditAutomaton& a1, const EditAutomaton& a2, const Alphabet& p) {
    const bool marks = a1.accepting || a2.accepting;
    struct Node {
        int i, j;
        std::vector<std::pair<Action, int>> matched;
    };
    std::map<std::pair<int, int>, int> index;
    std::vector<Node> nodes;
    auto get = [&](int i, int j) {
        auto [it, fresh] = index.emplace(std::make_pair(i, j), static_cast<int>(nodes.size()));
        if (fresh) nodes.push_back({i, j, {}});
        return it->second;
    };
    get(a1.initial, a2.initial);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        auto l1 = allows(a1, nodes[n].i, p);
        auto l2 = allows(a2, nodes[n].j, p);
        std::vector<std::pair<Action, int>> matched;
        for (auto [x, t1] : l1)
            for (auto [y, t2] : l2)
                if (x == y) matched.push_back({x, get(t1, t2)});
        nodes[n].matched = std::move(matched);
    }

    const std::size_t n = nodes.size();
    std::vector<bool> live(n, false);
    if (marks) {
        // least fixpoint: live iff some matched path reaches a joint boundary
        std::vector<std::vector<int>> rev(n);
        for (std::size_t k = 0; k < n; ++k)
            for (auto [x, t] : nodes[k].matched) rev[t].push_back(static_cast<int>(k));
        std::deque<int> work;
        for (std::size_t k = 0; k < n; ++k)
            if (a1.is_accepting(nodes[k].i) && a2.is_accepting(nodes[k].j)) {
                live[k] = true;
                work.push_back(static_cast<int>(k));
            }
        while (!work.empty()) {
            int k = work.front();
            work.pop_front();
            for (int q : rev[k])
                if (!live[q]) {
                    live[q] = true;
                    work.push_back(q);
                }
        }
    } else {
        // no boundary information: greatest fixpoint, matched cycles stay live
        live.assign(n, true);
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t k = 0; k < n; ++k) {
                if (!live[k]) continue;
                bool any = std::any_of(nodes[k].matched.begin(), nodes[k].matched.end(),
                                       [&](auto& m) { return live[m.second]; });
                if (!any) {
                    live[k] = false;
                    changed = true;
                }
            }
        }
    }

    if (!live[0]) {
        EditAutomaton dead = suppress_all_automaton(p);
        if (!marks) dead.accepting.reset();
        return dead;
    }

    AutomatonBuilder b;
    std::vector<int> sid(n, -1);
    auto state_of = [&](int k) {
        if (sid[k] < 0) sid[k] = b.fresh();
        return sid[k];
    };
    std::deque<int> work{0};
    std::vector<bool> queued(n, false);
    queued[0] = true;
    const auto supp = suppressible(p);
    while (!work.empty()) {
        int k = work.front();
        work.pop_front();
        int s = state_of(k);
        const Node& nd = nodes[k];
        if (a1.is_accepting(nd.i) && a2.is_accepting(nd.j)) b.mark_accepting(s);
        if (a1.states[nd.i].go && a2.states[nd.j].go) {
            b.set_go(s);
            continue;
        }
        std::set<Action> kept;
        std::vector<std::pair<Action, int>> arms;
        for (auto [x, t] : nd.matched) {
            if (!live[t]) continue;
            arms.push_back({x, t});
            kept.insert(x);
            if (!queued[t]) {
                queued[t] = true;
                work.push_back(t);
            }
        }
        for (auto [x, t] : arms) b.add_arm(s, EditLabel::allow(x), state_of(t));
        for (auto [x, t] : arms)
            if (!x.is_end()) b.add_arm(s, EditLabel::insert(Action::end(), x), state_of(t));
        for (auto x : supp)
            if (!kept.count(x)) b.add_arm(s, EditLabel::suppress(x), s);
        if (!b.is_defined(s)) b.define_empty(s);  // nothing matched and nothing to suppress
    }
    return b.finish(state_of(0), p, marks);
}

EditAutomaton prune_dead(const EditAutomaton& a, const Alphabet& p) {
    if (!a.accepting) return a;
    const std::size_t n = a.size();
    std::vector<std::vector<int>> rev(n);
    for (std::size_t s = 0; s < n; ++s)
        for (const auto& arm : a.states[s].arms)
            if (arm.label.op != EditOp::Suppress) rev[arm.to].push_back(static_cast<int>(s));
    std::vector<bool> live(n, false);
    std::deque<int> work;
    for (std::size_t s = 0; s < n; ++s)
        if (a.is_accepting(static_cast<int>(s))) {
            live[s] = true;
            work.push_back(static_cast<int>(s));
        }
    while (!work.empty()) {
        int s = work.front();
        work.pop_front();
        for (int q : rev[s])
            if (!live[q]) {
                live[q] = true;
                work.push_back(q);
            }
    }
    if (!live[a.initial]) return suppress_all_automaton(p);
    if (std::all_of(live.begin(), live.end(), [](bool v) { return v; })) return a;

    AutomatonBuilder b;
    std::vector<int> sid(n);
    for (std::size_t s = 0; s < n; ++s) sid[s] = b.fresh();
    for (std::size_t s = 0; s < n; ++s) {
        const AutState& st = a.states[s];
        if (a.is_accepting(static_cast<int>(s))) b.mark_accepting(sid[s]);
        if (!live[s]) continue;  // unreferenced once dead arms are gone
        if (st.go) {
            b.set_go(sid[s]);
            continue;
        }
        std::set<Action> allowed, dropped, suppressed;
        std::vector<Arm> kept;
        for (const auto& arm : st.arms) {
            if (arm.label.op == EditOp::Suppress) {
                suppressed.insert(arm.label.action);
                kept.push_back({arm.label, live[arm.to] ? arm.to : static_cast<int>(s)});
            } else if (live[arm.to]) {
                if (arm.label.op == EditOp::Allow) allowed.insert(arm.label.action);
                kept.push_back(arm);
            } else if (arm.label.op == EditOp::Allow) {
                dropped.insert(arm.label.action);
            }
        }
        for (const auto& arm : kept) b.add_arm(sid[s], arm.label, sid[arm.to]);
        for (auto x : dropped)
            if (!x.is_tick() && !x.is_end() && !allowed.count(x) && !suppressed.count(x))
                b.add_arm(sid[s], EditLabel::suppress(x), sid[s]);
        if (!b.is_defined(sid[s])) b.define_empty(sid[s]);
    }
    return b.finish(sid[a.initial], a.alphabet, true);
}

LangView allowed_language(const EditAutomaton& a) {
    const EditAutomaton* A = &a;
    // closure over suppress arms, which emit nothing
    auto close = [A](StateSet s) {
        std::set<int> acc(s.begin(), s.end());
        std::vector<int> work(s.begin(), s.end());
        while (!work.empty()) {
            int q = work.back();
            work.pop_back();
            for (const auto& arm : A->states[q].arms)
                if (arm.label.op == EditOp::Suppress && acc.insert(arm.to).second) work.push_back(arm.to);
        }
        return StateSet(acc.begin(), acc.end());
    };
    return LangView{
        [A, close] { return close({A->initial}); },
        [A, close](const StateSet& s, Action x) {
            StateSet out;
            for (int q : s) {
                const AutState& st = A->states[q];
                if (st.go) {
                    if (contains(A->alphabet, x)) out.push_back(q);
                    continue;
                }
                for (const auto& arm : st.arms)
                    if (arm.label.op != EditOp::Suppress && arm.label.emitted() == x) out.push_back(arm.to);
            }
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return close(out);
        },
        [A](const StateSet& s) { return std::any_of(s.begin(), s.end(), [A](int q) { return A->is_accepting(q); }); },
        [](const StateSet& s) { return !s.empty(); },
    };
}

namespace {
const char* op_name(EditOp op) {
    switch (op) {
        case EditOp::Allow: return "allow";
        case EditOp::Suppress: return "suppress";
        case EditOp::Insert: return "insert";
    }
    return "?";
}

std::vector<Arm> canonical_arms(const AutState& st) {
    std::vector<Arm> arms = st.arms;
    std::stable_sort(arms.begin(), arms.end(), [](const Arm& x, const Arm& y) {
        if (x.label < y.label) return true;
        if (y.label < x.label) return false;
        return x.to < y.to;
    });
    return arms;
}
}  // namespace

std::string export_json(const EditAutomaton& a) {
    json j;
    j["initial"] = a.states[a.initial].name;
    json states = json::object();
    for (std::size_t s = 0; s < a.size(); ++s) {
        const AutState& st = a.states[s];
        json body;
        if (st.go) {
            body["kind"] = "go";
        } else {
            body["kind"] = "sum";
            json arms = json::array();
            for (const auto& arm : canonical_arms(st)) {
                json label{{"op", op_name(arm.label.op)}, {"action", arm.label.action.str()}};
                if (arm.label.op == EditOp::Insert) label["inserted"] = arm.label.inserted.str();
                arms.push_back({{"label", label}, {"to", a.states[arm.to].name}});
            }
            body["arms"] = arms;
        }
        if (a.accepting) body["accepting"] = static_cast<bool>((*a.accepting)[s]);
        states[st.name] = body;
    }
    j["states"] = states;
    json alpha = json::array();
    for (auto x : a.alphabet) alpha.push_back(x.str());
    j["alphabet"] = alpha;
    return j.dump(2) + "\n";
}

std::string export_dot(const EditAutomaton& a) {
    std::vector<int> order(a.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a.states[x].name < a.states[y].name; });
    std::ostringstream o;
    o << "digraph edit_automaton {\n  rankdir=LR;\n";
    o << "  __start [shape=point];\n  __start -> \"" << a.states[a.initial].name << "\";\n";
    for (int s : order) {
        const AutState& st = a.states[s];
        o << "  \"" << st.name << "\" [shape=" << (a.accepting && (*a.accepting)[s] ? "doublecircle" : "circle");
        if (st.go) o << ", label=\"" << st.name << "\\ngo\"";
        o << "];\n";
    }
    for (int s : order)
        for (const auto& arm : canonical_arms(a.states[s]))
            o << "  \"" << a.states[s].name << "\" -> \"" << a.states[arm.to].name << "\" [label=\""
              << arm.label.str() << "\"];\n";
    o << "}\n";
    return o.str();
}

EditAutomaton import_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw AutomatonError(std::string("bad automaton JSON: ") + e.what());
    }
    try {
        EditAutomaton a;
        std::map<std::string, int> ids;
        for (auto it = j.at("states").begin(); it != j.at("states").end(); ++it) {
            ids[it.key()] = static_cast<int>(a.states.size());
            a.states.push_back({it.key(), false, {}});
        }
        auto lookup = [&](const std::string& name) {
            auto it = ids.find(name);
            if (it == ids.end()) throw AutomatonError("reference to undefined state " + name);
            return it->second;
        };
        bool any_marks = false;
        std::vector<bool> marks(a.states.size(), false);
        for (auto it = j.at("states").begin(); it != j.at("states").end(); ++it) {
            int s = ids[it.key()];
            const json& body = it.value();
            std::string kind = body.at("kind");
            if (body.contains("accepting")) {
                any_marks = true;
                marks[s] = body.at("accepting").get<bool>();
            }
            if (kind == "go") {
                a.states[s].go = true;
                continue;
            }
            if (kind != "sum") throw AutomatonError("unknown state kind " + kind);
            for (const auto& arm : body.at("arms")) {
                const json& l = arm.at("label");
                std::string op = l.at("op");
                Action act = Action::parse(l.at("action").get<std::string>());
                EditLabel lab;
                if (op == "allow") lab = EditLabel::allow(act);
                else if (op == "suppress") lab = EditLabel::suppress(act);
                else if (op == "insert") lab = EditLabel::insert(act, Action::parse(l.at("inserted").get<std::string>()));
                else throw AutomatonError("unknown label op " + op);
                if (act.is_tau() || (lab.op == EditOp::Insert && lab.inserted.is_tau()))
                    throw AutomatonError("tau cannot appear in an edit label");
                a.states[s].arms.push_back({lab, lookup(arm.at("to").get<std::string>())});
            }
        }
        a.initial = lookup(j.at("initial").get<std::string>());
        if (j.contains("alphabet")) {
            std::vector<Action> acts;
            for (const auto& x : j.at("alphabet")) acts.push_back(Action::parse(x.get<std::string>()));
            a.alphabet = make_alphabet(acts);
        }
        if (any_marks) a.accepting = marks;
        return a;
    } catch (const json::exception& e) {
        throw AutomatonError(std::string("malformed automaton: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw AutomatonError(std::string("malformed automaton: ") + e.what());
    }
}

bool structurally_equal(const EditAutomaton& a, const EditAutomaton& b) {
    if (a.size() != b.size() || a.alphabet != b.alphabet) return false;
    if (a.accepting.has_value() != b.accepting.has_value()) return false;
    if (a.states[a.initial].name != b.states[b.initial].name) return false;
    for (std::size_t s = 0; s < a.size(); ++s) {
        int t = b.find(a.states[s].name);
        if (t < 0 || a.states[s].go != b.states[t].go) return false;
        if (a.accepting && (*a.accepting)[s] != (*b.accepting)[t]) return false;
        auto x = canonical_arms(a.states[s]);
        auto y = canonical_arms(b.states[t]);
        if (x.size() != y.size()) return false;
        for (std::size_t k = 0; k < x.size(); ++k)
            if (!(x[k].label == y[k].label) || a.states[x[k].to].name != b.states[y[k].to].name) return false;
    }
    return true;
}

}  // namespace enforcemint
