#include "enforcemint/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace enforcemint {

void SynthContext::add_suppressions(int s, const std::vector<Action>& keep) {
    for (auto x : alphabet_) {
        if (x.is_tick() || x.is_end()) continue;
        if (std::find(keep.begin(), keep.end(), x) != keep.end()) continue;
        b_.add_arm(s, EditLabel::suppress(x), s);
    }
}

int SynthContext::synthesize_local(Local p, int k) {
    auto key = std::make_pair(p, k);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int s = -1;
    switch (p->kind) {
        case LKind::Eps: s = k; break;
        case LKind::Seq: s = synthesize_local(p->lhs, synthesize_local(p->rhs, k)); break;
        case LKind::Inter: s = local_product(p->lhs, p->rhs, k); break;
        case LKind::Union: {
            std::vector<int> targets;
            std::vector<Action> guards;
            for (const auto& br : p->branches) {
                targets.push_back(synthesize_local(br.body, k));
                guards.push_back(br.event);
            }
            s = b_.fresh();
            for (std::size_t i = 0; i < guards.size(); ++i) b_.add_arm(s, EditLabel::allow(guards[i]), targets[i]);
            for (std::size_t i = 0; i < guards.size(); ++i)
                if (!guards[i].is_end()) b_.add_arm(s, EditLabel::insert(Action::end(), guards[i]), targets[i]);
            add_suppressions(s, guards);
            break;
        }
    }
    memo_.emplace(key, s);
    return s;
}

// Product of the two branches compiled up to their own sentinels; the pair
// of sentinels is the point where both have finished and continues at k.
int SynthContext::local_product(Local p1, Local p2, int k) {
    auto compile = [&](Local p, int& sentinel) {
        SynthContext sub(alphabet_);
        int d = sub.b_.fresh();
        sub.b_.define_empty(d);
        sub.b_.mark_accepting(d);
        EditAutomaton a = sub.b_.finish(sub.synthesize_local(p, d), alphabet_, true);
        sentinel = -1;
        for (std::size_t i = 0; i < a.size(); ++i)
            if ((*a.accepting)[i]) sentinel = static_cast<int>(i);
        return a;
    };
    int d1, d2;
    EditAutomaton a1 = compile(p1, d1);
    EditAutomaton a2 = compile(p2, d2);

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
        auto [i, j] = std::make_pair(nodes[n].i, nodes[n].j);
        if (i == d1 && j == d2) continue;
        std::vector<std::pair<Action, int>> matched;
        for (const auto& x : a1.states[i].arms) {
            if (x.label.op != EditOp::Allow) continue;
            for (const auto& y : a2.states[j].arms)
                if (y.label.op == EditOp::Allow && y.label.action == x.label.action)
                    matched.push_back({x.label.action, get(x.to, y.to)});
        }
        nodes[n].matched = std::move(matched);
    }

    // pairs that can still reach the joint sentinel
    const std::size_t n = nodes.size();
    std::vector<std::vector<int>> rev(n);
    for (std::size_t q = 0; q < n; ++q)
        for (auto [x, t] : nodes[q].matched) rev[t].push_back(static_cast<int>(q));
    std::vector<bool> live(n, false);
    std::deque<int> work;
    if (auto it = index.find({d1, d2}); it != index.end()) {
        live[it->second] = true;
        work.push_back(it->second);
    }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int r : rev[q])
            if (!live[r]) {
                live[r] = true;
                work.push_back(r);
            }
    }

    std::vector<int> sid(n, -1);
    auto state_of = [&](int q) {
        if (nodes[q].i == d1 && nodes[q].j == d2) return k;
        if (sid[q] < 0) sid[q] = b_.fresh();
        return sid[q];
    };
    if (!live[0]) {
        // empty intersection: a pure suppression state, cut later by pruning
        int s = b_.fresh();
        b_.define_empty(s);
        add_suppressions(s, {});
        return s;
    }
    std::vector<bool> done(n, false);
    std::deque<int> todo{0};
    done[0] = true;
    while (!todo.empty()) {
        int q = todo.front();
        todo.pop_front();
        if (nodes[q].i == d1 && nodes[q].j == d2) continue;
        int s = state_of(q);
        std::vector<std::pair<Action, int>> arms;
        std::vector<Action> kept;
        for (auto [x, t] : nodes[q].matched) {
            if (!live[t]) continue;
            arms.push_back({x, t});
            kept.push_back(x);
            if (!done[t]) {
                done[t] = true;
                todo.push_back(t);
            }
        }
        for (auto [x, t] : arms) b_.add_arm(s, EditLabel::allow(x), state_of(t));
        for (auto [x, t] : arms)
            if (!x.is_end()) b_.add_arm(s, EditLabel::insert(Action::end(), x), state_of(t));
        add_suppressions(s, kept);
    }
    return state_of(0);
}

void check_synthesizable(Global e, const Alphabet& p) {
    if (!well_formed(e))
        throw SynthError(SynthError::IllFormed, "property is not well formed: every branch must close its cycle with end");
    if (!is_deterministic(e))
        throw SynthError(SynthError::Nondeterministic,
                         "property is not deterministic: some union has two branches guarded by the same event");
    for (auto a : events_of(e))
        if (!contains(p, a)) throw SynthError(SynthError::AlphabetMismatch, "event " + a.str() + " is not in the alphabet");
}

namespace {
EditAutomaton synth(Global e, const Alphabet& p) {
    if (e->kind == GKind::Inter) return cross_product(synth(e->lhs, p), synth(e->rhs, p), p);
    SynthContext ctx(p);
    AutomatonBuilder& b = ctx.builder();
    int x = b.fresh("X");
    b.mark_accepting(x);
    int entry = ctx.synthesize_local(e->body, x);
    b.alias(x, entry);
    return prune_dead(b.finish(x, p, true), p);
}
}  // namespace

EditAutomaton synthesize(Global e, const Alphabet& p) {
    check_synthesizable(e, p);
    return synth(e, p);
}

BoundReport check_derivative_bound(Global e, const Alphabet& p) {
    BoundReport r{};
    r.states = reachable_state_count(synthesize(e, p));
    r.m = prop_size(e);
    r.k = inter_count(e);
    r.bound = derivative_bound(r.m, r.k);
    r.ok = r.states <= r.bound;
    return r;
}

}  // namespace enforcemint
