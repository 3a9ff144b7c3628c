#include "enforcemint/nfa.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace enforcemint {

namespace {

struct EpsNfa {
    std::vector<std::vector<std::pair<Action, int>>> edges;
    std::vector<std::vector<int>> eps;
    std::vector<bool> acc;

    int add(bool accepting = false) {
        edges.emplace_back();
        eps.emplace_back();
        acc.push_back(accepting);
        return static_cast<int>(acc.size()) - 1;
    }
};

// Keeps only states that are reachable and can still accept; renumbers.
PropNfa trim(const std::vector<std::vector<std::pair<Action, int>>>& edges, const std::vector<bool>& acc,
             int initial) {
    const int n = static_cast<int>(acc.size());
    std::vector<std::vector<int>> rev(n);
    for (int q = 0; q < n; ++q)
        for (auto [a, t] : edges[q]) rev[t].push_back(q);
    std::vector<bool> live(n, false);
    std::deque<int> work;
    for (int q = 0; q < n; ++q)
        if (acc[q]) {
            live[q] = true;
            work.push_back(q);
        }
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        for (int p : rev[q])
            if (!live[p]) {
                live[p] = true;
                work.push_back(p);
            }
    }

    PropNfa out;
    if (!live[initial]) {
        out.initial = 0;
        out.accepting = {false};
        out.edges.resize(1);
        out.live = {false};
        return out;
    }
    std::vector<int> id(n, -1);
    std::vector<int> order{initial};
    id[initial] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto [a, t] : edges[order[i]])
            if (live[t] && id[t] < 0) {
                id[t] = static_cast<int>(order.size());
                order.push_back(t);
            }
    out.initial = 0;
    out.accepting.resize(order.size());
    out.edges.resize(order.size());
    out.live.assign(order.size(), true);
    for (std::size_t i = 0; i < order.size(); ++i) {
        int q = order[i];
        out.accepting[i] = acc[q];
        for (auto [a, t] : edges[q])
            if (live[t]) out.edges[i].push_back({a, id[t]});
        auto& e = out.edges[i];
        std::sort(e.begin(), e.end(), [](auto& x, auto& y) {
            return x.first.id() != y.first.id() ? x.first.id() < y.first.id() : x.second < y.second;
        });
        e.erase(std::unique(e.begin(), e.end(),
                            [](auto& x, auto& y) { return x.first == y.first && x.second == y.second; }),
                e.end());
    }
    return out;
}

PropNfa eliminate(const EpsNfa& n, int start) {
    const int sz = static_cast<int>(n.acc.size());
    std::vector<std::vector<std::pair<Action, int>>> edges(sz);
    std::vector<bool> acc(sz, false);
    std::vector<bool> done(sz, false);
    std::deque<int> work{start};
    done[start] = true;
    std::vector<int> mark(sz, -1);
    while (!work.empty()) {
        int q = work.front();
        work.pop_front();
        std::vector<int> closure{q};
        mark[q] = q;
        for (std::size_t i = 0; i < closure.size(); ++i)
            for (int r : n.eps[closure[i]])
                if (mark[r] != q) {
                    mark[r] = q;
                    closure.push_back(r);
                }
        for (int c : closure) {
            if (n.acc[c]) acc[q] = true;
            for (auto [a, t] : n.edges[c]) {
                edges[q].push_back({a, t});
                if (!done[t]) {
                    done[t] = true;
                    work.push_back(t);
                }
            }
        }
    }
    return trim(edges, acc, start);
}

class Builder {
public:
    explicit Builder(EpsNfa& n) : n_(n) {}

    // State from which exactly the words of p lead to k.
    int build(Local p, int k) {
        auto key = std::make_pair(p, k);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        int s = -1;
        switch (p->kind) {
            case LKind::Eps: s = k; break;
            case LKind::Seq: s = build(p->lhs, build(p->rhs, k)); break;
            case LKind::Union: {
                std::vector<std::pair<Action, int>> out;
                for (const auto& b : p->branches) out.push_back({b.event, build(b.body, k)});
                s = n_.add();
                n_.edges[s] = std::move(out);
                break;
            }
            case LKind::Inter: s = embed(product(to_nfa(p->lhs), to_nfa(p->rhs)), k); break;
        }
        memo_.emplace(key, s);
        return s;
    }

private:
    EpsNfa& n_;
    std::map<std::pair<Local, int>, int> memo_;

    int embed(const PropNfa& sub, int k) {
        int base = static_cast<int>(n_.acc.size());
        for (std::size_t i = 0; i < sub.size(); ++i) n_.add();
        for (std::size_t i = 0; i < sub.size(); ++i) {
            for (auto [a, t] : sub.edges[i]) n_.edges[base + i].push_back({a, base + t});
            if (sub.accepting[i]) n_.eps[base + i].push_back(k);
        }
        return base + sub.initial;
    }
};

}  // namespace

StateSet PropNfa::start() const { return live[initial] ? StateSet{initial} : StateSet{}; }

StateSet PropNfa::step(const StateSet& s, Action a) const {
    StateSet out;
    for (int q : s)
        for (auto [b, t] : edges[q])
            if (b == a) out.push_back(t);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool PropNfa::accepts(const StateSet& s) const {
    return std::any_of(s.begin(), s.end(), [&](int q) { return accepting[q]; });
}

bool PropNfa::alive(const StateSet& s) const {
    return std::any_of(s.begin(), s.end(), [&](int q) { return live[q]; });
}

PropNfa to_nfa(Local p) {
    EpsNfa n;
    int fin = n.add(true);
    int s = Builder(n).build(p, fin);
    return eliminate(n, s);
}

PropNfa to_nfa(Global e) {
    if (e->kind == GKind::Inter) return product(to_nfa(e->lhs), to_nfa(e->rhs));
    EpsNfa n;
    int hub = n.add(true);
    int entry = Builder(n).build(e->body, hub);
    n.eps[hub].push_back(entry);
    return eliminate(n, hub);
}

PropNfa product(const PropNfa& a, const PropNfa& b) {
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<int, int>> order;
    auto get = [&](int x, int y) {
        auto [it, fresh] = id.emplace(std::make_pair(x, y), static_cast<int>(order.size()));
        if (fresh) order.push_back({x, y});
        return it->second;
    };
    get(a.initial, b.initial);
    std::vector<std::vector<std::pair<Action, int>>> edges;
    std::vector<bool> acc;
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto [x, y] = order[i];
        std::vector<std::pair<Action, int>> out;
        for (auto [ea, tx] : a.edges[x])
            for (auto [eb, ty] : b.edges[y])
                if (ea == eb) out.push_back({ea, get(tx, ty)});
        edges.push_back(std::move(out));
        acc.push_back(a.accepting[x] && b.accepting[y]);
    }
    return trim(edges, acc, 0);
}

namespace {
StateSet run(const Trace& t, const PropNfa& n) {
    StateSet s = n.start();
    for (auto a : t) {
        if (a.is_tau()) throw std::invalid_argument("trace contains tau; erase it before checking");
        s = n.step(s, a);
        if (s.empty()) break;
    }
    return s;
}
}  // namespace

bool lang_member(const Trace& t, const PropNfa& n) { return n.accepts(run(t, n)); }
bool lang_prefix(const Trace& t, const PropNfa& n) { return n.alive(run(t, n)); }
bool lang_member(const Trace& t, Global e) { return lang_member(t, to_nfa(e)); }
bool lang_prefix(const Trace& t, Global e) { return lang_prefix(t, to_nfa(e)); }

std::set<Trace> enumerate(const PropNfa& n, std::size_t max_len) {
    std::set<Trace> out;
    Alphabet sigma;
    for (const auto& es : n.edges)
        for (auto [a, t] : es) sigma.push_back(a);
    sigma = make_alphabet(sigma);
    Trace w;
    std::function<void(const StateSet&)> go = [&](const StateSet& s) {
        if (n.accepts(s)) out.insert(w);
        if (w.size() == max_len) return;
        for (auto a : sigma) {
            StateSet nx = n.step(s, a);
            if (nx.empty()) continue;
            w.push_back(a);
            go(nx);
            w.pop_back();
        }
    };
    go(n.start());
    return out;
}

LangView view(const PropNfa& n) {
    const PropNfa* p = &n;
    return LangView{
        [p] { return p->start(); },
        [p](const StateSet& s, Action a) { return p->step(s, a); },
        [p](const StateSet& s) { return p->accepts(s); },
        [p](const StateSet& s) { return p->alive(s); },
    };
}

namespace {
struct PairHash {
    std::size_t operator()(const std::pair<StateSet, StateSet>& p) const noexcept {
        StateSetHash h;
        return h(p.first) * 31 + h(p.second);
    }
};
}  // namespace

std::optional<LangDiff> bounded_diff(const LangView& a, const LangView& b, const Alphabet& sigma, std::size_t depth,
                                     bool check_membership) {
    struct Item {
        StateSet sa, sb;
        Trace word;
    };
    std::unordered_set<std::pair<StateSet, StateSet>, PairHash> seen;
    std::deque<Item> work;
    work.push_back({a.start(), b.start(), {}});
    seen.insert({work.back().sa, work.back().sb});
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        bool la = a.alive(it.sa), lb = b.alive(it.sb);
        if (la != lb) return LangDiff{it.word, false};
        if (check_membership && a.accepts(it.sa) != b.accepts(it.sb)) return LangDiff{it.word, true};
        if (!la || it.word.size() >= depth) continue;
        for (auto x : sigma) {
            StateSet na = a.step(it.sa, x), nb = b.step(it.sb, x);
            if (!seen.insert({na, nb}).second) continue;
            Trace w = it.word;
            w.push_back(x);
            work.push_back({std::move(na), std::move(nb), std::move(w)});
        }
    }
    return std::nullopt;
}

std::optional<Trace> bounded_not_included(const LangView& a, const LangView& b, const Alphabet& sigma,
                                          std::size_t depth) {
    struct Item {
        StateSet sa, sb;
        Trace word;
    };
    std::unordered_set<std::pair<StateSet, StateSet>, PairHash> seen;
    std::deque<Item> work;
    work.push_back({a.start(), b.start(), {}});
    while (!work.empty()) {
        Item it = std::move(work.front());
        work.pop_front();
        if (a.accepts(it.sa) && !b.accepts(it.sb)) return it.word;
        if (!a.alive(it.sa) || it.word.size() >= depth) continue;
        for (auto x : sigma) {
            StateSet na = a.step(it.sa, x), nb = b.step(it.sb, x);
            if (!seen.insert({na, nb}).second) continue;
            Trace w = it.word;
            w.push_back(x);
            work.push_back({std::move(na), std::move(nb), std::move(w)});
        }
    }
    return std::nullopt;
}

}  // namespace enforcemint
