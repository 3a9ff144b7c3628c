#include "enforcemint/property.hpp"

#include <deque>
#include <functional>
#include <limits>
#include <mutex>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace enforcemint {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSat - b ? kSat : a + b; }
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    return a > kSat / b ? kSat : a * b;
}

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

struct LocalKeyHash {
    std::size_t operator()(const LocalNode* n) const {
        std::size_t h = static_cast<std::size_t>(n->kind);
        h = mix(h, std::hash<const void*>{}(n->lhs));
        h = mix(h, std::hash<const void*>{}(n->rhs));
        for (const auto& b : n->branches) {
            h = mix(h, b.event.id());
            h = mix(h, std::hash<const void*>{}(b.body));
        }
        return h;
    }
};
struct LocalKeyEq {
    bool operator()(const LocalNode* a, const LocalNode* b) const {
        if (a->kind != b->kind || a->lhs != b->lhs || a->rhs != b->rhs) return false;
        if (a->branches.size() != b->branches.size()) return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i)
            if (a->branches[i].event != b->branches[i].event || a->branches[i].body != b->branches[i].body)
                return false;
        return true;
    }
};
struct GlobalKeyHash {
    std::size_t operator()(const GlobalNode* n) const {
        std::size_t h = static_cast<std::size_t>(n->kind);
        h = mix(h, std::hash<const void*>{}(n->body));
        h = mix(h, std::hash<const void*>{}(n->lhs));
        return mix(h, std::hash<const void*>{}(n->rhs));
    }
};
struct GlobalKeyEq {
    bool operator()(const GlobalNode* a, const GlobalNode* b) const {
        return a->kind == b->kind && a->body == b->body && a->lhs == b->lhs && a->rhs == b->rhs;
    }
};

class Store {
public:
    Local intern(LocalNode n) {
        std::lock_guard lock(mu_);
        if (auto it = locals_.find(&n); it != locals_.end()) return *it;
        local_arena_.push_back(std::move(n));
        Local p = &local_arena_.back();
        locals_.insert(p);
        return p;
    }
    Global intern(GlobalNode n) {
        std::lock_guard lock(mu_);
        if (auto it = globals_.find(&n); it != globals_.end()) return *it;
        global_arena_.push_back(n);
        Global p = &global_arena_.back();
        globals_.insert(p);
        return p;
    }

private:
    std::mutex mu_;
    std::deque<LocalNode> local_arena_;
    std::deque<GlobalNode> global_arena_;
    std::unordered_set<const LocalNode*, LocalKeyHash, LocalKeyEq> locals_;
    std::unordered_set<const GlobalNode*, GlobalKeyHash, GlobalKeyEq> globals_;
};

Store& store() {
    static Store s;
    return s;
}

// Generic memoized fold over the DAG.
template <class R, class F>
R fold(Local p, std::unordered_map<Local, R>& memo, F&& f) {
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    R r = f(p);
    memo.emplace(p, r);
    return r;
}

bool is_end_eps(Local p) {
    return p->kind == LKind::Union && p->branches.size() == 1 && p->branches[0].event.is_end() &&
           p->branches[0].body->kind == LKind::Eps;
}

}  // namespace

namespace prop {

Local eps() {
    static Local e = store().intern(LocalNode{LKind::Eps});
    return e;
}
Local seq(Local a, Local b) { return store().intern(LocalNode{LKind::Seq, a, b, {}}); }
Local inter(Local a, Local b) { return store().intern(LocalNode{LKind::Inter, a, b, {}}); }
Local choice(std::vector<Branch> branches) {
    if (branches.empty()) throw std::invalid_argument("union with no branches");
    for (const auto& b : branches)
        if (b.event.is_tau()) throw std::invalid_argument("tau cannot guard a property branch");
    return store().intern(LocalNode{LKind::Union, nullptr, nullptr, std::move(branches)});
}
Local prefix(Action ev, Local body) { return choice({{ev, body}}); }
Local event(Action ev) { return prefix(ev, eps()); }
Global star(Local body) { return store().intern(GlobalNode{GKind::Star, body, nullptr, nullptr}); }
Global inter(Global a, Global b) { return store().intern(GlobalNode{GKind::Inter, nullptr, a, b}); }

}  // namespace prop

bool well_formed(Local p) {
    std::unordered_map<Local, bool> memo;
    std::function<bool(Local)> wf = [&](Local q) -> bool {
        return fold(q, memo, [&](Local n) -> bool {
            switch (n->kind) {
                case LKind::Eps: return false;
                case LKind::Seq: return wf(n->rhs);
                case LKind::Inter: return wf(n->lhs) && wf(n->rhs);
                case LKind::Union:
                    if (is_end_eps(n)) return true;
                    for (const auto& b : n->branches) {
                        bool leaf = b.event.is_end() && b.body->kind == LKind::Eps;
                        if (!leaf && !wf(b.body)) return false;
                    }
                    return true;
            }
            return false;
        });
    };
    return wf(p);
}

bool well_formed(Global e) {
    if (e->kind == GKind::Star) return well_formed(e->body);
    return well_formed(e->lhs) && well_formed(e->rhs);
}

std::uint64_t prop_size(Local p) {
    std::unordered_map<Local, std::uint64_t> memo;
    std::function<std::uint64_t(Local)> sz = [&](Local q) -> std::uint64_t {
        return fold(q, memo, [&](Local n) -> std::uint64_t {
            switch (n->kind) {
                case LKind::Eps: return 1;
                case LKind::Seq:
                case LKind::Inter: return sat_add(sat_add(sz(n->lhs), sz(n->rhs)), 1);
                case LKind::Union: {
                    std::uint64_t s = n->branches.size();
                    for (const auto& b : n->branches) s = sat_add(s, sz(b.body));
                    return s;
                }
            }
            return 0;
        });
    };
    return sz(p);
}

std::uint64_t prop_size(Global e) {
    if (e->kind == GKind::Star) return prop_size(e->body);
    return sat_add(sat_add(prop_size(e->lhs), prop_size(e->rhs)), 1);
}

namespace {
void collect_events(Local p, std::unordered_set<Local>& seen, std::set<Action>& out) {
    if (!seen.insert(p).second) return;
    switch (p->kind) {
        case LKind::Eps: return;
        case LKind::Seq:
        case LKind::Inter:
            collect_events(p->lhs, seen, out);
            collect_events(p->rhs, seen, out);
            return;
        case LKind::Union:
            for (const auto& b : p->branches) {
                out.insert(b.event);
                collect_events(b.body, seen, out);
            }
            return;
    }
}
void collect_events(Global e, std::unordered_set<Local>& seen, std::set<Action>& out) {
    if (e->kind == GKind::Star) return collect_events(e->body, seen, out);
    collect_events(e->lhs, seen, out);
    collect_events(e->rhs, seen, out);
}
}  // namespace

Alphabet events_of(Local p) {
    std::unordered_set<Local> seen;
    std::set<Action> out;
    collect_events(p, seen, out);
    return Alphabet(out.begin(), out.end());
}

Alphabet events_of(Global e) {
    std::unordered_set<Local> seen;
    std::set<Action> out;
    collect_events(e, seen, out);
    return Alphabet(out.begin(), out.end());
}

bool is_deterministic(Local p) {
    std::unordered_map<Local, bool> memo;
    std::function<bool(Local)> det = [&](Local q) -> bool {
        return fold(q, memo, [&](Local n) -> bool {
            switch (n->kind) {
                case LKind::Eps: return true;
                case LKind::Seq:
                case LKind::Inter: return det(n->lhs) && det(n->rhs);
                case LKind::Union: {
                    std::unordered_set<Action> guards;
                    for (const auto& b : n->branches)
                        if (!guards.insert(b.event).second) return false;
                    for (const auto& b : n->branches)
                        if (!det(b.body)) return false;
                    return true;
                }
            }
            return false;
        });
    };
    return det(p);
}

bool is_deterministic(Global e) {
    if (e->kind == GKind::Star) return is_deterministic(e->body);
    return is_deterministic(e->lhs) && is_deterministic(e->rhs);
}

std::uint64_t inter_count(Global e) {
    std::unordered_map<Local, std::uint64_t> memo;
    std::function<std::uint64_t(Local)> cnt = [&](Local q) -> std::uint64_t {
        return fold(q, memo, [&](Local n) -> std::uint64_t {
            switch (n->kind) {
                case LKind::Eps: return 0;
                case LKind::Seq: return sat_add(cnt(n->lhs), cnt(n->rhs));
                case LKind::Inter: return sat_add(sat_add(cnt(n->lhs), cnt(n->rhs)), 1);
                case LKind::Union: {
                    std::uint64_t s = 0;
                    for (const auto& b : n->branches) s = sat_add(s, cnt(b.body));
                    return s;
                }
            }
            return 0;
        });
    };
    std::function<std::uint64_t(Global)> g = [&](Global x) -> std::uint64_t {
        if (x->kind == GKind::Star) return cnt(x->body);
        return sat_add(sat_add(g(x->lhs), g(x->rhs)), 1);
    };
    return g(e);
}

std::size_t dag_size(Local p) {
    std::unordered_set<Local> seen;
    std::vector<Local> stack{p};
    while (!stack.empty()) {
        Local n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) continue;
        if (n->lhs) stack.push_back(n->lhs);
        if (n->rhs) stack.push_back(n->rhs);
        for (const auto& b : n->branches) stack.push_back(b.body);
    }
    return seen.size();
}

std::uint64_t derivative_bound(std::uint64_t m, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i <= k; ++i) {
        r = sat_mul(r, m);
        if (r == kSat) break;
    }
    return r;
}

namespace {

// Precedence levels: 0 '&', 1 ';', 2 '+', 3 prefix/atom.
std::string print(Local p, int ctx);

std::string print_branch(const Branch& b) {
    if (b.body->kind == LKind::Eps) return b.event.str();
    return b.event.str() + " . " + print(b.body, 3);
}

std::string print(Local p, int ctx) {
    std::string s;
    int level = 3;
    switch (p->kind) {
        case LKind::Eps: return "eps";
        case LKind::Inter:
            level = 0;
            s = print(p->lhs, 0) + " & " + print(p->rhs, 1);
            break;
        case LKind::Seq:
            level = 1;
            s = print(p->lhs, 2) + " ; " + print(p->rhs, 1);
            break;
        case LKind::Union:
            if (p->branches.size() == 1) {
                level = 3;
                s = print_branch(p->branches[0]);
            } else {
                level = 2;
                for (std::size_t i = 0; i < p->branches.size(); ++i) {
                    if (i) s += " + ";
                    s += print_branch(p->branches[i]);
                }
            }
            break;
    }
    return level < ctx ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(Local p) { return print(p, 0); }

std::string to_string(Global e) {
    if (e->kind == GKind::Star) return "(" + print(e->body, 0) + ")*";
    return to_string(e->lhs) + " & " + to_string(e->rhs);
}

}  // namespace enforcemint
