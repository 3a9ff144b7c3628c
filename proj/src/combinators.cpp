#include "enforcemint/combinators.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace enforcemint {

namespace {

using prop::choice;
using prop::eps;

Local end_then(Local p) { return prop::prefix(Action::end(), p); }
Local end_only() { return prop::event(Action::end()); }

Alphabet minus(const Alphabet& a, const std::vector<Action>& drop) {
    Alphabet out;
    for (auto x : a)
        if (std::find(drop.begin(), drop.end(), x) == drop.end()) out.push_back(x);
    return out;
}

void require_pure(Action a, const CombinatorEnv& env, const char* what) {
    if (a.is_tick() || a.is_end() || a.is_tau())
        throw CombinatorError(std::string(what) + ": trigger may not be tick, end or tau (got " + a.str() + ")");
    if (!contains(env.puevents, a))
        throw CombinatorError(std::string(what) + ": event " + a.str() + " is not in the alphabet", true);
}

void require_positive(std::uint32_t v, const char* what) {
    if (v == 0) throw CombinatorError(std::string(what) + ": bound must be at least 1");
}

// Memo for whole expansions, keyed by a textual rendering of the call.
class Memo {
public:
    template <class F>
    Local get(const std::string& key, F&& build) {
        {
            std::lock_guard lock(mu_);
            if (auto it = table_.find(key); it != table_.end()) return it->second;
        }
        Local r = build();
        std::lock_guard lock(mu_);
        table_.emplace(key, r);
        return r;
    }

private:
    std::mutex mu_;
    std::map<std::string, Local> table_;
};

Memo& memo() {
    static Memo m;
    return m;
}

std::string env_key(const CombinatorEnv& env) {
    std::string k = std::to_string(env.maxa) + "|";
    for (auto a : env.pevents) k += a.str() + ",";
    return k;
}

// Appends (a, next) for every a in `rest`.
void fallthrough(std::vector<Branch>& br, const Alphabet& rest, Local next) {
    for (auto a : rest) br.push_back({a, next});
}

// The two-level q^h_k tables shared by PCND, BE, BP and BME: levels h = 1..m,
// budgets k = 0..maxa. `zero(h)` and `step(h, k, q)` build the entries.
template <class Zero, class Step>
Local ladder(std::uint32_t m, std::uint32_t maxa, Zero zero, Step step) {
    std::vector<std::vector<Local>> q(m + 1, std::vector<Local>(maxa + 1, nullptr));
    for (std::uint32_t h = 1; h <= m; ++h) {
        q[h][0] = zero(h, q);
        for (std::uint32_t k = 1; k <= maxa; ++k) q[h][k] = step(h, k, q);
    }
    return q[m][maxa];
}

Local be_or_bp(bool persistent, Action pi, std::uint32_t m, const CombinatorEnv& env) {
    const Alphabet rest = minus(env.pevents, {pi});
    const std::uint32_t maxa = env.maxa;
    return ladder(
        m, maxa,
        [&](std::uint32_t h, auto& q) -> Local {
            if (h == 1) return prop::prefix(pi, end_only());
            if (persistent) return prop::prefix(pi, end_then(q[h - 1][maxa]));
            return end_then(q[h - 1][maxa]);
        },
        [&](std::uint32_t h, std::uint32_t k, auto& q) -> Local {
            std::vector<Branch> br;
            Local window = power_upto(env.pevents, k - 1);
            if (h == 1) {
                br.push_back({pi, window});
            } else if (persistent) {
                br.push_back({pi, prop::seq(window, q[h - 1][maxa])});
            } else {
                br.push_back({Action::end(), q[h - 1][maxa]});
                br.push_back({pi, window});
            }
            fallthrough(br, rest, q[h][k - 1]);
            return choice(std::move(br));
        });
}

Local absence(Action pi, std::uint32_t m, const CombinatorEnv& env) {
    // q_1 = (P\pi)^{<=maxa}; the trailing ";eps" of the printed scheme is
    // dropped so the result stays well formed (same language).
    Local block = power_upto(minus(env.pevents, {pi}), env.maxa);
    Local q = block;
    for (std::uint32_t h = 2; h <= m; ++h) q = prop::seq(block, q);
    return q;
}

}  // namespace

CombinatorEnv CombinatorEnv::from_alphabet(const Alphabet& p, std::uint32_t maxa) {
    if (maxa == 0) throw CombinatorError("maxa must be at least 1");
    CombinatorEnv env;
    env.maxa = maxa;
    for (auto a : p) {
        if (a.is_tau()) throw CombinatorError("tau in alphabet");
        if (a.is_end()) continue;
        env.pevents.push_back(a);
        if (!a.is_tick()) env.puevents.push_back(a);
    }
    env.pevents = make_alphabet(env.pevents);
    env.puevents = make_alphabet(env.puevents);
    return env;
}

Local power_upto(const Alphabet& a, std::uint32_t k) {
    for (auto x : a)
        if (x.is_end()) throw CombinatorError("power_upto: end may not be in the base set");
    Local q = end_only();
    for (std::uint32_t i = 1; i <= k; ++i) {
        std::vector<Branch> br{{Action::end(), eps()}};
        fallthrough(br, a, q);
        q = choice(std::move(br));  // an empty A leaves just end
    }
    return q;
}

Local repeat_then(Local a, std::uint32_t n, Local rest) {
    Local q = rest;
    for (std::uint32_t i = 0; i < n; ++i) q = prop::seq(a, q);
    return q;
}

Local conditional(CondKind kind, const std::vector<std::pair<Action, Local>>& triggers, std::uint32_t m,
                  const CombinatorEnv& env) {
    std::vector<Action> guards;
    for (const auto& [ev, p] : triggers) {
        require_pure(ev, env, "conditional");
        if (std::find(guards.begin(), guards.end(), ev) != guards.end())
            throw CombinatorError("conditional: duplicate trigger " + ev.str());
        guards.push_back(ev);
    }
    if (kind == CondKind::Cond && triggers.size() != 1)
        throw CombinatorError("CND takes exactly one trigger");
    if (kind == CondKind::Persistent) {
        require_positive(m, "PCND");
        if (triggers.size() != 1) throw CombinatorError("PCND takes exactly one trigger");
    } else {
        m = 1;
    }
    std::string key = "cond|" + std::to_string(m) + "|" + env_key(env);
    for (const auto& [ev, p] : triggers)
        key += ev.str() + "@" + std::to_string(reinterpret_cast<std::uintptr_t>(p)) + ";";

    return memo().get(key, [&] {
        const Alphabet rest = minus(env.pevents, guards);
        const std::uint32_t maxa = env.maxa;
        return ladder(
            m, maxa,
            [&](std::uint32_t h, auto& q) -> Local {
                // q^1_0 is printed as eps; end keeps CND = PCND(.,.,1)
                // and well-formedness.
                return h == 1 ? end_only() : end_then(q[h - 1][maxa]);
            },
            [&](std::uint32_t h, std::uint32_t k, auto& q) -> Local {
                std::vector<Branch> br;
                br.push_back({Action::end(), h == 1 ? eps() : q[h - 1][maxa]});
                for (const auto& [ev, p] : triggers) br.push_back({ev, p});
                fallthrough(br, rest, q[h][k - 1]);
                return choice(std::move(br));
            });
    });
}

Local bounded(BoundKind kind, Action pi, std::uint32_t m, const CombinatorEnv& env) {
    require_pure(pi, env, "bounded");
    require_positive(m, "bounded");
    std::string key = "bnd|" + std::to_string(static_cast<int>(kind)) + "|" + pi.str() + "|" +
                      std::to_string(m) + "|" + env_key(env);
    return memo().get(key, [&] {
        switch (kind) {
            case BoundKind::Eventually: return be_or_bp(false, pi, m, env);
            case BoundKind::Persistency: return be_or_bp(true, pi, m, env);
            case BoundKind::Absence: return absence(pi, m, env);
        }
        return eps();
    });
}

Local cond_bounded(BoundKind kind, Action pi1, Action pi2, std::uint32_t m, std::uint32_t n,
                   const CombinatorEnv& env) {
    if (m == 0 || m > n) throw CombinatorError("conditional bounded: need 1 <= m <= n");
    require_pure(pi1, env, "conditional bounded");
    Local window = power_upto(env.pevents, env.maxa);
    Local body = repeat_then(window, m - 1, bounded(kind, pi2, n - m + 1, env));
    return conditional(CondKind::Cond, {{pi1, body}}, 1, env);
}

Local duration(DurKind kind, Action pi1, Action pi2, std::optional<Action> pi3, std::uint32_t m,
               std::uint32_t n, const CombinatorEnv& env) {
    require_positive(m, "duration");
    require_positive(n, "duration");
    bool needs3 = kind == DurKind::Response || kind == DurKind::Invariance;
    if (needs3 != pi3.has_value())
        throw CombinatorError(needs3 ? "BR/BI need a third event" : "MinD/MaxD take two events");
    Local inner = nullptr;
    switch (kind) {
        case DurKind::MinDur: inner = bounded(BoundKind::Persistency, pi2, n, env); break;
        case DurKind::MaxDur:
            inner = repeat_then(power_upto(env.pevents, env.maxa), n, bounded(BoundKind::Absence, pi2, 1, env));
            break;
        case DurKind::Response: inner = bounded(BoundKind::Eventually, *pi3, n, env); break;
        case DurKind::Invariance: inner = bounded(BoundKind::Persistency, *pi3, n, env); break;
    }
    Local pc = conditional(CondKind::Persistent, {{pi2, inner}}, m, env);
    return conditional(CondKind::Cond, {{pi1, pc}}, 1, env);
}

Local mutual_exclusion(const std::vector<Action>& events_in, std::uint32_t m, const CombinatorEnv& env) {
    std::vector<Action> events = make_alphabet(events_in);
    if (events.size() < 2) throw CombinatorError("BME needs at least two distinct events");
    require_positive(m, "BME");
    for (auto e : events) require_pure(e, env, "BME");
    std::string key = "bme|" + std::to_string(m) + "|" + env_key(env);
    for (auto e : events) key += e.str() + ",";

    return memo().get(key, [&] {
        const Alphabet rest = minus(env.pevents, events);
        const std::uint32_t maxa = env.maxa;
        // others[h][i] = intersection of BA(pi_j, h) for j != i
        auto others = [&](std::uint32_t h, std::size_t i) {
            Local acc = nullptr;
            for (std::size_t j = 0; j < events.size(); ++j) {
                if (j == i) continue;
                Local ba = bounded(BoundKind::Absence, events[j], h, env);
                acc = acc ? prop::inter(acc, ba) : ba;
            }
            return acc;
        };
        return ladder(
            m, maxa,
            [&](std::uint32_t h, auto& q) -> Local {
                return h == 1 ? end_only() : end_then(q[h - 1][maxa]);
            },
            [&](std::uint32_t h, std::uint32_t k, auto& q) -> Local {
                std::vector<Branch> br;
                br.push_back({Action::end(), h == 1 ? eps() : q[h - 1][maxa]});
                for (std::size_t i = 0; i < events.size(); ++i) br.push_back({events[i], others(h, i)});
                fallthrough(br, rest, q[h][k - 1]);
                return choice(std::move(br));
            });
    });
}

Local sleeping(std::uint32_t k, Local p) {
    if (k == 0) throw CombinatorError("SLEEP needs k >= 1");
    Local q = p;
    for (std::uint32_t i = 1; i < k; ++i) q = prop::prefix(Action::tick(), q);
    return q;
}

}  // namespace enforcemint
