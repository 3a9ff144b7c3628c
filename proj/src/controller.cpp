#include "enforcemint/controller.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <mutex>
#include <set>
#include <unordered_set>

namespace enforcemint {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

struct ProcHash {
    std::size_t operator()(const ProcNode* n) const {
        std::size_t h = static_cast<std::size_t>(n->kind);
        h = mix(h, std::hash<std::string>{}(n->var));
        h = mix(h, n->act.id());
        h = mix(h, std::hash<const void*>{}(n->next));
        h = mix(h, std::hash<const void*>{}(n->timeout));
        for (const auto& [a, p] : n->branches) h = mix(mix(h, a.id()), std::hash<const void*>{}(p));
        return h;
    }
};
struct ProcEq {
    bool operator()(const ProcNode* a, const ProcNode* b) const {
        return a->kind == b->kind && a->var == b->var && a->act == b->act && a->next == b->next &&
               a->timeout == b->timeout && a->branches == b->branches;
    }
};

class ProcStore {
public:
    Proc intern(ProcNode n) {
        std::lock_guard lock(mu_);
        if (auto it = set_.find(&n); it != set_.end()) return *it;
        arena_.push_back(std::move(n));
        Proc p = &arena_.back();
        set_.insert(p);
        return p;
    }

private:
    std::mutex mu_;
    std::deque<ProcNode> arena_;
    std::unordered_set<const ProcNode*, ProcHash, ProcEq> set_;
};

ProcStore& store() {
    static ProcStore s;
    return s;
}

void require_kind(Action a, Kind k, const char* what) {
    if (a.kind() != k) throw ControllerError(std::string(what) + " expects a different action kind, got " + a.str());
}

}  // namespace

namespace proc {
Proc var(std::string_view name) { return store().intern(ProcNode{PKind::Var, std::string(name)}); }
Proc tick(Proc next) { return store().intern(ProcNode{PKind::Tick, {}, {}, {}, next}); }
Proc sens(std::vector<std::pair<Action, Proc>> branches, Proc timeout) {
    for (const auto& b : branches) require_kind(b.first, Kind::Sensor, "sensing branch");
    return store().intern(ProcNode{PKind::Sens, {}, {}, std::move(branches), nullptr, timeout});
}
Proc chan_in(std::vector<std::pair<Action, Proc>> branches, Proc timeout) {
    for (const auto& b : branches) require_kind(b.first, Kind::Recv, "channel input branch");
    return store().intern(ProcNode{PKind::ChanIn, {}, {}, std::move(branches), nullptr, timeout});
}
Proc chan_out(Action channel, Proc then, Proc timeout) {
    require_kind(channel, Kind::Send, "channel output");
    return store().intern(ProcNode{PKind::ChanOut, {}, channel, {}, then, timeout});
}
Proc act(Action actuator, Proc then) {
    require_kind(actuator, Kind::Actuator, "actuation");
    return store().intern(ProcNode{PKind::Act, {}, actuator, {}, then});
}
Proc end(std::string_view next_var) { return store().intern(ProcNode{PKind::End, std::string(next_var)}); }
}  // namespace proc

void Controller::define(const std::string& name, Proc body) {
    if (index.count(name)) throw ControllerError("equation " + name + " defined twice");
    eqs.emplace_back(name, body);
    index.emplace(name, body);
}

Proc Controller::lookup(const std::string& name) const {
    auto it = index.find(name);
    return it == index.end() ? nullptr : it->second;
}

Proc Controller::start() const {
    if (eqs.empty()) throw ControllerError("controller has no equations");
    return proc::var(eqs.front().first);
}

std::vector<CtrlStep> ctrl_steps(Proc j, const Controller& defs) {
    std::vector<CtrlStep> out;
    switch (j->kind) {
        case PKind::Var: {
            Proc body = defs.lookup(j->var);
            if (!body) throw ControllerError("unresolved process variable " + j->var);
            if (body->kind == PKind::Var) throw ControllerError("unguarded equation " + j->var);
            return ctrl_steps(body, defs);
        }
        case PKind::Tick: out.push_back({Action::tick(), j->next}); break;
        case PKind::Sens:
        case PKind::ChanIn:
            for (const auto& b : j->branches) out.push_back(b);
            out.push_back({Action::tick(), j->timeout});
            break;
        case PKind::ChanOut:
            out.push_back({j->act, j->next});
            out.push_back({Action::tick(), j->timeout});
            break;
        case PKind::Act: out.push_back({j->act, j->next}); break;
        case PKind::End: out.push_back({Action::end(), proc::var(j->var)}); break;
    }
    return out;
}

namespace {

enum Phase { Sleep = 0, Sens = 1, Comm = 2, Act = 3 };

const char* phase_name(PKind k) {
    switch (k) {
        case PKind::Sens: return "sensing";
        case PKind::ChanIn:
        case PKind::ChanOut: return "communication";
        case PKind::Tick: return "sleep";
        default: return "actuation";
    }
}

Phase phase_of(PKind k) {
    switch (k) {
        case PKind::Tick: return Sleep;
        case PKind::Sens: return Sens;
        case PKind::ChanIn:
        case PKind::ChanOut: return Comm;
        default: return Act;
    }
}

}  // namespace

ValidationReport validate(const Controller& c, bool raw) {
    ValidationReport r;
    if (c.empty()) {
        r.errors.push_back("no equations");
        return r;
    }
    std::set<Action> alpha;
    std::unordered_map<Proc, std::uint32_t> longest;
    std::set<std::pair<Proc, int>> checked;

    // Longest action path to the closing end, counting ticks and end.
    std::function<std::uint32_t(Proc)> len = [&](Proc p) -> std::uint32_t {
        if (auto it = longest.find(p); it != longest.end()) return it->second;
        std::uint32_t v = 0;
        switch (p->kind) {
            case PKind::Var: v = 0; break;
            case PKind::End:
                alpha.insert(Action::end());
                v = 1;
                break;
            case PKind::Tick:
                alpha.insert(Action::tick());
                v = 1 + len(p->next);
                break;
            case PKind::Act:
                alpha.insert(p->act);
                v = 1 + len(p->next);
                break;
            case PKind::ChanOut:
                alpha.insert(p->act);
                alpha.insert(Action::tick());
                v = 1 + std::max(len(p->next), len(p->timeout));
                break;
            case PKind::Sens:
            case PKind::ChanIn:
                alpha.insert(Action::tick());
                v = 1 + len(p->timeout);
                for (const auto& [a, q] : p->branches) {
                    alpha.insert(a);
                    v = std::max(v, 1 + len(q));
                }
                break;
        }
        longest.emplace(p, v);
        return v;
    };

    std::function<void(Proc, Phase, const std::string&)> check = [&](Proc p, Phase ph, const std::string& eq) {
        if (!checked.insert({p, ph}).second) return;
        if (p->kind == PKind::Var) {
            r.errors.push_back("equation " + eq + ": recursion is only allowed after end");
            return;
        }
        if (p->kind == PKind::End) {
            if (!c.lookup(p->var)) r.errors.push_back("equation " + eq + ": unresolved variable " + p->var);
            return;
        }
        Phase own = phase_of(p->kind);
        if (!raw && own < ph)
            r.errors.push_back("equation " + eq + ": " + phase_name(p->kind) + " after a later phase");
        Phase inner = raw ? Sleep : std::max(own, ph);
        if (p->kind == PKind::Sens || p->kind == PKind::ChanIn) {
            std::set<Action> guards;
            for (const auto& [a, q] : p->branches) {
                if (!guards.insert(a).second)
                    r.errors.push_back("equation " + eq + ": duplicate guard " + a.str());
                check(q, inner, eq);
            }
            check(p->timeout, inner, eq);
        } else {
            if (p->next) check(p->next, inner, eq);
            if (p->timeout) check(p->timeout, inner, eq);
        }
    };

    for (const auto& [name, body] : c.eqs) {
        if (body->kind != PKind::Tick) {
            r.time_guarded = false;
            r.errors.push_back("equation " + name + " does not start with tick");
        }
        check(body, Sleep, name);
        r.maxa = std::max(r.maxa, len(body));
    }
    r.alphabet = make_alphabet(std::vector<Action>(alpha.begin(), alpha.end()));
    return r;
}

namespace {

struct CTok {
    enum Type { Word, Punct, Eof } type;
    std::string text;
    int line, col;
};

std::vector<CTok> clex(std::string_view s) {
    std::vector<CTok> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto adv = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto wordc = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            adv(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') adv(1);
            continue;
        }
        int l = line, k = col;
        if (wordc(c)) {
            std::size_t j = i;
            while (j < s.size() && wordc(s[j])) ++j;
            if (j < s.size() && (s[j] == ':' || s[j] == '!' || s[j] == '?') && j + 1 < s.size() && wordc(s[j + 1])) {
                ++j;
                while (j < s.size() && wordc(s[j])) ++j;
            }
            out.push_back({CTok::Word, std::string(s.substr(i, j - i)), l, k});
            adv(j - i);
            continue;
        }
        if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({CTok::Punct, "->", l, k});
            adv(2);
            continue;
        }
        if (std::string("=.{};,").find(c) == std::string::npos)
            throw ParseError(std::string("unexpected character '") + c + "'", l, k);
        out.push_back({CTok::Punct, std::string(1, c), l, k});
        adv(1);
    }
    out.push_back({CTok::Eof, "", line, col});
    return out;
}

bool keyword(const std::string& w) {
    return w == "tick" || w == "sens" || w == "in" || w == "out" || w == "act" || w == "end" || w == "else";
}

class CParser {
public:
    CParser(std::string_view text, bool raw) : t_(clex(text)), raw_(raw) {}

    Controller run() {
        Controller c;
        while (peek().type != CTok::Eof) {
            const CTok& name = take();
            if (name.type != CTok::Word || keyword(name.text) || !valid_name(name.text))
                fail("expected an equation name", name);
            expect("=");
            if (!is("tick")) fail("equation body must start with tick");
            Proc body = sleep();
            if (c.lookup(name.text)) fail("equation " + name.text + " defined twice", name);
            c.define(name.text, body);
        }
        if (c.empty()) fail("no equations");
        for (const auto& [n, line, col] : refs_)
            if (!c.lookup(n)) throw ParseError("unresolved process variable " + n, line, col);
        return c;
    }

private:
    std::vector<CTok> t_;
    std::size_t pos_ = 0;
    bool raw_;
    std::vector<std::tuple<std::string, int, int>> refs_;

    const CTok& peek() const { return t_[pos_]; }
    const CTok& take() { return t_[pos_++]; }
    bool is(const char* w) const { return peek().type != CTok::Eof && peek().text == w; }
    [[noreturn]] void fail(const std::string& m, const CTok& at) const { throw ParseError(m, at.line, at.col); }
    [[noreturn]] void fail(const std::string& m) const { fail(m, peek()); }
    void expect(const char* w) {
        if (!is(w)) fail(std::string("expected '") + w + "'" + (peek().type == CTok::Eof ? "" : ", got '" + peek().text + "'"));
        ++pos_;
    }
    static bool valid_name(const std::string& w) {
        return !w.empty() && (std::isalpha(static_cast<unsigned char>(w[0])) || w[0] == '_') &&
               w.find_first_of(":!?") == std::string::npos;
    }

    Proc sleep() {
        expect("tick");
        expect(".");
        if (is("tick")) return proc::tick(sleep());
        return proc::tick(body(Sens));
    }

    void gate(Phase own, Phase ph, const CTok& at) {
        if (!raw_ && own < ph) fail(std::string("phase error: ") + (own == Sens ? "sensing" : "communication") +
                                        " is not allowed after a later phase", at);
    }

    Action action_of(const CTok& tok, Kind k, bool bare_ok) {
        auto a = Action::try_parse(tok.text);
        if (!a && bare_ok && valid_name(tok.text)) a = Action::make(k, tok.text);
        if (!a || a->kind() != k) fail("unexpected action '" + tok.text + "'", tok);
        return *a;
    }

    Proc body(Phase ph) {
        const CTok& head = peek();
        if (head.type != CTok::Word) fail("expected sens, in, out, act or end");
        if (head.text == "sens") {
            gate(Sens, ph, head);
            ++pos_;
            auto br = branches(Kind::Sensor, Sens);
            expect("else");
            return proc::sens(std::move(br), body(Sens));
        }
        if (head.text == "in") {
            gate(Comm, ph, head);
            ++pos_;
            auto br = branches(Kind::Recv, Comm);
            expect("else");
            return proc::chan_in(std::move(br), body(Comm));
        }
        if (head.text == "out") {
            gate(Comm, ph, head);
            ++pos_;
            Action c = action_of(take(), Kind::Send, false);
            expect(".");
            Proc then = body(Comm);
            expect("else");
            return proc::chan_out(c, then, body(Comm));
        }
        if (head.text == "act") {
            ++pos_;
            Action a = action_of(take(), Kind::Actuator, true);
            expect(".");
            return proc::act(a, body(raw_ ? Sleep : Act));
        }
        if (head.text == "end") {
            ++pos_;
            expect(".");
            const CTok& n = take();
            if (n.type != CTok::Word || keyword(n.text) || !valid_name(n.text)) fail("expected a process name", n);
            refs_.emplace_back(n.text, n.line, n.col);
            return proc::end(n.text);
        }
        if (head.text == "tick") fail("tick is only allowed at the start of an equation");
        fail("expected sens, in, out, act or end, got '" + head.text + "'");
    }

    std::vector<std::pair<Action, Proc>> branches(Kind k, Phase ph) {
        expect("{");
        std::vector<std::pair<Action, Proc>> br;
        while (!is("}")) {
            if (peek().type == CTok::Eof) fail("unterminated branch list");
            const CTok& ev = take();
            Action a = action_of(ev, k, k == Kind::Sensor);
            for (const auto& [g, p] : br)
                if (g == a) fail("duplicate guard " + a.str(), ev);
            expect("->");
            br.emplace_back(a, body(raw_ ? Sleep : ph));
            if (is(",") || is(";")) ++pos_;
        }
        if (br.empty()) fail("a branch list needs at least one branch");
        expect("}");
        return br;
    }
};

std::string print_body(Proc p) {
    switch (p->kind) {
        case PKind::Var: return p->var;
        case PKind::Tick: return "tick . " + print_body(p->next);
        case PKind::End: return "end . " + p->var;
        case PKind::Act: return "act " + p->act.str() + " . " + print_body(p->next);
        case PKind::ChanOut:
            return "out " + p->act.str() + " . " + print_body(p->next) + " else " + print_body(p->timeout);
        case PKind::Sens:
        case PKind::ChanIn: {
            std::string s = p->kind == PKind::Sens ? "sens { " : "in { ";
            for (std::size_t i = 0; i < p->branches.size(); ++i) {
                if (i) s += "; ";
                s += p->branches[i].first.str() + " -> " + print_body(p->branches[i].second);
            }
            return s + " } else " + print_body(p->timeout);
        }
    }
    return "?";
}

}  // namespace

Controller parse_controller(std::string_view text, bool raw) { return CParser(text, raw).run(); }

std::string to_dsl(const Controller& c) {
    std::string s;
    for (const auto& [name, body] : c.eqs) s += name + " = " + print_body(body) + "\n";
    return s;
}

std::string to_string(Proc p) { return print_body(p); }

}  // namespace enforcemint
