#include "enforcemint/action.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace enforcemint {

namespace {

struct Entry {
    Kind kind;
    std::string name;
    std::string text;
};

class Interner {
public:
    Interner() {
        // id 0 is tau so a default Action is well defined
        intern(Kind::Tau, "");
        intern(Kind::Tick, "");
        intern(Kind::End, "");
    }

    std::uint32_t intern(Kind k, std::string_view name) {
        std::string key = render(k, name);
        std::lock_guard lock(mu_);
        auto it = index_.find(key);
        if (it != index_.end()) return it->second;
        auto id = static_cast<std::uint32_t>(entries_.size());
        entries_.push_back({k, std::string(name), key});
        index_.emplace(std::move(key), id);
        return id;
    }

    const Entry& at(std::uint32_t id) {
        std::lock_guard lock(mu_);
        return entries_[id];  // deque: references stay valid
    }

    static std::string render(Kind k, std::string_view n) {
        switch (k) {
            case Kind::Sensor: return "s:" + std::string(n);
            case Kind::Actuator: return "a:" + std::string(n);
            case Kind::Send: return "c!" + std::string(n);
            case Kind::Recv: return "c?" + std::string(n);
            case Kind::Tick: return "tick";
            case Kind::End: return "end";
            case Kind::Tau: return "tau";
        }
        return "?";
    }

private:
    std::mutex mu_;
    std::deque<Entry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
};

Interner& interner() {
    static Interner in;
    return in;
}

bool valid_ident(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

}  // namespace

Action::Action() : id_(0) {}

Action Action::make(Kind k, std::string_view name) {
    bool named = k == Kind::Sensor || k == Kind::Actuator || k == Kind::Send || k == Kind::Recv;
    if (named && !valid_ident(name))
        throw std::invalid_argument("action needs an identifier name: '" + std::string(name) + "'");
    if (!named && !name.empty())
        throw std::invalid_argument("tick/end/tau carry no name");
    return Action(interner().intern(k, name));
}

std::optional<Action> Action::try_parse(std::string_view t) {
    if (t == "tick") return tick();
    if (t == "end") return end();
    if (t == "tau") return tau();
    if (t.size() < 3) return std::nullopt;
    auto rest = t.substr(2);
    if (!valid_ident(rest)) return std::nullopt;
    auto pre = t.substr(0, 2);
    if (pre == "s:") return sensor(rest);
    if (pre == "a:") return actuator(rest);
    if (pre == "c!") return send(rest);
    if (pre == "c?") return recv(rest);
    return std::nullopt;
}

Action Action::parse(std::string_view t) {
    if (auto a = try_parse(t)) return *a;
    throw std::invalid_argument("unknown action '" + std::string(t) + "'");
}

Kind Action::kind() const { return interner().at(id_).kind; }
const std::string& Action::name() const { return interner().at(id_).name; }
std::string Action::str() const { return interner().at(id_).text; }

Action Action::complement() const {
    switch (kind()) {
        case Kind::Send: return recv(name());
        case Kind::Recv: return send(name());
        default: throw std::logic_error("complement of non-channel action " + str());
    }
}

bool Action::operator<(const Action& o) const {
    if (id_ == o.id_) return false;
    return interner().at(id_).text < interner().at(o.id_).text;
}

Trace erase_tau(const Trace& t) {
    Trace out;
    std::copy_if(t.begin(), t.end(), std::back_inserter(out), [](Action a) { return !a.is_tau(); });
    return out;
}

bool is_prefix(const Trace& t1, const Trace& t2) {
    return t1.size() <= t2.size() && std::equal(t1.begin(), t1.end(), t2.begin());
}

Trace concat(const Trace& a, const Trace& b) {
    Trace out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Trace parse_trace(std::string_view text) {
    Trace t;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&] {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            advance();
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance();
        } else {
            int l = line, k = col;
            std::size_t start = i;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ',' &&
                   text[i] != '#')
                advance();
            auto tok = text.substr(start, i - start);
            auto a = Action::try_parse(tok);
            if (!a) throw ParseError("unknown action '" + std::string(tok) + "'", l, k);
            t.push_back(*a);
        }
    }
    return t;
}

std::string to_string(const Trace& t) {
    std::string s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) s += ' ';
        s += t[i].str();
    }
    return s;
}

Alphabet make_alphabet(std::vector<Action> acts) {
    std::sort(acts.begin(), acts.end());
    acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
    return acts;
}

Alphabet parse_alphabet(std::string_view text) {
    std::string cleaned(text);
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    auto t = parse_trace(cleaned);
    for (auto a : t)
        if (a.is_tau()) throw std::invalid_argument("tau cannot be part of an alphabet");
    return make_alphabet(std::move(t));
}

bool contains(const Alphabet& p, Action a) {
    return std::binary_search(p.begin(), p.end(), a);
}

}  // namespace enforcemint
