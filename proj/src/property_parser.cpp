#include "enforcemint/property_parser.hpp"

#include <cctype>
#include <charconv>
#include <string>
#include <vector>

#include "enforcemint/synthesis.hpp"

namespace enforcemint {

namespace {

struct Token {
    enum Type { Word, Punct, Eof } type;
    std::string text;
    int line;
    int col;
};

std::vector<Token> lex(std::string_view s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t j = 0; j < n; ++j, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        int l = line, k = col;
        if (is_word(c)) {
            std::size_t j = i;
            while (j < s.size() && is_word(s[j])) ++j;
            std::string w(s.substr(i, j - i));
            bool prefixed = j < s.size() && ((w == "s" && s[j] == ':') || (w == "a" && s[j] == ':') ||
                                             (w == "c" && (s[j] == '!' || s[j] == '?')));
            if (prefixed) {
                std::size_t e = j + 1;
                while (e < s.size() && is_word(s[e])) ++e;
                if (e == j + 1) throw ParseError("event prefix '" + w + s[j] + "' without a name", l, k);
                w = std::string(s.substr(i, e - i));
                j = e;
            }
            out.push_back({Token::Word, w, l, k});
            advance(j - i);
            continue;
        }
        static const std::string punct = "().;+&*{},:";
        if (punct.find(c) == std::string::npos)
            throw ParseError(std::string("unexpected character '") + c + "'", l, k);
        out.push_back({Token::Punct, std::string(1, c), l, k});
        advance(1);
    }
    out.push_back({Token::Eof, "", line, col});
    return out;
}

class Parser {
public:
    Parser(std::string_view text, const CombinatorEnv* env) : toks_(lex(text)), env_(env) {}

    Global parse_global_all() {
        Global g = global();
        expect_eof();
        return g;
    }
    Local parse_local_all() {
        Local p = local();
        expect_eof();
        return p;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const CombinatorEnv* env_;

    const Token& peek() const { return toks_[pos_]; }
    bool at(const char* p) const { return peek().type != Token::Eof && peek().text == p; }
    [[noreturn]] void fail(const std::string& msg, const Token& t) const { throw ParseError(msg, t.line, t.col); }
    [[noreturn]] void fail(const std::string& msg) const { fail(msg, peek()); }
    const Token& take() { return toks_[pos_++]; }

    void expect(const char* p) {
        if (!at(p) || peek().type != Token::Punct) {
            std::string got = peek().type == Token::Eof ? "end of input" : "'" + peek().text + "'";
            fail(std::string("expected '") + p + "', got " + got);
        }
        ++pos_;
    }
    void expect_eof() {
        if (peek().type != Token::Eof) fail("unexpected '" + peek().text + "'");
    }

    Global global() {
        Global g = gterm();
        while (at("&")) {
            ++pos_;
            g = prop::inter(g, gterm());
        }
        return g;
    }

    Global gterm() {
        std::size_t start = pos_;
        try {
            expect("(");
            Local body = local();
            expect(")");
            expect("*");
            return prop::star(body);
        } catch (const ParseError& first) {
            pos_ = start;
            try {
                expect("(");
                Global g = global();
                expect(")");
                return g;
            } catch (const ParseError&) {
                throw first;
            }
        }
    }

    Local local() {
        Local p = seqe();
        while (at("&")) {
            ++pos_;
            p = prop::inter(p, seqe());
        }
        return p;
    }

    Local seqe() {
        Local p = une();
        if (at(";")) {
            ++pos_;
            return prop::seq(p, seqe());
        }
        return p;
    }

    Local une() {
        const Token& first = peek();
        Local p = atom();
        if (!at("+")) return p;
        std::vector<Branch> br;
        auto absorb = [&](Local q, const Token& where) {
            if (q->kind != LKind::Union) fail("union operand must start with an event", where);
            br.insert(br.end(), q->branches.begin(), q->branches.end());
        };
        absorb(p, first);
        while (at("+")) {
            ++pos_;
            const Token& t = peek();
            absorb(atom(), t);
        }
        return prop::choice(std::move(br));
    }

    Action event_token() {
        const Token& t = peek();
        if (t.type != Token::Word) fail("expected an event");
        auto a = Action::try_parse(t.text);
        if (!a || a->is_tau()) fail("unknown event name '" + t.text + "'");
        ++pos_;
        return *a;
    }

    std::uint32_t number() {
        const Token& t = peek();
        std::uint32_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (t.type != Token::Word || ec != std::errc() || ptr != t.text.data() + t.text.size())
            fail("expected a number");
        ++pos_;
        return v;
    }

    std::vector<Action> event_set() {
        expect("{");
        std::vector<Action> evs;
        if (!at("}")) {
            evs.push_back(event_token());
            while (at(",")) {
                ++pos_;
                evs.push_back(event_token());
            }
        }
        expect("}");
        return evs;
    }

    Local atom() {
        const Token& t = peek();
        if (t.type == Token::Punct && t.text == "(") {
            ++pos_;
            Local p = local();
            expect(")");
            return p;
        }
        if (t.type != Token::Word) fail(t.type == Token::Eof ? "unexpected end of input" : "unexpected '" + t.text + "'");
        if (t.text == "eps") {
            ++pos_;
            return prop::eps();
        }
        if (is_combinator(t.text)) return combinator();
        Action ev = event_token();
        if (at(".")) {
            ++pos_;
            return prop::prefix(ev, atom());
        }
        return prop::event(ev);
    }

    static bool is_combinator(const std::string& w) {
        static const char* names[] = {"BE",  "BP",   "BA", "CND", "PCND", "CASE", "CBE", "CBP",
                                      "CBA", "MinD", "MaxD", "BR", "BI",   "BME",  "POW", "SLEEP"};
        for (auto n : names)
            if (w == n) return true;
        return false;
    }

    Local combinator() {
        const Token& head = take();
        const std::string& name = head.text;
        if (!env_) fail(name + " needs an alphabet and maxa to expand", head);
        const CombinatorEnv& env = *env_;
        try {
            if (name == "CASE") {
                expect("{");
                std::vector<std::pair<Action, Local>> trig;
                while (!at("}")) {
                    if (!trig.empty()) expect(",");
                    Action ev = event_token();
                    expect(":");
                    trig.emplace_back(ev, local());
                }
                expect("}");
                return conditional(CondKind::Case, trig, 1, env);
            }
            expect("(");
            Local r = nullptr;
            if (name == "BE" || name == "BP" || name == "BA") {
                Action ev = event_token();
                expect(",");
                std::uint32_t m = number();
                r = bounded(bound_kind(name.substr(1)), ev, m, env);
            } else if (name == "CND" || name == "PCND") {
                Action ev = event_token();
                expect(",");
                Local p = local();
                std::uint32_t m = 1;
                if (name == "PCND") {
                    expect(",");
                    m = number();
                }
                r = conditional(name == "CND" ? CondKind::Cond : CondKind::Persistent, {{ev, p}}, m, env);
            } else if (name == "CBE" || name == "CBP" || name == "CBA") {
                Action a = event_token();
                expect(",");
                Action b = event_token();
                expect(",");
                std::uint32_t m = number();
                expect(",");
                std::uint32_t n = number();
                r = cond_bounded(bound_kind(name.substr(2)), a, b, m, n, env);
            } else if (name == "MinD" || name == "MaxD" || name == "BR" || name == "BI") {
                bool three = name == "BR" || name == "BI";
                Action a = event_token();
                expect(",");
                Action b = event_token();
                expect(",");
                std::optional<Action> c;
                if (three) {
                    c = event_token();
                    expect(",");
                }
                std::uint32_t m = number();
                expect(",");
                std::uint32_t n = number();
                DurKind k = name == "MinD"   ? DurKind::MinDur
                            : name == "MaxD" ? DurKind::MaxDur
                            : name == "BR"   ? DurKind::Response
                                             : DurKind::Invariance;
                r = duration(k, a, b, c, m, n, env);
            } else if (name == "BME" || name == "POW") {
                auto evs = event_set();
                expect(",");
                std::uint32_t m = number();
                r = name == "BME" ? mutual_exclusion(evs, m, env) : power_upto(make_alphabet(evs), m);
            } else if (name == "SLEEP") {
                std::uint32_t k = number();
                expect(",");
                r = sleeping(k, local());
            }
            expect(")");
            return r;
        } catch (const CombinatorError& e) {
            if (e.outside_alphabet)
                throw SynthError(SynthError::AlphabetMismatch,
                                 std::string(e.what()) + " at " + std::to_string(head.line) + ":" +
                                     std::to_string(head.col));
            fail(e.what(), head);
        }
    }

    static BoundKind bound_kind(const std::string& suffix) {
        if (suffix == "E") return BoundKind::Eventually;
        if (suffix == "P") return BoundKind::Persistency;
        return BoundKind::Absence;
    }
};

}  // namespace

Global parse_property(std::string_view text, const CombinatorEnv* env) {
    return Parser(text, env).parse_global_all();
}

Local parse_local(std::string_view text, const CombinatorEnv* env) {
    return Parser(text, env).parse_local_all();
}

}  // namespace enforcemint
