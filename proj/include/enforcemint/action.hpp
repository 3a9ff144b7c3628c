#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace enforcemint {

enum class Kind : std::uint8_t { Sensor, Actuator, Send, Recv, Tick, End, Tau };

// Interned action. Two actions are equal iff their ids are equal; the
// interner guarantees one id per (kind, name).
class Action {
public:
    Action();  // tau

    static Action make(Kind k, std::string_view name = {});
    static Action sensor(std::string_view n) { return make(Kind::Sensor, n); }
    static Action actuator(std::string_view n) { return make(Kind::Actuator, n); }
    static Action send(std::string_view n) { return make(Kind::Send, n); }
    static Action recv(std::string_view n) { return make(Kind::Recv, n); }
    static Action tick() { return make(Kind::Tick); }
    static Action end() { return make(Kind::End); }
    static Action tau() { return Action(); }

    // Parses the textual form: s:ID a:ID c!ID c?ID tick end tau.
    static Action parse(std::string_view text);
    static std::optional<Action> try_parse(std::string_view text);

    Kind kind() const;
    const std::string& name() const;
    std::string str() const;
    std::uint32_t id() const { return id_; }

    bool is_tau() const { return kind() == Kind::Tau; }
    bool is_tick() const { return kind() == Kind::Tick; }
    bool is_end() const { return kind() == Kind::End; }
    bool is_channel() const { return kind() == Kind::Send || kind() == Kind::Recv; }

    // The matching endpoint of a channel action (c! <-> c?).
    Action complement() const;

    bool operator==(const Action& o) const { return id_ == o.id_; }
    bool operator!=(const Action& o) const { return id_ != o.id_; }
    // Canonical order is by printed form, so sorted output is stable
    // regardless of interning order.
    bool operator<(const Action& o) const;

private:
    explicit Action(std::uint32_t id) : id_(id) {}
    std::uint32_t id_;
};

using Trace = std::vector<Action>;
using Alphabet = std::vector<Action>;  // sorted, unique

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int l, int c)
        : std::runtime_error(msg + " at " + std::to_string(l) + ":" + std::to_string(c)),
          line(l), column(c) {}
};

Trace erase_tau(const Trace& t);
bool is_prefix(const Trace& t1, const Trace& t2);
Trace concat(const Trace& a, const Trace& b);

Trace parse_trace(std::string_view text);
std::string to_string(const Trace& t);

Alphabet make_alphabet(std::vector<Action> acts);
Alphabet parse_alphabet(std::string_view text);
bool contains(const Alphabet& p, Action a);

}  // namespace enforcemint

template <>
struct std::hash<enforcemint::Action> {
    std::size_t operator()(const enforcemint::Action& a) const noexcept { return a.id(); }
};
