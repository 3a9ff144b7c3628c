#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "enforcemint/action.hpp"

namespace enforcemint {

// Controller terms, hash-consed like property terms so that exploration can
// compare states by pointer.
enum class PKind : std::uint8_t { Var, Tick, Sens, ChanIn, ChanOut, Act, End };

struct ProcNode;
using Proc = const ProcNode*;

struct ProcNode {
    PKind kind;
    std::string var;    // Var, End
    Action act;         // ChanOut channel, Act actuator
    std::vector<std::pair<Action, Proc>> branches;  // Sens, ChanIn
    Proc next = nullptr;     // Tick, ChanOut, Act
    Proc timeout = nullptr;  // Sens, ChanIn, ChanOut
};

namespace proc {
Proc var(std::string_view name);
Proc tick(Proc next);
Proc sens(std::vector<std::pair<Action, Proc>> branches, Proc timeout);
Proc chan_in(std::vector<std::pair<Action, Proc>> branches, Proc timeout);
Proc chan_out(Action channel, Proc then, Proc timeout);
Proc act(Action actuator, Proc then);
Proc end(std::string_view next_var);
}  // namespace proc

// Recursion equations X = tick.W; the first equation is the initial process.
struct Controller {
    std::vector<std::pair<std::string, Proc>> eqs;
    std::unordered_map<std::string, Proc> index;

    void define(const std::string& name, Proc body);
    Proc lookup(const std::string& name) const;  // nullptr if missing
    Proc start() const;
    bool empty() const { return eqs.empty(); }
};

struct ControllerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using CtrlStep = std::pair<Action, Proc>;

// One-step transitions of a controller term; throws on an unresolved variable.
std::vector<CtrlStep> ctrl_steps(Proc j, const Controller& defs);

struct ValidationReport {
    bool time_guarded = true;
    std::uint32_t maxa = 0;
    Alphabet alphabet;
    std::vector<std::string> errors;  // phase, guard and resolution problems

    bool ok() const { return time_guarded && errors.empty(); }
};

// raw = true lifts the phase discipline (compromised code), keeping the
// tick guard on every equation.
ValidationReport validate(const Controller& c, bool raw = false);

Controller parse_controller(std::string_view text, bool raw = false);

std::string to_dsl(const Controller& c);
std::string to_string(Proc p);

}  // namespace enforcemint
