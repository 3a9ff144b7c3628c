#pragma once

#include <optional>
#include <string>
#include <vector>

#include "enforcemint/action.hpp"
#include "enforcemint/nfa.hpp"

namespace enforcemint {

enum class EditOp : std::uint8_t { Allow, Suppress, Insert };

struct EditLabel {
    EditOp op = EditOp::Allow;
    Action action;    // the controller action (the trigger for Insert)
    Action inserted;  // Insert only

    static EditLabel allow(Action a) { return {EditOp::Allow, a, Action::tau()}; }
    static EditLabel suppress(Action a) { return {EditOp::Suppress, a, Action::tau()}; }
    static EditLabel insert(Action trigger, Action b) { return {EditOp::Insert, trigger, b}; }

    // Action visible to the environment; tau for suppression.
    Action emitted() const;
    std::string str() const;

    bool operator==(const EditLabel& o) const {
        return op == o.op && action == o.action && (op != EditOp::Insert || inserted == o.inserted);
    }
    // Allow < Suppress < Insert, then by action text.
    bool operator<(const EditLabel& o) const;
};

struct Arm {
    EditLabel label;
    int to;
};

struct AutState {
    std::string name;
    bool go = false;
    std::vector<Arm> arms;  // declaration order matters for insert tie-breaking
};

struct EditAutomaton {
    std::vector<AutState> states;
    int initial = 0;
    Alphabet alphabet;  // ambient alphabet, used by go states
    // Cycle boundaries of the property. When absent every state counts as
    // accepting (the automaton is read as a prefix-closed acceptor).
    std::optional<std::vector<bool>> accepting;

    static EditAutomaton go_automaton(const Alphabet& p);

    std::size_t size() const { return states.size(); }
    bool is_accepting(int s) const { return !accepting || (*accepting)[s]; }
    int find(const std::string& name) const;
};

struct AutomatonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Collects states with forward references and recursion aliases
// (X = Y), then resolves them into a closed automaton.
class AutomatonBuilder {
public:
    int fresh(std::string hint = "");
    void set_go(int s);
    void define_empty(int s);  // a state with no arms (used as a sentinel)
    void add_arm(int s, EditLabel l, int to);
    void alias(int s, int target);
    void mark_accepting(int s);
    bool is_defined(int s) const;

    // Resolves aliases, keeps states reachable from `initial` and renames
    // them q0, q1, ... in breadth-first order.
    EditAutomaton finish(int initial, const Alphabet& alphabet, bool with_marks) const;

private:
    struct Raw {
        std::string hint;
        bool go = false;
        bool defined = false;
        bool accepting = false;
        std::optional<int> alias;
        std::vector<Arm> arms;
    };
    std::vector<Raw> raw_;
    int resolve(int s) const;
};

std::vector<EditLabel> enabled(const EditAutomaton& a, int s);
int step(const EditAutomaton& a, int s, const EditLabel& l);
bool is_suppress_all(const EditAutomaton& a, int s, const Alphabet& p);
std::size_t reachable_state_count(const EditAutomaton& a);

// Per state, the fewest allowed actions before an allowed end; UINT32_MAX
// when no end is reachable.
std::vector<std::uint32_t> completion_distance(const EditAutomaton& a);

EditAutomaton suppress_all_automaton(const Alphabet& p);

// Product per the cross-product construction, restricted to live pairs.
EditAutomaton cross_product(const EditAutomaton& a1, const EditAutomaton& a2, const Alphabet& p);

// Drops Allow/Insert arms into states that can no longer reach a cycle
// boundary and suppresses the affected actions instead.
EditAutomaton prune_dead(const EditAutomaton& a, const Alphabet& p);

// Words emitted by the automaton (allow and insert emit, suppress is silent).
// Membership uses the acceptance marks; liveness is reachability.
LangView allowed_language(const EditAutomaton& a);

std::string export_json(const EditAutomaton& a);
std::string export_dot(const EditAutomaton& a);
EditAutomaton import_json(const std::string& text);

// Equality up to arm order within each state.
bool structurally_equal(const EditAutomaton& a, const EditAutomaton& b);

}  // namespace enforcemint
