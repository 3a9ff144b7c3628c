#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "enforcemint/automaton.hpp"
#include "enforcemint/controller.hpp"

namespace enforcemint {

enum class Rule : std::uint8_t { Allow, Suppress, Insert, Plain, ChnSync, TimeSync };
const char* rule_name(Rule r);

// A monitored controller E |> J. Without an automaton the node is plain
// (unmonitored) and every controller action passes through.
struct Monitored {
    std::shared_ptr<const EditAutomaton> aut;
    std::shared_ptr<const Controller> ctrl;
    int state = 0;
    Proc proc = nullptr;

    static Monitored make(std::shared_ptr<const EditAutomaton> a, std::shared_ptr<const Controller> c);
};

struct MStep {
    Action action;   // emitted: tau for suppression, beta for insertion
    Rule rule;
    Action trigger;  // controller action the move answers
    int state;       // automaton target
    Proc proc;       // controller target (unchanged for Insert)
};

// Optional environment filter: a sensor action is offered only if available.
using SensorGate = std::function<bool(Action)>;

std::vector<MStep> mstep(const Monitored& m, const SensorGate& gate = {});

// How unmatched channel actions behave in a network.
//  open:  any channel action may fire on its own (parallel rules as written)
//  lossy: sends may fire alone and are lost; receives need a partner
//  closed: channel actions only fire as synchronisations
enum class ChannelMode { Open, Lossy, Closed };

struct NetState {
    std::vector<int> aut;
    std::vector<Proc> proc;
    std::uint64_t clock = 0;
    bool operator==(const NetState& o) const { return aut == o.aut && proc == o.proc && clock == o.clock; }
};

struct NodeMove {
    std::size_t node;
    MStep move;
};

struct NetStep {
    Action action;  // tau, tick or the node action
    Rule rule;      // Suppress / ChnSync / TimeSync or the node rule
    std::vector<NodeMove> moves;
    NetState next;
    int priority;   // 0 tau, 1 local observable, 2 unmatched channel, 3 tick
};

struct NetNode {
    std::string name;
    std::shared_ptr<const EditAutomaton> aut;  // may be null
    std::shared_ptr<const Controller> ctrl;
};

class Network {
public:
    std::vector<NetNode> nodes;
    ChannelMode mode = ChannelMode::Open;

    NetState initial() const;
    Monitored node_view(const NetState& s, std::size_t i) const;

    // Table-2 transitions with maximal progress: tick only when every node
    // can tick and no tau is possible anywhere.
    std::vector<NetStep> steps(const NetState& s, const std::vector<SensorGate>* gates = nullptr) const;

    // Independent recomputation of "some tau is enabled", for auditing.
    bool tau_enabled(const NetState& s, const std::vector<SensorGate>* gates = nullptr) const;
};

std::vector<NetStep> net_steps(const Network& n, const NetState& s);

struct SchedulerPolicy {
    enum TieBreak { FirstDeclared, SeededRandom };
    std::uint64_t seed = 0;
    TieBreak tie_break = FirstDeclared;
};

struct LogRow {
    std::size_t step;
    std::uint64_t clock;
    std::string node;  // "all" for time steps
    Rule rule;
    Action action;     // node-level action (tau for suppression)
    std::optional<Action> inserted_for;
};

struct TraceLog {
    std::vector<LogRow> rows;
    Trace global;                // network-level actions (tau for syncs)
    std::vector<Trace> per_node; // node-level actions
    std::vector<std::string> node_names;
    bool stuck = false;
    bool diverged = false;
    std::uint64_t ticks = 0;
    std::size_t timesync_with_tau = 0;  // maximal-progress violations observed
    NetState final_state;
};

struct RunHooks {
    // availability of sensor reads for node i; null means all available
    std::function<bool(std::size_t, Action)> sensor_available;
    std::function<void(const NetStep&)> on_step;  // after a step is taken
};

// Runs until `horizon` ticks have elapsed and the current slot has no more
// non-tick work, or until stuck.
TraceLog run(const Network& n, const SchedulerPolicy& policy, std::uint64_t horizon, const RunHooks& hooks = {},
             std::size_t max_steps_per_slot = 100000);

Trace project(const TraceLog& log, std::size_t node);
std::string to_csv(const TraceLog& log);

}  // namespace enforcemint
