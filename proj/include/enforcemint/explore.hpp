#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "enforcemint/nfa.hpp"
#include "enforcemint/property.hpp"
#include "enforcemint/runtime.hpp"

namespace enforcemint {

// Outcome of an exhaustive bounded exploration.
struct ExploreResult {
    std::size_t states = 0;
    std::size_t violations = 0;
    std::optional<Trace> witness;  // first violating trace, tau included

    bool ok() const { return violations == 0; }
};

// Longest cycle of the property, in events; an upper bound on what a
// monitor can emit between two ends.
std::uint32_t prop_depth(Local p);
std::uint32_t prop_depth(Global e);

// Every trace of the monitored controller, with tau erased, stays a prefix
// of the property language.
ExploreResult explore_soundness(const Monitored& m, const PropNfa& e, std::size_t depth);

// Every trace of the unmonitored controller that lies in the language is
// also a trace of the monitored one (step for step, no silent moves).
ExploreResult explore_transparency(const Monitored& m, const PropNfa& e, std::size_t depth);

// Reachable monitored states with no transition at all.
ExploreResult explore_deadlock(const Monitored& m, std::size_t depth);

// Paths of `bound` consecutive steps without an end. Explores the whole
// finite state space.
ExploreResult explore_divergence(const Monitored& m, std::size_t bound);

// Reachable states with two moves on the same action into distinct
// automaton states.
ExploreResult explore_determinism(const Monitored& m, std::size_t depth);

struct NetworkResult {
    std::size_t states = 0;
    std::size_t soundness_violations = 0;
    std::size_t transparency_violations = 0;
    std::size_t timesync_with_tau = 0;  // maximal-progress audit
    std::optional<Trace> witness;

    bool ok() const { return soundness_violations == 0 && transparency_violations == 0 && timesync_with_tau == 0; }
};

// Per-node soundness of projected traces in a monitored network, plus the
// maximal-progress audit of every time step generated.
NetworkResult explore_network_soundness(const Network& n, const std::vector<PropNfa>& props, std::size_t depth);

// Explores the unmonitored network (same controllers, go monitors) and
// checks that each node's projection, when in its language, can be replayed
// by that node under its monitor.
NetworkResult explore_network_transparency(const Network& monitored, const std::vector<PropNfa>& props,
                                           std::size_t depth);

// Random generators for the property-based suites.
namespace gen {

using Rng = std::mt19937_64;

struct Pool {
    std::vector<Action> sensors;
    std::vector<Action> actuators;
    std::vector<Action> sends;
    std::vector<Action> recvs;

    Alphabet alphabet() const;  // plus tick and end
};

Pool pool_for(std::size_t sensors, std::size_t actuators, std::size_t channels);

// Deterministic, well-formed local property over `events` (no end in the
// list; end closes every branch). With single_cycle every word holds
// exactly one end.
Local random_local(Rng& rng, const std::vector<Action>& events, int depth, bool single_cycle = false);
Global random_property(Rng& rng, const std::vector<Action>& events, int depth, bool allow_inter);

// Controllers with `ticks` leading ticks and phase-respecting bodies.
Controller random_controller(Rng& rng, const Pool& pool, std::uint32_t ticks, int equations = 2);

// Compromised variant: swapped actuators, dropped or injected actions,
// reordered phases. Same alphabet as the pool.
Controller mutate(Rng& rng, const Controller& c, const Pool& pool);

// (union of the controller's complete cycles)*, optionally with branches
// dropped at random so the controller is only partly compliant.
Global cycle_property(const Controller& c, Rng* rng = nullptr, double drop = 0.0);

}  // namespace gen

}  // namespace enforcemint
