#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

#include "enforcemint/automaton.hpp"
#include "enforcemint/property.hpp"

namespace enforcemint {

struct SynthError : std::runtime_error {
    enum Kind { IllFormed, Nondeterministic, AlphabetMismatch } kind;
    SynthError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

// Holds the partially built automaton while local properties are compiled
// against continuation states.
class SynthContext {
public:
    explicit SynthContext(Alphabet p) : alphabet_(std::move(p)) {}

    const Alphabet& alphabet() const { return alphabet_; }
    AutomatonBuilder& builder() { return b_; }

    // Entry state of <p> with continuation k. Memoized on (p, k).
    int synthesize_local(Local p, int k);

private:
    Alphabet alphabet_;
    AutomatonBuilder b_;
    std::map<std::pair<Local, int>, int> memo_;

    int local_product(Local p1, Local p2, int k);
    void add_suppressions(int s, const std::vector<Action>& keep);
};

// Throws SynthError when e is ill-formed, nondeterministic or mentions
// events outside p.
void check_synthesizable(Global e, const Alphabet& p);

EditAutomaton synthesize(Global e, const Alphabet& p);

struct BoundReport {
    std::size_t states;
    std::uint64_t m;      // prop_size
    std::uint64_t k;      // intersections
    std::uint64_t bound;  // m^(k+1), saturating
    bool ok;
};

BoundReport check_derivative_bound(Global e, const Alphabet& p);

}  // namespace enforcemint
