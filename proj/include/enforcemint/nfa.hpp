#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "enforcemint/action.hpp"
#include "enforcemint/property.hpp"

namespace enforcemint {

using StateSet = std::vector<int>;  // sorted, unique

struct StateSetHash {
    std::size_t operator()(const StateSet& s) const noexcept {
        std::size_t h = s.size();
        for (int v : s) h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

// Epsilon-free NFA over events. Reference semantics for the property
// language, built independently of the synthesis code.
struct PropNfa {
    int initial = 0;
    std::vector<bool> accepting;
    std::vector<std::vector<std::pair<Action, int>>> edges;
    std::vector<bool> live;  // can still reach an accepting state

    std::size_t size() const { return accepting.size(); }

    StateSet start() const;
    StateSet step(const StateSet& s, Action a) const;
    bool accepts(const StateSet& s) const;
    bool alive(const StateSet& s) const;
};

PropNfa to_nfa(Global e);
PropNfa to_nfa(Local p);

// Both reject traces containing tau (erase first).
bool lang_member(const Trace& t, Global e);
bool lang_prefix(const Trace& t, Global e);
bool lang_member(const Trace& t, const PropNfa& n);
bool lang_prefix(const Trace& t, const PropNfa& n);

// All accepted words of length <= max_len. Exponential; tests only.
std::set<Trace> enumerate(const PropNfa& n, std::size_t max_len);

// A language given by subset simulation; both PropNfa and edit automata
// provide this shape so they can be compared step by step.
struct LangView {
    std::function<StateSet()> start;
    std::function<StateSet(const StateSet&, Action)> step;
    std::function<bool(const StateSet&)> accepts;
    std::function<bool(const StateSet&)> alive;
};

LangView view(const PropNfa& n);
// Synchronous product; accepts the intersection.
PropNfa product(const PropNfa& a, const PropNfa& b);

struct LangDiff {
    Trace witness;
    bool membership;  // false: prefix-closure differs
};

// Simultaneous subset exploration over `sigma` up to `depth` symbols. Checks
// both membership and prefix liveness; returns the first difference found.
std::optional<LangDiff> bounded_diff(const LangView& a, const LangView& b, const Alphabet& sigma, std::size_t depth,
                                     bool check_membership = true);

// Bounded inclusion of accepted words: every word of a up to `depth` is in b.
std::optional<Trace> bounded_not_included(const LangView& a, const LangView& b, const Alphabet& sigma,
                                          std::size_t depth);

}  // namespace enforcemint
