#pragma once

#include <set>
#include <string>

#include "enforcemint/action.hpp"
#include "enforcemint/nfa.hpp"

namespace testing_util {

using namespace enforcemint;

inline Trace tr(const std::string& s) { return parse_trace(s); }

inline std::set<Trace> traces(std::initializer_list<const char*> xs) {
    std::set<Trace> out;
    for (auto x : xs) out.insert(parse_trace(x));
    return out;
}

}  // namespace testing_util
