#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "enforcemint/action.hpp"
#include "enforcemint/property.hpp"

namespace enforcemint {

struct CombinatorError : std::invalid_argument {
    bool outside_alphabet = false;
    explicit CombinatorError(const std::string& msg, bool outside = false)
        : std::invalid_argument(msg), outside_alphabet(outside) {}
};

// Parameters shared by every derived property: maxa and the pure events of
// the controller alphabet P.
struct CombinatorEnv {
    std::uint32_t maxa = 1;
    Alphabet pevents;   // P minus end
    Alphabet puevents;  // P minus end and tick

    static CombinatorEnv from_alphabet(const Alphabet& p, std::uint32_t maxa);
};

enum class CondKind { Case, Cond, Persistent };
enum class BoundKind { Eventually, Persistency, Absence };
enum class DurKind { MinDur, MaxDur, Response, Invariance };

Local power_upto(const Alphabet& a, std::uint32_t k);

// (A)^n ; rest, with the power vanishing at n = 0.
Local repeat_then(Local a, std::uint32_t n, Local rest);

Local conditional(CondKind kind, const std::vector<std::pair<Action, Local>>& triggers, std::uint32_t m,
                  const CombinatorEnv& env);
Local bounded(BoundKind kind, Action pi, std::uint32_t m, const CombinatorEnv& env);
Local cond_bounded(BoundKind kind, Action pi1, Action pi2, std::uint32_t m, std::uint32_t n,
                   const CombinatorEnv& env);
Local duration(DurKind kind, Action pi1, Action pi2, std::optional<Action> pi3, std::uint32_t m,
               std::uint32_t n, const CombinatorEnv& env);
Local mutual_exclusion(const std::vector<Action>& events, std::uint32_t m, const CombinatorEnv& env);

// tick^(k-1) . p, the k-sleeping form of a local property.
Local sleeping(std::uint32_t k, Local p);

// Documented constant of the expansion-size invariant:
// dag_size <= kExpansionConstant * (maxa+1) * (m+n+1) * |pevents|.
inline constexpr std::uint64_t kExpansionConstant = 8;

}  // namespace enforcemint
