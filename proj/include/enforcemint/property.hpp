#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "enforcemint/action.hpp"

namespace enforcemint {

// Property terms are hash-consed: structurally equal terms are the same
// pointer, so sharing produced by combinator expansion is preserved and
// memo tables can key on addresses.

enum class LKind : std::uint8_t { Eps, Seq, Union, Inter };
enum class GKind : std::uint8_t { Star, Inter };

struct LocalNode;
struct GlobalNode;
using Local = const LocalNode*;
using Global = const GlobalNode*;

struct Branch {
    Action event;
    Local body;
};

struct LocalNode {
    LKind kind;
    Local lhs = nullptr;  // Seq, Inter
    Local rhs = nullptr;
    std::vector<Branch> branches;  // Union, nonempty
};

struct GlobalNode {
    GKind kind;
    Local body = nullptr;  // Star
    Global lhs = nullptr;  // Inter
    Global rhs = nullptr;
};

namespace prop {

Local eps();
Local seq(Local a, Local b);
Local inter(Local a, Local b);
// Throws on an empty branch list; callers that may produce one prune first.
Local choice(std::vector<Branch> branches);
Local prefix(Action ev, Local body);
Local event(Action ev);  // ev.eps
Global star(Local body);
Global inter(Global a, Global b);

}  // namespace prop

bool well_formed(Local p);
bool well_formed(Global e);

// propDim; saturates at UINT64_MAX instead of wrapping.
std::uint64_t prop_size(Local p);
std::uint64_t prop_size(Global e);

Alphabet events_of(Local p);
Alphabet events_of(Global e);

bool is_deterministic(Local p);
bool is_deterministic(Global e);

// Number of intersection operators (local and global) in the tree.
std::uint64_t inter_count(Global e);

// Number of distinct nodes reachable in the shared representation.
std::size_t dag_size(Local p);

// Saturating m^(k+1).
std::uint64_t derivative_bound(std::uint64_t m, std::uint64_t k);

std::string to_string(Local p);
std::string to_string(Global e);

}  // namespace enforcemint
