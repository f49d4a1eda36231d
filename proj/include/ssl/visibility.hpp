#pragma once

#include <set>

#include "ssl/ast.hpp"

namespace ssl {

// Priorities of the type names reachable from `t` without unfolding a name
// twice: the unfolding messages a channel of this type can ever carry.
std::set<int> visible_priorities(const Signature& sig, const TypePtr& t);

} // namespace ssl
