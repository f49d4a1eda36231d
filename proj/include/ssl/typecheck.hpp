#pragma once

#include <optional>

#include "ssl/ast.hpp"

namespace ssl {

// Structural equality with type names compared by name: a name is never
// silently unfolded into its body, since unfolding is an explicit runtime
// message. Choice branches compare as maps, so branch order is irrelevant.
bool types_equal(const TypePtr& a, const TypePtr& b);

// Checks one process body against a left context (nullopt: empty) and a
// right type. Each definition is checked separately under the hypothesis
// that every definition in scope satisfies its declared interface.
Diags check_process(const Program& prog, const std::optional<TypePtr>& left,
                    const TypePtr& right, const ProcPtr& proc);

Diags check_def(const Program& prog, const ProcDef& def);

// validate_program plus check_def for every definition.
Diags check_program(const Program& prog);

} // namespace ssl
