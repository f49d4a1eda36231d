#pragma once

#include <string>

#include "ssl/ast.hpp"

namespace ssl {

std::string print_type(const Type& t);
std::string print_type(const TypePtr& t);

// Single-line rendering, mostly for traces and diagnostics.
std::string print_process_flat(const ProcPtr& p);

// Indented rendering of a whole program. Parsing the result yields a program
// identical to the input, and printing is a function of the tree alone, so
// formatting is idempotent.
std::string print_program(const Program& p);

} // namespace ssl
