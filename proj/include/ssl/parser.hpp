#pragma once

#include <optional>
#include <string>

#include "ssl/ast.hpp"

namespace ssl {

struct ParseResult {
    std::optional<Program> program; // set iff errors is empty
    Diags errors;
};

ParseResult parse_program(const std::string& source);

} // namespace ssl
