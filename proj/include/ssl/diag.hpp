#pragma once

#include <string>
#include <vector>

namespace ssl {

// Source position, 1-based. {0, 0} marks synthesized nodes.
struct Span {
    int line = 0;
    int col = 0;
};

struct Diag {
    Span span;
    std::string message;
};

using Diags = std::vector<Diag>;

inline void append(Diags& to, Diags from) {
    for (auto& d : from)
        to.push_back(std::move(d));
}

std::string render_diags(const Diags& diags, const std::string& file);

} // namespace ssl
