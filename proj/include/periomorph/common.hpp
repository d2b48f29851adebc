#pragma once

#include <random>
#include <stdexcept>
#include <string>

namespace periomorph {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by the text parsers; carries a 1-based source position.
struct ParseError : Error {
    int line;
    int column;
    ParseError(const std::string& msg, int line_, int col_)
        : Error(msg + " (line " + std::to_string(line_) + ", column " +
                std::to_string(col_) + ")"),
          line(line_), column(col_) {}
};

// Uniform draw in [0, n). std::uniform_int_distribution is
// implementation-defined, so tests that freeze RNG streams use this instead.
inline int draw(std::mt19937& gen, int n) {
    return static_cast<int>(gen() % static_cast<unsigned>(n));
}

} // namespace periomorph
