#pragma once

#include "sigreg/dae.hpp"

#include <string>

namespace sigreg {

struct ParseError : Error {
    int line = 0;
    int col = 0;
    ParseError(const std::string& msg, int line_, int col_)
        : Error(msg + " at line " + std::to_string(line_) + ", column " +
                std::to_string(col_)),
          line(line_), col(col_) {}
};

/// Parse the DAE text format. Equations are normalized; arities and
/// declarations are checked; the system must be square.
DaeSystem parse_dae(const std::string& source);
DaeSystem parse_dae_file(const std::string& path);

/// Parse a single expression in the context of an existing system
/// (used for user-supplied vectors, substitutions, and expected values).
Expression parse_expression(const DaeSystem& sys, const std::string& text);

/// Parse a point file: one `<atom> = <number>` per line, expression syntax
/// on the left. Declared constants of `sys` are bound automatically.
ValuePoint parse_point_file(const DaeSystem& sys, const std::string& path);
ValuePoint parse_point(const DaeSystem& sys, const std::string& text);

/// Render a system back to the text format; parse(render(sys)) round-trips.
std::string render_dae(const DaeSystem& sys);

} // namespace sigreg
