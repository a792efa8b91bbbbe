#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "quadint/geometry.hpp"

namespace quadint::cli {

/// One quad from a text file together with its 1-based source line.
struct NumberedQuad {
  int line = 0;
  ConvexQuad quad;
};

/// Parses a plain-text quad list: one "x1 y1 x2 y2 x3 y3 x4 y4" per line,
/// blank lines skipped, '#' starts a comment.  Throws ParseError or
/// DegenerateQuad with a "path:line:" prefix; order is preserved.
std::vector<NumberedQuad> read_quads_file(const std::string& path);

/// Runs one command line (argv without the program name).  out receives the
/// payload, err a single-line JSON object per error.  Returns the process
/// exit code: 0 success, 1 numerical failure (unconverged quadrature or an
/// inconclusive study), 2 usage or input error, 3 study assertion failure.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out,
                       std::ostream& err);

}  // namespace quadint::cli
