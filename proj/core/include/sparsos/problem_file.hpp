#ifndef SPARSOS_PROBLEM_FILE_HPP
#define SPARSOS_PROBLEM_FILE_HPP

#include "sparsos/polynomial.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsos {

// Text problem format, one statement per line, '#' comments:
//   vars N
//   obj  <expr>
//   ineq <expr>        (meaning expr >= 0)
//   eq   <expr>        (expanded to the pair expr >= 0, -expr >= 0)
//   clique i j ...     (1-based variable indices, optional)
struct ProblemFile {
    int nvars = 0;
    Polynomial objective;
    std::vector<Polynomial> constraints;
    std::vector<std::vector<int>> cliques; // 0-based; empty when not given
};

ProblemFile parse_problem(std::istream& in);
ProblemFile read_problem(const std::string& path);

} // namespace sparsos

#endif
