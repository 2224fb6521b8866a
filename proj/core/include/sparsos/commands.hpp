#ifndef SPARSOS_COMMANDS_HPP
#define SPARSOS_COMMANDS_HPP

#include <iosfwd>
#include <optional>
#include <string>

namespace sparsos {

// Exit codes: 0 success / PASS, 1 FAIL or infeasible where feasibility was
// asserted, 2 usage / input errors.
struct CliOptions {
    std::string file;                  // problem file
    std::string cert_file;             // certificate (verify)
    std::string out;                   // output path (certify / export)
    int order = 1;                     // relaxation order k
    std::string epsilon = "1/100";     // exact rational
    std::optional<int> degree;         // d override
    std::string formulation = "A";     // A | B
    double tol = 1e-8;
    bool dense = false;                // Putinar baseline
    bool reznick = false;              // homogeneous mode
    bool exact = false;
    std::string max_denominator = "1000000";
    std::string cliques_mode = "auto"; // auto | user
    bool quiet = false;
};

int cmd_analyze(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_solve(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_certify(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const CliOptions& opts, std::ostream& out, std::ostream& err);
int cmd_export(const CliOptions& opts, std::ostream& out, std::ostream& err);

} // namespace sparsos

#endif
