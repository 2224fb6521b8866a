#include "sparsos/problem_file.hpp"
#include "sparsos/error.hpp"

#include <fstream>
#include <sstream>

namespace sparsos {

ProblemFile parse_problem(std::istream& in) {
    ProblemFile pf;
    bool have_vars = false, have_obj = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        try {
            if (key == "vars") {
                if (!(ls >> pf.nvars) || pf.nvars <= 0)
                    throw ParseError("vars expects a positive count", lineno);
                have_vars = true;
                pf.objective = Polynomial::zero(pf.nvars);
            } else if (key == "obj") {
                if (!have_vars) throw ParseError("vars must precede obj", lineno);
                std::string rest;
                std::getline(ls, rest);
                pf.objective = Polynomial::parse(rest, pf.nvars);
                have_obj = true;
            } else if (key == "ineq") {
                if (!have_vars) throw ParseError("vars must precede ineq", lineno);
                std::string rest;
                std::getline(ls, rest);
                pf.constraints.push_back(Polynomial::parse(rest, pf.nvars));
            } else if (key == "eq") {
                if (!have_vars) throw ParseError("vars must precede eq", lineno);
                std::string rest;
                std::getline(ls, rest);
                Polynomial g = Polynomial::parse(rest, pf.nvars);
                pf.constraints.push_back(g);
                pf.constraints.push_back(-g);
            } else if (key == "clique") {
                if (!have_vars) throw ParseError("vars must precede clique", lineno);
                std::vector<int> c;
                int v;
                while (ls >> v) {
                    if (v < 1 || v > pf.nvars)
                        throw ParseError("clique variable out of range", lineno);
                    c.push_back(v - 1);
                }
                if (c.empty()) throw ParseError("empty clique", lineno);
                pf.cliques.push_back(std::move(c));
            } else {
                throw ParseError("unknown statement '" + key + "'", lineno);
            }
        } catch (const ParseError& e) {
            if (e.line > 0) throw;
            throw ParseError(e.what(), lineno);
        }
    }
    if (!have_vars) throw ParseError("missing 'vars' declaration", lineno);
    if (!have_obj) throw ParseError("missing 'obj' statement", lineno);
    return pf;
}

ProblemFile read_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return parse_problem(in);
}

} // namespace sparsos
