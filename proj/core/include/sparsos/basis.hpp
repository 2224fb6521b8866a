#ifndef SPARSOS_BASIS_HPP
#define SPARSOS_BASIS_HPP

#include "sparsos/monomial.hpp"

#include <vector>

namespace sparsos {

// All monomials in the given variables with total degree <= deg (or == deg
// when exact), in ascending graded lexicographic order.
std::vector<Monomial> monomials_upto(const std::vector<int>& vars, int deg);
std::vector<Monomial> monomials_exact(const std::vector<int>& vars, int deg);

} // namespace sparsos

#endif
