#pragma once

#include <cstddef>
#include <vector>

namespace eigopt {

// Dense symmetric generalized eigenproblem  K y = lambda M y  with K
// symmetric and M symmetric positive definite, solved in-repo by Cholesky
// reduction to standard form, Householder tridiagonalization, and implicit
// QL iteration with shifts. Row-major n x n storage.
struct DenseGeneralizedEigen {
    std::vector<double> values;  // ascending
    std::vector<double> vectors; // column j of the row-major matrix = j-th eigenvector
    int ql_iterations = 0;
};

DenseGeneralizedEigen dense_generalized_eigen(std::size_t n, std::vector<double> K,
                                              std::vector<double> M);

} // namespace eigopt
