#pragma once

#include "eigopt/assembly.hpp"
#include "eigopt/coeff.hpp"
#include "eigopt/mesh.hpp"

namespace eigopt {

struct EigenResult {
    double lambda1 = 0.0;
    ScalarField eigenfunction; // unit mass, zero outside the mask, sign-normalized
    double residual = 0.0;     // ||K u - lambda M u||_2
    int iterations = 0;
};

// Smallest eigenpair of the stiffness/mass pencil restricted to the active
// vertices of the mask (hard zeros elsewhere), by inverse power iteration
// with Jacobi-preconditioned conjugate-gradient inner solves.
EigenResult lambda1(const DomainMask& mask, const CoeffField& A, double tol,
                    int max_outer = 500);

// Dense verification oracle: assembles the restricted pencil densely and
// diagonalizes it with the in-repo solver. Active vertex count <= 4096.
EigenResult dense_oracle(const DomainMask& mask, const CoeffField& A);

// True iff lambda1(inner) >= lambda1(outer) - tol. Requires inner subset of
// outer.
bool monotonicity_check(const DomainMask& inner, const DomainMask& outer, const CoeffField& A,
                        double tol = 1e-10);

// Morphological dilation by Euclidean balls, radius chosen as the smallest
// attainable value whose cell-counted measure reaches the target.
DomainMask inflate_to_volume(const DomainMask& mask, double target);

// Rayleigh quotient of a nonzero field.
double rayleigh_quotient(const ScalarField& u, const CoeffField& A);

// Squared Euclidean distance to the active vertex set, per vertex (exact
// separable distance transform in physical coordinates).
std::vector<double> squared_distance_transform(const Mesh& mesh,
                                               const std::vector<std::uint8_t>& active);

} // namespace eigopt
