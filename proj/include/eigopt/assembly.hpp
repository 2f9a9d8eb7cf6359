#pragma once

#include "eigopt/coeff.hpp"
#include "eigopt/mesh.hpp"

namespace eigopt {

struct EnergyBreakdown {
    double dirichlet = 0.0;
    double mass = 0.0;
};

// Dirichlet energy  integral of grad(u) . (A grad(u))  assembled cell-by-cell
// with closed-form quadrature (exact for multilinear u and constant-per-cell A).
double dirichlet_energy(const ScalarField& u, const CoeffField& A);

// L2 mass  integral of u^2  with the consistent (tensor-product) mass rule.
double mass(const ScalarField& u);

// Stiffness action K*u, the gradient of (1/2) dirichlet_energy in the vertex
// values, zeroed on Dirichlet vertices.
ScalarField apply_operator(const ScalarField& u, const CoeffField& A);

// Mass-matrix action M*u (gradient of (1/2) mass), zeroed on Dirichlet vertices.
ScalarField mass_apply(const ScalarField& u);

// Raw scatter variants without boundary-row zeroing; the eigensolver applies
// its own degree-of-freedom restriction on top of these.
void apply_stiffness_raw(const ScalarField& u, const CoeffField& A, ScalarField& out);
void apply_mass_raw(const ScalarField& u, ScalarField& out);

// Per-vertex diagonal of the stiffness matrix (Jacobi preconditioner).
std::vector<double> stiffness_diagonal(const MeshPtr& mesh, const CoeffField& A);

EnergyBreakdown energies(const ScalarField& u, const CoeffField& A);

// Deterministic dot product over vertex values.
double dot(const ScalarField& a, const ScalarField& b);

namespace serial {

// Reference implementations: sequential loops, 2-point Gauss quadrature per
// axis (exact for these integrands). Kept for testing and as the benchmark
// baseline against the parallel kernels.
double dirichlet_energy(const ScalarField& u, const CoeffField& A);
double mass(const ScalarField& u);
ScalarField apply_operator(const ScalarField& u, const CoeffField& A);

} // namespace serial

} // namespace eigopt
