#pragma once

#include "eigopt/assembly.hpp"
#include "eigopt/coeff.hpp"
#include "eigopt/mesh.hpp"

namespace eigopt {

// Parameters of the penalized objective
//   F(u) = dirichlet_energy(u) + (1/delta) |mass(u) - target_mass|
//        + (1/epsilon) (support_volume(u) - target_volume)_+
// The support volume is smeared through phi_s(t) = min(t/s, 1) so the volume
// term has a usable descent direction; smear_s is driven to small values by
// the continuation schedule.
struct PenaltyParams {
    double delta = 1e-3;
    double epsilon = 1e-2;
    double smear_s = 0.1;
    double target_volume = 1.0;
    double target_mass = 1.0;

    void validate() const;
};

struct FunctionalValue {
    double total = 0.0;
    double dirichlet = 0.0;
    double mass_penalty = 0.0;
    double volume_penalty = 0.0;
    double smeared_volume = 0.0;
    double exact_volume = 0.0; // vertex-weighted measure of {u > smear_s}
};

// Vertex-weighted smeared support measure  sum_v w_v phi_s(u_v).
// Rejects negative vertex values (nonnegativity is the optimizer's contract).
double smeared_volume(const ScalarField& u, double s);

// Vertex-weighted measure of {u > threshold}.
double exact_volume(const ScalarField& u, double threshold);

FunctionalValue evaluate(const ScalarField& u, const CoeffField& A, const PenaltyParams& p);

// The objective with the sharp support term (threshold-0 measure) instead of
// the smeared surrogate. Used by the diagnostics that compare against the
// eigenfunction route, where the sharp form's monotonicity matters.
FunctionalValue evaluate_exact(const ScalarField& u, const CoeffField& A, double delta,
                               double epsilon, double target_volume = 1.0,
                               double target_mass = 1.0);

// Gradient of evaluate(...).total in the vertex values (sign subgradient for
// the mass term, one-sided derivative for the volume hinge), zero on
// Dirichlet vertices.
ScalarField descent_direction(const ScalarField& u, const CoeffField& A,
                              const PenaltyParams& p);

namespace serial {
double smeared_volume(const ScalarField& u, double s);
} // namespace serial

} // namespace eigopt
