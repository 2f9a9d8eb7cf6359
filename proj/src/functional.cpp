#include "eigopt/functional.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eigopt/parallel.hpp"

namespace eigopt {

namespace {

double phi_smear(double t, double s) { return t < s ? t / s : 1.0; }

void check_nonnegative(const ScalarField& u, const char* where) {
    for (std::size_t v = 0; v < u.values.size(); ++v) {
        if (u.values[v] < 0.0)
            throw std::invalid_argument(std::string(where) + ": negative value " +
                                        std::to_string(u.values[v]) + " at vertex " +
                                        std::to_string(v));
    }
}

} // namespace

void PenaltyParams::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("PenaltyParams: delta must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("PenaltyParams: epsilon must be positive");
    if (!(smear_s > 0.0)) throw std::invalid_argument("PenaltyParams: smear_s must be positive");
    if (!(target_volume > 0.0) || !(target_mass > 0.0))
        throw std::invalid_argument("PenaltyParams: targets must be positive");
}

double smeared_volume(const ScalarField& u, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("smeared_volume: s must be positive");
    check_nonnegative(u, "smeared_volume");
    const Mesh& mesh = *u.mesh;
    return par::deterministic_sum(mesh.vertex_count, [&](std::size_t v) {
        return mesh.vertex_weight(v) * phi_smear(u.values[v], s);
    });
}

double exact_volume(const ScalarField& u, double threshold) {
    const Mesh& mesh = *u.mesh;
    return par::deterministic_sum(mesh.vertex_count, [&](std::size_t v) {
        return u.values[v] > threshold ? mesh.vertex_weight(v) : 0.0;
    });
}

FunctionalValue evaluate(const ScalarField& u, const CoeffField& A, const PenaltyParams& p) {
    p.validate();
    FunctionalValue f;
    f.dirichlet = dirichlet_energy(u, A);
    const double m = mass(u);
    f.mass_penalty = std::abs(m - p.target_mass) / p.delta;
    f.smeared_volume = smeared_volume(u, p.smear_s);
    f.exact_volume = exact_volume(u, p.smear_s);
    f.volume_penalty = std::max(0.0, f.smeared_volume - p.target_volume) / p.epsilon;
    f.total = f.dirichlet + f.mass_penalty + f.volume_penalty;
    return f;
}

FunctionalValue evaluate_exact(const ScalarField& u, const CoeffField& A, double delta,
                               double epsilon, double target_volume, double target_mass) {
    FunctionalValue f;
    f.dirichlet = dirichlet_energy(u, A);
    const double m = mass(u);
    f.mass_penalty = std::abs(m - target_mass) / delta;
    f.exact_volume = exact_volume(u, 0.0);
    f.smeared_volume = f.exact_volume;
    f.volume_penalty = std::max(0.0, f.exact_volume - target_volume) / epsilon;
    f.total = f.dirichlet + f.mass_penalty + f.volume_penalty;
    return f;
}

ScalarField descent_direction(const ScalarField& u, const CoeffField& A,
                              const PenaltyParams& p) {
    p.validate();
    const Mesh& mesh = *u.mesh;

    ScalarField g;
    apply_stiffness_raw(u, A, g);
    for (auto& v : g.values) v *= 2.0;

    const double m = mass(u);
    const double mass_sign = m > p.target_mass ? 1.0 : (m < p.target_mass ? -1.0 : 0.0);
    if (mass_sign != 0.0) {
        ScalarField mu;
        apply_mass_raw(u, mu);
        const double coeff = 2.0 * mass_sign / p.delta;
        par::parallel_for(mesh.vertex_count,
                          [&](std::size_t v) { g.values[v] += coeff * mu.values[v]; });
    }

    const double sv = smeared_volume(u, p.smear_s);
    if (sv > p.target_volume) {
        const double coeff = 1.0 / (p.epsilon * p.smear_s);
        par::parallel_for(mesh.vertex_count, [&](std::size_t v) {
            if (u.values[v] > 0.0 && u.values[v] < p.smear_s)
                g.values[v] += coeff * mesh.vertex_weight(v);
        });
    }

    par::parallel_for(mesh.vertex_count, [&](std::size_t v) {
        if (mesh.is_dirichlet(v)) g.values[v] = 0.0;
    });
    return g;
}

namespace serial {

double smeared_volume(const ScalarField& u, double s) {
    if (!(s > 0.0)) throw std::invalid_argument("smeared_volume: s must be positive");
    const Mesh& mesh = *u.mesh;
    double total = 0.0;
    for (std::size_t v = 0; v < mesh.vertex_count; ++v) {
        if (u.values[v] < 0.0)
            throw std::invalid_argument("smeared_volume: negative value at vertex " +
                                        std::to_string(v));
        total += mesh.vertex_weight(v) * phi_smear(u.values[v], s);
    }
    return total;
}

} // namespace serial

} // namespace eigopt
