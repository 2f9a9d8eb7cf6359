#pragma once

#include <stdexcept>
#include <vector>

#include "eigopt/functional.hpp"

namespace eigopt {

// Continuation schedule: one projected-gradient stage per (epsilon, smear)
// pair, each warm-started from the previous stage.
struct Schedule {
    double delta = 1e-3;
    std::vector<double> epsilon_sequence;
    std::vector<double> smear_sequence;
    int max_outer = 0; // cap on stages; 0 means run the full sequence
    int max_inner = 800;
    double tol_rel = 1e-7;
    double step_init = 0.0; // 0 means auto: min(h)^2 / Theta
    double backtrack_factor = 0.5;
    double armijo_c = 1e-4;
    double target_volume = 1.0;
    double target_mass = 1.0;

    void validate() const;
};

// Default geometric continuation: epsilon_start * factor^k, smear likewise,
// with smear_start <= 0 meaning auto (max(u0)/4).
Schedule default_schedule(int stages = 6, double epsilon_start = 0.05,
                          double epsilon_factor = 0.5, double smear_start = -1.0,
                          double smear_factor = 0.5);

struct IterRow {
    int stage = 0;
    int iter = 0;
    double total = 0.0;
    double dirichlet = 0.0;
    double mass_penalty = 0.0;
    double volume_penalty = 0.0;
    double exact_volume = 0.0;
    double step = 0.0;
};

struct MinimizerResult {
    ScalarField u_star;
    std::vector<IterRow> history;
    bool converged = false;
    int iterations = 0;
    double final_smear = 0.0;
    double final_epsilon = 0.0;
};

// Truncation annihilated the field; the caller restarts from a fresh
// initialization.
struct DegenerateState : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// max(u, 0) renormalized to unit L2 mass; preserves the zero trace.
ScalarField project(const ScalarField& u);

// Tent-profile ball of the given support measure centered in the box,
// projected to unit mass. seed != 0 adds a small seeded smooth perturbation
// for multi-start studies.
ScalarField default_initializer(const MeshPtr& mesh, double support_measure = 0.9,
                                std::uint64_t seed = 0);

MinimizerResult minimize(const CoeffField& A, const Schedule& sched, const ScalarField& u0);

void write_history_csv(const std::vector<IterRow>& history, const std::string& path);

} // namespace eigopt
