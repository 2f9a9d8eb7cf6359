#include "eigopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "eigopt/parallel.hpp"
#include "eigopt/rng.hpp"

namespace eigopt {

void Schedule::validate() const {
    if (!(delta > 0.0)) throw std::invalid_argument("Schedule: delta must be positive");
    if (epsilon_sequence.empty() || smear_sequence.empty())
        throw std::invalid_argument("Schedule: continuation sequences must be nonempty");
    if (epsilon_sequence.size() != smear_sequence.size())
        throw std::invalid_argument("Schedule: epsilon and smear sequences differ in length");
    for (std::size_t k = 0; k < epsilon_sequence.size(); ++k) {
        if (!(epsilon_sequence[k] > 0.0) || !(smear_sequence[k] > 0.0))
            throw std::invalid_argument("Schedule: sequences must be strictly positive");
        if (k > 0 && (epsilon_sequence[k] > epsilon_sequence[k - 1] ||
                      smear_sequence[k] > smear_sequence[k - 1]))
            throw std::invalid_argument("Schedule: sequences must be nonincreasing");
    }
    if (!(tol_rel > 0.0)) throw std::invalid_argument("Schedule: tol_rel must be positive");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
        throw std::invalid_argument("Schedule: backtrack_factor must lie in (0,1)");
    if (!(armijo_c > 0.0 && armijo_c < 1.0))
        throw std::invalid_argument("Schedule: armijo_c must lie in (0,1)");
    if (max_inner < 1) throw std::invalid_argument("Schedule: max_inner must be >= 1");
}

Schedule default_schedule(int stages, double epsilon_start, double epsilon_factor,
                          double smear_start, double smear_factor) {
    Schedule s;
    double eps = epsilon_start;
    double sm = smear_start;
    for (int k = 0; k < stages; ++k) {
        s.epsilon_sequence.push_back(eps);
        s.smear_sequence.push_back(sm); // may hold the auto marker; resolved in minimize
        eps *= epsilon_factor;
        sm *= smear_factor;
    }
    return s;
}

ScalarField project(const ScalarField& u) {
    ScalarField v = u;
    par::parallel_for(v.values.size(), [&](std::size_t i) {
        if (v.values[i] < 0.0) v.values[i] = 0.0;
    });
    const double m = mass(v);
    if (!(m > 0.0)) throw DegenerateState("project: truncation annihilated the field");
    const double inv = 1.0 / std::sqrt(m);
    par::parallel_for(v.values.size(), [&](std::size_t i) { v.values[i] *= inv; });
    return v;
}

ScalarField default_initializer(const MeshPtr& mesh, double support_measure,
                                std::uint64_t seed) {
    const int d = mesh->dim();
    if (!(support_measure > 0.0) || support_measure >= mesh->box.volume())
        throw std::invalid_argument("default_initializer: support measure must lie in "
                                    "(0, volume(box))");
    Point center{0, 0, 0};
    for (int a = 0; a < d; ++a) center[a] = mesh->box.origin[a] + 0.5 * mesh->box.sides[a];
    const double pi = 3.14159265358979323846;
    const double radius = d == 2 ? std::sqrt(support_measure / pi)
                                 : std::cbrt(support_measure * 3.0 / (4.0 * pi));

    ScalarField u(mesh);
    for (std::size_t v = 0; v < mesh->vertex_count; ++v) {
        if (mesh->is_dirichlet(v)) continue;
        const Point p = mesh->vertex_pos(v);
        double d2 = 0.0;
        for (int a = 0; a < d; ++a) d2 += (p[a] - center[a]) * (p[a] - center[a]);
        const double t = 1.0 - std::sqrt(d2) / radius;
        u.values[v] = t > 0.0 ? t : 0.0;
    }
    if (seed != 0) {
        // Smooth multiplicative jitter: a few random low-frequency modes.
        Rng rng(seed);
        double kx[4], ky[4], kz[4], ph[4], am[4];
        for (int m = 0; m < 4; ++m) {
            kx[m] = rng.uniform(0.5, 3.0);
            ky[m] = rng.uniform(0.5, 3.0);
            kz[m] = d == 3 ? rng.uniform(0.5, 3.0) : 0.0;
            ph[m] = rng.uniform(0.0, 6.28318530717958647692);
            am[m] = rng.uniform(0.02, 0.1);
        }
        for (std::size_t v = 0; v < mesh->vertex_count; ++v) {
            if (u.values[v] <= 0.0) continue;
            const Point p = mesh->vertex_pos(v);
            double jitter = 1.0;
            for (int m = 0; m < 4; ++m)
                jitter += am[m] * std::sin(kx[m] * p[0] + ky[m] * p[1] + kz[m] * p[2] + ph[m]);
            u.values[v] *= std::max(0.1, jitter);
        }
    }
    return project(u);
}

namespace {

double max_value(const ScalarField& u) {
    double m = 0.0;
    for (double v : u.values) m = std::max(m, v);
    return m;
}

// Direction actually used for the line search: the raw gradient with the
// nonnegativity active set removed (components that push a zero vertex
// further negative cannot produce progress through the projection).
void reduce_gradient(const ScalarField& u, ScalarField& g) {
    par::parallel_for(g.values.size(), [&](std::size_t i) {
        if (u.values[i] == 0.0 && g.values[i] > 0.0) g.values[i] = 0.0;
    });
}

} // namespace

MinimizerResult minimize(const CoeffField& A, const Schedule& sched_in, const ScalarField& u0) {
    Schedule sched = sched_in;
    if (sched.step_init <= 0.0) {
        double hmin = u0.mesh->h[0];
        for (int a = 1; a < u0.mesh->dim(); ++a) hmin = std::min(hmin, u0.mesh->h[a]);
        sched.step_init = hmin * hmin / A.Theta;
    }

    ScalarField u = project(u0);

    // Resolve the auto marker for the smear sequence from the projected start.
    if (!sched.smear_sequence.empty() && sched.smear_sequence.front() <= 0.0) {
        double sm = max_value(u) / 4.0;
        for (auto& s : sched.smear_sequence) {
            s = sm;
            sm *= 0.5;
        }
    }
    sched.validate();

    if (!(u0.mesh->box.volume() > sched.target_volume))
        throw std::invalid_argument("minimize: box volume must exceed the target volume");

    MinimizerResult result;
    result.converged = true;

    const int stages = sched.max_outer > 0
                           ? std::min<int>(sched.max_outer, sched.epsilon_sequence.size())
                           : static_cast<int>(sched.epsilon_sequence.size());
    const double step_max = sched.step_init * 1e8;
    const int checkpoint = 10; // stage tolerance examined over this window

    for (int stage = 0; stage < stages; ++stage) {
        PenaltyParams p;
        p.delta = sched.delta;
        p.epsilon = sched.epsilon_sequence[stage];
        p.smear_s = sched.smear_sequence[stage];
        p.target_volume = sched.target_volume;
        p.target_mass = sched.target_mass;

        FunctionalValue f = evaluate(u, A, p);
        double step = sched.step_init;
        double window_total = f.total;
        bool stage_converged = false;
        bool restarted = false;

        for (int iter = 0; iter < sched.max_inner; ++iter) {
            ScalarField g = descent_direction(u, A, p);
            reduce_gradient(u, g);
            const double gnorm2 = dot(g, g);
            if (gnorm2 == 0.0) {
                stage_converged = true;
                break;
            }

            bool accepted = false;
            bool restarted_now = false;
            for (int bt = 0; bt < 60 && !accepted; ++bt) {
                ScalarField cand = u;
                par::parallel_for(cand.values.size(), [&](std::size_t i) {
                    cand.values[i] -= step * g.values[i];
                });
                bool degenerate = false;
                try {
                    cand = project(cand);
                } catch (const DegenerateState&) {
                    degenerate = true;
                }
                if (degenerate) {
                    if (!restarted) {
                        restarted = true;
                        restarted_now = true;
                        u = default_initializer(u.mesh, 0.9 * sched.target_volume);
                        f = evaluate(u, A, p);
                        step = sched.step_init;
                        break;
                    }
                    result.converged = false;
                    stage_converged = true;
                    break;
                }
                const FunctionalValue fc = evaluate(cand, A, p);
                if (fc.total <= f.total - sched.armijo_c * step * gnorm2) {
                    u = std::move(cand);
                    f = fc;
                    accepted = true;
                } else {
                    step *= sched.backtrack_factor;
                    if (step < sched.step_init * 1e-14) break;
                }
            }
            if (stage_converged) break;
            if (restarted_now) continue;
            if (!accepted) {
                // No decrease is achievable along the reduced gradient:
                // stationary for this stage.
                stage_converged = true;
                break;
            }

            result.history.push_back({stage, iter, f.total, f.dirichlet, f.mass_penalty,
                                      f.volume_penalty, f.exact_volume, step});
            ++result.iterations;
            step = std::min(step * 2.0, step_max);

            if ((iter + 1) % checkpoint == 0) {
                const double denom = std::max(std::abs(window_total), 1e-300);
                if ((window_total - f.total) / denom < sched.tol_rel) {
                    stage_converged = true;
                    break;
                }
                window_total = f.total;
            }
        }
        if (!stage_converged) result.converged = false;
    }

    result.u_star = project(u);
    result.final_epsilon = sched.epsilon_sequence[stages - 1];
    result.final_smear = sched.smear_sequence[stages - 1];
    return result;
}

void write_history_csv(const std::vector<IterRow>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
    out << "stage,iter,total,dirichlet,mass_penalty,volume_penalty,exact_volume,step\n";
    char buf[256];
    for (const auto& r : history) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.stage,
                      r.iter, r.total, r.dirichlet, r.mass_penalty, r.volume_penalty,
                      r.exact_volume, r.step);
        out << buf;
    }
    if (!out) throw std::runtime_error("write_history_csv: write failed for " + path);
}

} // namespace eigopt
