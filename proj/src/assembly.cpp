#include "eigopt/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "eigopt/parallel.hpp"

namespace eigopt {

namespace {

constexpr int kMaxCorners = 8;

// Tensor-product factor matrices for one mesh. With 1D linear shape functions
// N0, N1 on a cell of width h:
//   K1[p][q] = int N_p' N_q'   = (1/h) [[ 1,-1],[-1, 1]]
//   M1[p][q] = int N_p  N_q    = (h/6) [[ 2, 1],[ 1, 2]]
//   G1[p][q] = int N_p' N_q    = (1/2) [[-1,-1],[ 1, 1]]
// The local stiffness entry for corners p, q is
//   K[p][q] = sum_{alpha,beta} A_{alpha beta} * prod_ax F(ax)
// where F picks K1 (ax == alpha == beta), G1 (derivative side), or M1.
struct LocalMatrices {
    int dim = 2;
    int nc = 4;
    int npairs = 0;                      // distinct (alpha<=beta) pairs
    int pair_alpha[6], pair_beta[6];
    double P[6][kMaxCorners * kMaxCorners];   // per pair, symmetrized for alpha<beta
    double M[kMaxCorners * kMaxCorners];

    explicit LocalMatrices(const Mesh& mesh) {
        dim = mesh.dim();
        nc = 1 << dim;
        double K1[3][2][2], M1[3][2][2], G1[3][2][2];
        for (int a = 0; a < dim; ++a) {
            const double h = mesh.h[a];
            K1[a][0][0] = 1.0 / h;  K1[a][0][1] = -1.0 / h;
            K1[a][1][0] = -1.0 / h; K1[a][1][1] = 1.0 / h;
            M1[a][0][0] = h / 3.0;  M1[a][0][1] = h / 6.0;
            M1[a][1][0] = h / 6.0;  M1[a][1][1] = h / 3.0;
            G1[a][0][0] = -0.5; G1[a][0][1] = -0.5;
            G1[a][1][0] = 0.5;  G1[a][1][1] = 0.5;
        }
        auto grad_pair_entry = [&](int alpha, int beta, int p, int q) {
            double prod = 1.0;
            for (int ax = 0; ax < dim; ++ax) {
                const int pa = (p >> ax) & 1, qa = (q >> ax) & 1;
                if (ax == alpha && ax == beta) prod *= K1[ax][pa][qa];
                else if (ax == alpha) prod *= G1[ax][pa][qa];
                else if (ax == beta) prod *= G1[ax][qa][pa];
                else prod *= M1[ax][pa][qa];
            }
            return prod;
        };
        npairs = 0;
        for (int alpha = 0; alpha < dim; ++alpha)
            for (int beta = alpha; beta < dim; ++beta) {
                pair_alpha[npairs] = alpha;
                pair_beta[npairs] = beta;
                for (int p = 0; p < nc; ++p)
                    for (int q = 0; q < nc; ++q) {
                        double v = grad_pair_entry(alpha, beta, p, q);
                        if (alpha != beta) v += grad_pair_entry(beta, alpha, p, q);
                        P[npairs][p * nc + q] = v;
                    }
                ++npairs;
            }
        for (int p = 0; p < nc; ++p)
            for (int q = 0; q < nc; ++q) {
                double prod = 1.0;
                for (int ax = 0; ax < dim; ++ax)
                    prod *= M1[ax][(p >> ax) & 1][(q >> ax) & 1];
                M[p * nc + q] = prod;
            }
    }
};

void check_same_mesh(const ScalarField& u, const CoeffField& A, const char* where) {
    if (!u.mesh || !A.mesh || !(u.mesh == A.mesh || u.mesh->same_layout(*A.mesh)))
        throw std::invalid_argument(std::string(where) +
                                    ": field and coefficients live on different meshes");
}

void gather(const Mesh& mesh, const std::vector<double>& values, const std::array<int, 3>& cc,
            int nc, double* uloc) {
    for (int q = 0; q < nc; ++q) uloc[q] = values[mesh.cell_corner(cc, q)];
}

double cell_energy(const LocalMatrices& lm, const double* tri, const double* uloc) {
    double e = 0.0;
    for (int t = 0; t < lm.npairs; ++t) {
        const double* P = lm.P[t];
        double s = 0.0;
        for (int p = 0; p < lm.nc; ++p) {
            double row = 0.0;
            for (int q = 0; q < lm.nc; ++q) row += P[p * lm.nc + q] * uloc[q];
            s += uloc[p] * row;
        }
        e += tri[t] * s;
    }
    return e;
}

// Scatter over cells in 2^dim colors so no two concurrently processed cells
// share a vertex; contributions arrive at each vertex in fixed color order,
// keeping results independent of the thread count.
template <class CellKernel>
void colored_cell_scatter(const Mesh& mesh, CellKernel&& kernel) {
    const int dim = mesh.dim();
    const int ncolors = 1 << dim;
    for (int color = 0; color < ncolors; ++color) {
        std::array<int, 3> base{color & 1, (color >> 1) & 1, (color >> 2) & 1};
        std::array<std::size_t, 3> n{1, 1, 1};
        for (int a = 0; a < dim; ++a) {
            if (base[a] >= mesh.cells[a]) { n[a] = 0; continue; }
            n[a] = static_cast<std::size_t>((mesh.cells[a] - base[a] + 1) / 2);
        }
        const std::size_t total = n[0] * n[1] * n[2];
        if (total == 0) continue;
        par::parallel_for(total, [&](std::size_t idx) {
            std::array<int, 3> cc{0, 0, 0};
            std::size_t rem = idx;
            cc[0] = base[0] + 2 * static_cast<int>(rem % n[0]);
            rem /= n[0];
            cc[1] = base[1] + 2 * static_cast<int>(rem % n[1]);
            rem /= n[1];
            cc[2] = base[2] + 2 * static_cast<int>(rem);
            kernel(cc);
        });
    }
}

// Packed upper-triangle entries in pair order (alpha<=beta) match the
// LocalMatrices pair order for dim 2; for dim 3 the packed order is
// (00,01,02,11,12,22) and pair order is the same.
} // namespace

double dirichlet_energy(const ScalarField& u, const CoeffField& A) {
    check_same_mesh(u, A, "dirichlet_energy");
    const Mesh& mesh = *u.mesh;
    const LocalMatrices lm(mesh);
    return par::deterministic_sum(mesh.cell_count, [&](std::size_t c) {
        double uloc[kMaxCorners];
        gather(mesh, u.values, mesh.cell_coords(c), lm.nc, uloc);
        return cell_energy(lm, A.cell_entries(c), uloc);
    });
}

double mass(const ScalarField& u) {
    const Mesh& mesh = *u.mesh;
    const LocalMatrices lm(mesh);
    return par::deterministic_sum(mesh.cell_count, [&](std::size_t c) {
        double uloc[kMaxCorners];
        gather(mesh, u.values, mesh.cell_coords(c), lm.nc, uloc);
        double s = 0.0;
        for (int p = 0; p < lm.nc; ++p) {
            double row = 0.0;
            for (int q = 0; q < lm.nc; ++q) row += lm.M[p * lm.nc + q] * uloc[q];
            s += uloc[p] * row;
        }
        return s;
    });
}

void apply_stiffness_raw(const ScalarField& u, const CoeffField& A, ScalarField& out) {
    check_same_mesh(u, A, "apply_stiffness_raw");
    const Mesh& mesh = *u.mesh;
    const LocalMatrices lm(mesh);
    out.mesh = u.mesh;
    out.values.assign(mesh.vertex_count, 0.0);
    colored_cell_scatter(mesh, [&](const std::array<int, 3>& cc) {
        const std::size_t c = mesh.cell_index(cc[0], cc[1], cc[2]);
        const double* tri = A.cell_entries(c);
        double uloc[kMaxCorners], yloc[kMaxCorners] = {0};
        gather(mesh, u.values, cc, lm.nc, uloc);
        for (int t = 0; t < lm.npairs; ++t) {
            const double a = tri[t];
            if (a == 0.0) continue;
            const double* P = lm.P[t];
            for (int p = 0; p < lm.nc; ++p) {
                double row = 0.0;
                for (int q = 0; q < lm.nc; ++q) row += P[p * lm.nc + q] * uloc[q];
                yloc[p] += a * row;
            }
        }
        for (int p = 0; p < lm.nc; ++p) out.values[mesh.cell_corner(cc, p)] += yloc[p];
    });
}

void apply_mass_raw(const ScalarField& u, ScalarField& out) {
    const Mesh& mesh = *u.mesh;
    const LocalMatrices lm(mesh);
    out.mesh = u.mesh;
    out.values.assign(mesh.vertex_count, 0.0);
    colored_cell_scatter(mesh, [&](const std::array<int, 3>& cc) {
        double uloc[kMaxCorners];
        gather(mesh, u.values, cc, lm.nc, uloc);
        for (int p = 0; p < lm.nc; ++p) {
            double row = 0.0;
            for (int q = 0; q < lm.nc; ++q) row += lm.M[p * lm.nc + q] * uloc[q];
            out.values[mesh.cell_corner(cc, p)] += row;
        }
    });
}

ScalarField apply_operator(const ScalarField& u, const CoeffField& A) {
    ScalarField out;
    apply_stiffness_raw(u, A, out);
    par::parallel_for(u.mesh->vertex_count, [&](std::size_t v) {
        if (u.mesh->is_dirichlet(v)) out.values[v] = 0.0;
    });
    return out;
}

ScalarField mass_apply(const ScalarField& u) {
    ScalarField out;
    apply_mass_raw(u, out);
    par::parallel_for(u.mesh->vertex_count, [&](std::size_t v) {
        if (u.mesh->is_dirichlet(v)) out.values[v] = 0.0;
    });
    return out;
}

std::vector<double> stiffness_diagonal(const MeshPtr& mesh, const CoeffField& A) {
    const LocalMatrices lm(*mesh);
    std::vector<double> diag(mesh->vertex_count, 0.0);
    colored_cell_scatter(*mesh, [&](const std::array<int, 3>& cc) {
        const std::size_t c = mesh->cell_index(cc[0], cc[1], cc[2]);
        const double* tri = A.cell_entries(c);
        for (int p = 0; p < lm.nc; ++p) {
            double d = 0.0;
            for (int t = 0; t < lm.npairs; ++t) d += tri[t] * lm.P[t][p * lm.nc + p];
            diag[mesh->cell_corner(cc, p)] += d;
        }
    });
    return diag;
}

EnergyBreakdown energies(const ScalarField& u, const CoeffField& A) {
    return {dirichlet_energy(u, A), mass(u)};
}

double dot(const ScalarField& a, const ScalarField& b) {
    return par::deterministic_sum(a.values.size(),
                                  [&](std::size_t i) { return a.values[i] * b.values[i]; });
}

namespace serial {

namespace {

// 2-point Gauss rule on [0,1] per axis.
constexpr double kG0 = 0.21132486540518711775; // (1 - 1/sqrt(3)) / 2
constexpr double kG1 = 0.78867513459481288225;

struct QuadPoint {
    double xi[3];
};

template <class PointFn>
void for_each_quad_point(int dim, PointFn&& fn) {
    const double g[2] = {kG0, kG1};
    const int npts = 1 << dim;
    for (int m = 0; m < npts; ++m) {
        QuadPoint qp{};
        for (int a = 0; a < dim; ++a) qp.xi[a] = g[(m >> a) & 1];
        fn(qp); // weight is 1/npts, folded in by the caller
    }
}

// Value and reference-coordinate gradient of corner shape function p at xi.
double shape_value(int dim, int p, const double* xi) {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= ((p >> a) & 1) ? xi[a] : 1.0 - xi[a];
    return v;
}

void shape_grad(int dim, int p, const double* xi, const double* h, double* g) {
    for (int a = 0; a < dim; ++a) {
        double v = 1.0;
        for (int b = 0; b < dim; ++b) {
            if (b == a) v *= ((p >> b) & 1) ? 1.0 : -1.0;
            else v *= ((p >> b) & 1) ? xi[b] : 1.0 - xi[b];
        }
        g[a] = v / h[a];
    }
}

} // namespace

double dirichlet_energy(const ScalarField& u, const CoeffField& A) {
    const Mesh& mesh = *u.mesh;
    const int dim = mesh.dim();
    const int nc = mesh.corners_per_cell();
    const double wcell = mesh.cell_volume() / nc;
    double total = 0.0;
    for (std::size_t c = 0; c < mesh.cell_count; ++c) {
        const auto cc = mesh.cell_coords(c);
        double uloc[kMaxCorners];
        for (int q = 0; q < nc; ++q) uloc[q] = u.values[mesh.cell_corner(cc, q)];
        double e = 0.0;
        for_each_quad_point(dim, [&](const QuadPoint& qp) {
            double grad[3] = {0, 0, 0};
            for (int p = 0; p < nc; ++p) {
                double g[3];
                shape_grad(dim, p, qp.xi, mesh.h.data(), g);
                for (int a = 0; a < dim; ++a) grad[a] += uloc[p] * g[a];
            }
            double agrad[3] = {0, 0, 0};
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) agrad[a] += A.at(c, a, b) * grad[b];
            double q = 0.0;
            for (int a = 0; a < dim; ++a) q += grad[a] * agrad[a];
            e += q;
        });
        total += e * wcell;
    }
    return total;
}

double mass(const ScalarField& u) {
    const Mesh& mesh = *u.mesh;
    const int dim = mesh.dim();
    const int nc = mesh.corners_per_cell();
    const double wcell = mesh.cell_volume() / nc;
    double total = 0.0;
    for (std::size_t c = 0; c < mesh.cell_count; ++c) {
        const auto cc = mesh.cell_coords(c);
        double uloc[kMaxCorners];
        for (int q = 0; q < nc; ++q) uloc[q] = u.values[mesh.cell_corner(cc, q)];
        double e = 0.0;
        for_each_quad_point(dim, [&](const QuadPoint& qp) {
            double val = 0.0;
            for (int p = 0; p < nc; ++p) val += uloc[p] * shape_value(dim, p, qp.xi);
            e += val * val;
        });
        total += e * wcell;
    }
    return total;
}

ScalarField apply_operator(const ScalarField& u, const CoeffField& A) {
    const Mesh& mesh = *u.mesh;
    const int dim = mesh.dim();
    const int nc = mesh.corners_per_cell();
    const double wcell = mesh.cell_volume() / nc;
    ScalarField out(u.mesh);
    for (std::size_t c = 0; c < mesh.cell_count; ++c) {
        const auto cc = mesh.cell_coords(c);
        double uloc[kMaxCorners];
        for (int q = 0; q < nc; ++q) uloc[q] = u.values[mesh.cell_corner(cc, q)];
        double yloc[kMaxCorners] = {0};
        for_each_quad_point(dim, [&](const QuadPoint& qp) {
            double grad[3] = {0, 0, 0};
            double gp[kMaxCorners][3];
            for (int p = 0; p < nc; ++p) {
                shape_grad(dim, p, qp.xi, mesh.h.data(), gp[p]);
                for (int a = 0; a < dim; ++a) grad[a] += uloc[p] * gp[p][a];
            }
            double agrad[3] = {0, 0, 0};
            for (int a = 0; a < dim; ++a)
                for (int b = 0; b < dim; ++b) agrad[a] += A.at(c, a, b) * grad[b];
            for (int p = 0; p < nc; ++p) {
                double s = 0.0;
                for (int a = 0; a < dim; ++a) s += gp[p][a] * agrad[a];
                yloc[p] += s;
            }
        });
        for (int p = 0; p < nc; ++p) out.values[mesh.cell_corner(cc, p)] += yloc[p] * wcell;
    }
    for (std::size_t v = 0; v < mesh.vertex_count; ++v)
        if (mesh.is_dirichlet(v)) out.values[v] = 0.0;
    return out;
}

} // namespace serial

} // namespace eigopt
