#include "eigopt/coeff.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eigopt/rng.hpp"

namespace eigopt {

namespace {

int tri_size_for(int dim) { return dim * (dim + 1) / 2; }

// Unpack tri -> full, run cyclic Jacobi, return {min, max} eigenvalue.
std::array<double, 2> jacobi_range(const double* tri, int d) {
    double a[3][3] = {{0}};
    int off = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            a[i][j] = tri[off];
            a[j][i] = tri[off];
            ++off;
        }
    for (int sweep = 0; sweep < 50; ++sweep) {
        double offdiag = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) offdiag += a[i][j] * a[i][j];
        if (offdiag < 1e-30) break;
        for (int p = 0; p < d; ++p)
            for (int q = p + 1; q < d; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < d; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < d; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    double lo = a[0][0], hi = a[0][0];
    for (int i = 1; i < d; ++i) {
        lo = std::min(lo, a[i][i]);
        hi = std::max(hi, a[i][i]);
    }
    return {lo, hi};
}

void check_square_symmetric(const std::vector<double>& m, int d, const char* name) {
    if (m.size() != static_cast<std::size_t>(d) * d)
        throw std::invalid_argument(std::string("make_checkerboard: ") + name + " must be a " +
                                    std::to_string(d) + "x" + std::to_string(d) +
                                    " row-major matrix");
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (m[i * d + j] != m[j * d + i])
                throw std::invalid_argument(std::string("make_checkerboard: ") + name +
                                            " is not symmetric at (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
}

void pack_full(const std::vector<double>& m, int d, double* tri) {
    int off = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) tri[off++] = m[i * d + j];
}

} // namespace

std::array<double, 2> sym_eig_range(const double* tri, int dim) {
    if (dim == 2) {
        const double a = tri[0], b = tri[1], c = tri[2];
        const double mid = 0.5 * (a + c);
        const double r = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        return {mid - r, mid + r};
    }
    return jacobi_range(tri, dim);
}

CoeffField make_identity(const MeshPtr& mesh, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("make_identity: scale must be positive");
    const int d = mesh->dim();
    CoeffField A;
    A.mesh = mesh;
    A.tri_size = tri_size_for(d);
    A.entries.assign(mesh->cell_count * A.tri_size, 0.0);
    for (std::size_t c = 0; c < mesh->cell_count; ++c) {
        int off = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) A.entries[c * A.tri_size + off++] = (i == j) ? scale : 0.0;
    }
    A.theta = scale;
    A.Theta = scale;
    return A;
}

CoeffField make_checkerboard(const MeshPtr& mesh, int block_cells,
                             const std::vector<double>& a_even,
                             const std::vector<double>& a_odd) {
    const int d = mesh->dim();
    if (block_cells < 1)
        throw std::invalid_argument("make_checkerboard: block_cells must be >= 1");
    check_square_symmetric(a_even, d, "a_even");
    check_square_symmetric(a_odd, d, "a_odd");

    CoeffField A;
    A.mesh = mesh;
    A.tri_size = tri_size_for(d);
    std::vector<double> tri_even(A.tri_size), tri_odd(A.tri_size);
    pack_full(a_even, d, tri_even.data());
    pack_full(a_odd, d, tri_odd.data());

    const auto re = sym_eig_range(tri_even.data(), d);
    const auto ro = sym_eig_range(tri_odd.data(), d);
    A.theta = std::min(re[0], ro[0]);
    A.Theta = std::max(re[1], ro[1]);
    if (!(A.theta > 0.0))
        throw std::invalid_argument("make_checkerboard: matrices must be positive definite, "
                                    "smallest eigenvalue is " + std::to_string(A.theta));

    A.entries.assign(mesh->cell_count * A.tri_size, 0.0);
    for (std::size_t c = 0; c < mesh->cell_count; ++c) {
        const auto cc = mesh->cell_coords(c);
        int parity = 0;
        for (int a = 0; a < d; ++a) parity += cc[a] / block_cells;
        const auto& tri = (parity % 2 == 0) ? tri_even : tri_odd;
        for (int t = 0; t < A.tri_size; ++t) A.entries[c * A.tri_size + t] = tri[t];
    }
    return A;
}

CoeffField make_random_piecewise(const MeshPtr& mesh, std::uint64_t seed, double theta,
                                 double Theta, int block_cells) {
    if (!(theta > 0.0) || !(Theta >= theta))
        throw std::invalid_argument("make_random_piecewise: need 0 < theta <= Theta");
    if (block_cells < 1)
        throw std::invalid_argument("make_random_piecewise: block_cells must be >= 1");
    const int d = mesh->dim();

    CoeffField A;
    A.mesh = mesh;
    A.tri_size = tri_size_for(d);
    A.theta = theta;
    A.Theta = Theta;
    A.entries.assign(mesh->cell_count * A.tri_size, 0.0);

    std::array<int, 3> nblocks{1, 1, 1};
    for (int a = 0; a < d; ++a) nblocks[a] = (mesh->cells[a] + block_cells - 1) / block_cells;
    const std::size_t total_blocks =
        static_cast<std::size_t>(nblocks[0]) * nblocks[1] * nblocks[2];

    // One matrix per block, drawn in block-index order.
    std::vector<double> block_tri(total_blocks * A.tri_size);
    Rng rng(seed);
    for (std::size_t b = 0; b < total_blocks; ++b) {
        double diag[3] = {0, 0, 0};
        for (int a = 0; a < d; ++a) diag[a] = rng.uniform(theta, Theta);
        double q[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
        if (d == 2) {
            const double phi = rng.uniform(0.0, 6.283185307179586476925286766559);
            q[0][0] = std::cos(phi);
            q[0][1] = -std::sin(phi);
            q[1][0] = std::sin(phi);
            q[1][1] = std::cos(phi);
        } else {
            // Haar-uniform rotation from a normalized quaternion.
            double w = rng.gaussian(), x = rng.gaussian(), y = rng.gaussian(), z = rng.gaussian();
            const double n = std::sqrt(w * w + x * x + y * y + z * z);
            w /= n; x /= n; y /= n; z /= n;
            q[0][0] = 1 - 2 * (y * y + z * z);
            q[0][1] = 2 * (x * y - z * w);
            q[0][2] = 2 * (x * z + y * w);
            q[1][0] = 2 * (x * y + z * w);
            q[1][1] = 1 - 2 * (x * x + z * z);
            q[1][2] = 2 * (y * z - x * w);
            q[2][0] = 2 * (x * z - y * w);
            q[2][1] = 2 * (y * z + x * w);
            q[2][2] = 1 - 2 * (x * x + y * y);
        }
        // A = Q^T D Q, upper triangle only (symmetric by construction).
        int off = 0;
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += q[k][i] * diag[k] * q[k][j];
                block_tri[b * A.tri_size + off++] = s;
            }
    }

    for (std::size_t c = 0; c < mesh->cell_count; ++c) {
        const auto cc = mesh->cell_coords(c);
        std::array<int, 3> bc{0, 0, 0};
        for (int a = 0; a < d; ++a) bc[a] = cc[a] / block_cells;
        const std::size_t b =
            (static_cast<std::size_t>(bc[2]) * nblocks[1] + bc[1]) * nblocks[0] + bc[0];
        for (int t = 0; t < A.tri_size; ++t)
            A.entries[c * A.tri_size + t] = block_tri[b * A.tri_size + t];
    }
    return A;
}

EllipticityReport validate_ellipticity(const CoeffField& A) {
    const int d = A.mesh->dim();
    EllipticityReport rep;
    bool first = true;
    const double slack = 1e-12 * std::max(1.0, A.Theta);
    for (std::size_t c = 0; c < A.mesh->cell_count; ++c) {
        const auto r = sym_eig_range(A.cell_entries(c), d);
        if (first) {
            rep.theta_observed = r[0];
            rep.Theta_observed = r[1];
            first = false;
        } else {
            rep.theta_observed = std::min(rep.theta_observed, r[0]);
            rep.Theta_observed = std::max(rep.Theta_observed, r[1]);
        }
        if (rep.within_declared && (r[0] < A.theta - slack || r[1] > A.Theta + slack)) {
            rep.within_declared = false;
            rep.first_violating_cell = c;
        }
    }
    return rep;
}

void save_coeff_csv(const CoeffField& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_coeff_csv: cannot open " + path);
    char buf[32];
    for (std::size_t c = 0; c < A.mesh->cell_count; ++c) {
        out << c;
        for (int t = 0; t < A.tri_size; ++t) {
            std::snprintf(buf, sizeof(buf), "%.17g", A.entries[c * A.tri_size + t]);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_coeff_csv: write failed for " + path);
}

CoeffField load_coeff_csv(const MeshPtr& mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_coeff_csv: cannot open " + path);
    const int d = mesh->dim();
    CoeffField A;
    A.mesh = mesh;
    A.tri_size = tri_size_for(d);
    A.entries.assign(mesh->cell_count * A.tri_size, 0.0);

    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        if (!std::getline(ss, tok, ','))
            throw std::runtime_error("load_coeff_csv: malformed row " + std::to_string(rows));
        const std::size_t c = std::stoull(tok);
        if (c >= mesh->cell_count)
            throw std::runtime_error("load_coeff_csv: cell index " + std::to_string(c) +
                                     " out of range (cell count " +
                                     std::to_string(mesh->cell_count) + ")");
        for (int t = 0; t < A.tri_size; ++t) {
            if (!std::getline(ss, tok, ','))
                throw std::runtime_error("load_coeff_csv: row for cell " + std::to_string(c) +
                                         " has fewer than " + std::to_string(A.tri_size) +
                                         " entries");
            A.entries[c * A.tri_size + t] = std::stod(tok);
        }
        ++rows;
    }
    if (rows != mesh->cell_count)
        throw std::runtime_error("load_coeff_csv: expected " + std::to_string(mesh->cell_count) +
                                 " rows, got " + std::to_string(rows));

    const auto rep = validate_ellipticity(A);
    A.theta = rep.theta_observed;
    A.Theta = rep.Theta_observed;
    if (!(A.theta > 0.0))
        throw std::runtime_error("load_coeff_csv: field is not uniformly elliptic, smallest "
                                 "cell eigenvalue is " + std::to_string(A.theta));
    return A;
}

} // namespace eigopt
