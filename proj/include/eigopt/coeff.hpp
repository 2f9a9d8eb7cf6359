#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "eigopt/mesh.hpp"

namespace eigopt {

// Per-cell symmetric d x d coefficient matrix A(x) with the ellipticity
// sandwich theta*I <= A(x) <= Theta*I. Entries are stored packed as the
// upper triangle in row-major order:
//   d=2: a00, a01, a11
//   d=3: a00, a01, a02, a11, a12, a22
struct CoeffField {
    MeshPtr mesh;
    int tri_size = 3; // d(d+1)/2
    std::vector<double> entries; // cell_count * tri_size
    double theta = 1.0;
    double Theta = 1.0;

    double at(std::size_t cell, int i, int j) const {
        if (i > j) std::swap(i, j);
        const int d = mesh->dim();
        // offset of (i,j) in the packed upper triangle
        const int off = i * d - i * (i - 1) / 2 + (j - i);
        return entries[cell * tri_size + off];
    }
    const double* cell_entries(std::size_t cell) const { return &entries[cell * tri_size]; }
};

struct EllipticityReport {
    double theta_observed = 0.0;
    double Theta_observed = 0.0;
    bool within_declared = true;
    std::size_t first_violating_cell = 0; // valid when !within_declared
};

CoeffField make_identity(const MeshPtr& mesh, double scale);

// Blockwise two-phase medium: cell (i,j,...) gets a_even when the sum of
// floor(index/block) over axes is even, a_odd otherwise. Matrices are given
// row-major d x d; declared bounds are derived from their eigenvalues.
CoeffField make_checkerboard(const MeshPtr& mesh, int block_cells,
                             const std::vector<double>& a_even,
                             const std::vector<double>& a_odd);

// Per-block random symmetric matrices Q^T D Q with Q a uniformly random
// rotation and D diagonal with entries uniform in [theta, Theta].
// Deterministic for a fixed seed.
CoeffField make_random_piecewise(const MeshPtr& mesh, std::uint64_t seed, double theta,
                                 double Theta, int block_cells);

EllipticityReport validate_ellipticity(const CoeffField& A);

// CSV exchange format: one row per cell, cell index then the packed upper
// triangle entries.
void save_coeff_csv(const CoeffField& A, const std::string& path);
CoeffField load_coeff_csv(const MeshPtr& mesh, const std::string& path);

// Eigenvalue range of one packed symmetric matrix (exposed for validation).
std::array<double, 2> sym_eig_range(const double* tri, int dim);

} // namespace eigopt
