#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace eigopt {

using Point = std::array<double, 3>;

// Axis-aligned container box B. Fields carry a zero Dirichlet trace on its
// boundary; candidate supports live compactly inside.
struct Box {
    int dim = 2;
    std::array<double, 3> sides{1.0, 1.0, 1.0};
    std::array<double, 3> origin{0.0, 0.0, 0.0};

    Box() = default;
    Box(int dim_, const std::array<double, 3>& sides_,
        const std::array<double, 3>& origin_ = {0.0, 0.0, 0.0});

    double volume() const;
    // Strict interior test.
    bool contains(const Point& p) const;

    bool operator==(const Box& o) const;
};

// Structured tensor-product mesh over a Box. Vertices carry fields, cells
// carry coefficients. Immutable after construction and shareable across
// threads.
struct Mesh {
    Box box;
    std::array<int, 3> cells{1, 1, 1}; // cells per axis; 1 on unused axes
    std::array<int, 3> verts{2, 2, 1}; // vertices per axis; 1 on unused axes
    std::array<double, 3> h{0.0, 0.0, 1.0}; // cell width; 1 on unused axes
    std::size_t vertex_count = 0;
    std::size_t cell_count = 0;
    std::vector<std::uint8_t> dirichlet; // 1 on box-boundary vertices

    int dim() const { return box.dim; }
    int corners_per_cell() const { return 1 << box.dim; }

    std::size_t vertex_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * verts[1] + j) * verts[0] + i;
    }
    std::array<int, 3> vertex_coords(std::size_t v) const {
        const int i = static_cast<int>(v % verts[0]);
        const int j = static_cast<int>((v / verts[0]) % verts[1]);
        const int k = static_cast<int>(v / (static_cast<std::size_t>(verts[0]) * verts[1]));
        return {i, j, k};
    }
    std::size_t cell_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * cells[1] + j) * cells[0] + i;
    }
    std::array<int, 3> cell_coords(std::size_t c) const {
        const int i = static_cast<int>(c % cells[0]);
        const int j = static_cast<int>((c / cells[0]) % cells[1]);
        const int k = static_cast<int>(c / (static_cast<std::size_t>(cells[0]) * cells[1]));
        return {i, j, k};
    }
    // Global vertex index of a cell corner. Bit a of `corner` selects the
    // +1 offset along axis a.
    std::size_t cell_corner(const std::array<int, 3>& cc, int corner) const {
        return vertex_index(cc[0] + (corner & 1), cc[1] + ((corner >> 1) & 1),
                            cc[2] + ((corner >> 2) & 1));
    }

    Point vertex_pos(std::size_t v) const {
        const auto c = vertex_coords(v);
        Point p{0.0, 0.0, 0.0};
        for (int a = 0; a < box.dim; ++a) p[a] = box.origin[a] + c[a] * h[a];
        return p;
    }
    Point cell_center(std::size_t c) const {
        const auto cc = cell_coords(c);
        Point p{0.0, 0.0, 0.0};
        for (int a = 0; a < box.dim; ++a) p[a] = box.origin[a] + (cc[a] + 0.5) * h[a];
        return p;
    }

    double cell_volume() const { return h[0] * h[1] * h[2]; }

    // Trapezoidal vertex volume weight: product over axes of h (interior)
    // or h/2 (axis endpoint). Weights sum to the box volume.
    double vertex_weight(std::size_t v) const {
        const auto c = vertex_coords(v);
        double w = 1.0;
        for (int a = 0; a < box.dim; ++a)
            w *= (c[a] == 0 || c[a] == cells[a]) ? 0.5 * h[a] : h[a];
        return w;
    }

    bool is_dirichlet(std::size_t v) const { return dirichlet[v] != 0; }

    bool same_layout(const Mesh& o) const {
        return box == o.box && cells == o.cells;
    }
};

using MeshPtr = std::shared_ptr<const Mesh>;

// Vertex-indexed real field on a mesh (the optimization state u).
struct ScalarField {
    MeshPtr mesh;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(MeshPtr m)
        : mesh(std::move(m)), values(mesh->vertex_count, 0.0) {}
};

// Boolean vertex set with its cell-counted Lebesgue measure. A cell is
// active iff all of its corner vertices are active.
struct DomainMask {
    MeshPtr mesh;
    std::vector<std::uint8_t> active;
    double measure = 0.0;
};

MeshPtr build_mesh(const Box& box, const std::array<int, 3>& cells_per_axis);

// 1 at vertices strictly inside the ball, 0 elsewhere. The closed ball must
// stay inside the open box.
ScalarField ball_indicator(const MeshPtr& mesh, const Point& center, double radius);

DomainMask mask_from_field(const ScalarField& u, double threshold);
DomainMask full_mask(const MeshPtr& mesh);
double mask_measure(const Mesh& mesh, const std::vector<std::uint8_t>& active);

bool same_mesh(const ScalarField& a, const ScalarField& b);

// Multilinear interpolation of u at a physical point; 0 outside the box
// (the zero extension of the trace space).
double sample_field(const ScalarField& u, const Point& p);

} // namespace eigopt
