#include "eigopt/mesh.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "eigopt/parallel.hpp"

namespace eigopt {

Box::Box(int dim_, const std::array<double, 3>& sides_, const std::array<double, 3>& origin_)
    : dim(dim_), sides(sides_), origin(origin_) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("Box: dim must be 2 or 3, got " + std::to_string(dim));
    for (int a = 0; a < dim; ++a) {
        if (!(sides[a] > 0.0))
            throw std::invalid_argument("Box: side length along axis " + std::to_string(a) +
                                        " must be positive");
    }
    for (int a = dim; a < 3; ++a) {
        sides[a] = 1.0;
        origin[a] = 0.0;
    }
}

double Box::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= sides[a];
    return v;
}

bool Box::contains(const Point& p) const {
    for (int a = 0; a < dim; ++a) {
        if (!(p[a] > origin[a] && p[a] < origin[a] + sides[a])) return false;
    }
    return true;
}

bool Box::operator==(const Box& o) const {
    if (dim != o.dim) return false;
    for (int a = 0; a < dim; ++a)
        if (sides[a] != o.sides[a] || origin[a] != o.origin[a]) return false;
    return true;
}

MeshPtr build_mesh(const Box& box, const std::array<int, 3>& cells_per_axis) {
    auto m = std::make_shared<Mesh>();
    m->box = box;
    for (int a = 0; a < box.dim; ++a) {
        if (cells_per_axis[a] < 2)
            throw std::invalid_argument("build_mesh: need at least 2 cells per axis, axis " +
                                        std::to_string(a) + " has " +
                                        std::to_string(cells_per_axis[a]));
        m->cells[a] = cells_per_axis[a];
        m->verts[a] = cells_per_axis[a] + 1;
        m->h[a] = box.sides[a] / cells_per_axis[a];
    }
    for (int a = box.dim; a < 3; ++a) {
        m->cells[a] = 1;
        m->verts[a] = 1;
        m->h[a] = 1.0;
    }
    m->vertex_count = static_cast<std::size_t>(m->verts[0]) * m->verts[1] * m->verts[2];
    m->cell_count = static_cast<std::size_t>(m->cells[0]) * m->cells[1] * m->cells[2];

    m->dirichlet.assign(m->vertex_count, 0);
    for (std::size_t v = 0; v < m->vertex_count; ++v) {
        const auto c = m->vertex_coords(v);
        for (int a = 0; a < box.dim; ++a) {
            if (c[a] == 0 || c[a] == m->cells[a]) {
                m->dirichlet[v] = 1;
                break;
            }
        }
    }
    return m;
}

ScalarField ball_indicator(const MeshPtr& mesh, const Point& center, double radius) {
    if (radius < 0.0) throw std::invalid_argument("ball_indicator: negative radius");
    const Box& box = mesh->box;
    for (int a = 0; a < box.dim; ++a) {
        if (!(center[a] - radius > box.origin[a] &&
              center[a] + radius < box.origin[a] + box.sides[a]))
            throw std::invalid_argument(
                "ball_indicator: ball intersects the box boundary along axis " +
                std::to_string(a));
    }
    ScalarField u(mesh);
    const double r2 = radius * radius;
    par::parallel_for(mesh->vertex_count, [&](std::size_t v) {
        const Point p = mesh->vertex_pos(v);
        double d2 = 0.0;
        for (int a = 0; a < box.dim; ++a) d2 += (p[a] - center[a]) * (p[a] - center[a]);
        u.values[v] = d2 < r2 ? 1.0 : 0.0;
    });
    return u;
}

double mask_measure(const Mesh& mesh, const std::vector<std::uint8_t>& active) {
    const int nc = mesh.corners_per_cell();
    const double count = par::deterministic_sum(mesh.cell_count, [&](std::size_t c) {
        const auto cc = mesh.cell_coords(c);
        for (int q = 0; q < nc; ++q)
            if (!active[mesh.cell_corner(cc, q)]) return 0.0;
        return 1.0;
    });
    return count * mesh.cell_volume();
}

DomainMask mask_from_field(const ScalarField& u, double threshold) {
    DomainMask m;
    m.mesh = u.mesh;
    m.active.assign(u.mesh->vertex_count, 0);
    for (std::size_t v = 0; v < u.mesh->vertex_count; ++v)
        m.active[v] = u.values[v] > threshold ? 1 : 0;
    m.measure = mask_measure(*u.mesh, m.active);
    return m;
}

DomainMask full_mask(const MeshPtr& mesh) {
    DomainMask m;
    m.mesh = mesh;
    m.active.assign(mesh->vertex_count, 1);
    m.measure = mask_measure(*mesh, m.active);
    return m;
}

bool same_mesh(const ScalarField& a, const ScalarField& b) {
    if (a.mesh == b.mesh) return true;
    if (!a.mesh || !b.mesh) return false;
    return a.mesh->same_layout(*b.mesh);
}

double sample_field(const ScalarField& u, const Point& p) {
    const Mesh& mesh = *u.mesh;
    const int dim = mesh.dim();
    std::array<int, 3> cc{0, 0, 0};
    std::array<double, 3> t{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
        const double s = (p[a] - mesh.box.origin[a]) / mesh.h[a];
        if (s < 0.0 || s > mesh.cells[a]) return 0.0;
        int i = static_cast<int>(std::floor(s));
        if (i >= mesh.cells[a]) i = mesh.cells[a] - 1;
        cc[a] = i;
        t[a] = s - i;
    }
    double val = 0.0;
    const int nc = mesh.corners_per_cell();
    for (int q = 0; q < nc; ++q) {
        double w = 1.0;
        for (int a = 0; a < dim; ++a) {
            const bool hi = (q >> a) & 1;
            w *= hi ? t[a] : 1.0 - t[a];
        }
        val += w * u.values[mesh.cell_corner(cc, q)];
    }
    return val;
}

} // namespace eigopt
