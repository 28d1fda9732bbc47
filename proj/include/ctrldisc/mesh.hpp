#pragma once

#include <json.hpp>

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrldisc {

/// Simplicial mesh of the unit interval (d=1) or unit square (d=2).
/// Coordinates are stored flat with stride d; each cell lists d+1 vertex ids.
struct SimplexMesh {
    std::size_t dimension = 0;
    std::vector<double> coordinates;
    std::vector<std::size_t> cells;
    double h = 0.0;

    std::size_t vertex_count() const { return coordinates.size() / dimension; }
    std::size_t cell_count() const { return cells.size() / (dimension + 1); }
    std::size_t vertex_of(std::size_t cell, std::size_t local) const
    {
        return cells[cell * (dimension + 1) + local];
    }
    double coordinate(std::size_t vertex, std::size_t axis) const
    {
        return coordinates[vertex * dimension + axis];
    }
};

/// x = B xi + b mapping the unit simplex onto a cell. B is row-major d x d.
struct AffineMap {
    std::size_t dimension = 0;
    std::array<double, 9> linear{};
    std::array<double, 3> offset{};
    double abs_det = 0.0;
    std::array<double, 9> inverse_transpose{};

    double b(std::size_t row, std::size_t col) const { return linear[row * dimension + col]; }

    std::array<double, 3> apply(const double* xi) const
    {
        std::array<double, 3> x{};
        for (std::size_t r = 0; r < dimension; ++r) {
            x[r] = offset[r];
            for (std::size_t c = 0; c < dimension; ++c)
                x[r] += linear[r * dimension + c] * xi[c];
        }
        return x;
    }
};

inline SimplexMesh unit_interval_mesh(std::size_t n)
{
    if (n < 1)
        throw std::invalid_argument("unit_interval_mesh: need at least one cell");
    SimplexMesh mesh;
    mesh.dimension = 1;
    for (std::size_t i = 0; i <= n; ++i)
        mesh.coordinates.push_back(static_cast<double>(i) / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        mesh.cells.push_back(i);
        mesh.cells.push_back(i + 1);
    }
    mesh.h = 1.0 / static_cast<double>(n);
    return mesh;
}

/// n x n squares, each cut along its lower-left to upper-right diagonal.
inline SimplexMesh unit_square_mesh(std::size_t n)
{
    if (n < 1)
        throw std::invalid_argument("unit_square_mesh: need at least one subdivision");
    SimplexMesh mesh;
    mesh.dimension = 2;
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i) {
            mesh.coordinates.push_back(static_cast<double>(i) * inv);
            mesh.coordinates.push_back(static_cast<double>(j) * inv);
        }
    auto id = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t v00 = id(i, j), v10 = id(i + 1, j);
            const std::size_t v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
            mesh.cells.insert(mesh.cells.end(), {v00, v10, v11});
            mesh.cells.insert(mesh.cells.end(), {v00, v11, v01});
        }
    mesh.h = std::sqrt(2.0) * inv;
    return mesh;
}

inline AffineMap cell_affine_map(const SimplexMesh& mesh, std::size_t cell)
{
    if (cell >= mesh.cell_count())
        throw std::out_of_range("cell_affine_map: cell index " + std::to_string(cell));
    const std::size_t d = mesh.dimension;
    AffineMap map;
    map.dimension = d;
    const std::size_t v0 = mesh.vertex_of(cell, 0);
    for (std::size_t r = 0; r < d; ++r) {
        map.offset[r] = mesh.coordinate(v0, r);
        for (std::size_t c = 0; c < d; ++c)
            map.linear[r * d + c] = mesh.coordinate(mesh.vertex_of(cell, c + 1), r) - map.offset[r];
    }
    double det = 0.0;
    if (d == 1) {
        det = map.linear[0];
        map.inverse_transpose[0] = 1.0 / det;
    } else if (d == 2) {
        const double a = map.linear[0], b = map.linear[1], c = map.linear[2], e = map.linear[3];
        det = a * e - b * c;
        // (B^{-1})^T = [[e, -c], [-b, a]] / det
        map.inverse_transpose = {e / det, -c / det, -b / det, a / det};
    } else {
        throw std::invalid_argument("cell_affine_map: unsupported dimension");
    }
    map.abs_det = std::abs(det);
    if (!(map.abs_det > 0.0) || !std::isfinite(map.abs_det))
        throw std::runtime_error("cell_affine_map: degenerate cell " + std::to_string(cell));
    return map;
}

inline double cell_volume(const SimplexMesh& mesh, std::size_t cell)
{
    const double det = cell_affine_map(mesh, cell).abs_det;
    return mesh.dimension == 1 ? det : det / 2.0;
}

inline double cell_diameter(const SimplexMesh& mesh, std::size_t cell)
{
    const std::size_t d = mesh.dimension;
    double diam = 0.0;
    for (std::size_t a = 0; a <= d; ++a)
        for (std::size_t b = a + 1; b <= d; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < d; ++r) {
                const double t = mesh.coordinate(mesh.vertex_of(cell, a), r) -
                                 mesh.coordinate(mesh.vertex_of(cell, b), r);
                s += t * t;
            }
            diam = std::max(diam, std::sqrt(s));
        }
    return diam;
}

/// Debug dump; not a stable format.
inline nlohmann::json to_json(const SimplexMesh& mesh)
{
    nlohmann::json vertices = nlohmann::json::array();
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        nlohmann::json p = nlohmann::json::array();
        for (std::size_t r = 0; r < mesh.dimension; ++r)
            p.push_back(mesh.coordinate(v, r));
        vertices.push_back(std::move(p));
    }
    nlohmann::json cells = nlohmann::json::array();
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) {
        nlohmann::json t = nlohmann::json::array();
        for (std::size_t a = 0; a <= mesh.dimension; ++a)
            t.push_back(mesh.vertex_of(c, a));
        cells.push_back(std::move(t));
    }
    return {{"dimension", mesh.dimension}, {"h", mesh.h}, {"vertices", vertices}, {"cells", cells}};
}

} // namespace ctrldisc
