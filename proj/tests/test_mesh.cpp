#include "ctrldisc/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ctrldisc;

namespace {

double total_volume(const SimplexMesh& m)
{
    double s = 0.0;
    for (std::size_t c = 0; c < m.cell_count(); ++c)
        s += cell_volume(m, c);
    return s;
}

} // namespace

TEST(UnitIntervalMesh, Examples)
{
    const auto m1 = unit_interval_mesh(1);
    EXPECT_EQ(m1.cell_count(), 1u);
    EXPECT_EQ(m1.h, 1.0);
    const auto m4 = unit_interval_mesh(4);
    EXPECT_EQ(m4.cell_count(), 4u);
    EXPECT_NEAR(total_volume(m4), 1.0, 1e-14);
    EXPECT_EQ(unit_interval_mesh(16).h, 1.0 / 16.0);
    EXPECT_THROW(unit_interval_mesh(0), std::invalid_argument);
}

TEST(UnitSquareMesh, Examples)
{
    const auto m1 = unit_square_mesh(1);
    ASSERT_EQ(m1.cell_count(), 2u);
    EXPECT_DOUBLE_EQ(cell_volume(m1, 0), 0.5);
    EXPECT_DOUBLE_EQ(cell_volume(m1, 1), 0.5);

    const auto m2 = unit_square_mesh(2);
    EXPECT_EQ(m2.cell_count(), 8u);
    EXPECT_EQ(m2.vertex_count(), 9u);
    EXPECT_NEAR(total_volume(m2), 1.0, 1e-14);

    const auto m4 = unit_square_mesh(4);
    EXPECT_EQ(m4.cell_count(), 32u);
    EXPECT_DOUBLE_EQ(m4.h, std::sqrt(2.0) / 4.0);
}

TEST(UnitSquareMesh, InvariantsAcrossRefinements)
{
    for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 16u}) {
        const auto m = unit_square_mesh(n);
        EXPECT_EQ(m.cell_count(), 2 * n * n);
        EXPECT_EQ(m.vertex_count(), (n + 1) * (n + 1));
        EXPECT_NEAR(total_volume(m), 1.0, 1e-14);
        for (std::size_t c = 0; c < m.cell_count(); ++c) {
            EXPECT_GT(cell_volume(m, c), 0.0);
            EXPECT_LE(cell_diameter(m, c), m.h * (1.0 + 1e-15));
        }
        EXPECT_EQ(unit_square_mesh(2 * n).h, m.h / 2.0);
        EXPECT_EQ(unit_interval_mesh(2 * n).h, unit_interval_mesh(n).h / 2.0);
    }
}

TEST(CellAffineMap, IntervalCell)
{
    const auto m = unit_interval_mesh(4);
    const auto map = cell_affine_map(m, 1);
    EXPECT_DOUBLE_EQ(map.b(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(map.offset[0], 0.25);
    EXPECT_DOUBLE_EQ(map.abs_det, 0.25);
}

TEST(CellAffineMap, ReferenceShapedCellIsIdentity)
{
    SimplexMesh m;
    m.dimension = 2;
    m.coordinates = {0, 0, 1, 0, 0, 1};
    m.cells = {0, 1, 2};
    const auto map = cell_affine_map(m, 0);
    EXPECT_EQ(map.b(0, 0), 1.0);
    EXPECT_EQ(map.b(0, 1), 0.0);
    EXPECT_EQ(map.b(1, 0), 0.0);
    EXPECT_EQ(map.b(1, 1), 1.0);
    EXPECT_EQ(map.abs_det, 1.0);
}

TEST(CellAffineMap, SquareMeshDeterminantAndVertices)
{
    for (std::size_t n : {1u, 3u, 4u, 7u}) {
        const auto m = unit_square_mesh(n);
        const double ref[3][2] = {{0, 0}, {1, 0}, {0, 1}};
        for (std::size_t c = 0; c < m.cell_count(); ++c) {
            const auto map = cell_affine_map(m, c);
            EXPECT_NEAR(map.abs_det, 1.0 / static_cast<double>(n * n), 1e-15);
            for (std::size_t a = 0; a < 3; ++a) {
                const auto x = map.apply(ref[a]);
                EXPECT_NEAR(x[0], m.coordinate(m.vertex_of(c, a), 0), 1e-14);
                EXPECT_NEAR(x[1], m.coordinate(m.vertex_of(c, a), 1), 1e-14);
            }
        }
    }
}

TEST(CellAffineMap, DegenerateCellThrows)
{
    SimplexMesh m;
    m.dimension = 2;
    m.coordinates = {0, 0, 1, 1, 2, 2};
    m.cells = {0, 1, 2};
    EXPECT_THROW(cell_affine_map(m, 0), std::runtime_error);
    EXPECT_THROW(cell_affine_map(m, 1), std::out_of_range);
}

TEST(SimplexMesh, JsonDump)
{
    const auto j = to_json(unit_square_mesh(2));
    EXPECT_EQ(j["vertices"].size(), 9u);
    EXPECT_EQ(j["cells"].size(), 8u);
    EXPECT_EQ(j["cells"][0].size(), 3u);
}
