#include <gtest/gtest.h>

#include "stress_elast/mesh.hpp"

using namespace stress_elast;

TEST(Mesh, CountsOnUnitCube) {
    const auto m = build_box_mesh(BoxSpec<3>::uniform(0.0, 1.0, 3));
    EXPECT_EQ(m.num_elements(), 27);
    EXPECT_EQ(m.num_vertices(), 64);
    EXPECT_EQ(m.boundary_faces().size(), 54u);
    EXPECT_NEAR(m.element_volume(), 1.0 / 27.0, 1e-15);
}

TEST(Mesh, AnisotropicRectangle) {
    BoxSpec<2> b;
    b.lo = Vec<2>(-3.0, -1.0);
    b.hi = Vec<2>(3.0, 1.0);
    b.n = {6, 2};
    const auto m = build_box_mesh(b);
    EXPECT_EQ(m.num_elements(), 12);
    EXPECT_EQ(m.boundary_faces().size(), 16u);
    EXPECT_DOUBLE_EQ(m.element_size()(0), 1.0);
    EXPECT_DOUBLE_EQ(m.face_area(0), 1.0);
    const Vec<2> corner = m.map_to_physical(m.num_elements() - 1, Vec<2>(1.0, 1.0));
    EXPECT_DOUBLE_EQ(corner(0), 3.0);
    EXPECT_DOUBLE_EQ(corner(1), 1.0);
}

TEST(Mesh, BoundaryAreaSumsToSurface) {
    const auto m = build_box_mesh(BoxSpec<3>::uniform(-1.0, 1.0, 2));
    double area = 0.0;
    for (const auto& f : m.boundary_faces()) {
        area += f.area;
        EXPECT_DOUBLE_EQ(f.normal.norm(), 1.0);
        EXPECT_DOUBLE_EQ(std::abs(f.center(f.axis)), 1.0);
    }
    EXPECT_NEAR(area, 24.0, 1e-13);
}

TEST(Mesh, ElementVerticesAreCorners) {
    const auto m = build_box_mesh(BoxSpec<3>::uniform(0.0, 1.0, 2));
    for (int e = 0; e < m.num_elements(); ++e) {
        const auto vs = m.element_vertices(e);
        for (int v : vs) {
            const Vec<3> x = m.vertex(v);
            const Vec<3> ref = ((x - m.element_origin(e)).array() / m.element_size().array()).matrix();
            for (int k = 0; k < 3; ++k)
                EXPECT_TRUE(std::abs(ref(k)) < 1e-14 || std::abs(ref(k) - 1.0) < 1e-14);
        }
    }
}

TEST(BoundaryPlan, AllNeumannAndAllDirichlet) {
    const auto base = build_box_mesh(BoxSpec<3>::uniform(0.0, 1.0, 2));
    const auto n = apply_boundary_plan<3>(base, NamedPlan::all_neumann);
    EXPECT_EQ(n.count_faces(BoundaryTag::neumann), 24);
    EXPECT_TRUE(n.has_neumann());
    const auto d = apply_boundary_plan<3>(base, NamedPlan::all_dirichlet);
    EXPECT_EQ(d.count_faces(BoundaryTag::dirichlet), 24);
    EXPECT_FALSE(d.has_neumann());
}

TEST(BoundaryPlan, ThreeSidedSplitsEvenly) {
    const auto m = apply_boundary_plan<3>(build_box_mesh(BoxSpec<3>::uniform(-1.0, 1.0, 3)),
                                          NamedPlan::three_sided_neumann);
    EXPECT_EQ(m.count_faces(BoundaryTag::neumann), 27);
    EXPECT_EQ(m.count_faces(BoundaryTag::dirichlet), 27);
    for (const auto& f : m.boundary_faces()) {
        const bool neumann = (f.axis == 0 && f.side == 0) || (f.axis == 1 && f.side == 0) ||
                             (f.axis == 2 && f.side == 1);
        EXPECT_EQ(f.tag, neumann ? BoundaryTag::neumann : BoundaryTag::dirichlet);
    }
}

TEST(BoundaryPlan, PlanarHalfSplit) {
    BoxSpec<2> b;
    b.lo = Vec<2>(-3.0, -1.0);
    b.hi = Vec<2>(3.0, 1.0);
    b.n = {6, 2};
    const auto m = apply_boundary_plan<2>(build_box_mesh(b), NamedPlan::half_split_2d);
    EXPECT_EQ(m.count_faces(BoundaryTag::neumann), 2 + 6);
    EXPECT_EQ(m.count_faces(BoundaryTag::dirichlet), 2 + 6);
}

TEST(BoundaryPlan, PlansAreDimensionGated) {
    const auto m3 = build_box_mesh(BoxSpec<3>::uniform(0.0, 1.0, 1));
    EXPECT_THROW(apply_boundary_plan<3>(m3, NamedPlan::half_split_2d), PreconditionError);
    const auto m2 = build_box_mesh(BoxSpec<2>::uniform(0.0, 1.0, 1));
    EXPECT_THROW(apply_boundary_plan<2>(m2, NamedPlan::three_sided_neumann), PreconditionError);
}

TEST(BoundaryPlan, PredicateMustTagEveryFace) {
    const auto m = build_box_mesh(BoxSpec<3>::uniform(0.0, 1.0, 2));
    const FacePredicate<3> partial = [](const Vec<3>&, const Vec<3>& n) -> std::optional<BoundaryTag> {
        if (n(2) > 0.5) return BoundaryTag::neumann;
        return std::nullopt;
    };
    EXPECT_THROW(apply_boundary_plan<3>(m, partial), PreconditionError);
    const FacePredicate<3> top = [](const Vec<3>&, const Vec<3>& n) -> std::optional<BoundaryTag> {
        return n(2) > 0.5 ? BoundaryTag::neumann : BoundaryTag::dirichlet;
    };
    EXPECT_EQ(apply_boundary_plan<3>(m, top).count_faces(BoundaryTag::neumann), 4);
}

TEST(BoundaryPlan, NamesRoundTrip) {
    for (auto p : {NamedPlan::all_dirichlet, NamedPlan::all_neumann,
                   NamedPlan::three_sided_neumann, NamedPlan::half_split_2d})
        EXPECT_EQ(parse_plan(to_string(p)), p);
    EXPECT_THROW(parse_plan("sideways"), PreconditionError);
}

TEST(BoxSpec, RejectsDegenerateBoxes) {
    auto b = BoxSpec<2>::uniform(0.0, 1.0, 2);
    b.hi(1) = 0.0;
    EXPECT_THROW(build_box_mesh(b), PreconditionError);
    auto c = BoxSpec<2>::uniform(0.0, 1.0, 2);
    c.n[0] = 0;
    EXPECT_THROW(build_box_mesh(c), PreconditionError);
}
