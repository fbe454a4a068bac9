#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace stress_elast;
using namespace stress_elast::oracle;

namespace {

BoxSpec<3> skewed_cell() {
    BoxSpec<3> b;
    b.lo = Vec<3>(0.0, -1.0, 0.0);
    b.hi = Vec<3>(2.0, 0.5, 1.0);
    b.n = {1, 1, 1};
    return b;
}

BoxSpec<2> planar_cell() {
    BoxSpec<2> b;
    b.lo = Vec<2>(-1.0, 0.0);
    b.hi = Vec<2>(0.5, 2.0);
    b.n = {1, 1};
    return b;
}

} // namespace

class StressOracle3D : public testing::TestWithParam<Formulation> {};

TEST_P(StressOracle3D, ElementMatrixMatchesSymbolicIntegration) {
    const Formulation form = GetParam();
    const FESpace<3> space(mesh_on<3>(skewed_cell(), NamedPlan::all_neumann), 1, 6);
    const Eigen::MatrixXd K = Eigen::MatrixXd(assemble_matrix(space, form));
    EXPECT_LT(relative_gap(K, stress_oracle(space, form.pairings())), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(
    Forms, StressOracle3D,
    testing::Values(Formulation::stress3d_I(Material(200.0, 0.25)),
                    Formulation::stress3d_II(Material(200.0, 0.125), 0.7),
                    Formulation::stress3d_nonsym(Material(200.0, 0.375))));

TEST(StressOracle2D, PlanarFormsMatchSymbolicIntegration) {
    const FESpace<2> space(mesh_on<2>(planar_cell(), NamedPlan::all_neumann), 3, 3);
    for (auto mode : {ConstitutiveMode::plane_stress, ConstitutiveMode::plane_strain}) {
        const Material mat(1.0, 0.3);
        for (const Formulation& form :
             {Formulation::planar_I(mat, mode, 0.8), Formulation::planar_II(mat, mode)}) {
            const Eigen::MatrixXd K = Eigen::MatrixXd(assemble_matrix(space, form));
            EXPECT_LT(relative_gap(K, stress_oracle(space, form.pairings())), 1e-10);
        }
    }
}

TEST(DisplacementOracle, ElementMatrixMatchesLameForm) {
    const Material mat(200.0, 0.3);
    const Formulation form = Formulation::displacement(mat, ConstitutiveMode::solid3d);
    const FESpace<3> space(mesh_on<3>(skewed_cell(), NamedPlan::all_neumann), 1, 3);
    const Eigen::MatrixXd oracle = lame_oracle(space, mat);
    EXPECT_LT(relative_gap(Eigen::MatrixXd(assemble_matrix(space, form)), oracle), 1e-12);
}

TEST(Assembly, SymmetricFormsGiveSymmetricMatrices) {
    const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(-1, 1, 2), NamedPlan::all_neumann), 2, 6);
    const Material mat(200.0, 0.25);
    for (const Formulation& form :
         {Formulation::stress3d_I(mat), Formulation::stress3d_II(mat, 1.0)}) {
        const SparseMatrix K = assemble_matrix(space, form);
        const SparseMatrix Kt = K.transpose();
        EXPECT_LE((K - Kt).norm(), 1e-12 * K.norm());
    }
    const SparseMatrix N = assemble_matrix(space, Formulation::stress3d_nonsym(mat));
    const SparseMatrix Nt = N.transpose();
    EXPECT_GT((N - Nt).norm(), 1e-3 * N.norm());
}

TEST(Assembly, ConstantStressesLieInTheKernel) {
    const Material mat(200.0, 0.25);
    const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(-1, 1, 2), NamedPlan::all_neumann), 2, 6);
    for (const Formulation& form : {Formulation::stress3d_I(mat), Formulation::stress3d_II(mat, 0.5),
                                    Formulation::stress3d_nonsym(mat)}) {
        const SparseMatrix K = assemble_matrix(space, form);
        for (int c = 0; c < 6; ++c) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(space.num_dofs());
            for (int node = 0; node < space.num_nodes(); ++node) v(space.dof(node, c)) = 1.0;
            EXPECT_LT((K * v).norm(), 1e-10 * K.norm());
        }
    }
}

TEST(Assembly, AllDirichletOperatorsArePositiveDefinite) {
    for (double nu : {0.0, 0.25, 0.5}) {
        const Material mat(200.0, nu);
        for (const Formulation& form :
             {Formulation::stress3d_I(mat), Formulation::stress3d_II(mat, 1.01 * mat.chi(ConstitutiveMode::solid3d))}) {
            const auto sc = operator_spectrum<3>(BoxSpec<3>::uniform(-1, 1, 2),
                                                 NamedPlan::all_dirichlet, 2, form);
            EXPECT_EQ(sc.report.negative, 0) << to_string(form.kind) << " nu=" << nu;
            EXPECT_EQ(sc.report.zero, 0) << to_string(form.kind) << " nu=" << nu;
            EXPECT_EQ(sc.report.dimension(), 6 * 27);
        }
        for (auto mode : {ConstitutiveMode::plane_stress, ConstitutiveMode::plane_strain}) {
            for (const Formulation& form :
                 {Formulation::planar_I(mat, mode, mat.chi(mode)), Formulation::planar_II(mat, mode)}) {
                const auto sc = operator_spectrum<2>(BoxSpec<2>::uniform(-1, 1, 3),
                                                     NamedPlan::all_dirichlet, 2, form);
                EXPECT_EQ(sc.report.negative + sc.report.zero, 0) << to_string(form.kind);
            }
        }
    }
}

TEST(Assembly, PlanarNeumannKernels) {
    for (double nu : {0.0, 0.25, 0.5})
        for (auto mode : {ConstitutiveMode::plane_stress, ConstitutiveMode::plane_strain}) {
            const Material mat(1.0, nu);
            const auto one = operator_spectrum<2>(BoxSpec<2>::uniform(-1, 1, 3), NamedPlan::all_neumann,
                                                  3, Formulation::planar_I(mat, mode, mat.chi(mode)));
            EXPECT_EQ(one.total_dofs, 300);
            EXPECT_EQ(one.report.zero, 9) << "nu=" << nu;
            EXPECT_EQ(one.report.negative, 0);
            const auto two = operator_spectrum<2>(BoxSpec<2>::uniform(-1, 1, 3), NamedPlan::all_neumann,
                                                  3, Formulation::planar_II(mat, mode));
            EXPECT_EQ(two.report.zero, 3) << "nu=" << nu;
            EXPECT_EQ(two.report.negative, 0);
        }
}

class Reproduction3D : public testing::TestWithParam<int> {};

TEST_P(Reproduction3D, QuadraticStressIsReproduced) {
    const Material mat(200.0, 0.25);
    const ManufacturedCase<3> mc("cubic", mat, ConstitutiveMode::solid3d,
                                 manufactured::polynomial_jet<3>(cubic_displacement()));
    const Formulation forms[] = {Formulation::stress3d_I(mat), Formulation::stress3d_II(mat, 1.0),
                                 Formulation::stress3d_nonsym(mat)};
    const Formulation& form = forms[GetParam()];
    for (auto plan : {NamedPlan::all_dirichlet, NamedPlan::three_sided_neumann}) {
        const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(-1, 1, 2), plan), 2, 6);
        EXPECT_LT(reproduction_gap(space, form, mc), 1e-10) << to_string(plan);
    }
}

INSTANTIATE_TEST_SUITE_P(Forms, Reproduction3D, testing::Values(0, 1, 2));

TEST(Reproduction, PlanarFormsReproduceQuadraticStress) {
    for (auto mode : {ConstitutiveMode::plane_stress, ConstitutiveMode::plane_strain}) {
        const Material mat(10.0, 0.3);
        const ManufacturedCase<2> mc("cubic", mat, mode,
                                     manufactured::polynomial_jet<2>(cubic_displacement_2d()));
        for (const Formulation& form :
             {Formulation::planar_I(mat, mode, 2.0), Formulation::planar_II(mat, mode)})
            for (auto plan : {NamedPlan::all_dirichlet, NamedPlan::half_split_2d}) {
                const FESpace<2> space(mesh_on<2>(BoxSpec<2>::uniform(-1, 1, 3), plan), 2, 3);
                EXPECT_LT(reproduction_gap(space, form, mc), 1e-10);
            }
    }
}

TEST(Reproduction, DisplacementFormReproducesCubicField) {
    const Material mat(200.0, 0.25);
    const ManufacturedCase<3> mc("cubic", mat, ConstitutiveMode::solid3d,
                                 manufactured::polynomial_jet<3>(cubic_displacement()));
    const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(-1, 1, 1), NamedPlan::three_sided_neumann),
                           3, 3);
    EXPECT_LT(reproduction_gap(space, Formulation::displacement(mat, ConstitutiveMode::solid3d), mc),
              1e-10);
}

TEST(Load, DistributionalMatchesDirectForSmoothForces) {
    const Material mat(200.0, 0.25);
    const ManufacturedCase<3> mc("cubic", mat, ConstitutiveMode::solid3d,
                                 manufactured::polynomial_jet<3>(cubic_displacement()));
    const Formulation form = Formulation::stress3d_I(mat);
    RhsOptions direct, weak;
    weak.method = RhsMethod::distributional;
    {
        const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(-1, 1, 2), NamedPlan::all_neumann), 2, 6);
        const Eigen::VectorXd a = assemble_rhs(space, form, force_data(mc), direct);
        const Eigen::VectorXd b = assemble_rhs(space, form, force_data(mc), weak);
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-11 * a.cwiseAbs().maxCoeff());
    }
    {
        const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(-1, 1, 2), NamedPlan::all_dirichlet), 2, 6);
        const Eigen::VectorXd a = assemble_rhs(space, form, force_data(mc), direct);
        const Eigen::VectorXd b = assemble_rhs(space, form, force_data(mc), weak);
        std::vector<char> fixed(space.num_dofs(), 0);
        for (int d : space.dirichlet_dofs()) fixed[d] = 1;
        double gap = 0.0;
        for (int i = 0; i < space.num_dofs(); ++i)
            if (!fixed[i]) gap = std::max(gap, std::abs(a(i) - b(i)));
        EXPECT_LT(gap, 1e-11 * a.cwiseAbs().maxCoeff());
    }
}

TEST(Load, PiecewiseConstantForceNeedsTheDistributionalLoad) {
    const Material mat(1.0, 0.25);
    const Formulation form = Formulation::stress3d_I(mat);
    const FESpace<3> space(mesh_on<3>(BoxSpec<3>::uniform(0, 1, 1), NamedPlan::all_dirichlet), 2, 6);
    ForceData<3> data;
    data.force = [](const Vec<3>& x) { return Vec<3>(x(0) > 0.5 ? 1.0 : 0.0, 0.0, 0.0); };
    data.sym_grad_force = [](const Vec<3>&) { return SymMat<3>(); };
    data.div_force = [](const Vec<3>&) { return 0.0; };
    RhsOptions direct, weak;
    direct.subcells = weak.subcells = 2;
    weak.method = RhsMethod::distributional;
    const Eigen::VectorXd a = assemble_rhs(space, form, data, direct);
    const Eigen::VectorXd b = assemble_rhs(space, form, data, weak);
    EXPECT_EQ(a.norm(), 0.0);
    // The jump across x = 1/2 acts on the centre node through -<f, Div tau> - c <f, grad tr tau>.
    const int centre = space.node_from_index({1, 1, 1});
    EXPECT_GT(std::abs(b(space.dof(centre, 0))), 1e-3);
    // Components whose divergence has no x part see nothing.
    EXPECT_NEAR(b(space.dof(centre, 5)), 0.0, 1e-14);
}

TEST(Assembly, SpaceMustMatchTheForm) {
    const Material mat(1.0, 0.25);
    const FESpace<3> wrong(mesh_on<3>(BoxSpec<3>::uniform(0, 1, 1), NamedPlan::all_dirichlet), 1, 3);
    EXPECT_THROW(assemble_matrix(wrong, Formulation::stress3d_I(mat)), PreconditionError);
    EXPECT_THROW(Formulation::planar_I(mat, ConstitutiveMode::plane_stress, 0.0).validate(),
                 PreconditionError);
}

TEST(Dirichlet, ReductionMovesLiftingToTheLoad) {
    AssembledSystem sys;
    Eigen::MatrixXd dense(3, 3);
    dense << 4, 1, 0, 1, 3, 1, 0, 1, 2;
    sys.matrix = dense.sparseView();
    sys.rhs = Eigen::Vector3d(1, 2, 3);
    sys.dirichlet_dofs = {2};
    const ReducedSystem red = apply_dirichlet(sys, Eigen::Vector3d(0, 0, 5));
    ASSERT_EQ(red.free_dofs.size(), 2u);
    EXPECT_DOUBLE_EQ(red.rhs(0), 1.0);
    EXPECT_DOUBLE_EQ(red.rhs(1), 2.0 - 5.0);
    EXPECT_DOUBLE_EQ(Eigen::MatrixXd(red.matrix)(1, 1), 3.0);
    const Eigen::VectorXd full = expand(red, Eigen::Vector2d(7, 8));
    EXPECT_EQ(full, Eigen::Vector3d(7, 8, 5));
}
