#include <cmath>

#include <gtest/gtest.h>

#include "stress_elast/manufactured.hpp"
#include "stress_elast/polycalc/ops.hpp"

using namespace stress_elast;
namespace pc = stress_elast::polycalc;

namespace {

template <int D> Vec<D> shifted(Vec<D> x, int k, double h) {
    x(k) += h;
    return x;
}

// Checks each jet level against central differences of the level below.
template <int D> void check_jet(const JetFn<D>& jet, const Vec<D>& x) {
    const double h = 1e-5;
    const auto j = jet(x);
    for (int k = 0; k < D; ++k) {
        const auto a = jet(shifted<D>(x, k, h)), b = jet(shifted<D>(x, k, -h));
        for (int i = 0; i < D; ++i) {
            EXPECT_NEAR(j.d1[i][k], (a.u[i] - b.u[i]) / (2 * h), 1e-7);
            for (int l = 0; l < D; ++l) {
                EXPECT_NEAR(j.d2[i][l][k], (a.d1[i][l] - b.d1[i][l]) / (2 * h), 1e-6);
                for (int m = 0; m < D; ++m)
                    EXPECT_NEAR(j.d3[i][l][m][k], (a.d2[i][l][m] - b.d2[i][l][m]) / (2 * h), 1e-6);
            }
        }
    }
}

} // namespace

TEST(Jets, PlanarJetsMatchDifferences) {
    for (const Vec<2>& x : {Vec<2>(0.3, -0.2), Vec<2>(-1.7, 0.9)}) {
        check_jet<2>(manufactured::shear_jet, x);
        check_jet<2>(manufactured::biaxial_jet, x);
        check_jet<2>(manufactured::periodic_jet, x);
    }
}

TEST(Jets, PolynomialJetMatchesDifferences) {
    check_jet<3>(manufactured::polynomial_jet<3>(manufactured::cube_quintic_displacement()),
                 Vec<3>(0.4, -0.6, 0.1));
}

TEST(CubeQuintic, StressAndForceMatchSymbolicLame) {
    const Material mat(200.0, 0.25);
    const auto mc = cube_quintic(mat);
    const double lambda = mat.E * mat.nu / ((1 + mat.nu) * (1 - 2 * mat.nu));
    const double mu = mat.E / (2 * (1 + mat.nu));
    const auto u = manufactured::cube_quintic_displacement();
    const auto eps = pc::sym(pc::jacobian(u));
    const auto sigma = lambda * pc::scalar_identity<3>(pc::trace(eps)) + 2 * mu * eps;
    const auto f = -1.0 * pc::Div(sigma);
    const auto df = pc::jacobian(f);
    for (const Vec<3>& x : {Vec<3>(0.2, -0.5, 0.9), Vec<3>(-1.0, 1.0, 0.3)}) {
        const SymMat<3> s = mc.sigma(x);
        const Vec<3> fx = mc.force(x);
        const Mat<3> g = mc.grad_force(x);
        for (int i = 0; i < 3; ++i) {
            EXPECT_NEAR(fx(i), f[i](x), 1e-10 * (1 + std::abs(fx(i))));
            for (int j = 0; j < 3; ++j) {
                EXPECT_NEAR(s(i, j), sigma[i][j](x), 1e-10 * (1 + std::abs(s(i, j))));
                EXPECT_NEAR(g(i, j), df[i][j](x), 1e-10 * (1 + std::abs(g(i, j))));
            }
        }
        EXPECT_NEAR(mc.div_force(x), g.trace(), 1e-12);
    }
}

TEST(CubeQuintic, DisplacementIsTheQuinticField) {
    const auto mc = cube_quintic(Material(200.0, 0.25));
    const Vec<3> x(0.5, -1.0, 2.0);
    const Vec<3> u = mc.displacement(x);
    EXPECT_NEAR(u(0), 0.5 * (std::pow(0.5, 5) - 1.0), 1e-15);
    EXPECT_NEAR(u(1), 0.5 * (-1.0 + 32.0), 1e-15);
    EXPECT_NEAR(u(2), 0.5 * (32.0 + std::pow(0.5, 5)), 1e-15);
}

TEST(Planar, ShearStressIsPureShearInPlaneStress) {
    const Material mat(1.0, 0.25);
    const auto mc = planar_case("planar_shear", mat, ConstitutiveMode::plane_stress);
    const Vec<2> x(0.7, 0.1);
    const SymMat<2> s = mc.sigma(x);
    const double mu = 1.0 / 2.5;
    EXPECT_NEAR(s(0, 1), mu * 0.1 * std::cosh(0.7), 1e-14);
    EXPECT_NEAR(s(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(mc.force(x)(1), -mu * 0.1 * std::sinh(0.7), 1e-14);
}

TEST(Planar, TractionIsStressTimesNormal) {
    const auto mc = planar_case("planar_biaxial", Material(3.0, 0.2), ConstitutiveMode::plane_strain);
    const Vec<2> x(0.3, 0.4), n(0.6, 0.8);
    const Vec<2> t = mc.traction(x, n);
    const Mat<2> s = mc.sigma(x).matrix();
    EXPECT_NEAR((t - s * n).norm(), 0.0, 1e-15);
}

TEST(Registry, NamesAndDimensions) {
    EXPECT_EQ(benchmark_dimension("cube_quintic"), 3);
    EXPECT_EQ(benchmark_dimension("planar_periodic"), 2);
    EXPECT_THROW(benchmark_dimension("torus"), PreconditionError);
    EXPECT_THROW(manufactured_case<3>("planar_shear", Material(1, 0.2), ConstitutiveMode::solid3d),
                 PreconditionError);
    EXPECT_THROW(manufactured_case<2>("cube_quintic", Material(1, 0.2), ConstitutiveMode::plane_stress),
                 PreconditionError);
}

TEST(Registry, IncompressibleStiffnessIsRegularized) {
    EXPECT_DOUBLE_EQ(quasi_incompressible(Material(1, 0.5), ConstitutiveMode::solid3d).nu, 0.499);
    EXPECT_DOUBLE_EQ(quasi_incompressible(Material(1, 0.5), ConstitutiveMode::plane_strain).nu, 0.499);
    EXPECT_DOUBLE_EQ(quasi_incompressible(Material(1, 0.5), ConstitutiveMode::plane_stress).nu, 0.5);
    EXPECT_DOUBLE_EQ(quasi_incompressible(Material(1, 0.3), ConstitutiveMode::solid3d).nu, 0.3);
}
