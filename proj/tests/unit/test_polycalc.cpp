#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "stress_elast/polycalc/identities.hpp"
#include "stress_elast/tensor.hpp"

using namespace stress_elast;
using namespace stress_elast::polycalc;

namespace {

Poly<3> x() { return Poly<3>::coordinate(0); }
Poly<3> y() { return Poly<3>::coordinate(1); }
Poly<3> z() { return Poly<3>::coordinate(2); }

template <int D> bool is_zero(const PolyMat<D>& m) { return max_abs_coeff(m) < 1e-12; }
template <int D> bool is_zero(const PolyVec<D>& v) { return max_abs_coeff(v) < 1e-12; }

} // namespace

TEST(Poly, EvaluatesAndDifferentiates) {
    const Poly<3> p = 3.0 * x() * x() * y() - 2.0 * z() + 1.0;
    const Vec<3> pt(0.5, -2.0, 3.0);
    EXPECT_DOUBLE_EQ(p(pt), 3.0 * 0.25 * -2.0 - 6.0 + 1.0);
    EXPECT_DOUBLE_EQ(p.derivative(0)(pt), 6.0 * 0.5 * -2.0);
    EXPECT_DOUBLE_EQ(p.derivative(2)(pt), -2.0);
    EXPECT_EQ(p.total_degree(), 3);
}

TEST(Poly, DerivativeMatchesCentralDifference) {
    std::mt19937_64 rng(7);
    const Vec<3> pt(0.3, -0.4, 0.8);
    for (int trial = 0; trial < 20; ++trial) {
        const Poly<3> p = random_poly<3>(rng, 4);
        for (int k = 0; k < 3; ++k) {
            const double h = 1e-5;
            Vec<3> a = pt, b = pt;
            a(k) += h;
            b(k) -= h;
            const double fd = (p(a) - p(b)) / (2.0 * h);
            EXPECT_NEAR(p.derivative(k)(pt), fd, 1e-6 * (1.0 + std::abs(fd)));
        }
    }
}

TEST(Poly, CancellingTermsAreDropped) {
    Poly<2> p = Poly<2>::coordinate(0) - Poly<2>::coordinate(0);
    EXPECT_TRUE(p.is_zero());
}

TEST(Poly, DegreeBoundIsEnforced) {
    EXPECT_THROW(Poly<3>::monomial({11, 0, 0}), PreconditionError);
    EXPECT_THROW(Poly<3>::monomial({-1, 0, 0}), PreconditionError);
}

TEST(Ops, LaplacianOfProduct) {
    const Poly<3> p = x() * x() * y() * y();
    const Poly<3> expected = 2.0 * y() * y() + 2.0 * x() * x();
    EXPECT_LT((laplacian(p) - expected).max_abs_coeff(), 1e-15);
}

TEST(Ops, CurlOfGradientVanishes) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(is_zero<3>(curl(grad(random_poly<3>(rng, 4)))));
}

TEST(Ops, DivergenceOfCurlVanishes) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 10; ++i)
        EXPECT_LT(div(curl(random_vec_field<3>(rng, 4))).max_abs_coeff(), 1e-12);
}

TEST(Ops, RowwiseCurlOfJacobianVanishes) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) EXPECT_TRUE(is_zero<3>(Curl(jacobian(random_vec_field<3>(rng, 4)))));
}

TEST(Ops, IncompatibilityAnnihilatesSymmetricGradients) {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i)
        EXPECT_TRUE(is_zero<3>(inc(sym(jacobian(random_vec_field<3>(rng, 5))))));
}

TEST(Ops, AiryStressIsDivergenceFree) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const PolyMat<2> s = airy(random_poly<2>(rng, 5));
        EXPECT_TRUE(is_zero<2>(Div(s)));
        EXPECT_TRUE(is_zero<2>(s - transpose(s)));
    }
}

TEST(Ops, AntiMatchesCrossProduct) {
    const PolyVec<3> a{x(), y() * z(), 2.0 * x() * z()};
    const Vec<3> pt(0.2, -1.0, 0.7);
    Vec<3> av;
    for (int i = 0; i < 3; ++i) av(i) = a[i](pt);
    const PolyMat<3> m = Anti(a);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(m[i][j](pt), anti(av)(i, j), 1e-15);
    const PolyVec<3> back = axl(m);
    for (int i = 0; i < 3; ++i) EXPECT_LT((back[i] - a[i]).max_abs_coeff(), 1e-15);
}

TEST(Ops, CurlDefinitionOnLinearField) {
    // v = (-y, x, 0) rotates about e3 with curl 2 e3.
    const PolyVec<3> v{-1.0 * y(), x(), Poly<3>()};
    const PolyVec<3> c = curl(v);
    EXPECT_TRUE(c[0].is_zero());
    EXPECT_TRUE(c[1].is_zero());
    EXPECT_DOUBLE_EQ(c[2](Vec<3>::Zero()), 2.0);
}

TEST(Ops, PlanarRotationOperators) {
    // For s = x y, perp grad s = (x, -y) and rot of the gradient vanishes.
    const Poly<2> px = Poly<2>::coordinate(0), py = Poly<2>::coordinate(1);
    const PolyVec<2> pg = perp_grad(px * py);
    EXPECT_LT((pg[0] - px).max_abs_coeff(), 1e-15);
    EXPECT_LT((pg[1] + py).max_abs_coeff(), 1e-15);
    std::mt19937_64 rng(6);
    for (int i = 0; i < 10; ++i) EXPECT_LT(rot(grad(random_poly<2>(rng, 4))).max_abs_coeff(), 1e-12);
}

TEST(Identities, SuitePassesOnRandomFields) {
    const auto start = std::chrono::steady_clock::now();
    const auto outcomes = run_identity_suite(default_identities(), 100);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(outcomes.size(), default_identities().size());
    for (const auto& o : outcomes) {
        EXPECT_TRUE(o.passed) << o.name << " worst " << o.worst_relative;
        EXPECT_EQ(o.fields, 100);
    }
    EXPECT_LT(secs, 10.0);
}

TEST(Identities, CorruptedIdentityFails) {
    Identity broken{"broken", "inc S = 0", Check3([](const PolySymField<3>& f) {
                        return compare(inc(f.matrix()), PolyMat<3>{});
                    })};
    const auto out = run_identity(broken, 20, 11);
    EXPECT_FALSE(out.passed);
    EXPECT_GT(out.worst_relative, 1e-3);
}

TEST(Identities, DimensionIsChecked) {
    std::mt19937_64 rng(8);
    EXPECT_THROW(verify_identity<2>("schaefer_kroner", random_sym_field<2>(rng, 3)),
                 PreconditionError);
    EXPECT_THROW(verify_identity<3>("planar_laplacian", random_sym_field<3>(rng, 3)),
                 PreconditionError);
    EXPECT_THROW(verify_identity<3>("no_such_identity", random_sym_field<3>(rng, 3)),
                 PreconditionError);
}

TEST(Identities, PlanarIdentitiesRunOnPlanarFields) {
    for (const auto& id : default_identities()) {
        const auto out = run_identity(id, 5, 3);
        EXPECT_EQ(out.dim, id.dim());
    }
    std::mt19937_64 rng(9);
    EXPECT_LT(verify_identity<2>("planar_laplacian", random_sym_field<2>(rng, 4)).relative(), 1e-12);
}
