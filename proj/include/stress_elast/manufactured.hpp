#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "stress_elast/formulation.hpp"
#include "stress_elast/polycalc/ops.hpp"
#include "stress_elast/tensor.hpp"

namespace stress_elast {

// Displacement value and partial derivatives up to third order.
// d1[i][j] = d_j u_i, d2[i][j][k] = d_j d_k u_i, d3[i][j][k][l] = d_j d_k d_l u_i.
template <int D> struct DisplacementJet {
    using A1 = std::array<double, D>;
    using A2 = std::array<A1, D>;
    using A3 = std::array<A2, D>;
    A1 u{};
    std::array<A1, D> d1{};
    std::array<A2, D> d2{};
    std::array<A3, D> d3{};
};

template <int D> using JetFn = std::function<DisplacementJet<D>(const Vec<D>&)>;

template <int D> class ManufacturedCase {
public:
    ManufacturedCase(std::string name, Material mat, ConstitutiveMode mode, JetFn<D> jet)
        : name_(std::move(name)), mat_(mat), mode_(mode), jet_(std::move(jet)) {
        check_mode_dimension<D>(mode);
    }

    const std::string& name() const { return name_; }
    const Material& material() const { return mat_; }
    ConstitutiveMode mode() const { return mode_; }

    DisplacementJet<D> jet(const Vec<D>& x) const { return jet_(x); }

    Vec<D> displacement(const Vec<D>& x) const {
        const auto j = jet_(x);
        Vec<D> u;
        for (int i = 0; i < D; ++i) u(i) = j.u[i];
        return u;
    }

    SymMat<D> sigma(const Vec<D>& x) const {
        const auto j = jet_(x);
        return stiff([&](int a, int b) { return j.d1[a][b]; });
    }

    // d_k sigma for k = 0..D-1
    std::array<SymMat<D>, D> grad_sigma(const Vec<D>& x) const {
        const auto j = jet_(x);
        std::array<SymMat<D>, D> out;
        for (int k = 0; k < D; ++k)
            out[k] = stiff([&](int a, int b) { return j.d2[a][b][k]; });
        return out;
    }

    Vec<D> force(const Vec<D>& x) const {
        const auto j = jet_(x);
        Vec<D> f = Vec<D>::Zero();
        for (int c = 0; c < D; ++c) {
            const SymMat<D> ds = stiff([&](int a, int b) { return j.d2[a][b][c]; });
            for (int i = 0; i < D; ++i) f(i) -= ds(i, c);
        }
        return f;
    }

    // (D f)_il = d_l f_i
    Mat<D> grad_force(const Vec<D>& x) const {
        const auto j = jet_(x);
        Mat<D> g = Mat<D>::Zero();
        for (int l = 0; l < D; ++l)
            for (int c = 0; c < D; ++c) {
                const SymMat<D> dds = stiff([&](int a, int b) { return j.d3[a][b][c][l]; });
                for (int i = 0; i < D; ++i) g(i, l) -= dds(i, c);
            }
        return g;
    }

    SymMat<D> sym_grad_force(const Vec<D>& x) const {
        return SymMat<D>::from_matrix(grad_force(x));
    }

    double div_force(const Vec<D>& x) const { return grad_force(x).trace(); }

    Vec<D> traction(const Vec<D>& x, const Vec<D>& n) const { return sigma(x).matrix() * n; }

    // Neumann datum of the stress formulation, built from the exact stress and force.
    Mat<D> kappa(const Formulation& form, const Vec<D>& x, const Vec<D>& n) const {
        const auto gs = grad_sigma(x);
        const Vec<D> f = force(x);
        Mat<D> dsn = Mat<D>::Zero();
        Vec<D> grad_tr;
        for (int k = 0; k < D; ++k) {
            dsn += n(k) * gs[k].matrix();
            grad_tr(k) = gs[k].trace();
        }
        const Mat<D> I = Mat<D>::Identity();
        const double chi = form.chi();
        const double fn = f.dot(n);
        switch (form.kind) {
        case FormKind::stress3d_I:
            return dsn + chi * (grad_tr * n.transpose() - fn * I);
        case FormKind::stress3d_II:
            return dsn + chi * (grad_tr * n.transpose() - fn * I) -
                   form.omega * f * n.transpose();
        case FormKind::stress3d_nonsym:
            return dsn + chi * grad_tr * n.transpose();
        case FormKind::planar_I:
            return chi * grad_tr.dot(n) * I - form.psi * f * n.transpose();
        case FormKind::planar_II:
            return dsn + grad_tr * n.transpose() - fn * I;
        case FormKind::displacement: break;
        }
        throw PreconditionError("displacement form takes a traction, not a stress datum");
    }

private:
    template <class F> SymMat<D> stiff(F&& grad_u) const {
        Mat<D> g;
        for (int a = 0; a < D; ++a)
            for (int b = 0; b < D; ++b) g(a, b) = grad_u(a, b);
        return constitutive<D>(mat_, SymMat<D>::from_matrix(g), mode_, Direction::stiffness);
    }

    std::string name_;
    Material mat_;
    ConstitutiveMode mode_;
    JetFn<D> jet_;
};

// Stiffness at nu = 0.5 is singular for 3D and plane strain; those runs use 0.499.
inline Material quasi_incompressible(Material m, ConstitutiveMode mode) {
    if (mode != ConstitutiveMode::plane_stress && m.nu >= 0.5) m.nu = 0.499;
    return m;
}

namespace manufactured {

inline polycalc::PolyVec<3> cube_quintic_displacement() {
    using P = polycalc::Poly<3>;
    auto p5 = [](int axis) {
        polycalc::Exponent<3> e{};
        e[axis] = 5;
        return P::monomial(e, 0.5);
    };
    return {p5(0) + p5(1), p5(1) + p5(2), p5(2) + p5(0)};
}

template <int D> JetFn<D> polynomial_jet(const polycalc::PolyVec<D>& u) {
    using P = polycalc::Poly<D>;
    std::array<P, D> pu = u;
    std::array<std::array<P, D>, D> p1;
    std::array<std::array<std::array<P, D>, D>, D> p2;
    std::array<std::array<std::array<std::array<P, D>, D>, D>, D> p3;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            p1[i][j] = pu[i].derivative(j);
            for (int k = 0; k < D; ++k) {
                p2[i][j][k] = p1[i][j].derivative(k);
                for (int l = 0; l < D; ++l) p3[i][j][k][l] = p2[i][j][k].derivative(l);
            }
        }
    return [pu, p1, p2, p3](const Vec<D>& x) {
        DisplacementJet<D> jt;
        for (int i = 0; i < D; ++i) {
            jt.u[i] = pu[i](x);
            for (int j = 0; j < D; ++j) {
                jt.d1[i][j] = p1[i][j](x);
                for (int k = 0; k < D; ++k) {
                    jt.d2[i][j][k] = p2[i][j][k](x);
                    for (int l = 0; l < D; ++l) jt.d3[i][j][k][l] = p3[i][j][k][l](x);
                }
            }
        }
        return jt;
    };
}

// u = (0, sinh(x) / 10)
inline DisplacementJet<2> shear_jet(const Vec<2>& x) {
    DisplacementJet<2> j;
    const double s = 0.1 * std::sinh(x(0)), c = 0.1 * std::cosh(x(0));
    j.u[1] = s;
    j.d1[1][0] = c;
    j.d2[1][0][0] = s;
    j.d3[1][0][0][0] = c;
    return j;
}

// u = (sin x, sin y) / 10
inline DisplacementJet<2> biaxial_jet(const Vec<2>& x) {
    DisplacementJet<2> j;
    for (int i = 0; i < 2; ++i) {
        const double s = 0.1 * std::sin(x(i)), c = 0.1 * std::cos(x(i));
        j.u[i] = s;
        j.d1[i][i] = c;
        j.d2[i][i][i] = -s;
        j.d3[i][i][i][i] = -c;
    }
    return j;
}

// u = (sin(pi(x+y)), sin(pi(x+y))) / 10
inline DisplacementJet<2> periodic_jet(const Vec<2>& x) {
    using std::numbers::pi;
    DisplacementJet<2> j;
    const double t = pi * (x(0) + x(1));
    const double s = 0.1 * std::sin(t), c = 0.1 * std::cos(t);
    for (int i = 0; i < 2; ++i) {
        j.u[i] = s;
        for (int a = 0; a < 2; ++a) {
            j.d1[i][a] = pi * c;
            for (int b = 0; b < 2; ++b) {
                j.d2[i][a][b] = -pi * pi * s;
                for (int e = 0; e < 2; ++e) j.d3[i][a][b][e] = -pi * pi * pi * c;
            }
        }
    }
    return j;
}

} // namespace manufactured

inline ManufacturedCase<3> cube_quintic(Material mat) {
    return {"cube_quintic", quasi_incompressible(mat, ConstitutiveMode::solid3d),
            ConstitutiveMode::solid3d,
            manufactured::polynomial_jet<3>(manufactured::cube_quintic_displacement())};
}

inline ManufacturedCase<2> planar_case(const std::string& name, Material mat,
                                       ConstitutiveMode mode) {
    mat = quasi_incompressible(mat, mode);
    if (name == "planar_shear") return {name, mat, mode, manufactured::shear_jet};
    if (name == "planar_biaxial") return {name, mat, mode, manufactured::biaxial_jet};
    if (name == "planar_periodic") return {name, mat, mode, manufactured::periodic_jet};
    throw PreconditionError("unknown planar benchmark '" + name + "'");
}

template <int D>
ManufacturedCase<D> manufactured_case(const std::string& name, Material mat,
                                      ConstitutiveMode mode) {
    if constexpr (D == 3) {
        if (name != "cube_quintic")
            throw PreconditionError("unknown 3D benchmark '" + name + "'");
        if (mode != ConstitutiveMode::solid3d)
            throw PreconditionError("cube_quintic needs mode solid3d");
        return cube_quintic(mat);
    } else {
        return planar_case(name, mat, mode);
    }
}

inline int benchmark_dimension(const std::string& name) {
    if (name == "cube_quintic") return 3;
    if (name == "planar_shear" || name == "planar_biaxial" || name == "planar_periodic")
        return 2;
    throw PreconditionError("unknown benchmark '" + name + "'");
}

} // namespace stress_elast
