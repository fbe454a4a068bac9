#pragma once

#include <array>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "stress_elast/errors.hpp"

namespace stress_elast {

template <int D> using Vec = Eigen::Matrix<double, D, 1>;
template <int D> using Mat = Eigen::Matrix<double, D, D>;

template <int D> inline constexpr int voigt_size = D * (D + 1) / 2;

// Component order (11,22,33,12,13,23) in 3D and (11,22,12) in 2D.
template <int D> constexpr std::array<std::array<int, 2>, voigt_size<D>> voigt_pairs() {
    if constexpr (D == 3)
        return {{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
    else
        return {{{0, 0}, {1, 1}, {0, 1}}};
}

template <int D> constexpr bool voigt_is_diagonal(int c) { return c < D; }

// Weight of component c in the full contraction <A,B> of two symmetric tensors.
template <int D> constexpr double voigt_weight(int c) { return c < D ? 1.0 : 2.0; }

template <int D> class SymMat {
public:
    static constexpr int size = voigt_size<D>;

    SymMat() { packed_.fill(0.0); }
    explicit SymMat(const std::array<double, size>& packed) : packed_(packed) {}

    static SymMat from_matrix(const Mat<D>& m) {
        SymMat s;
        const auto pairs = voigt_pairs<D>();
        for (int c = 0; c < size; ++c) {
            const auto [i, j] = pairs[c];
            s.packed_[c] = i == j ? m(i, i) : 0.5 * (m(i, j) + m(j, i));
        }
        return s;
    }

    static SymMat identity() {
        SymMat s;
        for (int i = 0; i < D; ++i) s.packed_[i] = 1.0;
        return s;
    }

    Mat<D> matrix() const {
        Mat<D> m;
        const auto pairs = voigt_pairs<D>();
        for (int c = 0; c < size; ++c) {
            const auto [i, j] = pairs[c];
            m(i, j) = packed_[c];
            m(j, i) = packed_[c];
        }
        return m;
    }

    double& operator[](int c) { return packed_[c]; }
    double operator[](int c) const { return packed_[c]; }
    const std::array<double, size>& packed() const { return packed_; }

    double operator()(int i, int j) const { return packed_[index(i, j)]; }

    static int index(int i, int j) {
        if (i == j) return i;
        if (i > j) std::swap(i, j);
        if constexpr (D == 2) return 2;
        else return i == 0 ? (j == 1 ? 3 : 4) : 5;
    }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < D; ++i) t += packed_[i];
        return t;
    }

    SymMat& operator+=(const SymMat& o) {
        for (int c = 0; c < size; ++c) packed_[c] += o.packed_[c];
        return *this;
    }
    SymMat& operator-=(const SymMat& o) {
        for (int c = 0; c < size; ++c) packed_[c] -= o.packed_[c];
        return *this;
    }
    SymMat& operator*=(double a) {
        for (auto& v : packed_) v *= a;
        return *this;
    }
    friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
    friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
    friend SymMat operator*(double a, SymMat s) { return s *= a; }
    friend bool operator==(const SymMat&, const SymMat&) = default;

private:
    std::array<double, size> packed_;
};

template <int D> double contract(const SymMat<D>& a, const SymMat<D>& b) {
    double s = 0.0;
    for (int c = 0; c < voigt_size<D>; ++c) s += voigt_weight<D>(c) * a[c] * b[c];
    return s;
}

template <int D> double frobenius(const SymMat<D>& a) { return std::sqrt(contract(a, a)); }

template <int D> struct AlgebraicParts {
    SymMat<D> sym;
    Mat<D> skw;
    double tr;
    Mat<D> dev;
};

template <int D> AlgebraicParts<D> sym_skw_tr_dev(const Mat<D>& m) {
    const double tr = m.trace();
    return {SymMat<D>::from_matrix(m), 0.5 * (m - m.transpose()), tr,
            m - (tr / D) * Mat<D>::Identity()};
}

template <int D> Mat<D> sym(const Mat<D>& m) { return 0.5 * (m + m.transpose()); }
template <int D> Mat<D> skw(const Mat<D>& m) { return 0.5 * (m - m.transpose()); }
template <int D> Mat<D> dev(const Mat<D>& m) {
    return m - (m.trace() / D) * Mat<D>::Identity();
}

inline Mat<3> anti(const Vec<3>& a) {
    Mat<3> m;
    m << 0.0, -a(2), a(1),
         a(2), 0.0, -a(0),
         -a(1), a(0), 0.0;
    return m;
}

inline Vec<3> axl(const Mat<3>& a, double rel_tol = 1e-12) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a + a.transpose()).cwiseAbs().maxCoeff() > rel_tol * scale)
        throw PreconditionError("axl: matrix is not skew-symmetric");
    return {a(2, 1), a(0, 2), a(1, 0)};
}

// Quarter-turn R = e1⊗e2 − e2⊗e1 used by the planar operators.
inline Mat<2> quarter_turn() {
    Mat<2> r;
    r << 0.0, 1.0, -1.0, 0.0;
    return r;
}

struct StressInvariants {
    double von_mises;
    double mean;
};

template <int D> StressInvariants stress_invariants(const SymMat<D>& s) {
    SymMat<D> d = s;
    const double mean = s.trace() / D;
    for (int i = 0; i < D; ++i) d[i] -= mean;
    return {std::sqrt(1.5) * frobenius(d), mean};
}

enum class ConstitutiveMode { solid3d, plane_stress, plane_strain };
enum class Direction { stiffness, compliance };

inline std::string to_string(ConstitutiveMode m) {
    switch (m) {
    case ConstitutiveMode::solid3d: return "solid3d";
    case ConstitutiveMode::plane_stress: return "plane_stress";
    case ConstitutiveMode::plane_strain: return "plane_strain";
    }
    return "?";
}

inline ConstitutiveMode parse_mode(const std::string& s) {
    if (s == "solid3d") return ConstitutiveMode::solid3d;
    if (s == "plane_stress") return ConstitutiveMode::plane_stress;
    if (s == "plane_strain") return ConstitutiveMode::plane_strain;
    throw PreconditionError("unknown constitutive mode '" + s + "'");
}

struct Material {
    double E = 1.0;
    double nu = 0.0;

    Material() = default;
    Material(double e, double poisson) : E(e), nu(poisson) {
        if (!(e > 0.0)) throw PreconditionError("Young's modulus must be positive");
        if (!(poisson >= 0.0 && poisson <= 0.5))
            throw PreconditionError("Poisson ratio must lie in [0, 0.5]");
    }

    double chi(ConstitutiveMode mode) const {
        return mode == ConstitutiveMode::plane_strain ? 1.0 - nu : 1.0 / (1.0 + nu);
    }
};

template <int D> void check_mode_dimension(ConstitutiveMode mode) {
    if ((mode == ConstitutiveMode::solid3d) != (D == 3))
        throw PreconditionError("constitutive mode " + to_string(mode) +
                                " does not match dimension " + std::to_string(D));
}

// out = a*s + b*tr(s)*I
template <int D> SymMat<D> scale_plus_volumetric(const SymMat<D>& s, double a, double b) {
    SymMat<D> out = a * s;
    const double t = b * s.trace();
    for (int i = 0; i < D; ++i) out[i] += t;
    return out;
}

template <int D>
SymMat<D> constitutive(const Material& mat, const SymMat<D>& s, ConstitutiveMode mode,
                       Direction dir) {
    check_mode_dimension<D>(mode);
    const double E = mat.E, nu = mat.nu;
    const bool stiff = dir == Direction::stiffness;
    switch (mode) {
    case ConstitutiveMode::solid3d:
    case ConstitutiveMode::plane_strain:
        if (stiff) {
            if (1.0 - 2.0 * nu <= 0.0)
                throw PreconditionError(
                    "stiffness is singular at nu = 0.5: factor 1/(1-2nu) diverges");
            return scale_plus_volumetric(s, E / (1.0 + nu),
                                         E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)));
        }
        if (mode == ConstitutiveMode::solid3d)
            return scale_plus_volumetric(s, (1.0 + nu) / E, -nu / E);
        return scale_plus_volumetric(s, (1.0 + nu) / E, -(1.0 + nu) * nu / E);
    case ConstitutiveMode::plane_stress:
        if (stiff)
            return scale_plus_volumetric(s, E / (1.0 + nu), E * nu / (1.0 - nu * nu));
        return scale_plus_volumetric(s, (1.0 + nu) / E, -nu / E);
    }
    return s;
}

} // namespace stress_elast
