#pragma once

#include "stress_elast/polycalc/poly.hpp"

namespace stress_elast::polycalc {

template <int D> int levi_civita(int i, int j, int k) {
    static_assert(D == 3);
    return (i - j) * (j - k) * (k - i) / 2;
}

template <int D> PolyMat<D> zero_mat() { return PolyMat<D>{}; }

template <int D> PolyMat<D> scalar_identity(const Poly<D>& s) {
    PolyMat<D> m{};
    for (int i = 0; i < D; ++i) m[i][i] = s;
    return m;
}

template <int D> PolyMat<D> operator+(PolyMat<D> a, const PolyMat<D>& b) {
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) a[i][j] += b[i][j];
    return a;
}
template <int D> PolyMat<D> operator-(PolyMat<D> a, const PolyMat<D>& b) {
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) a[i][j] -= b[i][j];
    return a;
}
template <int D> PolyMat<D> operator*(double s, PolyMat<D> a) {
    for (auto& row : a)
        for (auto& p : row) p *= s;
    return a;
}
template <int D> PolyVec<D> operator+(PolyVec<D> a, const PolyVec<D>& b) {
    for (int i = 0; i < D; ++i) a[i] += b[i];
    return a;
}
template <int D> PolyVec<D> operator-(PolyVec<D> a, const PolyVec<D>& b) {
    for (int i = 0; i < D; ++i) a[i] -= b[i];
    return a;
}
template <int D> PolyVec<D> operator*(double s, PolyVec<D> a) {
    for (auto& p : a) p *= s;
    return a;
}

template <int D> PolyMat<D> transpose(const PolyMat<D>& a) {
    PolyMat<D> t;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) t[i][j] = a[j][i];
    return t;
}
template <int D> PolyMat<D> sym(const PolyMat<D>& a) { return 0.5 * (a + transpose(a)); }
template <int D> PolyMat<D> skw(const PolyMat<D>& a) { return 0.5 * (a - transpose(a)); }
template <int D> Poly<D> trace(const PolyMat<D>& a) {
    Poly<D> t;
    for (int i = 0; i < D; ++i) t += a[i][i];
    return t;
}

template <int D> PolyMat<D> matmul(const PolyMat<D>& a, const PolyMat<D>& b) {
    PolyMat<D> c;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            for (int k = 0; k < D; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

template <int D> PolyVec<D> matvec(const PolyMat<D>& a, const PolyVec<D>& v) {
    PolyVec<D> c;
    for (int i = 0; i < D; ++i)
        for (int k = 0; k < D; ++k) c[i] += a[i][k] * v[k];
    return c;
}

template <int D> PolyMat<D> constant_mat(const Mat<D>& m) {
    PolyMat<D> c;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) c[i][j] = Poly<D>(m(i, j));
    return c;
}

template <int D> PolyVec<D> grad(const Poly<D>& s) {
    PolyVec<D> g;
    for (int k = 0; k < D; ++k) g[k] = s.derivative(k);
    return g;
}

// (D v)_ij = d_j v_i
template <int D> PolyMat<D> jacobian(const PolyVec<D>& v) {
    PolyMat<D> m;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) m[i][j] = v[i].derivative(j);
    return m;
}

template <int D> Poly<D> div(const PolyVec<D>& v) {
    Poly<D> s;
    for (int k = 0; k < D; ++k) s += v[k].derivative(k);
    return s;
}

// Row-wise divergence: (Div T)_i = d_j T_ij
template <int D> PolyVec<D> Div(const PolyMat<D>& t) {
    PolyVec<D> v;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) v[i] += t[i][j].derivative(j);
    return v;
}

template <int D> Poly<D> laplacian(const Poly<D>& s) {
    Poly<D> l;
    for (int k = 0; k < D; ++k) l += s.derivative(k).derivative(k);
    return l;
}

template <int D> PolyMat<D> laplacian(const PolyMat<D>& t) {
    PolyMat<D> l;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) l[i][j] = laplacian(t[i][j]);
    return l;
}

template <int D> PolyMat<D> hess(const Poly<D>& s) { return jacobian(grad(s)); }

// 3D operators

inline PolyVec<3> curl(const PolyVec<3>& v) {
    PolyVec<3> c;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const int e = levi_civita<3>(i, a, b);
                if (e != 0) c[i] += static_cast<double>(e) * v[b].derivative(a);
            }
    return c;
}

// Row-wise curl: (Curl T)_ik = eps_kab d_a T_ib
inline PolyMat<3> Curl(const PolyMat<3>& t) {
    PolyMat<3> c;
    for (int i = 0; i < 3; ++i) {
        const PolyVec<3> row{t[i][0], t[i][1], t[i][2]};
        const PolyVec<3> r = curl(row);
        for (int k = 0; k < 3; ++k) c[i][k] = r[k];
    }
    return c;
}

// Column-wise curl, the left factor of inc.
inline PolyMat<3> curl_columns(const PolyMat<3>& t) { return transpose(Curl(transpose(t))); }

inline PolyMat<3> inc(const PolyMat<3>& t) { return curl_columns(Curl(t)); }

inline PolyMat<3> Anti(const PolyVec<3>& a) {
    PolyMat<3> m;
    m[0][1] = -a[2];
    m[0][2] = a[1];
    m[1][0] = a[2];
    m[1][2] = -a[0];
    m[2][0] = -a[1];
    m[2][1] = a[0];
    return m;
}

inline PolyVec<3> axl(const PolyMat<3>& a) { return {a[2][1], a[0][2], a[1][0]}; }

// Planar operators with R = e1⊗e2 − e2⊗e1

inline PolyVec<2> perp_grad(const Poly<2>& s) { return {s.derivative(1), -s.derivative(0)}; }

inline PolyMat<2> R_mat() { return constant_mat<2>(quarter_turn()); }

inline PolyVec<2> rotate(const PolyVec<2>& v) { return matvec(R_mat(), v); }

inline Poly<2> rot(const PolyVec<2>& v) { return div(rotate(v)); }

inline PolyMat<2> perp_jacobian(const PolyVec<2>& v) {
    return matmul(jacobian(v), transpose(R_mat()));
}

inline PolyVec<2> Rot(const PolyMat<2>& t) { return Div(matmul(t, transpose(R_mat()))); }

inline Poly<2> rot_Rot(const PolyMat<2>& t) { return rot(Rot(t)); }

inline PolyMat<2> airy(const Poly<2>& s) { return perp_jacobian(perp_grad(s)); }

} // namespace stress_elast::polycalc
