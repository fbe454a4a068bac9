#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "stress_elast/errors.hpp"
#include "stress_elast/tensor.hpp"

namespace stress_elast::polycalc {

inline constexpr int max_degree = 10;

template <int D> using Exponent = std::array<int, D>;

// Multivariate polynomial with double coefficients. Zero terms are never stored.
template <int D> class Poly {
public:
    Poly() = default;
    Poly(double c) { add_term({}, c); } // NOLINT(google-explicit-constructor)

    static Poly monomial(const Exponent<D>& e, double c = 1.0) {
        Poly p;
        p.add_term(e, c);
        return p;
    }

    static Poly coordinate(int axis) {
        Exponent<D> e{};
        e[axis] = 1;
        return monomial(e);
    }

    void add_term(const Exponent<D>& e, double c) {
        for (int k : e)
            if (k < 0 || k > max_degree)
                throw PreconditionError("polynomial degree bound exceeded");
        if (c == 0.0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0.0) terms_.erase(it);
        }
    }

    const std::map<Exponent<D>, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
        return m;
    }

    int total_degree() const {
        int deg = 0;
        for (const auto& [e, c] : terms_) {
            int s = 0;
            for (int k : e) s += k;
            deg = std::max(deg, s);
        }
        return deg;
    }

    double operator()(const Vec<D>& x) const {
        double sum = 0.0;
        for (const auto& [e, c] : terms_) {
            double t = c;
            for (int k = 0; k < D; ++k) t *= std::pow(x(k), e[k]);
            sum += t;
        }
        return sum;
    }

    Poly derivative(int axis) const {
        Poly out;
        for (const auto& [e, c] : terms_) {
            if (e[axis] == 0) continue;
            Exponent<D> f = e;
            f[axis] -= 1;
            out.add_term(f, c * e[axis]);
        }
        return out;
    }

    Poly& operator+=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Poly& operator*=(double a) {
        if (a == 0.0) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, c] : terms_) c *= a;
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) { return a *= -1.0; }
    friend Poly operator*(double s, Poly a) { return a *= s; }
    friend Poly operator*(Poly a, double s) { return a *= s; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponent<D> e;
                for (int k = 0; k < D; ++k) e[k] = ea[k] + eb[k];
                out.add_term(e, ca * cb);
            }
        return out;
    }

private:
    std::map<Exponent<D>, double> terms_;
};

template <int D> using PolyVec = std::array<Poly<D>, static_cast<std::size_t>(D)>;
template <int D>
using PolyMat = std::array<std::array<Poly<D>, static_cast<std::size_t>(D)>, static_cast<std::size_t>(D)>;

// Symmetric polynomial tensor field stored in Voigt order.
template <int D> struct PolySymField {
    std::array<Poly<D>, voigt_size<D>> comp;

    PolyMat<D> matrix() const {
        PolyMat<D> m;
        const auto pairs = voigt_pairs<D>();
        for (int c = 0; c < voigt_size<D>; ++c) {
            const auto [i, j] = pairs[c];
            m[i][j] = comp[c];
            m[j][i] = comp[c];
        }
        return m;
    }

    SymMat<D> operator()(const Vec<D>& x) const {
        SymMat<D> s;
        for (int c = 0; c < voigt_size<D>; ++c) s[c] = comp[c](x);
        return s;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (const auto& p : comp) m = std::max(m, p.max_abs_coeff());
        return m;
    }
};

template <int D> PolySymField<D> to_sym_field(const PolyMat<D>& m) {
    PolySymField<D> s;
    const auto pairs = voigt_pairs<D>();
    for (int c = 0; c < voigt_size<D>; ++c) {
        const auto [i, j] = pairs[c];
        s.comp[c] = i == j ? m[i][i] : 0.5 * (m[i][j] + m[j][i]);
    }
    return s;
}

template <int D> double max_abs_coeff(const PolyVec<D>& v) {
    double m = 0.0;
    for (const auto& p : v) m = std::max(m, p.max_abs_coeff());
    return m;
}

template <int D> double max_abs_coeff(const PolyMat<D>& a) {
    double m = 0.0;
    for (const auto& row : a)
        for (const auto& p : row) m = std::max(m, p.max_abs_coeff());
    return m;
}

// Random polynomial with small integer coefficients and total degree <= degree.
template <int D> Poly<D> random_poly(std::mt19937_64& rng, int degree, int terms = 6) {
    std::uniform_int_distribution<int> coeff(-5, 5);
    std::uniform_int_distribution<int> axis(0, D - 1);
    std::uniform_int_distribution<int> deg(0, degree);
    Poly<D> p;
    for (int t = 0; t < terms; ++t) {
        Exponent<D> e{};
        const int total = deg(rng);
        for (int k = 0; k < total; ++k) e[axis(rng)] += 1;
        p.add_term(e, coeff(rng));
    }
    return p;
}

template <int D>
PolySymField<D> random_sym_field(std::mt19937_64& rng, int degree) {
    PolySymField<D> f;
    for (auto& c : f.comp) c = random_poly<D>(rng, degree);
    return f;
}

template <int D> PolyVec<D> random_vec_field(std::mt19937_64& rng, int degree) {
    PolyVec<D> v;
    for (auto& c : v) c = random_poly<D>(rng, degree);
    return v;
}

} // namespace stress_elast::polycalc
