#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "stress_elast/polycalc/ops.hpp"

namespace stress_elast::polycalc {

struct Residual {
    double residual = 0.0; // max |coefficient| of LHS − RHS
    double scale = 1.0;    // max |coefficient| seen on either side and the input
    double relative() const { return residual / std::max(1.0, scale); }
};

template <int D> Residual compare(const PolyMat<D>& lhs, const PolyMat<D>& rhs) {
    return {max_abs_coeff(lhs - rhs), std::max(max_abs_coeff(lhs), max_abs_coeff(rhs))};
}
template <int D> Residual compare(const PolyVec<D>& lhs, const PolyVec<D>& rhs) {
    return {max_abs_coeff(lhs - rhs), std::max(max_abs_coeff(lhs), max_abs_coeff(rhs))};
}
template <int D> Residual compare(const Poly<D>& lhs, const Poly<D>& rhs) {
    return {(lhs - rhs).max_abs_coeff(), std::max(lhs.max_abs_coeff(), rhs.max_abs_coeff())};
}

using Check3 = std::function<Residual(const PolySymField<3>&)>;
using Check2 = std::function<Residual(const PolySymField<2>&)>;

struct Identity {
    std::string name;
    std::string statement;
    std::variant<Check3, Check2> check;
    int dim() const { return check.index() == 0 ? 3 : 2; }
};

namespace detail {

inline Residual schaefer_kroner(const PolySymField<3>& f) {
    const auto s = f.matrix();
    const auto t = trace(s);
    const auto rhs = 2.0 * sym(jacobian(Div(s))) - laplacian(s) - hess(t) +
                     scalar_identity<3>(laplacian(t) - div(Div(s)));
    return compare(inc(s), rhs);
}

inline Residual volumetric_inc(const PolySymField<3>& f) {
    const auto t = trace(f.matrix());
    return compare(inc(scalar_identity<3>(t)), scalar_identity<3>(laplacian(t)) - hess(t));
}

inline Residual trace_inc(const PolySymField<3>& f) {
    const auto s = f.matrix();
    return compare(trace(inc(s)), laplacian(trace(s)) - div(Div(s)));
}

inline Residual trace_inc_volumetric(const PolySymField<3>& f) {
    const auto t = trace(f.matrix());
    return compare(trace(inc(scalar_identity<3>(t))), 2.0 * laplacian(t));
}

inline Residual skw_curl(const PolySymField<3>& f) {
    const auto s = f.matrix();
    return compare(skw(Curl(s)), 0.5 * Anti(Div(s) - grad(trace(s))));
}

// Applied to the non-symmetric field M = σ + Anti(σ12, σ13, σ23).
inline Residual curl_skw(const PolySymField<3>& f) {
    const auto m = f.matrix() + Anti(PolyVec<3>{f.comp[3], f.comp[4], f.comp[5]});
    const auto a = axl(skw(m));
    return compare(Curl(skw(m)), scalar_identity<3>(div(a)) - transpose(jacobian(a)));
}

inline Residual planar_laplacian(const PolySymField<2>& f) {
    const auto s = f.matrix();
    const auto t = trace(s);
    const auto rhs = 2.0 * sym(jacobian(Div(s))) - hess(t) +
                     scalar_identity<2>(laplacian(t) - div(Div(s)));
    return compare(laplacian(s), rhs);
}

inline Residual rot_equilibrium(const PolySymField<2>& f) {
    const auto s = f.matrix();
    return compare(Rot(s) + perp_grad(trace(s)), rotate(Div(s)));
}

inline Residual rot_divergence(const PolySymField<2>& f) {
    const auto s = f.matrix();
    return compare(Div(s), grad(trace(s)) - rotate(Rot(s)));
}

inline Residual planar_rot_rot(const PolySymField<2>& f) {
    const auto s = f.matrix();
    const auto t = trace(s);
    return compare(rot_Rot(s), laplacian(t) - div(Div(s)));
}

} // namespace detail

inline std::vector<Identity> default_identities() {
    return {
        {"schaefer_kroner",
         "inc S = 2 sym D Div S - lap S - hess tr S + (lap tr S - div Div S) I",
         Check3(detail::schaefer_kroner)},
        {"volumetric_inc", "inc((tr S) I) = (lap tr S) I - hess tr S",
         Check3(detail::volumetric_inc)},
        {"trace_inc", "tr inc S = lap tr S - div Div S", Check3(detail::trace_inc)},
        {"trace_inc_volumetric", "tr inc((tr S) I) = 2 lap tr S",
         Check3(detail::trace_inc_volumetric)},
        {"skw_curl", "skw Curl S = 1/2 Anti(Div S - grad tr S)", Check3(detail::skw_curl)},
        {"curl_skw", "Curl(skw M) = (div axl skw M) I - (D axl skw M)^T",
         Check3(detail::curl_skw)},
        {"planar_laplacian",
         "lap S = 2 sym D Div S - hess tr S + (lap tr S - div Div S) I",
         Check2(detail::planar_laplacian)},
        {"rot_equilibrium", "Rot S + perp grad tr S = R Div S",
         Check2(detail::rot_equilibrium)},
        {"rot_divergence", "Div S = grad tr S - R Rot S", Check2(detail::rot_divergence)},
        {"planar_rot_rot", "rot Rot S = lap tr S - div Div S",
         Check2(detail::planar_rot_rot)},
    };
}

inline const Identity& find_identity(const std::vector<Identity>& registry,
                                     const std::string& name) {
    for (const auto& id : registry)
        if (id.name == name) return id;
    throw PreconditionError("unknown identity '" + name + "'");
}

template <int D>
Residual verify_identity(const Identity& id, const PolySymField<D>& field) {
    if (id.dim() != D)
        throw PreconditionError("identity '" + id.name + "' needs a " +
                                std::to_string(id.dim()) + "D field");
    const auto& fn = std::get<D == 3 ? 0 : 1>(id.check);
    Residual r = fn(field);
    r.scale = std::max(r.scale, field.max_abs_coeff());
    return r;
}

template <int D>
Residual verify_identity(const std::string& name, const PolySymField<D>& field) {
    static const auto registry = default_identities();
    return verify_identity(find_identity(registry, name), field);
}

struct IdentityOutcome {
    std::string name;
    int dim = 0;
    int fields = 0;
    double worst_relative = 0.0;
    bool passed = false;
};

inline IdentityOutcome run_identity(const Identity& id, int n_fields, std::uint64_t seed,
                                    double tol = 1e-10) {
    std::mt19937_64 rng(seed);
    IdentityOutcome out{id.name, id.dim(), n_fields, 0.0, true};
    for (int k = 0; k < n_fields; ++k) {
        const int degree = 1 + k % 4;
        Residual r = id.dim() == 3 ? verify_identity(id, random_sym_field<3>(rng, degree))
                                   : verify_identity(id, random_sym_field<2>(rng, degree));
        out.worst_relative = std::max(out.worst_relative, r.relative());
    }
    out.passed = out.worst_relative <= tol;
    return out;
}

inline std::vector<IdentityOutcome> run_identity_suite(const std::vector<Identity>& registry,
                                                       int n_fields = 100,
                                                       std::uint64_t seed = 20240607) {
    std::vector<IdentityOutcome> out;
    for (std::size_t i = 0; i < registry.size(); ++i)
        out.push_back(run_identity(registry[i], n_fields, seed + i));
    return out;
}

} // namespace stress_elast::polycalc
