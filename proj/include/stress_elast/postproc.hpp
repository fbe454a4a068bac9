#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stress_elast/fespace.hpp"
#include "stress_elast/formulation.hpp"

namespace stress_elast {

// Stress values of a discrete field at every tabulated point of one element.
template <int D>
using ElementStressFn = std::function<std::vector<SymMat<D>>(int, const TabulatedBasis<D>&)>;

template <int D> using ExactStressFn = std::function<SymMat<D>(const Vec<D>&)>;

template <int D> ElementStressFn<D> stress_field(const FESpace<D>& space, const CoeffVector& coeffs) {
    if (space.components() != voigt_size<D>)
        throw PreconditionError("stress_field needs a symmetric-tensor space");
    return [&space, &coeffs](int e, const TabulatedBasis<D>& basis) {
        const auto nodes = space.element_nodes(e);
        std::vector<SymMat<D>> out(basis.points.size());
        for (std::size_t q = 0; q < basis.points.size(); ++q)
            for (int a = 0; a < basis.nloc; ++a) {
                const double na = basis.values(static_cast<int>(q), a);
                for (int c = 0; c < voigt_size<D>; ++c)
                    out[q][c] += na * coeffs(space.dof(nodes[a], c));
            }
        return out;
    };
}

// Evaluates C sym D u_h for a displacement field.
template <int D>
ElementStressFn<D> recover_stress_from_displacement(const FESpace<D>& u_space,
                                                    const CoeffVector& u, const Material& mat,
                                                    ConstitutiveMode mode) {
    if (u_space.components() != D)
        throw PreconditionError("stress recovery needs a vector-valued displacement space");
    check_mode_dimension<D>(mode);
    constitutive<D>(mat, SymMat<D>{}, mode, Direction::stiffness);
    return [&u_space, &u, mat, mode](int e, const TabulatedBasis<D>& basis) {
        const auto nodes = u_space.element_nodes(e);
        const Vec<D>& h = u_space.mesh().element_size();
        std::vector<SymMat<D>> out(basis.points.size());
        for (std::size_t q = 0; q < basis.points.size(); ++q) {
            Mat<D> grad = Mat<D>::Zero();
            for (int a = 0; a < basis.nloc; ++a)
                for (int k = 0; k < D; ++k) {
                    const double g = basis.ref_grad[k](static_cast<int>(q), a) / h(k);
                    for (int i = 0; i < D; ++i) grad(i, k) += u(u_space.dof(nodes[a], i)) * g;
                }
            out[q] = constitutive<D>(mat, SymMat<D>::from_matrix(grad), mode, Direction::stiffness);
        }
        return out;
    };
}

struct L2Error {
    double absolute = 0.0;
    double relative = std::numeric_limits<double>::quiet_NaN();
    bool relative_defined = false;
};

inline L2Error make_error(double err_sq, double ref_sq) {
    L2Error out;
    out.absolute = std::sqrt(err_sq);
    if (ref_sq > 0.0) {
        out.relative = std::sqrt(err_sq / ref_sq);
        out.relative_defined = true;
    }
    return out;
}

// Integrates err(exact, discrete) and ref(exact) over the mesh with a q-point Gauss rule.
template <int D, class Fn>
void integrate_pairs(const StructuredMesh<D>& mesh, const ElementStressFn<D>& field,
                     const ExactStressFn<D>& exact, int q, int p, Fn&& accumulate) {
    const TabulatedBasis<D> basis = TabulatedBasis<D>::gauss(p, q);
    const double jac = mesh.element_volume();
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto vals = field(e, basis);
        for (std::size_t i = 0; i < basis.points.size(); ++i) {
            const Vec<D> x = mesh.map_to_physical(e, basis.points[i]);
            accumulate(exact(x), vals[i], basis.weights[i] * jac);
        }
    }
}

template <int D>
L2Error stress_l2_error(const StructuredMesh<D>& mesh, int p, const ElementStressFn<D>& field,
                        const ExactStressFn<D>& exact, int q = 6) {
    double err = 0.0, ref = 0.0;
    integrate_pairs<D>(mesh, field, exact, q, p,
                       [&](const SymMat<D>& ex, const SymMat<D>& fe, double w) {
                           const SymMat<D> d = ex - fe;
                           err += w * contract(d, d);
                           ref += w * contract(ex, ex);
                       });
    return make_error(err, ref);
}

// L2 error of any field; symmetric-tensor spaces use the full tensor contraction.
template <int D>
L2Error l2_error(const FESpace<D>& space, const CoeffVector& coeffs, const FieldCallback<D>& exact,
                 int q = 6) {
    const int m = space.components();
    const bool tensor = m == voigt_size<D>;
    const TabulatedBasis<D> basis = TabulatedBasis<D>::gauss(space.order(), q);
    const auto& mesh = space.mesh();
    const double jac = mesh.element_volume();
    double err = 0.0, ref = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto nodes = space.element_nodes(e);
        for (std::size_t i = 0; i < basis.points.size(); ++i) {
            const Eigen::VectorXd ex = exact(mesh.map_to_physical(e, basis.points[i]));
            if (ex.size() != m) throw PreconditionError("l2_error: component count mismatch");
            Eigen::VectorXd fe = Eigen::VectorXd::Zero(m);
            for (int a = 0; a < basis.nloc; ++a)
                for (int c = 0; c < m; ++c)
                    fe(c) += basis.values(static_cast<int>(i), a) * coeffs(space.dof(nodes[a], c));
            const double w = basis.weights[i] * jac;
            for (int c = 0; c < m; ++c) {
                const double cw = tensor ? voigt_weight<D>(c) : 1.0;
                err += w * cw * (ex(c) - fe(c)) * (ex(c) - fe(c));
                ref += w * cw * ex(c) * ex(c);
            }
        }
    }
    return make_error(err, ref);
}

struct InvariantErrors {
    L2Error von_mises;
    L2Error mean;
};

template <int D>
InvariantErrors invariant_errors(const StructuredMesh<D>& mesh, int p,
                                 const ElementStressFn<D>& field, const ExactStressFn<D>& exact,
                                 int q = 6) {
    double vm_err = 0.0, vm_ref = 0.0, m_err = 0.0, m_ref = 0.0;
    integrate_pairs<D>(mesh, field, exact, q, p,
                       [&](const SymMat<D>& ex, const SymMat<D>& fe, double w) {
                           const auto ie = stress_invariants(ex), ih = stress_invariants(fe);
                           vm_err += w * std::pow(ie.von_mises - ih.von_mises, 2);
                           vm_ref += w * ie.von_mises * ie.von_mises;
                           m_err += w * std::pow(ie.mean - ih.mean, 2);
                           m_ref += w * ie.mean * ie.mean;
                       });
    return {make_error(vm_err, vm_ref), make_error(m_err, m_ref)};
}

struct ErrorRow {
    long dofs = 0;
    int n = 0;         // subdivisions along the first axis
    double h = 0.0;    // 1 / n
    double err_sigma = std::numeric_limits<double>::quiet_NaN();
    double err_vm = std::numeric_limits<double>::quiet_NaN();
    double err_mean = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string note;
};

struct RateFit {
    std::vector<double> slopes; // slopes[i] between rows i-1 and i, slopes[0] = NaN
    double last_pair = std::numeric_limits<double>::quiet_NaN();
    double mean_last_two = std::numeric_limits<double>::quiet_NaN();
};

inline RateFit fit_rates(const std::vector<double>& h, const std::vector<double>& err) {
    if (h.size() != err.size()) throw PreconditionError("fit_rates: length mismatch");
    if (h.size() < 2) throw PreconditionError("fit_rates: at least 2 rows required");
    for (std::size_t i = 1; i < h.size(); ++i)
        if (!(h[i] < h[i - 1])) throw PreconditionError("fit_rates: h must decrease strictly");
    RateFit fit;
    fit.slopes.assign(h.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < h.size(); ++i)
        fit.slopes[i] = std::log(err[i - 1] / err[i]) / std::log(h[i - 1] / h[i]);
    fit.last_pair = fit.slopes.back();
    fit.mean_last_two = h.size() >= 3
                            ? 0.5 * (fit.slopes[h.size() - 1] + fit.slopes[h.size() - 2])
                            : fit.last_pair;
    return fit;
}

struct ConvergenceReport {
    std::vector<ErrorRow> rows;
    RateFit sigma_rates;
};

inline RateFit fit_rates(const std::vector<ErrorRow>& rows) {
    std::vector<double> h, e;
    for (const auto& r : rows) {
        if (r.failed) continue;
        h.push_back(r.h);
        e.push_back(r.err_sigma);
    }
    return fit_rates(h, e);
}

} // namespace stress_elast
