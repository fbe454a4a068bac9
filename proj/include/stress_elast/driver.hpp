#pragma once

#include <memory>
#include <string>

#include "stress_elast/forms.hpp"
#include "stress_elast/manufactured.hpp"
#include "stress_elast/postproc.hpp"
#include "stress_elast/solve.hpp"

namespace stress_elast {

enum class DirichletMethod { projection, interpolation };

inline std::string to_string(DirichletMethod m) {
    return m == DirichletMethod::projection ? "projection" : "interpolation";
}

inline DirichletMethod parse_dirichlet_method(const std::string& s) {
    if (s == "projection") return DirichletMethod::projection;
    if (s == "interpolation") return DirichletMethod::interpolation;
    throw PreconditionError("unknown Dirichlet method '" + s + "'");
}

template <int D> struct Problem {
    BoxSpec<D> box;
    BoundaryPlan<D> plan = NamedPlan::all_dirichlet;
    int order = 1;
    Formulation form;
    std::string benchmark;
    RhsOptions rhs;
    DirichletMethod dirichlet = DirichletMethod::projection;
};

template <int D> struct Solution {
    std::shared_ptr<const StructuredMesh<D>> mesh;
    std::shared_ptr<const FESpace<D>> space;
    CoeffVector coeffs;
    SolveResult solve;
    long reduced_dofs = 0;
    ErrorRow row;
};

// Forms whose exact fields need the stiffness run at nu = 0.499 instead of 0.5.
inline Formulation with_quasi_incompressible(Formulation f) {
    f.material = quasi_incompressible(f.material, f.mode);
    return f;
}

template <int D> ForceData<D> force_data(const ManufacturedCase<D>& c) {
    return {[c](const Vec<D>& x) { return c.force(x); },
            [c](const Vec<D>& x) { return c.sym_grad_force(x); },
            [c](const Vec<D>& x) { return c.div_force(x); }};
}

template <int D> AssembledSystem assemble_benchmark(const FESpace<D>& space, const Formulation& form,
                                                    const ManufacturedCase<D>& exact,
                                                    const RhsOptions& rhs) {
    AssembledSystem sys;
    sys.matrix = assemble_matrix(space, form);
    sys.rhs = assemble_rhs(space, form, force_data(exact), rhs);
    if (space.mesh().has_neumann()) {
        if (form.is_stress())
            sys.rhs += assemble_neumann<D>(space, form, [&](const Vec<D>& x, const Vec<D>& n) {
                return exact.kappa(form, x, n);
            });
        else
            sys.rhs += assemble_traction<D>(space, form, [&](const Vec<D>& x, const Vec<D>& n) {
                return exact.traction(x, n);
            });
    }
    sys.dirichlet_dofs = space.dirichlet_dofs();
    return sys;
}

template <int D> Solution<D> solve_benchmark(const Problem<D>& prob) {
    const Formulation form = with_quasi_incompressible(prob.form);
    form.validate();
    const ManufacturedCase<D> exact = manufactured_case<D>(prob.benchmark, form.material, form.mode);

    Solution<D> sol;
    sol.mesh = std::make_shared<const StructuredMesh<D>>(
        apply_boundary_plan(build_box_mesh(prob.box), prob.plan));
    sol.space = std::make_shared<const FESpace<D>>(sol.mesh, prob.order, form.components());
    const FESpace<D>& space = *sol.space;

    const AssembledSystem sys = assemble_benchmark(space, form, exact, prob.rhs);
    const FieldCallback<D> datum = [&](const Vec<D>& x) -> Eigen::VectorXd {
        if (!form.is_stress()) return exact.displacement(x);
        const SymMat<D> s = exact.sigma(x);
        Eigen::VectorXd v(voigt_size<D>);
        for (int c = 0; c < voigt_size<D>; ++c) v(c) = s[c];
        return v;
    };
    const CoeffVector boundary = prob.dirichlet == DirichletMethod::projection
                                     ? project_dirichlet<D>(space, datum)
                                     : interpolate<D>(space, datum);
    const ReducedSystem red = apply_dirichlet(sys, boundary);
    SolveOptions opt;
    opt.symmetric = form.is_symmetric();
    sol.solve = solve_linear(red.matrix, red.rhs, opt);
    sol.coeffs = expand(red, sol.solve.x);
    sol.reduced_dofs = static_cast<long>(red.free_dofs.size());

    const ElementStressFn<D> field =
        form.is_stress()
            ? stress_field(space, sol.coeffs)
            : recover_stress_from_displacement(space, sol.coeffs, form.material, form.mode);
    const ExactStressFn<D> sigma = [&](const Vec<D>& x) { return exact.sigma(x); };
    const L2Error es = stress_l2_error(*sol.mesh, prob.order, field, sigma);
    const InvariantErrors inv = invariant_errors(*sol.mesh, prob.order, field, sigma);
    sol.row.dofs = space.num_dofs();
    sol.row.n = prob.box.n[0];
    sol.row.h = 1.0 / prob.box.n[0];
    sol.row.err_sigma = es.relative;
    sol.row.err_vm = inv.von_mises.relative;
    sol.row.err_mean = inv.mean.relative;
    return sol;
}

struct SpectrumCase {
    SpectrumReport report;
    long total_dofs = 0;
    double negative_percent = 0.0; // relative to the unconstrained dof count
};

// Spectrum of the operator restricted to dofs not fixed by Dirichlet faces.
template <int D>
SpectrumCase operator_spectrum(const BoxSpec<D>& box, const BoundaryPlan<D>& plan, int order,
                               const Formulation& form, double zero_tol_rel = 1e-9,
                               long dense_cap = default_dense_cap) {
    const auto mesh = std::make_shared<const StructuredMesh<D>>(
        apply_boundary_plan(build_box_mesh(box), plan));
    const FESpace<D> space(mesh, order, form.components());
    AssembledSystem sys;
    sys.matrix = assemble_matrix(space, form);
    sys.rhs = Eigen::VectorXd::Zero(space.num_dofs());
    sys.dirichlet_dofs = space.dirichlet_dofs();
    const ReducedSystem red = apply_dirichlet(sys, Eigen::VectorXd::Zero(space.num_dofs()));
    SpectrumCase out;
    out.report = spectrum(red.matrix, zero_tol_rel, dense_cap);
    out.total_dofs = space.num_dofs();
    out.negative_percent = 100.0 * out.report.negative / out.total_dofs;
    out.report.metadata["formulation"] = to_string(form.kind);
    out.report.metadata["nu"] = std::to_string(form.material.nu);
    out.report.metadata["omega"] = std::to_string(form.omega);
    out.report.metadata["psi"] = std::to_string(form.psi);
    out.report.metadata["dofs"] = std::to_string(out.total_dofs);
    out.report.metadata["reduced_dofs"] = std::to_string(red.free_dofs.size());
    if (const auto* named = std::get_if<NamedPlan>(&plan))
        out.report.metadata["plan"] = to_string(*named);
    return out;
}

} // namespace stress_elast
