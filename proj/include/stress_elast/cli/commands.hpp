#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "stress_elast/cli/config.hpp"
#include "stress_elast/driver.hpp"
#include "stress_elast/polycalc/identities.hpp"

namespace stress_elast::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_test_failure = 1;
inline constexpr int exit_config_error = 2;
inline constexpr int exit_numerical_failure = 3;

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

inline std::string f17(double v) { return format_double(v); }

template <int D> BoxSpec<D> box_from(const RunConfig& c, int multiplier = 1) {
    BoxSpec<D> b;
    for (int k = 0; k < D; ++k) {
        b.lo(k) = c.lo[k];
        b.hi(k) = c.hi[k];
        b.n[k] = c.n[k] * multiplier;
    }
    return b;
}

template <int D> Problem<D> problem_from(const RunConfig& c, const Formulation& form, int multiplier) {
    Problem<D> p;
    p.box = box_from<D>(c, multiplier);
    p.plan = c.plan;
    p.order = c.order;
    p.form = form;
    p.benchmark = c.benchmark;
    p.rhs.method = c.rhs;
    p.rhs.subcells = c.rhs_subcells;
    p.dirichlet = c.dirichlet;
    return p;
}

// Element containing x and the reference coordinates of x inside it.
template <int D>
std::pair<int, Vec<D>> locate(const StructuredMesh<D>& mesh, const Vec<D>& x) {
    const auto& spec = mesh.spec();
    const Vec<D>& h = mesh.element_size();
    int e = 0, stride = 1;
    Vec<D> ref;
    for (int k = 0; k < D; ++k) {
        int cell = static_cast<int>(std::floor((x(k) - spec.lo(k)) / h(k)));
        cell = std::clamp(cell, 0, spec.n[k] - 1);
        ref(k) = (x(k) - spec.lo(k)) / h(k) - cell;
        e += cell * stride;
        stride *= spec.n[k];
    }
    return {e, ref};
}

inline std::string coord_header(int d) { return d == 3 ? "x,y,z" : "x,y"; }

template <int D> std::string coords(const Vec<D>& x) {
    std::string s;
    for (int k = 0; k < D; ++k) s += (k ? "," : "") + f17(x(k));
    return s;
}

inline std::string row_csv(const ErrorRow& r, double slope) {
    return std::to_string(r.dofs) + "," + std::to_string(r.n) + "," + f17(r.err_sigma) + "," +
           f17(r.err_vm) + "," + f17(r.err_mean) + "," + f17(slope);
}

} // namespace detail

template <int D> int cmd_solve(const RunConfig& c, std::ostream& log) {
    using namespace detail;
    const Formulation form = c.base_formulation();
    const Problem<D> prob = problem_from<D>(c, form, 1);
    const Solution<D> sol = solve_benchmark(prob);
    const FESpace<D>& space = *sol.space;
    const std::filesystem::path dir(c.out);

    auto coef = open_csv(dir / "solution.csv");
    coef << "dof,node,component," << coord_header(D) << ",value\n";
    for (int node = 0; node < space.num_nodes(); ++node)
        for (int k = 0; k < space.components(); ++k) {
            const int dof = space.dof(node, k);
            coef << dof << "," << node << "," << k << "," << coords<D>(space.node_coordinate(node))
                 << "," << f17(sol.coeffs(dof)) << "\n";
        }

    auto sum = open_csv(dir / "summary.csv");
    sum << "formulation,benchmark,plan,order,dofs,reduced_dofs,n,err_sigma,err_vm,err_mean,solver,"
           "residual\n";
    sum << to_string(form.kind) << "," << c.benchmark << "," << to_string(c.plan) << ","
        << c.order << "," << sol.row.dofs << "," << sol.reduced_dofs << "," << sol.row.n << ","
        << f17(sol.row.err_sigma) << "," << f17(sol.row.err_vm) << "," << f17(sol.row.err_mean)
        << "," << sol.solve.method << "," << f17(sol.solve.residual) << "\n";

    const Formulation used = with_quasi_incompressible(form);
    const ManufacturedCase<D> exact = manufactured_case<D>(c.benchmark, used.material, used.mode);
    const ElementStressFn<D> field =
        used.is_stress() ? stress_field(space, sol.coeffs)
                         : recover_stress_from_displacement(space, sol.coeffs, used.material,
                                                            used.mode);
    auto inv = open_csv(dir / "invariants.csv");
    inv << coord_header(D) << ",von_mises,mean,exact_von_mises,exact_mean\n";
    const int s = c.grid_samples;
    int total = 1;
    for (int k = 0; k < D; ++k) total *= s;
    for (int idx = 0; idx < total; ++idx) {
        Vec<D> x;
        int rest = idx;
        for (int k = 0; k < D; ++k) {
            x(k) = prob.box.lo(k) + (prob.box.hi(k) - prob.box.lo(k)) * (rest % s) / (s - 1);
            rest /= s;
        }
        const auto [e, ref] = locate(*sol.mesh, x);
        const TabulatedBasis<D> basis(c.order, {ref});
        const auto ih = stress_invariants(field(e, basis)[0]);
        const auto ie = stress_invariants(exact.sigma(x));
        inv << coords<D>(x) << "," << f17(ih.von_mises) << "," << f17(ih.mean) << ","
            << f17(ie.von_mises) << "," << f17(ie.mean) << "\n";
    }

    log << "dofs " << sol.row.dofs << "  rel stress error " << f17(sol.row.err_sigma)
        << "  solver " << sol.solve.method << "\n";
    return exit_ok;
}

// Solves every refinement level, marking levels whose solve fails numerically.
template <int D>
ConvergenceReport convergence_study(const RunConfig& c, const Formulation& form, std::ostream& log) {
    ConvergenceReport rep;
    for (int mult : c.n_list) {
        const Problem<D> prob = detail::problem_from<D>(c, form, mult);
        ErrorRow row;
        try {
            row = solve_benchmark(prob).row;
        } catch (const NumericalError& e) {
            row.n = prob.box.n[0];
            row.h = 1.0 / row.n;
            row.failed = true;
            row.note = e.what();
            log << "level n=" << row.n << " failed: " << e.what() << "\n";
        }
        log << to_string(form.kind) << " n=" << row.n << " dofs=" << row.dofs
            << " err=" << detail::f17(row.err_sigma) << "\n";
        rep.rows.push_back(row);
    }
    long ok = 0;
    for (const auto& r : rep.rows) ok += r.failed ? 0 : 1;
    if (ok >= 2) rep.sigma_rates = fit_rates(rep.rows);
    return rep;
}

inline void write_convergence(const std::filesystem::path& path, const ConvergenceReport& rep) {
    auto out = detail::open_csv(path);
    out << "dofs,n,err_sigma,err_vm,err_mean,slope_sigma\n";
    std::size_t fit = 0;
    for (const auto& r : rep.rows) {
        double slope = std::numeric_limits<double>::quiet_NaN();
        if (!r.failed) {
            if (fit < rep.sigma_rates.slopes.size()) slope = rep.sigma_rates.slopes[fit];
            ++fit;
        }
        out << detail::row_csv(r, slope) << "\n";
    }
}

template <int D> int cmd_convergence(const RunConfig& c, std::ostream& log) {
    const std::filesystem::path dir(c.out);
    const ConvergenceReport rep = convergence_study<D>(c, c.base_formulation(), log);
    write_convergence(dir / "convergence.csv", rep);
    bool failed = false;
    for (const auto& r : rep.rows) failed = failed || r.failed;
    if (c.compare_displacement) {
        const ConvergenceReport disp =
            convergence_study<D>(c, Formulation::displacement(Material{c.E, c.nu}, c.mode), log);
        write_convergence(dir / "convergence_displacement.csv", disp);
        for (const auto& r : disp.rows) failed = failed || r.failed;
    }
    return failed ? exit_numerical_failure : exit_ok;
}

template <int D> int cmd_spectrum(const RunConfig& c, std::ostream& log) {
    using namespace detail;
    const std::filesystem::path dir(c.out);
    const auto plans = c.plan_list.empty() ? std::vector<NamedPlan>{c.plan} : c.plan_list;
    const auto nus = c.nu_list.empty() ? std::vector<double>{c.nu} : c.nu_list;
    const auto scales = c.scale_list.empty() ? std::vector<std::optional<double>>{std::nullopt}
                                             : std::vector<std::optional<double>>(
                                                   c.scale_list.begin(), c.scale_list.end());
    auto sum = open_csv(dir / "spectrum_summary.csv");
    sum << "case,formulation,plan,nu,omega,psi,dofs,reduced_dofs,negative,zero,positive,"
           "negative_percent,threshold\n";
    log << "case  plan                 nu      omega     psi       neg%      zero\n";
    int id = 0;
    for (NamedPlan plan : plans)
        for (double nu : nus)
            for (const auto& s : scales) {
                Formulation form = c.formulation_at(nu, c.mode);
                if (s) {
                    const double v = c.scaled(*s, nu, c.mode);
                    if (form.kind == FormKind::planar_I) form.psi = v;
                    else form.omega = v;
                }
                form.validate();
                const SpectrumCase sc = operator_spectrum<D>(box_from<D>(c), plan, c.order, form,
                                                             c.zero_tol, c.dense_cap);
                auto ev = open_csv(dir / ("spectrum_" + std::to_string(id) + ".csv"));
                ev << "index,eigenvalue\n";
                for (std::size_t i = 0; i < sc.report.eigenvalues.size(); ++i)
                    ev << i << "," << f17(sc.report.eigenvalues[i]) << "\n";
                sum << id << "," << to_string(form.kind) << "," << to_string(plan) << ","
                    << f17(nu) << "," << f17(form.omega) << "," << f17(form.psi) << ","
                    << sc.total_dofs << "," << sc.report.dimension() << ","
                    << sc.report.negative << "," << sc.report.zero << "," << sc.report.positive
                    << "," << f17(sc.negative_percent) << "," << f17(sc.report.threshold) << "\n";
                char line[160];
                std::snprintf(line, sizeof line, "%-5d %-20s %-7.4g %-9.4g %-9.4g %-9.4f %ld\n",
                              id, to_string(plan).c_str(), nu, form.omega, form.psi,
                              sc.negative_percent, sc.report.zero);
                log << line;
                ++id;
            }
    return exit_ok;
}

template <int D> int cmd_psi_sweep(const RunConfig& c, std::ostream& log) {
    using namespace detail;
    if constexpr (D != 2) {
        throw ConfigError("psi-sweep needs a 2D box");
    } else {
        const auto nus = c.nu_list.empty() ? std::vector<double>{c.nu} : c.nu_list;
        const auto modes =
            c.mode_list.empty() ? std::vector<ConstitutiveMode>{c.mode} : c.mode_list;
        auto out = open_csv(std::filesystem::path(c.out) / "psi_sweep.csv");
        out << "mode,nu,k,psi,dofs,err_sigma,err_vm,err_mean\n";
        bool failed = false;
        for (auto mode : modes)
            for (double nu : nus)
                for (double k : c.k_list) {
                    const Material mat = quasi_incompressible(Material{c.E, nu}, mode);
                    const Formulation form = Formulation::planar_I(mat, mode, k * mat.chi(mode));
                    Problem<2> prob = problem_from<2>(c, form, 1);
                    ErrorRow row;
                    try {
                        row = solve_benchmark(prob).row;
                    } catch (const NumericalError& e) {
                        failed = true;
                        log << "mode " << to_string(mode) << " nu " << nu << " k " << k
                            << " failed: " << e.what() << "\n";
                    }
                    out << to_string(mode) << "," << f17(nu) << "," << f17(k) << ","
                        << f17(form.psi) << "," << row.dofs << "," << f17(row.err_sigma) << ","
                        << f17(row.err_vm) << "," << f17(row.err_mean) << "\n";
                    log << to_string(mode) << " nu=" << nu << " k=" << k
                        << " err=" << f17(row.err_sigma) << "\n";
                }
        return failed ? exit_numerical_failure : exit_ok;
    }
}

inline int cmd_identities(const RunConfig& c, std::ostream& log,
                          const std::vector<polycalc::Identity>& registry =
                              polycalc::default_identities()) {
    const auto outcomes = polycalc::run_identity_suite(registry, c.identity_fields, c.seed);
    auto out = detail::open_csv(std::filesystem::path(c.out) / "identities.csv");
    out << "name,dim,fields,worst_relative,passed\n";
    bool all = true;
    for (const auto& o : outcomes) {
        out << o.name << "," << o.dim << "," << o.fields << "," << detail::f17(o.worst_relative)
            << "," << (o.passed ? "true" : "false") << "\n";
        char line[160];
        std::snprintf(line, sizeof line, "%-22s %dD %4d fields  worst %.3e  %s\n", o.name.c_str(),
                      o.dim, o.fields, o.worst_relative, o.passed ? "PASS" : "FAIL");
        log << line;
        all = all && o.passed;
    }
    return all ? exit_ok : exit_test_failure;
}

template <int D> int dispatch(const RunConfig& c, std::ostream& log) {
    switch (c.command) {
    case Command::solve: return cmd_solve<D>(c, log);
    case Command::convergence: return cmd_convergence<D>(c, log);
    case Command::spectrum: return cmd_spectrum<D>(c, log);
    case Command::psi_sweep: return cmd_psi_sweep<D>(c, log);
    case Command::identities: return cmd_identities(c, log);
    }
    return exit_config_error;
}

// Runs one command and maps failures onto the documented exit codes.
inline int run(const RunConfig& c, std::ostream& log, std::ostream& err) {
    try {
        return c.dim() == 3 ? dispatch<3>(c, log) : dispatch<2>(c, log);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const PreconditionError& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_config_error;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical_failure;
    } catch (const std::bad_alloc&) {
        err << "numerical failure: out of memory\n";
        return exit_numerical_failure;
    }
}

} // namespace stress_elast::cli
