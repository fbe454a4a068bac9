#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stress_elast/fespace.hpp"
#include "stress_elast/formulation.hpp"

namespace stress_elast {

using SparseMatrix = Eigen::SparseMatrix<double>;

template <int D> void check_space(const FESpace<D>& space, const Formulation& form) {
    form.validate();
    if (form.dim() != D)
        throw PreconditionError(to_string(form.kind) + " is " + std::to_string(form.dim()) +
                                "D but the space is " + std::to_string(D) + "D");
    if (space.components() != form.components())
        throw PreconditionError(to_string(form.kind) + " needs " +
                                std::to_string(form.components()) + " components, space has " +
                                std::to_string(space.components()));
}

template <int D> int default_quadrature(const FESpace<D>& space) { return space.order() + 2; }

// Column-compressed matrix holding every coupling of the structured space, values zeroed.
template <int D> SparseMatrix structured_pattern(const FESpace<D>& space) {
    const int p = space.order(), m = space.components();
    const auto& npa = space.nodes_per_axis();
    auto range = [&](int k, int i) {
        if (i % p == 0) return std::array<int, 2>{std::max(0, i - p), std::min(npa[k] - 1, i + p)};
        const int base = (i / p) * p;
        return std::array<int, 2>{base, base + p};
    };
    const int nn = space.num_nodes(), n = space.num_dofs();
    std::vector<long> col_count(nn);
    long nnz = 0;
    for (int node = 0; node < nn; ++node) {
        const auto idx = space.node_index(node);
        long c = 1;
        for (int k = 0; k < D; ++k) {
            const auto r = range(k, idx[k]);
            c *= r[1] - r[0] + 1;
        }
        col_count[node] = c * m;
        nnz += c * m * m;
    }
    if (nnz > std::numeric_limits<int>::max())
        throw NumericalError("sparsity pattern exceeds 32-bit index range");

    SparseMatrix K(n, n);
    K.makeCompressed();
    K.resizeNonZeros(nnz);
    int* outer = K.outerIndexPtr();
    int* inner = K.innerIndexPtr();
    double* values = K.valuePtr();
    outer[0] = 0;
    for (int node = 0; node < nn; ++node)
        for (int c = 0; c < m; ++c) {
            const int col = node * m + c;
            outer[col + 1] = outer[col] + static_cast<int>(col_count[node]);
        }
    std::vector<int> rows;
    for (int node = 0; node < nn; ++node) {
        const auto idx = space.node_index(node);
        std::array<std::array<int, 2>, D> r;
        for (int k = 0; k < D; ++k) r[k] = range(k, idx[k]);
        rows.clear();
        std::array<int, D> cur;
        for (int k = 0; k < D; ++k) cur[k] = r[k][0];
        while (true) {
            const int nb = space.node_from_index(cur);
            for (int cc = 0; cc < m; ++cc) rows.push_back(nb * m + cc);
            int k = 0;
            while (k < D && cur[k] == r[k][1]) {
                cur[k] = r[k][0];
                ++k;
            }
            if (k == D) break;
            ++cur[k];
        }
        std::sort(rows.begin(), rows.end());
        for (int c = 0; c < m; ++c) {
            const int col = node * m + c;
            std::copy(rows.begin(), rows.end(), inner + outer[col]);
        }
    }
    std::fill(values, values + nnz, 0.0);
    return K;
}

// Adds a dense element matrix (rows: test dofs, cols: trial dofs) into the pattern.
inline void scatter_add(SparseMatrix& K, const std::vector<int>& dofs, const Eigen::MatrixXd& Ke) {
    const int nl = static_cast<int>(dofs.size());
    const int* outer = K.outerIndexPtr();
    const int* inner = K.innerIndexPtr();
    double* values = K.valuePtr();
    for (int j = 0; j < nl; ++j) {
        int pos = outer[dofs[j]];
        const int end = outer[dofs[j] + 1];
        for (int i = 0; i < nl; ++i) {
            while (pos < end && inner[pos] < dofs[i]) ++pos;
            if (pos == end || inner[pos] != dofs[i])
                throw NumericalError("element coupling missing from sparsity pattern");
            values[pos] += Ke(i, j);
        }
    }
}

namespace detail {

// Physical gradients of all local basis functions at one tabulated point.
template <int D>
Eigen::Matrix<double, Eigen::Dynamic, D> physical_gradients(const TabulatedBasis<D>& basis, int q,
                                                            const Vec<D>& h) {
    Eigen::Matrix<double, Eigen::Dynamic, D> g(basis.nloc, D);
    for (int k = 0; k < D; ++k) g.col(k) = basis.ref_grad[k].row(q).transpose() / h(k);
    return g;
}

// Div and grad-tr of the basis function N_a E_c, where E_c is the symmetric unit of component c.
template <int D> Vec<D> unit_divergence(int c, const Vec<D>& g) {
    const auto [i, j] = voigt_pairs<D>()[c];
    Vec<D> v = Vec<D>::Zero();
    if (i == j) {
        v(i) = g(i);
    } else {
        v(i) = g(j);
        v(j) = g(i);
    }
    return v;
}

template <int D> double unit_pairing(int c, const Mat<D>& k) {
    const auto [i, j] = voigt_pairs<D>()[c];
    return i == j ? k(i, i) : k(i, j) + k(j, i);
}

} // namespace detail

template <int D>
Eigen::MatrixXd stress_element_matrix(const FESpace<D>& space, const PairingWeights& w, int q) {
    const auto basis = TabulatedBasis<D>::gauss(space.order(), q);
    const Vec<D>& h = space.mesh().element_size();
    const double jac = h.prod();
    constexpr int m = voigt_size<D>;
    const int nloc = basis.nloc, nd = nloc * m;
    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(nd, nd);
    Eigen::MatrixXd divs(D, nd), trgrads(D, nd);
    for (int qp = 0; qp < static_cast<int>(basis.points.size()); ++qp) {
        const auto g = detail::physical_gradients(basis, qp, h);
        for (int a = 0; a < nloc; ++a)
            for (int c = 0; c < m; ++c) {
                const Vec<D> ga = g.row(a).transpose();
                divs.col(a * m + c) = detail::unit_divergence<D>(c, ga);
                trgrads.col(a * m + c) = voigt_is_diagonal<D>(c) ? ga : Vec<D>::Zero();
            }
        const double wq = basis.weights[qp] * jac;
        if (w.grad_grad != 0.0) {
            const Eigen::MatrixXd gg = g * g.transpose();
            for (int a = 0; a < nloc; ++a)
                for (int b = 0; b < nloc; ++b)
                    for (int c = 0; c < m; ++c)
                        Ke(a * m + c, b * m + c) +=
                            wq * w.grad_grad * voigt_weight<D>(c) * gg(a, b);
        }
        if (w.div_div != 0.0) Ke.noalias() += (wq * w.div_div) * divs.transpose() * divs;
        if (w.div_trgrad != 0.0) Ke.noalias() += (wq * w.div_trgrad) * divs.transpose() * trgrads;
        if (w.trgrad_div != 0.0) Ke.noalias() += (wq * w.trgrad_div) * trgrads.transpose() * divs;
        if (w.trgrad_trgrad != 0.0)
            Ke.noalias() += (wq * w.trgrad_trgrad) * trgrads.transpose() * trgrads;
    }
    return Ke;
}

template <int D>
Eigen::MatrixXd displacement_element_matrix(const FESpace<D>& space, const Formulation& form,
                                            int q) {
    const auto basis = TabulatedBasis<D>::gauss(space.order(), q);
    const Vec<D>& h = space.mesh().element_size();
    const double jac = h.prod();
    const int nloc = basis.nloc, nd = nloc * D;
    constexpr int vs = voigt_size<D>;
    Eigen::MatrixXd Ke = Eigen::MatrixXd::Zero(nd, nd);
    // Stiffness in the Voigt basis: column c' is C applied to the unit of component c'.
    Eigen::Matrix<double, vs, vs> cmat;
    for (int c = 0; c < vs; ++c) {
        SymMat<D> e;
        e[c] = 1.0;
        const SymMat<D> s = constitutive<D>(form.material, e, form.mode, Direction::stiffness);
        for (int r = 0; r < vs; ++r) cmat(r, c) = s[r];
    }
    Eigen::MatrixXd strain(vs, nd), stress(vs, nd);
    for (int qp = 0; qp < static_cast<int>(basis.points.size()); ++qp) {
        const auto g = detail::physical_gradients(basis, qp, h);
        for (int a = 0; a < nloc; ++a)
            for (int i = 0; i < D; ++i) {
                Mat<D> grad = Mat<D>::Zero();
                grad.row(i) = g.row(a);
                const SymMat<D> e = SymMat<D>::from_matrix(grad);
                for (int c = 0; c < vs; ++c) strain(c, a * D + i) = e[c];
            }
        stress = cmat * strain;
        Eigen::MatrixXd weighted = strain;
        for (int c = 0; c < vs; ++c) weighted.row(c) *= voigt_weight<D>(c);
        Ke.noalias() += (basis.weights[qp] * jac) * weighted.transpose() * stress;
    }
    return Ke;
}

template <int D>
Eigen::MatrixXd element_matrix(const FESpace<D>& space, const Formulation& form, int q = 0) {
    check_space(space, form);
    if (q <= 0) q = default_quadrature(space);
    return form.is_stress() ? stress_element_matrix(space, form.pairings(), q)
                            : displacement_element_matrix(space, form, q);
}

// All elements of a structured box are congruent, so one element matrix serves the mesh.
template <int D>
SparseMatrix assemble_matrix(const FESpace<D>& space, const Formulation& form, int q = 0) {
    const Eigen::MatrixXd Ke = element_matrix(space, form, q);
    SparseMatrix K = structured_pattern(space);
    for (int e = 0; e < space.mesh().num_elements(); ++e)
        scatter_add(K, space.element_dofs(e), Ke);
    return K;
}

enum class RhsMethod { direct, distributional };

inline std::string to_string(RhsMethod m) {
    return m == RhsMethod::direct ? "direct" : "distributional";
}

inline RhsMethod parse_rhs_method(const std::string& s) {
    if (s == "direct") return RhsMethod::direct;
    if (s == "distributional") return RhsMethod::distributional;
    throw PreconditionError("unknown rhs method '" + s + "'");
}

template <int D> struct ForceData {
    std::function<Vec<D>(const Vec<D>&)> force;
    std::function<SymMat<D>(const Vec<D>&)> sym_grad_force;
    std::function<double(const Vec<D>&)> div_force;
};

template <int D> using TensorBoundaryFn = std::function<Mat<D>(const Vec<D>&, const Vec<D>&)>;
template <int D> using VectorBoundaryFn = std::function<Vec<D>(const Vec<D>&, const Vec<D>&)>;

namespace detail {

// Gauss points on a grid of s^D sub-cells, for integrands with jumps inside elements.
template <int D> TabulatedBasis<D> composite_basis(int p, int q, int subcells) {
    const auto rule = QuadratureRule<D>::tensor(q);
    std::vector<Vec<D>> pts;
    std::vector<double> wts;
    int cells = 1;
    for (int k = 0; k < D; ++k) cells *= subcells;
    const double scale = std::pow(1.0 / subcells, D);
    for (int cell = 0; cell < cells; ++cell) {
        Vec<D> origin;
        int rest = cell;
        for (int k = 0; k < D; ++k) {
            origin(k) = static_cast<double>(rest % subcells) / subcells;
            rest /= subcells;
        }
        for (std::size_t i = 0; i < rule.points.size(); ++i) {
            pts.push_back(origin + rule.points[i] / subcells);
            wts.push_back(rule.weights[i] * scale);
        }
    }
    return TabulatedBasis<D>(p, pts, wts);
}

} // namespace detail

// Adds the integral of <tau, kappa> over Neumann faces.
template <int D>
void add_neumann(const FESpace<D>& space, const TensorBoundaryFn<D>& kappa, Eigen::VectorXd& b,
                 int q) {
    constexpr int m = voigt_size<D>;
    const auto& mesh = space.mesh();
    for (const auto& f : mesh.boundary_faces()) {
        if (f.tag != BoundaryTag::neumann) continue;
        const auto basis = detail::face_basis<D>(space.order(), q, f.axis, f.side);
        const auto nodes = space.element_nodes(f.element);
        for (std::size_t qp = 0; qp < basis.points.size(); ++qp) {
            const Vec<D> x = mesh.map_to_physical(f.element, basis.points[qp]);
            const Mat<D> k = kappa(x, f.normal);
            const double wq = basis.weights[qp] * f.area;
            for (int a = 0; a < basis.nloc; ++a) {
                const double na = basis.values(qp, a);
                if (na == 0.0) continue;
                for (int c = 0; c < m; ++c)
                    b(space.dof(nodes[a], c)) += wq * na * detail::unit_pairing<D>(c, k);
            }
        }
    }
}

template <int D>
Eigen::VectorXd assemble_neumann(const FESpace<D>& space, const Formulation& form,
                                 const TensorBoundaryFn<D>& kappa, int q = 0) {
    check_space(space, form);
    if (!form.is_stress())
        throw PreconditionError("stress Neumann datum on a displacement space");
    if (q <= 0) q = default_quadrature(space);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
    add_neumann(space, kappa, b, q);
    return b;
}

// Adds the integral of <v, traction> over Neumann faces of a displacement space.
template <int D>
Eigen::VectorXd assemble_traction(const FESpace<D>& space, const Formulation& form,
                                  const VectorBoundaryFn<D>& traction, int q = 0) {
    check_space(space, form);
    if (form.is_stress()) throw PreconditionError("traction datum on a stress space");
    if (q <= 0) q = default_quadrature(space);
    const auto& mesh = space.mesh();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());
    for (const auto& f : mesh.boundary_faces()) {
        if (f.tag != BoundaryTag::neumann) continue;
        const auto basis = detail::face_basis<D>(space.order(), q, f.axis, f.side);
        const auto nodes = space.element_nodes(f.element);
        for (std::size_t qp = 0; qp < basis.points.size(); ++qp) {
            const Vec<D> x = mesh.map_to_physical(f.element, basis.points[qp]);
            const Vec<D> t = traction(x, f.normal);
            const double wq = basis.weights[qp] * f.area;
            for (int a = 0; a < basis.nloc; ++a)
                for (int i = 0; i < D; ++i)
                    b(space.dof(nodes[a], i)) += wq * basis.values(qp, a) * t(i);
        }
    }
    return b;
}

struct RhsOptions {
    RhsMethod method = RhsMethod::direct;
    int quadrature = 0;  // points per direction, 0 selects p + 2
    int subcells = 1;    // composite volume rule for forces with interior jumps
};

template <int D>
Eigen::VectorXd assemble_rhs(const FESpace<D>& space, const Formulation& form,
                             const ForceData<D>& data, const RhsOptions& opt = {}) {
    check_space(space, form);
    const int q = opt.quadrature > 0 ? opt.quadrature : default_quadrature(space);
    const auto& mesh = space.mesh();
    const Vec<D>& h = mesh.element_size();
    const double jac = h.prod();
    const auto basis = detail::composite_basis<D>(space.order(), q, std::max(1, opt.subcells));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(space.num_dofs());

    if (!form.is_stress()) {
        if (!data.force) throw PreconditionError("displacement load needs the force callback");
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const auto nodes = space.element_nodes(e);
            for (std::size_t qp = 0; qp < basis.points.size(); ++qp) {
                const Vec<D> f = data.force(mesh.map_to_physical(e, basis.points[qp]));
                const double wq = basis.weights[qp] * jac;
                for (int a = 0; a < basis.nloc; ++a)
                    for (int i = 0; i < D; ++i)
                        b(space.dof(nodes[a], i)) += wq * basis.values(qp, a) * f(i);
            }
        }
        return b;
    }

    constexpr int m = voigt_size<D>;
    const LoadWeights lw = form.load_weights();
    if (opt.method == RhsMethod::direct) {
        if (!data.sym_grad_force || !data.div_force)
            throw PreconditionError("direct load needs sym D f and div f callbacks");
        for (int e = 0; e < mesh.num_elements(); ++e) {
            const auto nodes = space.element_nodes(e);
            for (std::size_t qp = 0; qp < basis.points.size(); ++qp) {
                const Vec<D> x = mesh.map_to_physical(e, basis.points[qp]);
                const SymMat<D> sdf = data.sym_grad_force(x);
                const double divf = data.div_force(x);
                const double wq = basis.weights[qp] * jac;
                for (int a = 0; a < basis.nloc; ++a) {
                    const double na = wq * basis.values(qp, a);
                    for (int c = 0; c < m; ++c) {
                        double v = lw.sym_grad_force * voigt_weight<D>(c) * sdf[c];
                        if (voigt_is_diagonal<D>(c)) v += lw.div_force * divf;
                        b(space.dof(nodes[a], c)) += na * v;
                    }
                }
            }
        }
        return b;
    }

    if (!data.force) throw PreconditionError("distributional load needs the force callback");
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const auto nodes = space.element_nodes(e);
        for (std::size_t qp = 0; qp < basis.points.size(); ++qp) {
            const Vec<D> f = data.force(mesh.map_to_physical(e, basis.points[qp]));
            const double wq = basis.weights[qp] * jac;
            const auto g = detail::physical_gradients(basis, static_cast<int>(qp), h);
            for (int a = 0; a < basis.nloc; ++a) {
                const Vec<D> ga = g.row(a).transpose();
                for (int c = 0; c < m; ++c) {
                    double v = -lw.sym_grad_force * detail::unit_divergence<D>(c, ga).dot(f);
                    if (voigt_is_diagonal<D>(c)) v -= lw.div_force * ga.dot(f);
                    b(space.dof(nodes[a], c)) += wq * v;
                }
            }
        }
    }
    add_neumann<D>(
        space,
        [&](const Vec<D>& x, const Vec<D>& n) -> Mat<D> {
            const Vec<D> f = data.force(x);
            return lw.sym_grad_force * f * n.transpose() +
                   lw.div_force * f.dot(n) * Mat<D>::Identity();
        },
        b, q);
    return b;
}

struct AssembledSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> dirichlet_dofs;
    Eigen::VectorXd dirichlet_values;
};

struct ReducedSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::vector<int> free_dofs;
    Eigen::VectorXd lifting; // full length, Dirichlet values on constrained dofs, zero elsewhere
};

// Removes constrained rows and columns and moves the lifting to the load side.
inline ReducedSystem apply_dirichlet(const AssembledSystem& sys,
                                     const Eigen::VectorXd& boundary_values) {
    const int n = static_cast<int>(sys.matrix.rows());
    if (boundary_values.size() != n)
        throw PreconditionError("apply_dirichlet: boundary values need one entry per dof");
    ReducedSystem red;
    red.lifting = Eigen::VectorXd::Zero(n);
    std::vector<int> map(n, 0);
    for (int d : sys.dirichlet_dofs) {
        map[d] = -1;
        red.lifting(d) = boundary_values(d);
    }
    for (int i = 0; i < n; ++i)
        if (map[i] == 0) {
            map[i] = static_cast<int>(red.free_dofs.size());
            red.free_dofs.push_back(i);
        }
    const Eigen::VectorXd rhs_full = sys.rhs - sys.matrix * red.lifting;
    const int nf = static_cast<int>(red.free_dofs.size());
    red.rhs.resize(nf);
    for (int i = 0; i < nf; ++i) red.rhs(i) = rhs_full(red.free_dofs[i]);

    SparseMatrix R(nf, nf);
    std::vector<int> counts(nf, 0);
    for (int i = 0; i < nf; ++i) {
        const int col = red.free_dofs[i];
        for (SparseMatrix::InnerIterator it(sys.matrix, col); it; ++it)
            if (map[it.row()] >= 0) ++counts[i];
    }
    R.reserve(counts);
    for (int i = 0; i < nf; ++i) {
        const int col = red.free_dofs[i];
        for (SparseMatrix::InnerIterator it(sys.matrix, col); it; ++it)
            if (map[it.row()] >= 0) R.insert(map[it.row()], i) = it.value();
    }
    R.makeCompressed();
    red.matrix = std::move(R);
    return red;
}

inline Eigen::VectorXd expand(const ReducedSystem& red, const Eigen::VectorXd& free_values) {
    Eigen::VectorXd full = red.lifting;
    for (std::size_t i = 0; i < red.free_dofs.size(); ++i)
        full(red.free_dofs[i]) = free_values(static_cast<Eigen::Index>(i));
    return full;
}

} // namespace stress_elast
