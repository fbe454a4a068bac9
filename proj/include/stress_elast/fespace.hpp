#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "stress_elast/mesh.hpp"

namespace stress_elast {

using CoeffVector = Eigen::VectorXd;

struct Shape1D {
    std::array<double, 4> values{};
    std::array<double, 4> derivatives{};
};

// Nodal Lagrange basis on equispaced nodes {0, 1/p, ..., 1}.
inline Shape1D shape_1d(int p, double t) {
    if (p < 1 || p > 3) throw PreconditionError("shape_1d supports orders 1, 2 and 3");
    Shape1D s;
    for (int i = 0; i <= p; ++i) {
        const double ti = static_cast<double>(i) / p;
        double value = 1.0, deriv = 0.0;
        for (int j = 0; j <= p; ++j) {
            if (j == i) continue;
            const double tj = static_cast<double>(j) / p;
            const double factor = (t - tj) / (ti - tj);
            deriv = deriv * factor + value / (ti - tj);
            value *= factor;
        }
        s.values[i] = value;
        s.derivatives[i] = deriv;
    }
    return s;
}

struct GaussRule1D {
    std::vector<double> points;  // on [0, 1]
    std::vector<double> weights; // sum to 1
};

inline GaussRule1D gauss_legendre(int q) {
    if (q < 1) throw PreconditionError("quadrature needs at least one point");
    GaussRule1D rule;
    rule.points.resize(q);
    rule.weights.resize(q);
    for (int i = 0; i < q; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.points[q - 1 - i] = 0.5 * (x + 1.0);
        rule.weights[q - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

template <int D> struct QuadratureRule {
    std::vector<Vec<D>> points;
    std::vector<double> weights;

    static QuadratureRule tensor(int q) {
        const auto r = gauss_legendre(q);
        QuadratureRule rule;
        int total = 1;
        for (int k = 0; k < D; ++k) total *= q;
        for (int idx = 0; idx < total; ++idx) {
            Vec<D> x;
            double w = 1.0;
            int rest = idx;
            for (int k = 0; k < D; ++k) {
                const int i = rest % q;
                rest /= q;
                x(k) = r.points[i];
                w *= r.weights[i];
            }
            rule.points.push_back(x);
            rule.weights.push_back(w);
        }
        return rule;
    }
};

// Tensor-product basis of order p tabulated at a set of reference points.
template <int D> struct TabulatedBasis {
    int nloc = 0;
    std::vector<Vec<D>> points;
    std::vector<double> weights;
    Eigen::MatrixXd values;                  // point x local node
    std::array<Eigen::MatrixXd, D> ref_grad; // per axis, point x local node

    TabulatedBasis(int p, const std::vector<Vec<D>>& pts, std::vector<double> w = {})
        : points(pts), weights(std::move(w)) {
        nloc = 1;
        for (int k = 0; k < D; ++k) nloc *= p + 1;
        const int nq = static_cast<int>(pts.size());
        values.resize(nq, nloc);
        for (auto& g : ref_grad) g.resize(nq, nloc);
        for (int q = 0; q < nq; ++q) {
            std::array<Shape1D, D> s;
            for (int k = 0; k < D; ++k) s[k] = shape_1d(p, pts[q](k));
            for (int a = 0; a < nloc; ++a) {
                std::array<int, D> ai{};
                int rest = a;
                for (int k = 0; k < D; ++k) {
                    ai[k] = rest % (p + 1);
                    rest /= p + 1;
                }
                double v = 1.0;
                for (int k = 0; k < D; ++k) v *= s[k].values[ai[k]];
                values(q, a) = v;
                for (int k = 0; k < D; ++k) {
                    double g = s[k].derivatives[ai[k]];
                    for (int l = 0; l < D; ++l)
                        if (l != k) g *= s[l].values[ai[l]];
                    ref_grad[k](q, a) = g;
                }
            }
        }
    }

    static TabulatedBasis gauss(int p, int q) {
        const auto rule = QuadratureRule<D>::tensor(q);
        return TabulatedBasis(p, rule.points, rule.weights);
    }
};

template <int D> class FESpace {
public:
    FESpace(std::shared_ptr<const StructuredMesh<D>> mesh, int p, int m)
        : mesh_(std::move(mesh)), p_(p), m_(m) {
        if (p < 1 || p > 3) throw PreconditionError("supported orders are 1, 2 and 3");
        if (m < 1) throw PreconditionError("component count must be positive");
        for (int k = 0; k < D; ++k) nodes_per_axis_[k] = p * mesh_->spec().n[k] + 1;
    }

    const StructuredMesh<D>& mesh() const { return *mesh_; }
    std::shared_ptr<const StructuredMesh<D>> mesh_ptr() const { return mesh_; }
    int order() const { return p_; }
    int components() const { return m_; }
    const std::array<int, D>& nodes_per_axis() const { return nodes_per_axis_; }

    int num_nodes() const {
        int c = 1;
        for (int k = 0; k < D; ++k) c *= nodes_per_axis_[k];
        return c;
    }
    int num_dofs() const { return m_ * num_nodes(); }
    int nodes_per_element() const {
        int c = 1;
        for (int k = 0; k < D; ++k) c *= p_ + 1;
        return c;
    }

    int dof(int node, int comp) const { return node * m_ + comp; }

    std::array<int, D> node_index(int node) const {
        std::array<int, D> idx{};
        for (int k = 0; k < D; ++k) {
            idx[k] = node % nodes_per_axis_[k];
            node /= nodes_per_axis_[k];
        }
        return idx;
    }

    int node_from_index(const std::array<int, D>& idx) const {
        int node = 0, stride = 1;
        for (int k = 0; k < D; ++k) {
            node += idx[k] * stride;
            stride *= nodes_per_axis_[k];
        }
        return node;
    }

    Vec<D> node_coordinate(int node) const {
        const auto idx = node_index(node);
        const auto& spec = mesh_->spec();
        const Vec<D>& h = mesh_->element_size();
        Vec<D> x;
        for (int k = 0; k < D; ++k) {
            const int cell = std::min(idx[k] / p_, spec.n[k] - 1);
            x(k) = spec.lo(k) + cell * h(k) + (idx[k] - cell * p_) * h(k) / p_;
        }
        return x;
    }

    // Global nodes of element e, local numbering first axis fastest.
    std::vector<int> element_nodes(int e) const {
        const auto eidx = mesh_->element_index(e);
        const int nloc = nodes_per_element();
        std::vector<int> out(nloc);
        for (int a = 0; a < nloc; ++a) {
            std::array<int, D> idx{};
            int rest = a;
            for (int k = 0; k < D; ++k) {
                idx[k] = eidx[k] * p_ + rest % (p_ + 1);
                rest /= p_ + 1;
            }
            out[a] = node_from_index(idx);
        }
        return out;
    }

    std::vector<int> element_dofs(int e) const {
        const auto nodes = element_nodes(e);
        std::vector<int> out;
        out.reserve(nodes.size() * m_);
        for (int n : nodes)
            for (int c = 0; c < m_; ++c) out.push_back(dof(n, c));
        return out;
    }

    // Local node ids of element-local face (axis, side).
    std::vector<int> face_local_nodes(int axis, int side) const {
        std::vector<int> out;
        for (int a = 0; a < nodes_per_element(); ++a) {
            int rest = a, ak = 0;
            for (int k = 0; k <= axis; ++k) {
                ak = rest % (p_ + 1);
                rest /= p_ + 1;
            }
            if (ak == (side == 0 ? 0 : p_)) out.push_back(a);
        }
        return out;
    }

    std::vector<int> boundary_nodes(BoundaryTag tag) const {
        std::vector<int> nodes;
        for (const auto& f : mesh_->boundary_faces()) {
            if (f.tag != tag) continue;
            const auto enodes = element_nodes(f.element);
            for (int a : face_local_nodes(f.axis, f.side)) nodes.push_back(enodes[a]);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        return nodes;
    }

    std::vector<int> dirichlet_dofs() const {
        std::vector<int> dofs;
        for (int n : boundary_nodes(BoundaryTag::dirichlet))
            for (int c = 0; c < m_; ++c) dofs.push_back(dof(n, c));
        return dofs;
    }

private:
    std::shared_ptr<const StructuredMesh<D>> mesh_;
    int p_;
    int m_;
    std::array<int, D> nodes_per_axis_{};
};

template <int D> FESpace<D> build_space(const StructuredMesh<D>& mesh, int p, int m) {
    return FESpace<D>(std::make_shared<const StructuredMesh<D>>(mesh), p, m);
}

template <int D>
using FieldCallback = std::function<Eigen::VectorXd(const Vec<D>&)>;

template <int D> CoeffVector interpolate(const FESpace<D>& space, const FieldCallback<D>& f) {
    CoeffVector c(space.num_dofs());
    for (int n = 0; n < space.num_nodes(); ++n) {
        const Eigen::VectorXd v = f(space.node_coordinate(n));
        if (v.size() != space.components())
            throw PreconditionError("interpolate: callback component count mismatch");
        for (int k = 0; k < space.components(); ++k) c(space.dof(n, k)) = v(k);
    }
    return c;
}

template <int D>
CoeffVector interpolate_sym(const FESpace<D>& space,
                            const std::function<SymMat<D>(const Vec<D>&)>& f) {
    return interpolate<D>(space, [&](const Vec<D>& x) {
        const SymMat<D> s = f(x);
        Eigen::VectorXd v(voigt_size<D>);
        for (int c = 0; c < voigt_size<D>; ++c) v(c) = s[c];
        return v;
    });
}

namespace detail {

// Tensor Gauss points on one element face, as reference coordinates of the element.
template <int D> TabulatedBasis<D> face_basis(int p, int q, int axis, int side) {
    const auto r = gauss_legendre(q);
    std::vector<Vec<D>> pts;
    std::vector<double> wts;
    int total = 1;
    for (int k = 0; k < D - 1; ++k) total *= q;
    for (int idx = 0; idx < total; ++idx) {
        Vec<D> x;
        double w = 1.0;
        int rest = idx;
        for (int k = 0; k < D; ++k) {
            if (k == axis) {
                x(k) = side;
                continue;
            }
            const int i = rest % q;
            rest /= q;
            x(k) = r.points[i];
            w *= r.weights[i];
        }
        pts.push_back(x);
        wts.push_back(w);
    }
    return TabulatedBasis<D>(p, pts, wts);
}

} // namespace detail

// L2 projection of f onto the trace space of the Dirichlet faces; other dofs are zero.
template <int D>
CoeffVector project_dirichlet(const FESpace<D>& space, const FieldCallback<D>& f, int q = 0) {
    if (q <= 0) q = space.order() + 3;
    const auto& mesh = space.mesh();
    const int m = space.components();
    const auto nodes_b = space.boundary_nodes(BoundaryTag::dirichlet);
    const int nb = static_cast<int>(nodes_b.size());
    CoeffVector out = CoeffVector::Zero(space.num_dofs());
    if (nb == 0) return out;
    std::vector<int> map(space.num_nodes(), -1);
    for (int i = 0; i < nb; ++i) map[nodes_b[i]] = i;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, m);
    for (const auto& face : mesh.boundary_faces()) {
        if (face.tag != BoundaryTag::dirichlet) continue;
        const auto basis = detail::face_basis<D>(space.order(), q, face.axis, face.side);
        const auto nodes = space.element_nodes(face.element);
        const auto local = space.face_local_nodes(face.axis, face.side);
        for (std::size_t qp = 0; qp < basis.points.size(); ++qp) {
            const Eigen::VectorXd v = f(mesh.map_to_physical(face.element, basis.points[qp]));
            if (v.size() != m) throw PreconditionError("project_dirichlet: component count mismatch");
            const double w = basis.weights[qp] * face.area;
            const int iq = static_cast<int>(qp);
            for (int a : local) {
                const int ra = map[nodes[a]];
                const double na = basis.values(iq, a);
                for (int b : local) trip.emplace_back(ra, map[nodes[b]], w * na * basis.values(iq, b));
                rhs.row(ra) += (w * na) * v.transpose();
            }
        }
    }
    Eigen::SparseMatrix<double> mass(nb, nb);
    mass.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(mass);
    if (ldlt.info() != Eigen::Success) throw NumericalError("boundary mass matrix factorization failed");
    const Eigen::MatrixXd g = ldlt.solve(rhs);
    for (int i = 0; i < nb; ++i)
        for (int c = 0; c < m; ++c) out(space.dof(nodes_b[i], c)) = g(i, c);
    return out;
}

template <int D> struct PointValue {
    Eigen::VectorXd value;    // m
    Eigen::MatrixXd gradient; // m x D
};

template <int D>
PointValue<D> evaluate(const FESpace<D>& space, const CoeffVector& coeffs, int element,
                       const Vec<D>& ref) {
    const TabulatedBasis<D> basis(space.order(), {ref});
    const auto nodes = space.element_nodes(element);
    const Vec<D>& h = space.mesh().element_size();
    const int m = space.components();
    PointValue<D> out{Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, D)};
    for (int a = 0; a < basis.nloc; ++a)
        for (int c = 0; c < m; ++c) {
            const double u = coeffs(space.dof(nodes[a], c));
            out.value(c) += u * basis.values(0, a);
            for (int k = 0; k < D; ++k) out.gradient(c, k) += u * basis.ref_grad[k](0, a) / h(k);
        }
    return out;
}

template <int D> SymMat<D> to_sym(const Eigen::VectorXd& v) {
    SymMat<D> s;
    for (int c = 0; c < voigt_size<D>; ++c) s[c] = v(c);
    return s;
}

} // namespace stress_elast
