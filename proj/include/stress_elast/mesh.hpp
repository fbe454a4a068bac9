#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stress_elast/errors.hpp"
#include "stress_elast/tensor.hpp"

namespace stress_elast {

template <int D> struct BoxSpec {
    Vec<D> lo;
    Vec<D> hi;
    std::array<int, D> n{};

    void validate() const {
        for (int k = 0; k < D; ++k) {
            if (!(lo(k) < hi(k))) throw PreconditionError("box needs lo < hi on every axis");
            if (n[k] < 1) throw PreconditionError("box needs at least one cell per axis");
        }
    }

    static BoxSpec uniform(double lo_all, double hi_all, int n_all) {
        BoxSpec b;
        b.lo.setConstant(lo_all);
        b.hi.setConstant(hi_all);
        b.n.fill(n_all);
        return b;
    }
};

enum class BoundaryTag { dirichlet, neumann };

template <int D> struct BoundaryFace {
    int element = 0;
    int axis = 0;  // normal direction
    int side = 0;  // 0 at the low end of the axis, 1 at the high end
    Vec<D> center;
    Vec<D> normal;
    double area = 0.0;
    BoundaryTag tag = BoundaryTag::dirichlet;
};

enum class NamedPlan { all_dirichlet, all_neumann, three_sided_neumann, half_split_2d };

inline std::string to_string(NamedPlan p) {
    switch (p) {
    case NamedPlan::all_dirichlet: return "all_dirichlet";
    case NamedPlan::all_neumann: return "all_neumann";
    case NamedPlan::three_sided_neumann: return "three_sided_neumann";
    case NamedPlan::half_split_2d: return "half_split_2d";
    }
    return "?";
}

inline NamedPlan parse_plan(const std::string& s) {
    for (auto p : {NamedPlan::all_dirichlet, NamedPlan::all_neumann,
                   NamedPlan::three_sided_neumann, NamedPlan::half_split_2d})
        if (to_string(p) == s) return p;
    throw PreconditionError("unknown boundary plan '" + s + "'");
}

template <int D>
using FacePredicate =
    std::function<std::optional<BoundaryTag>(const Vec<D>& center, const Vec<D>& normal)>;

template <int D> using BoundaryPlan = std::variant<NamedPlan, FacePredicate<D>>;

template <int D> class StructuredMesh {
public:
    explicit StructuredMesh(const BoxSpec<D>& spec) : spec_(spec) {
        spec.validate();
        for (int k = 0; k < D; ++k) h_(k) = (spec.hi(k) - spec.lo(k)) / spec.n[k];
        for (int e = 0; e < num_elements(); ++e) {
            const auto idx = element_index(e);
            for (int axis = 0; axis < D; ++axis)
                for (int side = 0; side < 2; ++side) {
                    const bool on_boundary =
                        side == 0 ? idx[axis] == 0 : idx[axis] == spec.n[axis] - 1;
                    if (!on_boundary) continue;
                    BoundaryFace<D> f;
                    f.element = e;
                    f.axis = axis;
                    f.side = side;
                    f.normal = Vec<D>::Zero();
                    f.normal(axis) = side == 0 ? -1.0 : 1.0;
                    f.center = element_origin(e) + 0.5 * h_;
                    f.center(axis) = side == 0 ? spec.lo(axis) : spec.hi(axis);
                    f.area = face_area(axis);
                    faces_.push_back(f);
                }
        }
    }

    const BoxSpec<D>& spec() const { return spec_; }
    const Vec<D>& element_size() const { return h_; }
    const std::vector<BoundaryFace<D>>& boundary_faces() const { return faces_; }

    int num_elements() const {
        int c = 1;
        for (int k = 0; k < D; ++k) c *= spec_.n[k];
        return c;
    }

    int num_vertices() const {
        int c = 1;
        for (int k = 0; k < D; ++k) c *= spec_.n[k] + 1;
        return c;
    }

    // Lexicographic element numbering, first axis fastest.
    std::array<int, D> element_index(int e) const {
        std::array<int, D> idx{};
        for (int k = 0; k < D; ++k) {
            idx[k] = e % spec_.n[k];
            e /= spec_.n[k];
        }
        return idx;
    }

    Vec<D> element_origin(int e) const {
        const auto idx = element_index(e);
        Vec<D> o;
        for (int k = 0; k < D; ++k) o(k) = spec_.lo(k) + idx[k] * h_(k);
        return o;
    }

    Vec<D> vertex(int v) const {
        Vec<D> x;
        for (int k = 0; k < D; ++k) {
            const int i = v % (spec_.n[k] + 1);
            v /= spec_.n[k] + 1;
            x(k) = spec_.lo(k) + i * h_(k);
        }
        return x;
    }

    // Vertices of element e, local numbering first axis fastest.
    std::array<int, (1 << D)> element_vertices(int e) const {
        const auto idx = element_index(e);
        std::array<int, (1 << D)> out{};
        for (int local = 0; local < (1 << D); ++local) {
            int v = 0, stride = 1;
            for (int k = 0; k < D; ++k) {
                v += (idx[k] + ((local >> k) & 1)) * stride;
                stride *= spec_.n[k] + 1;
            }
            out[local] = v;
        }
        return out;
    }

    Vec<D> map_to_physical(int e, const Vec<D>& ref) const {
        return element_origin(e) + h_.cwiseProduct(ref);
    }

    double element_volume() const { return h_.prod(); }

    double face_area(int axis) const {
        double a = 1.0;
        for (int k = 0; k < D; ++k)
            if (k != axis) a *= h_(k);
        return a;
    }

    double diagonal() const { return (spec_.hi - spec_.lo).norm(); }

    int count_faces(BoundaryTag tag) const {
        int c = 0;
        for (const auto& f : faces_) c += f.tag == tag;
        return c;
    }

    bool has_neumann() const { return count_faces(BoundaryTag::neumann) > 0; }

    void set_tag(std::size_t face, BoundaryTag tag) { faces_.at(face).tag = tag; }

private:
    BoxSpec<D> spec_;
    Vec<D> h_;
    std::vector<BoundaryFace<D>> faces_;
};

template <int D> StructuredMesh<D> build_box_mesh(const BoxSpec<D>& spec) {
    return StructuredMesh<D>(spec);
}

namespace detail {

template <int D>
std::optional<BoundaryTag> named_tag(NamedPlan plan, const BoxSpec<D>& box, const Vec<D>& c,
                                     double tol) {
    auto at = [&](int axis, double value) { return std::abs(c(axis) - value) <= tol; };
    switch (plan) {
    case NamedPlan::all_dirichlet: return BoundaryTag::dirichlet;
    case NamedPlan::all_neumann: return BoundaryTag::neumann;
    case NamedPlan::three_sided_neumann:
        if constexpr (D != 3)
            throw PreconditionError("three_sided_neumann is a 3D plan");
        else
            return at(0, box.lo(0)) || at(1, box.lo(1)) || at(2, box.hi(2))
                       ? BoundaryTag::neumann
                       : BoundaryTag::dirichlet;
    case NamedPlan::half_split_2d:
        if constexpr (D != 2)
            throw PreconditionError("half_split_2d is a 2D plan");
        else
            return at(0, box.hi(0)) || at(1, box.lo(1)) ? BoundaryTag::neumann
                                                        : BoundaryTag::dirichlet;
    }
    return std::nullopt;
}

} // namespace detail

template <int D>
StructuredMesh<D> apply_boundary_plan(StructuredMesh<D> mesh, const BoundaryPlan<D>& plan) {
    const double tol = 1e-12 * mesh.diagonal();
    const auto faces = mesh.boundary_faces();
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const auto& f = faces[i];
        std::optional<BoundaryTag> tag;
        if (const auto* named = std::get_if<NamedPlan>(&plan))
            tag = detail::named_tag<D>(*named, mesh.spec(), f.center, tol);
        else
            tag = std::get<FacePredicate<D>>(plan)(f.center, f.normal);
        if (!tag)
            throw PreconditionError("boundary plan leaves the face at element " +
                                    std::to_string(f.element) + " untagged");
        mesh.set_tag(i, *tag);
    }
    return mesh;
}

} // namespace stress_elast
