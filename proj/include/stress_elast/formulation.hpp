#pragma once

#include <string>

#include "stress_elast/errors.hpp"
#include "stress_elast/tensor.hpp"

namespace stress_elast {

enum class FormKind { stress3d_I, stress3d_II, stress3d_nonsym, planar_I, planar_II, displacement };

inline std::string to_string(FormKind k) {
    switch (k) {
    case FormKind::stress3d_I: return "stress3d_I";
    case FormKind::stress3d_II: return "stress3d_II";
    case FormKind::stress3d_nonsym: return "stress3d_nonsym";
    case FormKind::planar_I: return "planar_I";
    case FormKind::planar_II: return "planar_II";
    case FormKind::displacement: return "displacement";
    }
    return "?";
}

inline FormKind parse_form_kind(const std::string& s) {
    for (auto k : {FormKind::stress3d_I, FormKind::stress3d_II, FormKind::stress3d_nonsym,
                   FormKind::planar_I, FormKind::planar_II, FormKind::displacement})
        if (to_string(k) == s) return k;
    throw PreconditionError("unknown formulation '" + s + "'");
}

// Coefficients of the five pairings of test (tau) and trial (sigma) derivatives.
struct PairingWeights {
    double grad_grad = 0.0;         // <D tau, D sigma>
    double div_div = 0.0;           // <Div tau, Div sigma>
    double div_trgrad = 0.0;        // <Div tau, grad tr sigma>
    double trgrad_div = 0.0;        // <grad tr tau, Div sigma>
    double trgrad_trgrad = 0.0;     // <grad tr tau, grad tr sigma>
};

// Load-side coefficients: sym_grad_force * <tau, sym D f> + div_force * <tr tau, div f>.
struct LoadWeights {
    double sym_grad_force = 0.0;
    double div_force = 0.0;
};

struct Formulation {
    FormKind kind = FormKind::stress3d_I;
    Material material;
    ConstitutiveMode mode = ConstitutiveMode::solid3d;
    double omega = 0.0;
    double psi = 0.0;

    static Formulation stress3d_I(Material m) { return {FormKind::stress3d_I, m}; }
    static Formulation stress3d_II(Material m, double omega) {
        return {FormKind::stress3d_II, m, ConstitutiveMode::solid3d, omega};
    }
    static Formulation stress3d_nonsym(Material m) { return {FormKind::stress3d_nonsym, m}; }
    static Formulation planar_I(Material m, ConstitutiveMode mode, double psi) {
        return {FormKind::planar_I, m, mode, 0.0, psi};
    }
    static Formulation planar_II(Material m, ConstitutiveMode mode) {
        return {FormKind::planar_II, m, mode};
    }
    static Formulation displacement(Material m, ConstitutiveMode mode) {
        return {FormKind::displacement, m, mode};
    }

    bool is_stress() const { return kind != FormKind::displacement; }
    bool is_symmetric() const { return kind != FormKind::stress3d_nonsym; }
    bool is_planar_stress_form() const {
        return kind == FormKind::planar_I || kind == FormKind::planar_II;
    }

    double chi() const { return material.chi(mode); }

    int dim() const {
        if (kind == FormKind::displacement) return mode == ConstitutiveMode::solid3d ? 3 : 2;
        return is_planar_stress_form() ? 2 : 3;
    }

    int components() const {
        const int d = dim();
        return kind == FormKind::displacement ? d : d * (d + 1) / 2;
    }

    void validate() const {
        if (!(material.E > 0.0) || material.nu < 0.0 || material.nu > 0.5)
            throw PreconditionError("material outside E > 0, 0 <= nu <= 0.5");
        const bool planar = is_planar_stress_form();
        if (planar && mode == ConstitutiveMode::solid3d)
            throw PreconditionError(to_string(kind) + " needs plane_stress or plane_strain");
        if (!planar && kind != FormKind::displacement && mode != ConstitutiveMode::solid3d)
            throw PreconditionError(to_string(kind) + " is three-dimensional (mode solid3d)");
        if (kind == FormKind::stress3d_II && !(omega >= 0.0))
            throw PreconditionError("omega must be non-negative");
        if (kind == FormKind::planar_I && !(psi > 0.0))
            throw PreconditionError("planar_I needs psi > 0 (psi = 0 loses coercivity)");
        if (kind == FormKind::displacement && mode != ConstitutiveMode::plane_stress &&
            material.nu >= 0.5)
            throw PreconditionError(
                "displacement form needs the stiffness; nu = 0.5 makes 1/(1-2nu) singular");
    }

    PairingWeights pairings() const {
        const double c = chi();
        switch (kind) {
        case FormKind::stress3d_I: return {1.0, 0.0, c, c, 0.0};
        case FormKind::stress3d_II: return {1.0, omega, c, c, 0.0};
        case FormKind::stress3d_nonsym: return {1.0, 0.0, c, 0.0, 0.0};
        case FormKind::planar_I: return {0.0, psi, 0.0, 0.0, c};
        case FormKind::planar_II: return {1.0, 0.0, 1.0, 1.0, 0.0};
        case FormKind::displacement: break;
        }
        throw PreconditionError("displacement form has no stress pairings");
    }

    LoadWeights load_weights() const {
        const double nu = material.nu;
        switch (kind) {
        case FormKind::stress3d_I: return {2.0, (1.0 + nu * nu) / (1.0 - nu * nu)};
        case FormKind::stress3d_II: return {2.0 + omega, (1.0 + nu * nu) / (1.0 - nu * nu)};
        case FormKind::stress3d_nonsym: return {2.0, nu / (1.0 - nu)};
        case FormKind::planar_I: return {psi, 1.0};
        case FormKind::planar_II: return {2.0, 1.0 / chi()};
        case FormKind::displacement: break;
        }
        throw PreconditionError("displacement form has no stress load weights");
    }
};

} // namespace stress_elast
