#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stress_elast/driver.hpp"
#include "stress_elast/forms.hpp"
#include "stress_elast/formulation.hpp"
#include "stress_elast/manufactured.hpp"
#include "stress_elast/mesh.hpp"

namespace stress_elast::cli {

enum class Command { solve, convergence, spectrum, psi_sweep, identities };

inline std::string to_string(Command c) {
    switch (c) {
    case Command::solve: return "solve";
    case Command::convergence: return "convergence";
    case Command::spectrum: return "spectrum";
    case Command::psi_sweep: return "psi-sweep";
    case Command::identities: return "identities";
    }
    return "?";
}

inline Command parse_command(const std::string& s) {
    for (auto c : {Command::solve, Command::convergence, Command::spectrum, Command::psi_sweep,
                   Command::identities})
        if (to_string(c) == s) return c;
    throw ConfigError("unknown command '" + s + "'");
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

struct RunConfig {
    Command command = Command::solve;
    std::string benchmark = "cube_quintic";
    FormKind formulation = FormKind::stress3d_I;
    ConstitutiveMode mode = ConstitutiveMode::solid3d;
    double E = 200.0;
    double nu = 0.25;
    double omega = 0.0;
    double psi = 0.0;
    bool relative_to_chi = false; // omega, psi and scale_list are multiples of chi
    std::vector<double> lo{0.0, 0.0, 0.0};
    std::vector<double> hi{1.0, 1.0, 1.0};
    std::vector<int> n{1, 1, 1};      // cells per axis; refinement levels multiply it
    std::vector<int> n_list;          // refinement multipliers
    int order = 1;
    NamedPlan plan = NamedPlan::all_dirichlet;
    RhsMethod rhs = RhsMethod::direct;
    int rhs_subcells = 1;
    DirichletMethod dirichlet = DirichletMethod::projection;
    int grid_samples = 5;
    bool compare_displacement = false;
    std::vector<double> nu_list;
    std::vector<NamedPlan> plan_list;
    std::vector<double> scale_list;
    std::vector<double> k_list;
    std::vector<ConstitutiveMode> mode_list;
    double zero_tol = 1e-9;
    long dense_cap = 8000;
    int identity_fields = 100;
    std::uint64_t seed = 20240607;
    std::string out = ".";

    int dim() const { return static_cast<int>(lo.size()); }

    double scaled(double value, double nu_value, ConstitutiveMode m) const {
        return relative_to_chi ? value * Material{E, nu_value}.chi(m) : value;
    }

    Formulation formulation_at(double nu_value, ConstitutiveMode m) const {
        Formulation f;
        f.kind = formulation;
        f.material = Material{E, nu_value};
        f.mode = m;
        f.omega = scaled(omega, nu_value, m);
        f.psi = scaled(psi, nu_value, m);
        return f;
    }

    Formulation base_formulation() const { return formulation_at(nu, mode); }

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': '" + s + "' is not a number");
    return v;
}

inline long to_long(const std::string& key, const std::string& s) {
    long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("key '" + key + "': '" + s + "' is not an integer");
    return v;
}

inline bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

template <class T, class F>
std::vector<T> to_list(const std::string& key, const std::string& s, F&& conv) {
    std::vector<T> out;
    for (const auto& item : split_list(s)) out.push_back(conv(key, item));
    return out;
}

template <class T, class F> std::string join(const std::vector<T>& v, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
    return out;
}

template <class F> auto rethrow_as_config(const std::string& key, F&& f) {
    try {
        return f();
    } catch (const PreconditionError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
    }
}

} // namespace detail

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "command",   "benchmark",     "formulation",     "mode",         "E",
        "nu",        "omega",         "psi",             "relative_to_chi", "lo",
        "hi",        "n",             "n_list",          "order",        "plan",
        "rhs",       "rhs_subcells",  "dirichlet",  "grid_samples",    "compare_displacement",
        "nu_list",   "plan_list",     "scale_list",      "k_list",       "mode_list",
        "zero_tol",  "dense_cap",     "identity_fields", "seed",         "out"};
    return keys;
}

inline std::map<std::string, std::string> parse_pairs(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        if (!known_keys().count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (kv.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = detail::trim(line.substr(eq + 1));
    }
    return kv;
}

// Checks parameter compatibility before any assembly happens.
inline void validate(const RunConfig& c) {
    if (c.dim() != 2 && c.dim() != 3) throw ConfigError("lo must have 2 or 3 entries");
    if (c.hi.size() != c.lo.size() || c.n.size() != c.lo.size())
        throw ConfigError("lo, hi and n must have the same length");
    for (int k = 0; k < c.dim(); ++k) {
        if (!(c.lo[k] < c.hi[k])) throw ConfigError("lo must be below hi on every axis");
        if (c.n[k] < 1) throw ConfigError("n entries must be positive");
    }
    if (c.order < 1 || c.order > 3) throw ConfigError("order must be 1, 2 or 3");
    if (c.rhs_subcells < 1) throw ConfigError("rhs_subcells must be positive");
    if (c.grid_samples < 2) throw ConfigError("grid_samples must be at least 2");
    if (!(c.zero_tol > 0.0)) throw ConfigError("zero_tol must be positive");
    if (c.dense_cap < 1) throw ConfigError("dense_cap must be positive");
    if (c.identity_fields < 1) throw ConfigError("identity_fields must be positive");
    for (int m : c.n_list)
        if (m < 1) throw ConfigError("n_list entries must be positive");
    if (c.command == Command::identities) return;

    if (!(c.E > 0.0)) throw ConfigError("E must be positive");
    for (double nu : c.nu_list.empty() ? std::vector<double>{c.nu} : c.nu_list)
        if (!(nu >= 0.0 && nu <= 0.5)) throw ConfigError("nu must lie in [0, 0.5]");

    const int bdim = detail::rethrow_as_config("benchmark", [&] {
        return benchmark_dimension(c.benchmark);
    });
    auto check_form = [&](double nu, ConstitutiveMode m) {
        Formulation f = c.formulation_at(nu, m);
        f.material = quasi_incompressible(f.material, f.mode);
        detail::rethrow_as_config("formulation", [&] {
            f.validate();
            return 0;
        });
        if (f.dim() != c.dim())
            throw ConfigError(to_string(f.kind) + " in mode " + to_string(m) + " is " +
                              std::to_string(f.dim()) + "D but the box is " +
                              std::to_string(c.dim()) + "D");
        if (c.command != Command::spectrum && bdim != c.dim())
            throw ConfigError("benchmark " + c.benchmark + " is " + std::to_string(bdim) + "D");
    };

    switch (c.command) {
    case Command::solve: check_form(c.nu, c.mode); break;
    case Command::convergence:
        if (c.n_list.size() < 2) throw ConfigError("convergence: >= 2 levels required in n_list");
        check_form(c.nu, c.mode);
        if (c.compare_displacement)
            detail::rethrow_as_config("compare_displacement", [&] {
                Formulation::displacement(quasi_incompressible(Material{c.E, c.nu}, c.mode),
                                          c.mode)
                    .validate();
                return 0;
            });
        break;
    case Command::spectrum: {
        const auto nus = c.nu_list.empty() ? std::vector<double>{c.nu} : c.nu_list;
        for (double nu : nus) check_form(nu, c.mode);
        for (double s : c.scale_list) {
            if (c.formulation == FormKind::planar_I && !(s > 0.0))
                throw ConfigError("scale_list: psi = 0 is rejected");
            if (s < 0.0) throw ConfigError("scale_list entries must be non-negative");
        }
        for (NamedPlan p : c.plan_list)
            if ((p == NamedPlan::three_sided_neumann && c.dim() != 3) ||
                (p == NamedPlan::half_split_2d && c.dim() != 2))
                throw ConfigError("plan " + to_string(p) + " does not fit a " +
                                  std::to_string(c.dim()) + "D box");
        break;
    }
    case Command::psi_sweep: {
        if (c.formulation != FormKind::planar_I)
            throw ConfigError("psi-sweep needs formulation planar_I");
        if (c.benchmark == "cube_quintic") throw ConfigError("psi-sweep needs a planar benchmark");
        if (c.k_list.empty()) throw ConfigError("psi-sweep needs k_list");
        for (double k : c.k_list)
            if (!(k > 0.0)) throw ConfigError("k_list: k must be positive (psi = 0 is rejected)");
        const auto nus = c.nu_list.empty() ? std::vector<double>{c.nu} : c.nu_list;
        const auto modes = c.mode_list.empty() ? std::vector<ConstitutiveMode>{c.mode} : c.mode_list;
        for (auto m : modes)
            for (double nu : nus) {
                Formulation f = Formulation::planar_I(
                    quasi_incompressible(Material{c.E, nu}, m), m, 1.0);
                detail::rethrow_as_config("formulation", [&] {
                    f.validate();
                    return 0;
                });
            }
        break;
    }
    case Command::identities: break;
    }
    if (c.command != Command::spectrum) {
        if (c.plan == NamedPlan::three_sided_neumann && c.dim() != 3)
            throw ConfigError("three_sided_neumann needs a 3D box");
        if (c.plan == NamedPlan::half_split_2d && c.dim() != 2)
            throw ConfigError("half_split_2d needs a 2D box");
    }
}

inline RunConfig parse_config(std::istream& in, std::optional<Command> command = std::nullopt) {
    using namespace detail;
    const auto kv = parse_pairs(in);
    RunConfig c;
    auto has = [&](const char* k) { return kv.count(k) > 0; };
    auto get = [&](const char* k) { return kv.at(k); };

    if (has("command")) c.command = parse_command(get("command"));
    if (command) c.command = *command;
    if (has("benchmark")) c.benchmark = get("benchmark");
    if (has("formulation"))
        c.formulation = rethrow_as_config("formulation", [&] { return parse_form_kind(get("formulation")); });
    if (has("mode")) c.mode = rethrow_as_config("mode", [&] { return parse_mode(get("mode")); });
    if (has("E")) c.E = to_double("E", get("E"));
    if (has("nu")) c.nu = to_double("nu", get("nu"));
    if (has("omega")) c.omega = to_double("omega", get("omega"));
    if (has("psi")) c.psi = to_double("psi", get("psi"));
    if (has("relative_to_chi")) c.relative_to_chi = to_bool("relative_to_chi", get("relative_to_chi"));
    if (has("lo")) c.lo = to_list<double>("lo", get("lo"), to_double);
    if (has("hi")) c.hi = to_list<double>("hi", get("hi"), to_double);
    auto to_int = [](const std::string& k, const std::string& s) { return static_cast<int>(to_long(k, s)); };
    if (has("n")) c.n = to_list<int>("n", get("n"), to_int);
    if (has("n_list")) c.n_list = to_list<int>("n_list", get("n_list"), to_int);
    if (has("order")) c.order = to_int("order", get("order"));
    if (has("plan")) c.plan = rethrow_as_config("plan", [&] { return parse_plan(get("plan")); });
    if (has("rhs")) c.rhs = rethrow_as_config("rhs", [&] { return parse_rhs_method(get("rhs")); });
    if (has("rhs_subcells")) c.rhs_subcells = to_int("rhs_subcells", get("rhs_subcells"));
    if (has("dirichlet"))
        c.dirichlet = rethrow_as_config("dirichlet", [&] { return parse_dirichlet_method(get("dirichlet")); });
    if (has("grid_samples")) c.grid_samples = to_int("grid_samples", get("grid_samples"));
    if (has("compare_displacement"))
        c.compare_displacement = to_bool("compare_displacement", get("compare_displacement"));
    if (has("nu_list")) c.nu_list = to_list<double>("nu_list", get("nu_list"), to_double);
    if (has("plan_list"))
        c.plan_list = to_list<NamedPlan>("plan_list", get("plan_list"), [](const std::string& k, const std::string& s) {
            return rethrow_as_config(k, [&] { return parse_plan(s); });
        });
    if (has("scale_list")) c.scale_list = to_list<double>("scale_list", get("scale_list"), to_double);
    if (has("k_list")) c.k_list = to_list<double>("k_list", get("k_list"), to_double);
    if (has("mode_list"))
        c.mode_list = to_list<ConstitutiveMode>("mode_list", get("mode_list"), [](const std::string& k, const std::string& s) {
            return rethrow_as_config(k, [&] { return parse_mode(s); });
        });
    if (has("zero_tol")) c.zero_tol = to_double("zero_tol", get("zero_tol"));
    if (has("dense_cap")) c.dense_cap = to_long("dense_cap", get("dense_cap"));
    if (has("identity_fields")) c.identity_fields = to_int("identity_fields", get("identity_fields"));
    if (has("seed")) c.seed = static_cast<std::uint64_t>(to_long("seed", get("seed")));
    if (has("out")) c.out = get("out");
    validate(c);
    return c;
}

inline RunConfig parse_config_string(const std::string& text,
                                     std::optional<Command> command = std::nullopt) {
    std::istringstream in(text);
    return parse_config(in, command);
}

inline RunConfig load_config(const std::string& path, std::optional<Command> command = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, command);
}

inline std::string serialize(const RunConfig& c) {
    using detail::join;
    auto d = [](double v) { return format_double(v); };
    auto i = [](long v) { return std::to_string(v); };
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    std::ostringstream os;
    os << "command = " << to_string(c.command) << "\n"
       << "benchmark = " << c.benchmark << "\n"
       << "formulation = " << to_string(c.formulation) << "\n"
       << "mode = " << to_string(c.mode) << "\n"
       << "E = " << d(c.E) << "\n"
       << "nu = " << d(c.nu) << "\n"
       << "omega = " << d(c.omega) << "\n"
       << "psi = " << d(c.psi) << "\n"
       << "relative_to_chi = " << b(c.relative_to_chi) << "\n"
       << "lo = " << join(c.lo, d) << "\n"
       << "hi = " << join(c.hi, d) << "\n"
       << "n = " << join(c.n, i) << "\n"
       << "n_list = " << join(c.n_list, i) << "\n"
       << "order = " << c.order << "\n"
       << "plan = " << to_string(c.plan) << "\n"
       << "rhs = " << to_string(c.rhs) << "\n"
       << "rhs_subcells = " << c.rhs_subcells << "\n"
       << "dirichlet = " << to_string(c.dirichlet) << "\n"
       << "grid_samples = " << c.grid_samples << "\n"
       << "compare_displacement = " << b(c.compare_displacement) << "\n"
       << "nu_list = " << join(c.nu_list, d) << "\n"
       << "plan_list = " << join(c.plan_list, [](NamedPlan p) { return to_string(p); }) << "\n"
       << "scale_list = " << join(c.scale_list, d) << "\n"
       << "k_list = " << join(c.k_list, d) << "\n"
       << "mode_list = " << join(c.mode_list, [](ConstitutiveMode m) { return to_string(m); }) << "\n"
       << "zero_tol = " << d(c.zero_tol) << "\n"
       << "dense_cap = " << c.dense_cap << "\n"
       << "identity_fields = " << c.identity_fields << "\n"
       << "seed = " << c.seed << "\n"
       << "out = " << c.out << "\n";
    return os.str();
}

} // namespace stress_elast::cli
