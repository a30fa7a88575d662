#pragma once

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tripled {

using ScalarMap = std::function<double(double)>;
/// f(t, x, y, z, p)
using StateMap = std::function<double(double, double, double, double, double)>;
/// h(t, s, x, y, z)
using KernelMap = std::function<double(double, double, double, double, double)>;
/// Bound depending only on (t, s), used for analytic kernel majorants.
using KernelBound = std::function<double(double, double)>;

/// Data of one equation of the system
///   u_i(t) = g(t) + f(t, x(xi t), y(xi t), z(xi t), psi(int_0^{q t} h(t, s, x(eta s), y(eta s), z(eta s)) ds)).
struct ComponentSpec {
    ScalarMap g;
    StateMap f;
    KernelMap h;
    ScalarMap psi;
    ScalarMap xi;
    ScalarMap eta;
    ScalarMap q;

    /// Hoelder constants for psi: |psi(a) - psi(b)| <= delta |a - b|^alpha.
    double delta = 1.0;
    double alpha = 1.0;

    /// Comparison maps bounding the sensitivity of f to (x, y, z) and to p.
    ScalarMap phi;
    ScalarMap Phi;
    /// Whether phi(r) < r is claimed; checked on the strictness ladder when set.
    bool phi_strict = true;

    /// Optional analytic bounds: |h(t,s,.)| <= kernel_abs_majorant(t,s) and
    /// |h(t,s,x,y,z) - h(t,s,u,v,w)| <= kernel_diff_majorant(t,s).
    KernelBound kernel_abs_majorant;
    KernelBound kernel_diff_majorant;
};

struct ProblemSpec {
    std::string name;
    std::array<ComponentSpec, 3> components;

    std::optional<double> D;
    std::optional<double> G;
    std::array<std::optional<double>, 3> M;

    const ComponentSpec& component(std::size_t i) const {
        if (i >= 3) throw DomainError("ProblemSpec: component index must be 0, 1 or 2");
        return components[i];
    }
};

struct ProblemId {
    std::string name;
    std::map<std::string, double> parameters;
};

/// Ladder {1e-3, ..., 1e3} on which phi(r) < r and monotonicity are checked.
inline std::vector<double> strictness_ladder() {
    std::vector<double> out;
    for (int e = -3; e <= 3; ++e) {
        for (double m : {1.0, 2.0, 5.0}) {
            const double r = m * std::pow(10.0, e);
            if (r <= 1e3) out.push_back(r);
        }
    }
    return out;
}

struct Violation {
    std::string condition;
    int component;  // 1-based, 0 when not tied to a component
    std::vector<double> witness;
    std::string detail;
};

/// Structural checks of a spec on sample points. Violations are returned, never thrown.
/// Warps are sampled at the midpoints (k + 1/2) t_max / n_samples.
inline std::vector<Violation> validate_spec(const ProblemSpec& spec, const Grid& grid, std::size_t n_samples) {
    if (n_samples < 1) throw DomainError("validate_spec: n_samples must be >= 1");
    std::vector<Violation> out;
    const auto ladder = strictness_ladder();

    for (int i = 0; i < 3; ++i) {
        const auto& c = spec.components[static_cast<std::size_t>(i)];
        const int ci = i + 1;
        if (!c.g || !c.f || !c.h || !c.psi || !c.xi || !c.eta || !c.q || !c.phi || !c.Phi) {
            out.push_back({"missing map", ci, {}, "every map of the component must be set"});
            continue;
        }
        if (!(c.delta > 0.0) || !(c.alpha > 0.0)) {
            out.push_back({"constant not positive", ci, {c.delta, c.alpha}, "delta and alpha must be > 0"});
        }

        const std::pair<const char*, const ScalarMap*> warps[] = {{"xi", &c.xi}, {"eta", &c.eta}, {"q", &c.q}};
        for (const auto& [wname, warp] : warps) {
            for (std::size_t k = 0; k < n_samples; ++k) {
                const double t = (static_cast<double>(k) + 0.5) * grid.t_max() / static_cast<double>(n_samples);
                const double w = (*warp)(t);
                if (!std::isfinite(w)) {
                    out.push_back({"warp non-finite", ci, {t}, std::string(wname) + " is not finite"});
                    break;
                }
                if (w < 0.0) {
                    out.push_back({"warp negative", ci, {t}, std::string(wname) + "(t) = " + format_real(w)});
                    break;
                }
            }
        }

        const double Phi0 = c.Phi(0.0);
        if (Phi0 != 0.0) {
            out.push_back({"Phi(0) != 0", ci, {0.0}, "Phi(0) = " + format_real(Phi0)});
        }

        double prev_phi = c.phi(0.0);
        double prev_Phi = Phi0;
        double prev_r = 0.0;
        for (double r : ladder) {
            const double p = c.phi(r);
            const double P = c.Phi(r);
            if (p < 0.0 || P < 0.0) {
                out.push_back({"comparison map negative", ci, {r}, "phi/Phi must map into R+"});
                break;
            }
            if (p < prev_phi) {
                out.push_back({"phi not nondecreasing", ci, {prev_r, r}, ""});
                break;
            }
            if (P < prev_Phi) {
                out.push_back({"Phi not nondecreasing", ci, {prev_r, r}, ""});
                break;
            }
            prev_phi = p;
            prev_Phi = P;
            prev_r = r;
        }
        if (c.phi_strict) {
            for (double r : ladder) {
                if (!(c.phi(r) < r)) {
                    out.push_back({"phi(r) < r fails", ci, {r}, "phi(r) = " + format_real(c.phi(r))});
                    break;
                }
            }
        }
    }
    return out;
}

// Registry ----------------------------------------------------------------------

namespace detail {

inline double identity(double t) { return t; }

inline double param(const ProblemId& id, const std::string& key, double fallback) {
    auto it = id.parameters.find(key);
    return it == id.parameters.end() ? fallback : it->second;
}

inline ComponentSpec trivial_component(double g_value) {
    ComponentSpec c;
    c.g = [g_value](double) { return g_value; };
    c.f = [](double, double, double, double, double) { return 0.0; };
    c.h = [](double, double, double, double, double) { return 0.0; };
    c.psi = identity;
    c.xi = identity;
    c.eta = identity;
    c.q = identity;
    c.phi = [](double r) { return 0.5 * r; };
    c.Phi = identity;
    c.kernel_abs_majorant = [](double, double) { return 0.0; };
    c.kernel_diff_majorant = [](double, double) { return 0.0; };
    return c;
}

inline ProblemSpec make_paper_example(const ProblemId& id) {
    const double h2_form = param(id, "h2_form", 0.0);
    if (h2_form != 0.0 && h2_form != 1.0) {
        throw ValidationError("paper_example: h2_form must be 0 (definition block) or 1 (system display)");
    }
    const bool h2_system = h2_form == 1.0;

    ProblemSpec p;
    p.name = "paper_example";
    auto& c1 = p.components[0];
    auto& c2 = p.components[1];
    auto& c3 = p.components[2];

    c1.g = [](double t) { return t * t / (2.0 + 2.0 * std::pow(t, 4)); };
    c2.g = [](double t) { return 0.5 * std::exp(-t * t); };
    c3.g = [](double t) { return 1.0 / (2.0 * std::sqrt(1.0 + std::pow(t, 4))); };

    c1.f = [](double t, double x, double y, double z, double p) { return (x + y + z) / (3.0 * t * t + 3.0) + p; };
    c2.f = [](double t, double x, double y, double z, double p) {
        return t * t * (x + y + z) / (3.0 * std::pow(t, 4) + 3.0) + p;
    };
    c3.f = [](double t, double x, double y, double z, double p) {
        return std::pow(t, 3) * (x + y + z) / (3.0 * std::pow(t, 5) + 3.0) + p;
    };

    c1.h = [](double t, double s, double x, double y, double z) {
        const double sy = std::sin(y);
        const double cz = std::cos(z);
        return x * s * std::abs(sy) * std::abs(cz) * std::exp(-t) /
               ((1.0 + x * x) * (1.0 + sy * sy) * (1.0 + cz * cz));
    };
    if (h2_system) {
        c2.h = [](double t, double s, double x, double y, double z) {
            const double sx = std::sin(x), cx = std::cos(x), sz = std::sin(z), cz = std::cos(z);
            return std::exp(s - t * t) * y * y * (1.0 + cx * cx) * (1.0 + sz * sz) /
                   ((1.0 + y * y) * (1.0 + sx * sx) * (1.0 + cz * cz));
        };
    } else {
        // The state factors of numerator and denominator coincide as printed.
        c2.h = [](double t, double s, double x, double y, double z) {
            const double sx = std::sin(x), cz = std::cos(z);
            const double factors = (1.0 + y * y) * (1.0 + sx * sx) * (1.0 + cz * cz);
            return std::exp(s - t * t) * factors / factors;
        };
    }
    c3.h = [](double t, double s, double x, double y, double z) {
        const double sy = std::sin(y), cx = std::cos(x);
        const double prod = (1.0 + z * z) * (1.0 + sy * sy) * (1.0 + cx * cx);
        // (s^2 |cos z| + sqrt(e^s prod)) / (e^t prod), split so e^s does not overflow first.
        return s * s * std::abs(std::cos(z)) * std::exp(-t) / prod + std::exp(0.5 * s - t) / std::sqrt(prod);
    };

    c1.psi = [](double v) { return std::atan(v); };
    c2.psi = [](double v) { return std::sin(v); };
    c3.psi = [](double v) { return std::cos(v); };

    c1.xi = [](double t) { return std::sqrt(t); };
    c2.xi = identity;
    c3.xi = identity;
    c1.eta = [](double t) { return t * t; };
    c2.eta = identity;
    c3.eta = identity;
    c1.q = [](double t) { return std::sqrt(t); };
    c2.q = identity;
    c3.q = [](double t) { return t * t; };

    for (auto& c : p.components) {
        c.delta = 1.0;
        c.alpha = 1.0;
        c.phi = identity;
        c.Phi = identity;
        c.phi_strict = false;
    }

    // Majorants stated alongside the example.
    c1.kernel_diff_majorant = [](double t, double s) { return s * std::exp(-t); };
    c2.kernel_diff_majorant = [](double t, double s) { return 2.0 * std::exp(s - t * t); };
    c3.kernel_diff_majorant = [](double t, double s) { return s * s * std::exp(-t); };

    // |x|/(1+x^2) <= 1/2 and |sin y|/(1+sin^2 y), |cos z|/(1+cos^2 z) <= 1/2.
    c1.kernel_abs_majorant = [](double t, double s) { return 0.125 * s * std::exp(-t); };
    if (h2_system) {
        c2.kernel_abs_majorant = [](double t, double s) { return 4.0 * std::exp(s - t * t); };
    } else {
        c2.kernel_abs_majorant = [](double t, double s) { return std::exp(s - t * t); };
    }
    c3.kernel_abs_majorant = [](double t, double s) { return s * s * std::exp(-t) + std::exp(0.5 * s - t); };

    p.G = 0.5;
    p.M = {0.0, 0.0, 0.0};
    return p;
}

inline ProblemSpec make_decoupled_identity(const ProblemId& id) {
    ProblemSpec p;
    p.name = "decoupled_identity";
    const double c[3] = {param(id, "c1", 1.0), param(id, "c2", -0.5), param(id, "c3", 2.0)};
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(c[i])) throw ValidationError("decoupled_identity: constants must be finite");
        p.components[static_cast<std::size_t>(i)] = trivial_component(c[i]);
    }
    p.G = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
    p.M = {0.0, 0.0, 0.0};
    p.D = 0.0;
    return p;
}

inline ProblemSpec make_linear_volterra(const ProblemId& id) {
    const double lambda = param(id, "lambda", 1.0);
    if (!std::isfinite(lambda)) throw ValidationError("linear_volterra: lambda must be finite");
    ProblemSpec p;
    p.name = "linear_volterra";
    p.components[0] = trivial_component(1.0);
    p.components[1] = trivial_component(0.0);
    p.components[2] = trivial_component(0.0);
    auto& c = p.components[0];
    c.f = [](double, double, double, double, double pv) { return pv; };
    c.h = [lambda](double, double, double x, double, double) { return lambda * x; };
    c.phi = [](double) { return 0.0; };
    c.kernel_abs_majorant = nullptr;
    c.kernel_diff_majorant = nullptr;
    p.M = {0.0, 0.0, 0.0};
    return p;
}

inline ProblemSpec make_squared_psi(const ProblemId& id) {
    ProblemSpec p = make_decoupled_identity(id);
    p.name = "squared_psi";
    // Claims delta = alpha = 1 for psi(v) = v^2, which is false on any range wider than 1/2.
    p.components[0].psi = [](double v) { return v * v; };
    return p;
}

}  // namespace detail

/// Name-keyed registry of built-in problems.
class ProblemRegistry {
public:
    using Factory = std::function<ProblemSpec(const ProblemId&)>;

    struct Entry {
        std::string description;
        std::map<std::string, double> defaults;
        Factory factory;
    };

    void add(std::string name, Entry entry) { entries_[std::move(name)] = std::move(entry); }

    ProblemSpec get(const ProblemId& id) const {
        auto it = entries_.find(id.name);
        if (it == entries_.end()) throw LookupError("unknown problem '" + id.name + "'");
        for (const auto& [key, value] : id.parameters) {
            if (!it->second.defaults.contains(key)) {
                throw ValidationError("problem '" + id.name + "' has no parameter '" + key + "'");
            }
            if (!std::isfinite(value)) {
                throw ValidationError("problem '" + id.name + "': parameter '" + key + "' is not finite");
            }
        }
        return it->second.factory(id);
    }

    const std::map<std::string, Entry>& entries() const noexcept { return entries_; }

    static const ProblemRegistry& builtin() {
        static const ProblemRegistry reg = [] {
            ProblemRegistry r;
            r.add("paper_example",
                  {"tripled system with arctan/sin/cos outer maps and warped arguments; h2_form selects the "
                   "printed kernel h2 (0) or the one inside the displayed system (1)",
                   {{"h2_form", 0.0}},
                   detail::make_paper_example});
            r.add("decoupled_identity",
                  {"f = h = 0, g_i = c_i; the exact solution is (c1, c2, c3)",
                   {{"c1", 1.0}, {"c2", -0.5}, {"c3", 2.0}},
                   detail::make_decoupled_identity});
            r.add("linear_volterra",
                  {"x = 1 + lambda int_0^t x ds embedded in component 1; exact solution exp(lambda t)",
                   {{"lambda", 1.0}},
                   detail::make_linear_volterra});
            r.add("squared_psi",
                  {"decoupled_identity with psi_1(v) = v^2 declared Lipschitz-1 (fails the Hoelder check)",
                   {{"c1", 1.0}, {"c2", -0.5}, {"c3", 2.0}},
                   detail::make_squared_psi});
            return r;
        }();
        return reg;
    }

private:
    std::map<std::string, Entry> entries_;
};

inline ProblemSpec get_problem(const ProblemId& id) { return ProblemRegistry::builtin().get(id); }

}  // namespace tripled
