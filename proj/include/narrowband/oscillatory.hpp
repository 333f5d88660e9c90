#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "narrowband/norms.hpp"
#include "narrowband/pseudoproduct.hpp"
#include "narrowband/symbols.hpp"

namespace narrowband {

/// (exp(iz) - 1) / (iz), extended by 1 at z = 0. Four-term series below the
/// switch point keeps the relative error under 1e-12 with no branch seams.
inline cplx osc_profile(double z) {
    if (std::abs(z) < 1e-4) {
        cplx iz{0.0, z};
        return 1.0 + iz / 2.0 + iz * iz / 6.0 + iz * iz * iz / 24.0;
    }
    cplx iz{0.0, z};
    return (std::exp(iz) - 1.0) / iz;
}

/// Smooth phase on the frequency plane with an optional analytic handle on
/// its zero set S = phi^{-1}(0).
struct Phase {
    std::function<double(double, double)> phi;
    std::function<Vec2(double, double)> grad;
    std::optional<Curve> zero_set;
    std::string name;

    /// phi(xi, eta) = p(xi + eta) - p(xi) - p(eta) for the quadratic
    /// dispersion p(s) = s^2, i.e. phi = 2 xi eta. Zero set = the coordinate
    /// cross, a degenerate-regime stress case.
    static Phase quadratic_dispersion() {
        Phase ph;
        ph.phi = [](double xi, double eta) { return 2.0 * xi * eta; };
        ph.grad = [](double xi, double eta) { return Vec2{2.0 * eta, 2.0 * xi}; };
        ph.name = "quadratic-dispersion";
        return ph;
    }

    /// phi = xi^2 + (eta - 1)^2 - 1, vanishing on the model curvature circle.
    static Phase circle_phase() {
        Phase ph;
        ph.phi = [](double xi, double eta) { return xi * xi + sq(eta - 1.0) - 1.0; };
        ph.grad = [](double xi, double eta) { return Vec2{2.0 * xi, 2.0 * (eta - 1.0)}; };
        ph.zero_set = Curve::make_circle({0.0, 1.0}, 1.0, "phase-zero-set");
        ph.name = "circle-phase";
        return ph;
    }

    /// Sampled check that grad phi does not vanish near the zero set inside
    /// the working box.
    void check_nonvanishing_gradient(double box_half_width, double tol = 1e-6) const {
        if (zero_set) {
            for (int i = 0; i < 512; ++i) {
                Vec2 p = zero_set->point(i / 512.0);
                if (std::abs(p.x) > box_half_width || std::abs(p.y) > box_half_width) continue;
                if (grad(p.x, p.y).norm() <= tol)
                    throw error("phase gradient vanishes on the zero set");
            }
            return;
        }
        const int n = 256;
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                double xi = box_half_width * (2.0 * i / n - 1.0);
                double eta = box_half_width * (2.0 * j / n - 1.0);
                if (std::abs(phi(xi, eta)) < 1e-3 && Vec2{xi, eta}.norm() > 1e-3 &&
                    grad(xi, eta).norm() <= tol)
                    throw error("phase gradient vanishes near the zero set");
            }
        }
    }
};

/// Time-integrated oscillatory symbol  m * (e^{it phi} - 1) / (i phi),
/// with the removable singularity handled exactly (value m * t where phi = 0).
inline Symbol duhamel_symbol(const Phase& phase, double t, const Symbol& base) {
    if (t < 0.0) throw error("duhamel_symbol: t >= 0 required");
    Symbol out(base.grid);
    out.claimed_class = SymbolClass::custom;
    out.epsilon = base.epsilon;
    out.curve = phase.zero_set ? phase.zero_set : base.curve;
    const FrequencyGrid& g = base.grid;
    parallel_for(static_cast<std::size_t>(g.n), [&](std::size_t jj) {
        int j = static_cast<int>(jj);
        double xi = g.xi(j);
        for (int l = 0; l < g.n; ++l) {
            cplx mv = base.at(j, l);
            if (mv == cplx{}) continue;
            out.at(j, l) = mv * t * osc_profile(t * phase.phi(xi, g.xi(l)));
        }
    });
    return out;
}

/// e^{i s phi} m, the frozen-time modulated symbol.
inline Symbol phase_modulated_symbol(const Phase& phase, double s, const Symbol& base) {
    Symbol out(base.grid);
    out.claimed_class = base.claimed_class;
    out.epsilon = base.epsilon;
    out.curve = phase.zero_set ? phase.zero_set : base.curve;
    const FrequencyGrid& g = base.grid;
    for (int j = 0; j < g.n; ++j) {
        double xi = g.xi(j);
        for (int l = 0; l < g.n; ++l) {
            cplx mv = base.at(j, l);
            if (mv == cplx{}) continue;
            double ph = s * phase.phi(xi, g.xi(l));
            out.at(j, l) = mv * cplx{std::cos(ph), std::sin(ph)};
        }
    }
    return out;
}

/// Smooth restriction of a symbol to the resonant set {|phi| <= eps}.
inline Symbol resonance_cut_symbol(const Phase& phase, double eps, const Symbol& base) {
    Symbol out(base.grid);
    out.claimed_class = SymbolClass::M_eps;
    out.epsilon = eps;
    out.curve = phase.zero_set;
    const FrequencyGrid& g = base.grid;
    for (int j = 0; j < g.n; ++j) {
        double xi = g.xi(j);
        for (int l = 0; l < g.n; ++l) {
            cplx mv = base.at(j, l);
            if (mv == cplx{}) continue;
            double cut = plateau_bump(phase.phi(xi, g.xi(l)) / eps);
            if (cut != 0.0) out.at(j, l) = mv * cut;
        }
    }
    return out;
}

inline double phase_max_abs(const Phase& phase, const FrequencyGrid& g) {
    double m = 0.0;
    for (int j = 0; j < g.n; j += 8)
        for (int l = 0; l < g.n; l += 8) m = std::max(m, std::abs(phase.phi(g.xi(j), g.xi(l))));
    return m;
}

struct ResonancePairing {
    std::vector<double> t_values;
    std::vector<double> norms;  // |int_0^t B_{e^{is phi} m 1_{|phi|<=eps}}(f, g) ds|_{r'}
    double sup_norm = 0.0;
};

/// Truncated bilinear oscillatory integral over the resonant set, evaluated
/// at the given times. Time-independent inputs use the exact s-integration
/// (the Duhamel symbol); time-indexed inputs use composite Gauss-Legendre
/// with step bounded by 0.1 / max|phi|.
inline ResonancePairing truncated_resonance_pairing(
    const Phase& phase, double eps, const std::vector<double>& t_grid, const GridFunction& f,
    const GridFunction& g, const LebesgueTriple& triple, const Symbol& base) {
    Symbol cut = resonance_cut_symbol(phase, eps, base);
    double r = triple.r.as_double();
    double r_dual = std::isinf(r) ? 1.0 : r / (r - 1.0);
    ResonancePairing out;
    out.t_values = t_grid;
    for (double t : t_grid) {
        Symbol duh = duhamel_symbol(phase, t, cut);
        GridFunction B = apply_bilinear(duh, f, g);
        double nrm = lp_norm(B, r_dual);
        out.norms.push_back(nrm);
        out.sup_norm = std::max(out.sup_norm, nrm);
    }
    return out;
}

inline ResonancePairing truncated_resonance_pairing(
    const Phase& phase, double eps, const std::vector<double>& t_grid,
    const std::function<GridFunction(double)>& f_of_s,
    const std::function<GridFunction(double)>& g_of_s, const LebesgueTriple& triple,
    const Symbol& base, int panels = 0) {
    Symbol cut = resonance_cut_symbol(phase, eps, base);
    double max_phi = phase_max_abs(phase, base.grid);
    double r = triple.r.as_double();
    double r_dual = std::isinf(r) ? 1.0 : r / (r - 1.0);

    ResonancePairing out;
    out.t_values = t_grid;
    for (double t : t_grid) {
        int need = std::max(4, static_cast<int>(std::ceil(t * max_phi / 0.1 / 8.0)));
        int use = panels > 0 ? panels : need;
        if (use < need)
            throw error("time quadrature under-resolved: need >= " + std::to_string(need) +
                        " panels for t=" + std::to_string(t));
        GridFunction acc(base.grid.doubled(), Side::spatial);
        bool first = true;
        auto add = [&](double s, double w) {
            Symbol mod = phase_modulated_symbol(phase, s, cut);
            GridFunction B = apply_bilinear(mod, f_of_s(s), g_of_s(s));
            if (first) {
                acc = B;
                for (cplx& v : acc.values) v *= w;
                first = false;
            } else {
                for (int k = 0; k < acc.n(); ++k) acc.values[k] += w * B.values[k];
            }
        };
        double h = t / use;
        const auto& xs = detail::gl8_nodes();
        const auto& ws = detail::gl8_weights();
        for (int p = 0; p < use; ++p) {
            double c = (p + 0.5) * h;
            for (std::size_t i = 0; i < xs.size(); ++i) add(c + 0.5 * h * xs[i], ws[i] * 0.5 * h);
        }
        double nrm = lp_norm(acc, r_dual);
        out.norms.push_back(nrm);
        out.sup_norm = std::max(out.sup_norm, nrm);
    }
    return out;
}

/// Exact L2 -> Linf norm of the model operator
///   f -> int_0^t int_{|xi| <= eps} e^{is xi^2} fhat(xi) dxi ds,
/// by duality: ( int_{|xi|<=eps} |(1 - e^{it xi^2}) / xi^2|^2 dxi )^{1/2}
///           = t ( 2 int_0^eps |E(t xi^2)|^2 dxi )^{1/2}.
inline double linear_example_norm(double t, double eps) {
    if (!(t >= 0.0) || !(eps > 0.0)) throw error("linear_example_norm: t >= 0, eps > 0 required");
    if (t == 0.0) return 0.0;
    int panels = std::max(16, static_cast<int>(std::ceil(t * eps * eps)) * 4);
    double integral = composite_gauss(
        [&](double xi) {
            cplx e = osc_profile(t * xi * xi);
            return std::norm(e);
        },
        0.0, eps, panels);
    return t * std::sqrt(2.0 * integral);
}

}  // namespace narrowband
