#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "narrowband/geometry.hpp"
#include "narrowband/grid.hpp"
#include "narrowband/special.hpp"

namespace narrowband {

enum class SymbolClass { M_eps, N_eps, exact_line, bochner_riesz, singular, custom };

inline const char* symbol_class_name(SymbolClass c) {
    switch (c) {
        case SymbolClass::M_eps: return "M_eps";
        case SymbolClass::N_eps: return "N_eps";
        case SymbolClass::exact_line: return "exact_line";
        case SymbolClass::bochner_riesz: return "bochner_riesz";
        case SymbolClass::singular: return "singular";
        default: return "custom";
    }
}

/// Compact region for Bochner-Riesz symbols.
struct Region {
    enum class Kind { disc, polygon };
    Kind kind = Kind::disc;
    Vec2 center;
    double radius = 1.0;
    std::vector<Vec2> vertices;  // polygon, counter-clockwise

    static Region disc(Vec2 c, double r) {
        Region k;
        k.kind = Kind::disc;
        k.center = c;
        k.radius = r;
        return k;
    }

    static Region polygon(std::vector<Vec2> vs) {
        Region k;
        k.kind = Kind::polygon;
        k.vertices = std::move(vs);
        return k;
    }

    bool contains(Vec2 p) const {
        if (kind == Kind::disc) return (p - center).norm() <= radius;
        bool in = false;
        std::size_t m = vertices.size();
        for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
            const Vec2 &a = vertices[i], &b = vertices[j];
            if ((a.y > p.y) != (b.y > p.y) &&
                p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
                in = !in;
        }
        return in;
    }

    double boundary_distance(Vec2 p) const {
        if (kind == Kind::disc) return std::abs(radius - (p - center).norm());
        double best = std::numeric_limits<double>::infinity();
        std::size_t m = vertices.size();
        for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
            Vec2 a = vertices[j], b = vertices[i];
            Vec2 ab = b - a;
            double tt = dot(p - a, ab) / std::max(dot(ab, ab), 1e-300);
            tt = std::clamp(tt, 0.0, 1.0);
            best = std::min(best, (p - (a + tt * ab)).norm());
        }
        return best;
    }

    /// Smooth boundary curve handle (discs only; polygon corners are not C^2).
    std::optional<Curve> boundary_curve() const {
        if (kind == Kind::disc) return Curve::make_circle(center, radius, "region-boundary");
        return std::nullopt;
    }
};

/// A sampled symbol on the frequency box, with the metadata the class checks
/// and the scaling laboratory need. Values are immutable after construction
/// by convention; row-major with xi as the first index: values[j * n + l].
struct Symbol {
    FrequencyGrid grid;
    std::vector<cplx> values;
    double epsilon = 1.0;
    SymbolClass claimed_class = SymbolClass::custom;
    std::optional<Curve> curve;
    std::optional<double> line_lambda;
    std::optional<Region> region;
    double kappa = 0.0;
    double distance_cap = 1.0;

    Symbol() = default;
    explicit Symbol(const FrequencyGrid& g) : grid(g), values(static_cast<std::size_t>(g.n) * g.n) {}

    int n() const { return grid.n; }
    cplx at(int j, int l) const { return values[static_cast<std::size_t>(j) * grid.n + l]; }
    cplx& at(int j, int l) { return values[static_cast<std::size_t>(j) * grid.n + l]; }

    static Symbol from_function(const FrequencyGrid& g, const std::function<cplx(double, double)>& fn,
                                SymbolClass cls = SymbolClass::custom, double eps = 1.0) {
        Symbol s(g);
        s.claimed_class = cls;
        s.epsilon = eps;
        for (int j = 0; j < g.n; ++j) {
            double xi = g.xi(j);
            for (int l = 0; l < g.n; ++l) s.at(j, l) = fn(xi, g.xi(l));
        }
        return s;
    }

    static Symbol constant(const FrequencyGrid& g, cplx v) {
        Symbol s(g);
        s.claimed_class = SymbolClass::custom;
        std::fill(s.values.begin(), s.values.end(), v);
        return s;
    }

    double sup_abs() const {
        double m = 0.0;
        for (const cplx& v : values) m = std::max(m, std::abs(v));
        return m;
    }

    /// Discrete area of the support, Delta^2 * #nonzero cells.
    double support_area(double rel_tol = 1e-14) const {
        double tol = rel_tol * sup_abs();
        std::size_t count = 0;
        for (const cplx& v : values)
            if (std::abs(v) > tol) ++count;
        return count * sq(grid.delta());
    }

    /// Type invariants for the narrow classes: bounded values and support
    /// inside the 2 eps neighborhood of the generating curve.
    void check_narrow_class_invariants(double value_bound = 2.0) const {
        if (claimed_class != SymbolClass::M_eps && claimed_class != SymbolClass::N_eps) return;
        if (!curve) throw error("narrow-class symbol lacks a curve reference");
        double tol = 1e-13 * std::max(1.0, sup_abs());
        for (int j = 0; j < grid.n; ++j) {
            for (int l = 0; l < grid.n; ++l) {
                cplx v = at(j, l);
                if (std::abs(v) <= tol) continue;
                if (std::abs(v) > value_bound)
                    throw error("symbol exceeds the class value bound");
                if (curve->distance({grid.xi(j), grid.xi(l)}) > 2.0 * epsilon)
                    throw error("symbol support escapes the 2 eps neighborhood");
            }
        }
    }
};

namespace detail {

/// Enforces the tube resolution rule: at least 8 cells across the 2 eps wide
/// tube, i.e. Delta <= eps / 4.
inline void require_tube_resolution(const FrequencyGrid& grid, double eps) {
    if (grid.delta() > eps / 4.0 + 1e-15) {
        int need = 1;
        while (2.0 * grid.L / need > eps / 4.0) need *= 2;
        throw error("grid too coarse for epsilon=" + std::to_string(eps) +
                    ": need n >= " + std::to_string(need) + " at L=" + std::to_string(grid.L));
    }
}

/// Uniform spatial bins over the curve quadrature nodes, for fast
/// near-neighbor sweeps in the convolved-measure builder.
struct NodeBuckets {
    double cell = 1.0;
    double x0 = 0.0, y0 = 0.0;
    int nx = 1, ny = 1;
    std::vector<std::vector<int>> bins;

    NodeBuckets(const std::vector<Vec2>& nodes, double cell_size) : cell(cell_size) {
        double x1 = -1e300, y1 = -1e300;
        x0 = 1e300;
        y0 = 1e300;
        for (const Vec2& p : nodes) {
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        nx = std::max(1, static_cast<int>((x1 - x0) / cell) + 1);
        ny = std::max(1, static_cast<int>((y1 - y0) / cell) + 1);
        bins.resize(static_cast<std::size_t>(nx) * ny);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            bins[index_of(nodes[i])].push_back(static_cast<int>(i));
    }

    std::size_t index_of(Vec2 p) const {
        int ix = std::clamp(static_cast<int>((p.x - x0) / cell), 0, nx - 1);
        int iy = std::clamp(static_cast<int>((p.y - y0) / cell), 0, ny - 1);
        return static_cast<std::size_t>(iy) * nx + ix;
    }

    template <typename Fn>
    void for_each_near(Vec2 p, Fn&& fn) const {
        int ix = static_cast<int>(std::floor((p.x - x0) / cell));
        int iy = static_cast<int>(std::floor((p.y - y0) / cell));
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                int jx = ix + dx, jy = iy + dy;
                if (jx < 0 || jy < 0 || jx >= nx || jy >= ny) continue;
                for (int i : bins[static_cast<std::size_t>(jy) * nx + jx]) fn(i);
            }
        }
    }
};

inline std::pair<Vec2, Vec2> curve_bbox(const Curve& curve, double pad) {
    Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
    for (int i = 0; i <= 1024; ++i) {
        Vec2 p = curve.point(i / 1024.0);
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
    }
    return {lo - Vec2{pad, pad}, hi + Vec2{pad, pad}};
}

inline int grid_index_floor(const FrequencyGrid& g, double v) {
    return std::clamp(static_cast<int>(std::floor(v / g.delta())) + g.n / 2, 0, g.n - 1);
}

}  // namespace detail

/// Tube symbol chi(nu / eps) with a smooth cutoff to the unit ball.
/// chi defaults to the plateau bump (1 on [0,1/2], 0 on [1,inf)).
inline Symbol build_tube_symbol(const Curve& curve, double eps, const FrequencyGrid& grid,
                                const std::function<double(double)>& profile = nullptr) {
    if (eps > curve.reach())
        throw error("epsilon exceeds the curve reach " + std::to_string(curve.reach()));
    detail::require_tube_resolution(grid, eps);
    auto chi = profile ? profile : [](double t) { return plateau_bump(t); };

    Symbol s(grid);
    s.claimed_class = SymbolClass::M_eps;
    s.epsilon = eps;
    s.curve = curve;

    auto [lo, hi] = detail::curve_bbox(curve, 1.5 * eps);
    int j0 = detail::grid_index_floor(grid, lo.x), j1 = detail::grid_index_floor(grid, hi.x);
    int l0 = detail::grid_index_floor(grid, lo.y), l1 = detail::grid_index_floor(grid, hi.y);
    parallel_for(static_cast<std::size_t>(j1 - j0 + 1), [&](std::size_t jj) {
        int j = j0 + static_cast<int>(jj);
        double xi = grid.xi(j);
        for (int l = l0; l <= l1; ++l) {
            double eta = grid.xi(l);
            double cut = ball_cutoff(xi, eta);
            if (cut == 0.0) continue;
            double nu = curve.distance({xi, eta});
            if (nu >= eps) continue;
            double v = chi(nu / eps) * cut;
            if (v != 0.0) s.at(j, l) = v;
        }
    });
    return s;
}

/// Mollified arc-length symbol
///   m_eps = eps^{-1} int_Gamma phi((. - s) / eps) w(s) dsigma(s),
/// with phi the radial plateau bump. The default weight is the unit-ball
/// cutoff restricted to the curve, keeping the support compact.
inline Symbol build_convolved_measure_symbol(
    const Curve& curve, double eps, const FrequencyGrid& grid,
    const std::function<double(Vec2)>& weight = nullptr) {
    if (eps > curve.reach())
        throw error("epsilon exceeds the curve reach " + std::to_string(curve.reach()));
    detail::require_tube_resolution(grid, eps);

    int n_arc = std::max(64, static_cast<int>(std::ceil(curve.length() / (eps / 8.0))));
    ArcQuadrature q = arc_quadrature(curve, n_arc);
    std::vector<double> node_weight(q.nodes.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        double w = weight ? weight(q.nodes[i]) : ball_cutoff(q.nodes[i].x, q.nodes[i].y);
        node_weight[i] = q.weights[i] * w;
    }
    detail::NodeBuckets buckets(q.nodes, eps);

    Symbol s(grid);
    s.claimed_class = SymbolClass::N_eps;
    s.epsilon = eps;
    s.curve = curve;

    auto [lo, hi] = detail::curve_bbox(curve, 1.5 * eps);
    int j0 = detail::grid_index_floor(grid, lo.x), j1 = detail::grid_index_floor(grid, hi.x);
    int l0 = detail::grid_index_floor(grid, lo.y), l1 = detail::grid_index_floor(grid, hi.y);
    parallel_for(static_cast<std::size_t>(j1 - j0 + 1), [&](std::size_t jj) {
        int j = j0 + static_cast<int>(jj);
        double xi = grid.xi(j);
        for (int l = l0; l <= l1; ++l) {
            Vec2 p{xi, grid.xi(l)};
            double acc = 0.0;
            buckets.for_each_near(p, [&](int i) {
                double r = (p - q.nodes[i]).norm() / eps;
                if (r < 1.0) acc += node_weight[i] * plateau_bump(r);
            });
            if (acc != 0.0) s.at(j, l) = acc / eps;
        }
    });
    return s;
}

/// Line symbol chi((xi - lambda eta) / eps) with the unit-ball cutoff.
inline Symbol build_line_symbol(double lambda, double eps, const FrequencyGrid& grid,
                                const std::function<double(double)>& profile = nullptr) {
    detail::require_tube_resolution(grid, eps);
    auto chi = profile ? profile : [](double t) { return plateau_bump(t); };
    Symbol s(grid);
    s.claimed_class = SymbolClass::exact_line;
    s.epsilon = eps;
    s.line_lambda = lambda;
    s.curve = Curve::make_line(lambda, -1.0, 1.0);
    for (int j = 0; j < grid.n; ++j) {
        double xi = grid.xi(j);
        for (int l = 0; l < grid.n; ++l) {
            double eta = grid.xi(l);
            double cut = ball_cutoff(xi, eta);
            if (cut == 0.0) continue;
            double v = chi((xi - lambda * eta) / eps) * cut;
            if (v != 0.0) s.at(j, l) = v;
        }
    }
    return s;
}

/// Bochner-Riesz symbol chi_K(x) * min(dist(x, dK), cap)^kappa. The default
/// cap = 1 never binds for regions inside the unit ball, so this is the plain
/// boundary-regularized cutoff; experiments pass a smaller boundary-layer cap.
inline Symbol build_bochner_riesz(const Region& K, double kappa, const FrequencyGrid& grid,
                                  double distance_cap = 1.0) {
    if (kappa < 0.0) throw error("build_bochner_riesz: kappa must be >= 0");
    Symbol s(grid);
    s.claimed_class = SymbolClass::bochner_riesz;
    s.kappa = kappa;
    s.region = K;
    s.distance_cap = distance_cap;
    s.curve = K.boundary_curve();
    s.epsilon = 1.0;
    for (int j = 0; j < grid.n; ++j) {
        double xi = grid.xi(j);
        for (int l = 0; l < grid.n; ++l) {
            Vec2 p{xi, grid.xi(l)};
            if (!K.contains(p)) continue;
            if (kappa == 0.0) {
                s.at(j, l) = 1.0;
            } else {
                double d = std::min(K.boundary_distance(p), distance_cap);
                s.at(j, l) = std::pow(d, kappa);
            }
        }
    }
    return s;
}

struct WhitneyLayers {
    std::vector<Symbol> layers;  // layer n supported where dist(., dK) ~ 2^-n
    int n_max = 0;
    double innermost_sup = 0.0;  // sup of the catch-all layer (unresolvable mass)
};

/// Dyadic boundary-distance partition of a Bochner-Riesz symbol. Layers sum
/// to the input pointwise; layer n is an M_{2^-n} symbol of the boundary.
/// The innermost layer absorbs everything below the grid-resolvable scale
/// 2^-n_max >= 8 Delta.
inline WhitneyLayers whitney_layers(const Symbol& symbol) {
    if (!symbol.region) throw error("whitney_layers needs a symbol built by build_bochner_riesz");
    const Region& K = *symbol.region;
    const FrequencyGrid& g = symbol.grid;

    int n_max = 0;
    while (std::pow(2.0, -(n_max + 1)) >= 8.0 * g.delta()) ++n_max;

    auto rise = [](double u) { return smooth_step_down(2.0 * (1.0 - u)); };  // 0 at u<=1/2, 1 at u>=1

    WhitneyLayers out;
    out.n_max = n_max;
    out.layers.assign(n_max + 1, Symbol(g));
    for (int n = 0; n <= n_max; ++n) {
        out.layers[n].claimed_class = SymbolClass::M_eps;
        out.layers[n].epsilon = std::pow(2.0, -n);
        out.layers[n].curve = symbol.curve;
        out.layers[n].region = symbol.region;
    }

    for (int j = 0; j < g.n; ++j) {
        double xi = g.xi(j);
        for (int l = 0; l < g.n; ++l) {
            cplx v = symbol.at(j, l);
            if (v == cplx{}) continue;
            double d = K.boundary_distance({xi, g.xi(l)});
            double prev = rise(d);  // a_0
            out.layers[0].at(j, l) = v * prev;
            for (int n = 1; n < n_max; ++n) {
                double a = rise(d * std::pow(2.0, n));
                out.layers[n].at(j, l) = v * (a - prev);
                prev = a;
            }
            out.layers[n_max].at(j, l) = v * (1.0 - prev);
        }
    }
    out.innermost_sup = out.layers[n_max].sup_abs();
    return out;
}

/// Singular symbol Phi(x) dist(x, Gamma)^{-alpha}. Cells that may intersect
/// the curve get the 4x4 subsampled cell average.
inline Symbol build_singular_symbol(const Curve& curve, double alpha, const FrequencyGrid& grid,
                                    const std::function<double(Vec2)>& cutoff = nullptr) {
    if (!(alpha > 0.0) || alpha >= 1.0)
        throw error("build_singular_symbol: need 0 < alpha < 1 for local integrability");
    auto Phi = cutoff ? cutoff : [](Vec2 p) { return ball_cutoff(p.x, p.y); };
    Symbol s(grid);
    s.claimed_class = SymbolClass::singular;
    s.epsilon = 1.0;
    s.curve = curve;
    double dl = grid.delta();
    double floor_d = dl / 32.0;
    parallel_for(static_cast<std::size_t>(grid.n), [&](std::size_t jj) {
        int j = static_cast<int>(jj);
        double xi = grid.xi(j);
        for (int l = 0; l < grid.n; ++l) {
            Vec2 p{xi, grid.xi(l)};
            double phi = Phi(p);
            if (phi == 0.0) continue;
            double d = curve.distance(p);
            if (d > dl) {
                s.at(j, l) = phi * std::pow(d, -alpha);
            } else {
                double acc = 0.0;
                for (int a = 0; a < 4; ++a) {
                    for (int b = 0; b < 4; ++b) {
                        Vec2 sub{p.x + (a - 1.5) * dl / 4.0, p.y + (b - 1.5) * dl / 4.0};
                        acc += std::pow(std::max(curve.distance(sub), floor_d), -alpha);
                    }
                }
                s.at(j, l) = phi * acc / 16.0;
            }
        }
    });
    return s;
}

/// Measured regularity constants of a sampled symbol (finite differences).
struct ClassReport {
    std::map<std::pair<int, int>, double> derivative_constants;  // sup |d^(a,b) m| * eps^(a+b)
    double tangential_constant = 0.0;  // sup |<(grad nu)^perp, grad m>|, unscaled
    double support_excess = 0.0;       // max distance to the curve over the support
    double sup_value = 0.0;
    bool pass = false;
};

struct ClassCeilings {
    double value_bound = 2.0;
    double derivative_bound = 0.0;   // ceiling on eps-scaled derivative constants
    double tangential_bound = 0.0;   // N_eps only
    double support_factor = 2.0;     // support within support_factor * eps of the curve
};

/// Reference-based ceilings: 10x the constants measured at the coarsest eps,
/// so "pass" asserts eps-uniformity rather than an absolute bound.
inline ClassCeilings ceilings_from_reference(const ClassReport& coarse, double factor = 10.0) {
    ClassCeilings c;
    double dmax = 0.0;
    for (const auto& [idx, v] : coarse.derivative_constants)
        if (idx.first + idx.second >= 1) dmax = std::max(dmax, v);
    c.derivative_bound = factor * dmax;
    c.tangential_bound = factor * std::max(coarse.tangential_constant, 1e-6);
    c.value_bound = std::max(2.0, factor * coarse.sup_value);
    return c;
}

/// Finite-difference class verification: grid-axis derivatives up to |alpha|
/// <= order (first derivatives with the 5-point fourth-order stencil) and the
/// tangential directional derivative against the curve's normal frame.
inline ClassReport verify_class(const Symbol& symbol, int order = 2,
                                std::optional<ClassCeilings> ceilings = std::nullopt) {
    if (!symbol.curve) throw error("verify_class needs a symbol with a curve reference");
    const Curve& curve = *symbol.curve;
    const FrequencyGrid& g = symbol.grid;
    const double dl = g.delta();
    const double eps = symbol.epsilon;
    const int n = g.n;

    double sup = symbol.sup_abs();
    double support_tol = 1e-13 * std::max(sup, 1e-300);
    double reach = curve.reach();

    int nthreads = effective_threads();
    struct Acc {
        std::map<std::pair<int, int>, double> d;
        double tang = 0.0;
        double excess = 0.0;
    };
    std::vector<Acc> accs(std::max(1, nthreads));

    std::atomic<std::size_t> row{2};
    auto work = [&](std::size_t slot) {
        Acc& acc = accs[slot];
        for (;;) {
            std::size_t j = row.fetch_add(1);
            if (j >= static_cast<std::size_t>(n - 2)) return;
            double xi = g.xi(static_cast<int>(j));
            for (int l = 2; l < n - 2; ++l) {
                if (std::abs(symbol.at(static_cast<int>(j), l)) <= support_tol) continue;
                int jj = static_cast<int>(j);
                auto m = [&](int a, int b) { return symbol.at(jj + a, l + b); };

                cplx dxi = (-m(2, 0) + 8.0 * m(1, 0) - 8.0 * m(-1, 0) + m(-2, 0)) / (12.0 * dl);
                cplx deta = (-m(0, 2) + 8.0 * m(0, 1) - 8.0 * m(0, -1) + m(0, -2)) / (12.0 * dl);
                auto take = [&](int a, int b, double v) {
                    double& slot_v = acc.d[{a, b}];
                    slot_v = std::max(slot_v, v * std::pow(eps, a + b));
                };
                take(0, 0, std::abs(m(0, 0)));
                if (order >= 1) {
                    take(1, 0, std::abs(dxi));
                    take(0, 1, std::abs(deta));
                }
                if (order >= 2) {
                    cplx dxx = (m(1, 0) - 2.0 * m(0, 0) + m(-1, 0)) / (dl * dl);
                    cplx dee = (m(0, 1) - 2.0 * m(0, 0) + m(0, -1)) / (dl * dl);
                    cplx dxe = (m(1, 1) - m(1, -1) - m(-1, 1) + m(-1, -1)) / (4.0 * dl * dl);
                    take(2, 0, std::abs(dxx));
                    take(0, 2, std::abs(dee));
                    take(1, 1, std::abs(dxe));
                }

                Vec2 p{xi, g.xi(l)};
                double nu = curve.distance(p);
                acc.excess = std::max(acc.excess, nu);
                if (nu <= reach) {
                    NormalFrame fr = normal_frame(curve, p);
                    double tang = std::abs(fr.tangential.x * dxi + fr.tangential.y * deta);
                    acc.tang = std::max(acc.tang, tang);
                }
            }
        }
    };
    if (nthreads <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t));
        for (auto& t : pool) t.join();
    }

    ClassReport rep;
    rep.sup_value = sup;
    for (const Acc& a : accs) {
        for (const auto& [idx, v] : a.d) {
            double& slot_v = rep.derivative_constants[idx];
            slot_v = std::max(slot_v, v);
        }
        rep.tangential_constant = std::max(rep.tangential_constant, a.tang);
        rep.support_excess = std::max(rep.support_excess, a.excess);
    }

    if (ceilings) {
        const ClassCeilings& c = *ceilings;
        bool ok = rep.sup_value <= c.value_bound &&
                  rep.support_excess <= c.support_factor * eps + dl;
        for (const auto& [idx, v] : rep.derivative_constants)
            if (idx.first + idx.second >= 1 && v > c.derivative_bound) ok = false;
        if (symbol.claimed_class == SymbolClass::N_eps && c.tangential_bound > 0.0 &&
            rep.tangential_constant > c.tangential_bound)
            ok = false;
        rep.pass = ok;
    }
    return rep;
}

}  // namespace narrowband
