#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "narrowband/grid.hpp"
#include "narrowband/special.hpp"
#include "narrowband/symbols.hpp"

namespace narrowband {

enum class PairingMethod { fft_diagonal_sum, direct_oracle, line_kernel_1d };

struct TrilinearResult {
    cplx value{};
    PairingMethod method = PairingMethod::fft_diagonal_sum;
    int grid_n = 0;
    double L = 0.0;
};

/// 1-D Fourier multiplier m(D) f, same grid.
inline GridFunction apply_multiplier(const GridFunction& f,
                                     const std::function<cplx(double)>& m) {
    GridFunction fh = f.to_frequency();
    for (int j = 0; j < fh.n(); ++j) fh.values[j] *= m(fh.grid.xi(j));
    return f.side == Side::spatial ? fh.to_spatial() : fh;
}

/// Pseudo-product B_m(f, g), returned as a spatial GridFunction on the
/// doubled band [-2L, 2L] (output frequencies xi + eta are kept, not folded).
/// Frequency content: Bhat(w) = (Delta / sqrt(2 pi)) sum_xi m(xi, w - xi)
/// fhat(xi) ghat(w - xi), the banded anti-diagonal sum. Normalization makes
/// B_1(f, g) = f g exactly on the grid.
inline GridFunction apply_bilinear(const Symbol& symbol, const GridFunction& f,
                                   const GridFunction& g) {
    require_same_grid(symbol.grid, f.grid, "apply_bilinear(f)");
    require_same_grid(symbol.grid, g.grid, "apply_bilinear(g)");
    const int n = symbol.grid.n;
    GridFunction fh = f.to_frequency();
    GridFunction gh = g.to_frequency();

    GridFunction out(symbol.grid.doubled(), Side::frequency);
    double scale = symbol.grid.delta() / sqrt_two_pi;
    parallel_for(static_cast<std::size_t>(2 * n - 1), [&](std::size_t MM) {
        int M = static_cast<int>(MM);
        int j_lo = std::max(0, M - n + 1);
        int j_hi = std::min(n - 1, M);
        cplx acc{};
        for (int j = j_lo; j <= j_hi; ++j) {
            cplx mv = symbol.at(j, M - j);
            if (mv != cplx{}) acc += mv * fh.values[j] * gh.values[M - j];
        }
        out.values[M] = scale * acc;
    });
    return out.to_spatial();
}

/// Trilinear form  Delta^2 sum_{xi,eta} m(xi,eta) fhat(xi) ghat(eta)
/// hhat(-xi-eta), with h band-limited to the doubled band. The fft path goes
/// through apply_bilinear and a spatial inner sum; the direct double-sum
/// oracle is the independent reference.
inline TrilinearResult trilinear_pairing(const Symbol& symbol, const GridFunction& f,
                                         const GridFunction& g, const GridFunction& h,
                                         PairingMethod method = PairingMethod::fft_diagonal_sum) {
    require_same_grid(symbol.grid.doubled(), h.grid, "trilinear_pairing(h)");
    TrilinearResult res;
    res.method = method;
    res.grid_n = symbol.grid.n;
    res.L = symbol.grid.L;

    if (method == PairingMethod::direct_oracle) {
        const int n = symbol.grid.n;
        GridFunction fh = f.to_frequency();
        GridFunction gh = g.to_frequency();
        GridFunction hh = h.to_frequency();
        cplx acc{};
        for (int j = 0; j < n; ++j) {
            for (int l = 0; l < n; ++l) {
                cplx mv = symbol.at(j, l);
                if (mv == cplx{}) continue;
                int mstar = (2 * n - j - l) % (2 * n);
                acc += mv * fh.values[j] * gh.values[l] * hh.values[mstar];
            }
        }
        res.value = acc * sq(symbol.grid.delta());
        return res;
    }

    GridFunction B = apply_bilinear(symbol, f, g);
    GridFunction hs = h.to_spatial();
    cplx acc{};
    for (int k = 0; k < B.n(); ++k) acc += B.values[k] * hs.values[k];
    res.value = sqrt_two_pi * acc * B.grid.dx();
    return res;
}

/// The pairing that certifies operator-norm lower bounds: <B_m(f,g), h> as
/// the plain integral of B(f,g) * h. Equals the trilinear form divided by
/// sqrt(2 pi) under the B_1 = fg normalization.
inline cplx operator_pairing(const Symbol& symbol, const GridFunction& f, const GridFunction& g,
                             const GridFunction& h) {
    return trilinear_pairing(symbol, f, g, h).value / sqrt_two_pi;
}

namespace detail {

/// Spatial samples refined by `factor` through frequency zero-padding (exact
/// for band-limited data). Returns samples at x = (k - N/2) * dx / factor.
inline std::vector<cplx> upsampled_spatial(const GridFunction& f, int factor) {
    GridFunction fh = f.to_frequency();
    int n = f.n();
    int N = n * factor;
    std::vector<cplx> big(N, cplx{});
    int off = (N - n) / 2;
    for (int j = 0; j < n; ++j) big[j + off] = fh.values[j];
    std::vector<cplx> out = centered_dft(big, +1);
    double scale = f.grid.delta() / sqrt_two_pi;
    for (auto& v : out) v *= scale;
    return out;
}

struct InterpTable {
    std::vector<cplx> samples;
    double dx = 1.0;
    double half_span = 0.0;

    cplx eval(double x) const {
        if (std::abs(x) >= half_span) return cplx{};
        double u = x / dx + samples.size() / 2.0;
        std::size_t i = static_cast<std::size_t>(u);
        if (i + 1 >= samples.size()) return cplx{};
        double fr = u - i;
        return samples[i] * (1.0 - fr) + samples[i + 1] * fr;
    }
};

inline InterpTable interp_table(const GridFunction& f, int factor) {
    InterpTable t;
    t.samples = upsampled_spatial(f, factor);
    t.dx = f.grid.dx() / factor;
    t.half_span = 0.5 * f.grid.period() - t.dx;
    return t;
}

inline double spatial_tail_mass(const GridFunction& f) {
    GridFunction fs = f.to_spatial();
    double total = 0.0, tail = 0.0;
    double edge = 0.4 * fs.grid.period();
    for (int k = 0; k < fs.n(); ++k) {
        double a = std::abs(fs.values[k]);
        total += a;
        if (std::abs(fs.grid.x(k)) > edge) tail += a;
    }
    return total > 0.0 ? tail / total : 0.0;
}

}  // namespace detail

/// Physical-space oracle for line symbols chi((xi - lambda eta)/eps):
///   (2 pi)^{-1/2} iint eps k(eps y) f(x + y) g(x - lambda y) h(x) dy dx,
/// k(s) = int chi(t) e^{-ist} dt. Composite quadrature in y with linear
/// interpolation for the shifted samples (the documented accuracy limiter).
inline TrilinearResult line_kernel_pairing(double lambda, double eps, const GridFunction& f,
                                           const GridFunction& g, const GridFunction& h,
                                           int upsample = 8) {
    require_same_grid(f.grid, g.grid, "line_kernel_pairing");
    for (const GridFunction* fn : {&f, &g, &h}) {
        double tail = detail::spatial_tail_mass(*fn);
        if (tail > 1e-8)
            throw error("line_kernel_pairing: insufficient decay, tail mass " +
                        std::to_string(tail));
    }

    detail::InterpTable ft = detail::interp_table(f, upsample);
    detail::InterpTable gt = detail::interp_table(g, upsample);
    GridFunction hs = h.to_spatial();

    // y range: where the scaled bump transform and the function tails live.
    double y_max = std::min(bump_transform::support_radius() / eps, 0.49 * f.grid.period());
    double dy = ft.dx;
    int ny = static_cast<int>(y_max / dy);

    double tol_h = 1e-14 * [&] {
        double m = 0.0;
        for (const auto& v : hs.values) m = std::max(m, std::abs(v));
        return std::max(m, 1e-300);
    }();

    std::vector<cplx> partial(hs.n(), cplx{});
    parallel_for(static_cast<std::size_t>(hs.n()), [&](std::size_t kk) {
        int k = static_cast<int>(kk);
        if (std::abs(hs.values[k]) <= tol_h) return;
        double x = hs.grid.x(k);
        cplx inner{};
        for (int iy = -ny; iy <= ny; ++iy) {
            double y = iy * dy;
            double kv = bump_transform::eval(eps * y);
            if (kv == 0.0) continue;
            cplx fv = ft.eval(x + y);
            if (fv == cplx{}) continue;
            cplx gv = gt.eval(x - lambda * y);
            if (gv == cplx{}) continue;
            inner += kv * fv * gv;
        }
        partial[k] = inner * (eps * dy) * hs.values[k];
    });

    cplx acc{};
    for (const cplx& v : partial) acc += v;
    TrilinearResult res;
    res.method = PairingMethod::line_kernel_1d;
    res.grid_n = f.grid.n;
    res.L = f.grid.L;
    res.value = acc * hs.grid.dx() / sqrt_two_pi;
    return res;
}

/// Band-limited evaluation of fhat at an off-grid frequency (finite spatial sum).
inline cplx bandlimited_fourier_eval(const GridFunction& f, double xi) {
    GridFunction fs = f.to_spatial();
    cplx acc{};
    for (int k = 0; k < fs.n(); ++k) {
        double ph = -xi * fs.grid.x(k);
        acc += fs.values[k] * cplx{std::cos(ph), std::sin(ph)};
    }
    return acc * (fs.grid.dx() / sqrt_two_pi);
}

/// Restriction-extension pairing <T_Gamma(f,g), h> =
///   int_Gamma fhat(xi) ghat(eta) hhat(-xi-eta) w dsigma,
/// by arc quadrature with band-limited interpolation of the hat functions.
inline cplx restriction_extension_pairing(const Curve& curve,
                                          const std::function<double(Vec2)>& weight,
                                          const GridFunction& f, const GridFunction& g,
                                          const GridFunction& h, int n_nodes = 0) {
    require_same_grid(f.grid, g.grid, "restriction_extension_pairing");
    require_same_grid(f.grid.doubled(), h.grid, "restriction_extension_pairing(h)");

    // The hat functions vary at the scale of the inverse spatial extent; the
    // worst case over the period is one grid cell Delta, so resolve that.
    int required = std::max(1024, static_cast<int>(std::ceil(4.0 * curve.length() / f.grid.delta())));
    if (n_nodes == 0)
        n_nodes = required;
    else if (n_nodes < required)
        throw error("restriction_extension_pairing under-resolved: need >= " +
                    std::to_string(required) + " arc nodes");

    ArcQuadrature q = arc_quadrature(curve, n_nodes);
    GridFunction fs = f.to_spatial();
    GridFunction gs = g.to_spatial();
    GridFunction hts = h.to_spatial();

    auto hat = [](const GridFunction& fn, double xi) {
        cplx acc{};
        for (int k = 0; k < fn.n(); ++k) {
            double ph = -xi * fn.grid.x(k);
            acc += fn.values[k] * cplx{std::cos(ph), std::sin(ph)};
        }
        return acc * (fn.grid.dx() / sqrt_two_pi);
    };

    std::vector<cplx> partial(q.nodes.size(), cplx{});
    parallel_for(q.nodes.size(), [&](std::size_t i) {
        double w = weight ? weight(q.nodes[i]) : 1.0;
        if (w == 0.0) return;
        double xi = q.nodes[i].x, eta = q.nodes[i].y;
        partial[i] = q.weights[i] * w * hat(fs, xi) * hat(gs, eta) * hat(hts, -xi - eta);
    });
    cplx acc{};
    for (const cplx& v : partial) acc += v;
    return acc;
}

}  // namespace narrowband
