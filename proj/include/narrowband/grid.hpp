#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "narrowband/common.hpp"
#include "narrowband/fft.hpp"

namespace narrowband {

/// Frequency box [-L, L]^2 sampled with n nodes per axis (n a power of two).
/// The same (L, n) pair fixes the 1-D axis grid that sampled functions use:
/// frequency nodes xi_j = (j - n/2) * delta, and the dual spatial nodes
/// x_k = (k - n/2) * dx with dx = 2 pi / (n delta), period 2 pi / delta.
struct FrequencyGrid {
    double L = 2.0;
    int n = 1024;

    FrequencyGrid() = default;
    FrequencyGrid(double half_width, int samples) : L(half_width), n(samples) { validate(); }

    void validate() const {
        if (n < 64 || (n & (n - 1)) != 0)
            throw error("grid n must be a power of two >= 64, got " + std::to_string(n));
        if (L < 2.0) throw error("grid half-width L must be >= 2 to contain unit-ball supports");
    }

    double delta() const { return 2.0 * L / n; }
    double dx() const { return two_pi / (n * delta()); }  // = pi / L
    double period() const { return n * dx(); }

    double xi(int j) const { return (j - n / 2) * delta(); }
    double x(int k) const { return (k - n / 2) * dx(); }

    /// Output grid of a pseudo-product: doubled band, same frequency spacing.
    FrequencyGrid doubled() const {
        FrequencyGrid g;
        g.L = 2.0 * L;
        g.n = 2 * n;
        return g;
    }

    friend bool operator==(const FrequencyGrid& a, const FrequencyGrid& b) {
        return a.L == b.L && a.n == b.n;
    }
    friend bool operator!=(const FrequencyGrid& a, const FrequencyGrid& b) { return !(a == b); }
};

enum class Side { spatial, frequency };

/// Complex function sampled on the 1-D periodic grid dual to a FrequencyGrid.
/// The transform pair is unitary with the cell weights dx and delta:
///   fhat_j = (dx / sqrt(2 pi)) sum_k f_k exp(-i xi_j x_k)
///   f_k    = (delta / sqrt(2 pi)) sum_j fhat_j exp(+i xi_j x_k)
/// so the weighted discrete L2 norms agree on both sides (Parseval).
struct GridFunction {
    FrequencyGrid grid;
    Side side = Side::spatial;
    std::vector<cplx> values;

    GridFunction() = default;
    GridFunction(const FrequencyGrid& g, Side s) : grid(g), side(s), values(g.n, cplx{}) {}

    int n() const { return grid.n; }

    static GridFunction from_spatial(const FrequencyGrid& g,
                                     const std::function<cplx(double)>& fn) {
        GridFunction f(g, Side::spatial);
        for (int k = 0; k < g.n; ++k) f.values[k] = fn(g.x(k));
        return f;
    }

    static GridFunction from_frequency(const FrequencyGrid& g,
                                       const std::function<cplx(double)>& fn) {
        GridFunction f(g, Side::frequency);
        for (int j = 0; j < g.n; ++j) f.values[j] = fn(g.xi(j));
        return f;
    }

    /// Unit-mass spatial delta: 1/dx at one cell, so the discrete L1 norm is 1.
    static GridFunction delta_at(const FrequencyGrid& g, int cell) {
        GridFunction f(g, Side::spatial);
        f.values[cell] = cplx{1.0 / g.dx(), 0.0};
        return f;
    }

    GridFunction to_frequency() const {
        if (side == Side::frequency) return *this;
        GridFunction out(grid, Side::frequency);
        out.values = centered_dft(values, -1);
        double scale = grid.dx() / sqrt_two_pi;
        for (auto& v : out.values) v *= scale;
        return out;
    }

    GridFunction to_spatial() const {
        if (side == Side::spatial) return *this;
        GridFunction out(grid, Side::spatial);
        out.values = centered_dft(values, +1);
        double scale = grid.delta() / sqrt_two_pi;
        for (auto& v : out.values) v *= scale;
        return out;
    }

    /// Exact band-limited resampling onto the doubled grid (spectrum embedding).
    GridFunction resample_to_doubled() const {
        GridFunction fh = to_frequency();
        FrequencyGrid g2 = grid.doubled();
        GridFunction out(g2, Side::frequency);
        int off = grid.n / 2;  // xi_j on the n-grid sits at index j + n/2 on the 2n-grid
        for (int j = 0; j < grid.n; ++j) out.values[j + off] = fh.values[j];
        if (side == Side::spatial) return out.to_spatial();
        return out;
    }
};

inline void require_same_grid(const FrequencyGrid& a, const FrequencyGrid& b,
                              const char* what) {
    if (a != b)
        throw error(std::string("grid mismatch in ") + what + ": (L=" + std::to_string(a.L) +
                    ", n=" + std::to_string(a.n) + ") vs (L=" + std::to_string(b.L) +
                    ", n=" + std::to_string(b.n) + ")");
}

}  // namespace narrowband
