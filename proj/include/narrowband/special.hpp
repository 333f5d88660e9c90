#pragma once

#include <array>
#include <cmath>
#include <mutex>
#include <vector>

#include "narrowband/common.hpp"

namespace narrowband {

/// Smooth step: 1 for s <= 0, 0 for s >= 1, C-infinity in between
/// (the classical exp(-1/s) partition function).
inline double smooth_step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    double a = std::exp(-1.0 / (1.0 - s));
    double b = std::exp(-1.0 / s);
    return a / (a + b);
}

/// Even plateau bump: 1 on [-1/2, 1/2], 0 outside (-1, 1).
inline double plateau_bump(double t) {
    return smooth_step_down(2.0 * std::abs(t) - 1.0);
}

/// Radial plateau bump on the plane: 1 on B(0,1/2), 0 off B(0,1).
inline double radial_bump(double x, double y) { return plateau_bump(std::hypot(x, y)); }

/// Smooth cutoff to the unit ball: 1 on B(0,3/4), 0 off B(0,1).
/// Used to keep symbol supports compact inside the frequency box.
inline double ball_cutoff(double x, double y) {
    return smooth_step_down(4.0 * (std::hypot(x, y) - 0.75));
}

namespace detail {

inline const std::array<double, 8>& gl8_nodes() {
    static const std::array<double, 8> x = {
        -0.9602898564975362316835609, -0.7966664774136267395915539, -0.5255324099163289858177390,
        -0.1834346424956498049394761, 0.1834346424956498049394761,  0.5255324099163289858177390,
        0.7966664774136267395915539,  0.9602898564975362316835609};
    return x;
}

inline const std::array<double, 8>& gl8_weights() {
    static const std::array<double, 8> w = {
        0.1012285362903762591525314, 0.2223810344533744705443560, 0.3137066458778872873379622,
        0.3626837833783619829651504, 0.3626837833783619829651504, 0.3137066458778872873379622,
        0.2223810344533744705443560, 0.1012285362903762591525314};
    return w;
}

}  // namespace detail

/// Composite 8-point Gauss-Legendre quadrature of fn over [a,b] with `panels` panels.
template <typename Fn>
auto composite_gauss(Fn&& fn, double a, double b, int panels) -> decltype(fn(0.0)) {
    using R = decltype(fn(0.0));
    R acc{};
    double h = (b - a) / panels;
    const auto& xs = detail::gl8_nodes();
    const auto& ws = detail::gl8_weights();
    for (int p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < xs.size(); ++i)
            acc += ws[i] * fn(c + 0.5 * h * xs[i]);
    }
    return acc * (0.5 * h);
}

/// int_{-1}^{1} plateau_bump(t) dt.
inline double plateau_bump_mass_1d() {
    static const double v =
        composite_gauss([](double t) { return plateau_bump(t); }, -1.0, 1.0, 64);
    return v;
}

/// int_{R^2} radial_bump = 2 pi int_0^1 plateau_bump(r) r dr.
inline double radial_bump_mass_2d() {
    static const double v =
        two_pi * composite_gauss([](double r) { return plateau_bump(r) * r; }, 0.0, 1.0, 64);
    return v;
}

/// k(s) = int_{-1}^{1} plateau_bump(t) exp(-i s t) dt: real and even in s.
/// Direct oscillation-resolving quadrature, cached on a uniform table.
class bump_transform {
  public:
    static double eval(double s) { return instance().value(std::abs(s)); }

    /// |s| beyond which the table treats k as zero.
    static double support_radius() { return instance().s_max_; }

  private:
    bump_transform() {
        s_max_ = 400.0;
        ds_ = 0.02;
        std::size_t count = static_cast<std::size_t>(s_max_ / ds_) + 2;
        table_.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            double s = i * ds_;
            int panels = 8 + static_cast<int>(s / 4.0);
            table_[i] = composite_gauss(
                [s](double t) { return plateau_bump(t) * std::cos(s * t); }, -1.0, 1.0, panels);
        }
    }

    static const bump_transform& instance() {
        static bump_transform k;
        return k;
    }

    double value(double s) const {
        if (s >= s_max_) return 0.0;
        double u = s / ds_;
        std::size_t i = static_cast<std::size_t>(u);
        double f = u - i;
        return table_[i] * (1.0 - f) + table_[i + 1] * f;
    }

    double s_max_ = 0.0;
    double ds_ = 0.0;
    std::vector<double> table_;
};

}  // namespace narrowband
