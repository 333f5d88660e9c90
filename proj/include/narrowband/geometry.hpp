#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "narrowband/common.hpp"
#include "narrowband/special.hpp"

namespace narrowband {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    double norm() const { return std::hypot(x, y); }
    Vec2 unit() const {
        double m = norm();
        return {x / m, y / m};
    }
    Vec2 perp() const { return {-y, x}; }
    friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
    friend double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
};

/// Degenerate tangent directions. The label names the frequency-plane axis the
/// tangent is parallel to: xi_axis means tangent along (0,1) (the {xi = 0}
/// axis), eta_axis along (1,0), antidiagonal along (1,-1).
enum class DegenerateAxis { xi_axis, eta_axis, antidiagonal };

inline const char* axis_name(DegenerateAxis a) {
    switch (a) {
        case DegenerateAxis::xi_axis: return "xi_axis";
        case DegenerateAxis::eta_axis: return "eta_axis";
        default: return "antidiagonal";
    }
}

inline Vec2 axis_direction(DegenerateAxis a) {
    switch (a) {
        case DegenerateAxis::xi_axis: return {0.0, 1.0};
        case DegenerateAxis::eta_axis: return {1.0, 0.0};
        default: return Vec2{1.0, -1.0}.unit();
    }
}

struct CharacteristicPoint {
    double t = 0.0;
    DegenerateAxis axis = DegenerateAxis::xi_axis;
    Vec2 location;
};

/// A sub-arc whose tangent is degenerate throughout (e.g. a degenerate line).
struct CharacteristicInterval {
    double t0 = 0.0;
    double t1 = 1.0;
    DegenerateAxis axis = DegenerateAxis::xi_axis;
};

struct CharacteristicSet {
    std::vector<CharacteristicPoint> points;
    std::vector<CharacteristicInterval> intervals;
};

struct NormalFrame {
    double nu = 0.0;     // distance to the curve
    Vec2 grad_nu;        // unit normal direction (outward by continuity on the curve)
    Vec2 tangential;     // (grad_nu)^perp
    Vec2 foot;           // nearest point on the curve
};

enum class CurveKind { circle, line, graph };

/// Analytic plane curve: circle, line xi = lambda * eta, or polynomial graph
/// eta = phi(xi). Regime tags (curvature, characteristic points) are decided
/// from the analytic family, so curves are never given as point clouds.
struct Curve {
    CurveKind kind = CurveKind::circle;
    std::string name;

    // circle
    Vec2 center{0.0, 1.0};
    double radius = 1.0;

    // line {(lambda * s, s) : s in [t_lo, t_hi]}
    double lambda = 1.0;
    double t_lo = -1.0;
    double t_hi = 1.0;

    // graph eta = phi(xi), phi given by polynomial coefficients (ascending)
    std::vector<double> coeffs;
    double xi_lo = -0.5;
    double xi_hi = 0.5;

    static Curve make_circle(Vec2 c, double r, std::string nm = "circle") {
        Curve g;
        g.kind = CurveKind::circle;
        g.center = c;
        g.radius = r;
        g.name = std::move(nm);
        g.validate();
        return g;
    }

    static Curve make_line(double lam, double lo, double hi, std::string nm = "line") {
        Curve g;
        g.kind = CurveKind::line;
        g.lambda = lam;
        g.t_lo = lo;
        g.t_hi = hi;
        g.name = std::move(nm);
        g.validate();
        return g;
    }

    static Curve make_graph(std::vector<double> cs, double lo, double hi,
                            std::string nm = "graph") {
        Curve g;
        g.kind = CurveKind::graph;
        g.coeffs = std::move(cs);
        g.xi_lo = lo;
        g.xi_hi = hi;
        g.name = std::move(nm);
        g.validate();
        return g;
    }

    bool closed() const { return kind == CurveKind::circle; }

    double poly(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;) v = v * x + coeffs[i];
        return v;
    }
    double poly_d1(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 1;) v = v * x + i * coeffs[i];
        return v;
    }
    double poly_d2(double x) const {
        double v = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 2;) v = v * x + i * (i - 1) * coeffs[i];
        return v;
    }

    Vec2 point(double t) const {
        switch (kind) {
            case CurveKind::circle: {
                double th = two_pi * t;
                return center + radius * Vec2{std::cos(th), std::sin(th)};
            }
            case CurveKind::line: {
                double s = t_lo + t * (t_hi - t_lo);
                return {lambda * s, s};
            }
            default: {
                double x = xi_lo + t * (xi_hi - xi_lo);
                return {x, poly(x)};
            }
        }
    }

    Vec2 derivative(double t) const {
        switch (kind) {
            case CurveKind::circle: {
                double th = two_pi * t;
                return (two_pi * radius) * Vec2{-std::sin(th), std::cos(th)};
            }
            case CurveKind::line:
                return (t_hi - t_lo) * Vec2{lambda, 1.0};
            default: {
                double x = xi_lo + t * (xi_hi - xi_lo);
                double w = xi_hi - xi_lo;
                return {w, w * poly_d1(x)};
            }
        }
    }

    Vec2 second_derivative(double t) const {
        switch (kind) {
            case CurveKind::circle: {
                double th = two_pi * t;
                return (sq(two_pi) * radius) * Vec2{-std::cos(th), -std::sin(th)};
            }
            case CurveKind::line:
                return {0.0, 0.0};
            default: {
                double x = xi_lo + t * (xi_hi - xi_lo);
                double w = xi_hi - xi_lo;
                return {0.0, w * w * poly_d2(x)};
            }
        }
    }

    double curvature(double t) const {
        Vec2 d1 = derivative(t);
        Vec2 d2 = second_derivative(t);
        double speed = d1.norm();
        return std::abs(cross(d1, d2)) / (speed * speed * speed);
    }

    double max_curvature() const {
        double m = 0.0;
        for (int i = 0; i <= 2048; ++i) m = std::max(m, curvature(i / 2048.0));
        return m;
    }

    double min_curvature() const {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 2048; ++i) m = std::min(m, curvature(i / 2048.0));
        return m;
    }

    /// Radius inside which the nearest point on the curve is unique.
    /// Default policy: 1 / (2 max curvature), unbounded for straight lines.
    double reach() const {
        double mc = max_curvature();
        if (mc <= 1e-14) return std::numeric_limits<double>::infinity();
        return 0.5 / mc;
    }

    double length() const {
        switch (kind) {
            case CurveKind::circle:
                return two_pi * radius;
            case CurveKind::line:
                return (t_hi - t_lo) * std::hypot(lambda, 1.0);
            default:
                return composite_gauss([this](double t) { return derivative(t).norm(); }, 0.0,
                                       1.0, 256);
        }
    }

    /// Parameter of the nearest curve point to p (clamped to the domain for
    /// open curves) and the foot point itself.
    std::pair<double, Vec2> nearest(Vec2 p) const {
        switch (kind) {
            case CurveKind::circle: {
                Vec2 d = p - center;
                double m = d.norm();
                if (m < 1e-300) return {0.0, center + radius * Vec2{1.0, 0.0}};
                double th = std::atan2(d.y, d.x);
                double t = th / two_pi;
                if (t < 0.0) t += 1.0;
                return {t, center + (radius / m) * d};
            }
            case CurveKind::line: {
                double s = (lambda * p.x + p.y) / (lambda * lambda + 1.0);
                s = std::clamp(s, std::min(t_lo, t_hi), std::max(t_lo, t_hi));
                double t = (s - t_lo) / (t_hi - t_lo);
                return {t, Vec2{lambda * s, s}};
            }
            default: {
                // Dense scan then Newton polish on d/dxi |p - (xi, phi(xi))|^2.
                const int scan = 512;
                double best_x = xi_lo, best_d2 = std::numeric_limits<double>::infinity();
                for (int i = 0; i <= scan; ++i) {
                    double x = xi_lo + (xi_hi - xi_lo) * i / scan;
                    double d2 = sq(p.x - x) + sq(p.y - poly(x));
                    if (d2 < best_d2) {
                        best_d2 = d2;
                        best_x = x;
                    }
                }
                double x = best_x;
                for (int it = 0; it < 60; ++it) {
                    double f = poly(x), f1 = poly_d1(x), f2 = poly_d2(x);
                    double g1 = -2.0 * (p.x - x) - 2.0 * (p.y - f) * f1;
                    double g2 = 2.0 + 2.0 * f1 * f1 - 2.0 * (p.y - f) * f2;
                    if (std::abs(g2) < 1e-300) break;
                    double step = g1 / g2;
                    x -= step;
                    x = std::clamp(x, xi_lo, xi_hi);
                    if (std::abs(step) < 1e-15) break;
                }
                double d2_in = sq(p.x - x) + sq(p.y - poly(x));
                if (best_d2 < d2_in) x = best_x;
                double t = (x - xi_lo) / (xi_hi - xi_lo);
                return {t, Vec2{x, poly(x)}};
            }
        }
    }

    double distance(Vec2 p) const {
        if (kind == CurveKind::circle) return std::abs((p - center).norm() - radius);
        auto [t, foot] = nearest(p);
        (void)t;
        return (p - foot).norm();
    }

    /// Outward unit normal at parameter t (continuity convention for on-curve
    /// queries): radially outward for circles, (1,-lambda)-side for lines,
    /// upward for graphs.
    Vec2 outward_normal(double t) const {
        switch (kind) {
            case CurveKind::circle: {
                double th = two_pi * t;
                return {std::cos(th), std::sin(th)};
            }
            case CurveKind::line:
                return Vec2{1.0, -lambda}.unit();
            default: {
                double x = xi_lo + t * (xi_hi - xi_lo);
                return Vec2{-poly_d1(x), 1.0}.unit();
            }
        }
    }

    void validate() const {
        double min_speed = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 1024; ++i)
            min_speed = std::min(min_speed, derivative(i / 1024.0).norm());
        if (!(min_speed > 1e-12))
            throw error("non-regular curve '" + name + "': |gamma'| vanishes");
        if (closed()) {
            if ((point(0.0) - point(1.0)).norm() > 1e-9)
                throw error("closed curve endpoints disagree");
        }
    }
};

inline NormalFrame normal_frame(const Curve& curve, Vec2 p,
                                std::optional<double> reach_bound = std::nullopt) {
    double reach = reach_bound.value_or(curve.reach());
    auto [t, foot] = curve.nearest(p);
    double nu = (p - foot).norm();
    if (nu > reach * (1.0 + 1e-12) + 1e-15)
        throw error("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                    ") lies beyond the reach " + std::to_string(reach) +
                    ": nearest curve point may be ambiguous");
    NormalFrame fr;
    fr.nu = nu;
    fr.foot = foot;
    if (nu > 1e-12) {
        fr.grad_nu = (1.0 / nu) * (p - foot);
    } else {
        fr.grad_nu = curve.outward_normal(t);
    }
    fr.tangential = fr.grad_nu.perp();
    return fr;
}

/// All parameters where the tangent is within angle tol of a degenerate
/// direction. Isolated roots are refined by bisection on the signed sine of
/// the angle; arcs that stay degenerate are reported as intervals.
inline CharacteristicSet characteristic_points(const Curve& curve, double tol = 1e-8) {
    if (!(tol > 0.0)) throw error("characteristic_points: tol must be positive");
    curve.validate();

    CharacteristicSet out;
    const int N = 4096;
    const DegenerateAxis axes[3] = {DegenerateAxis::xi_axis, DegenerateAxis::eta_axis,
                                    DegenerateAxis::antidiagonal};

    auto angle_sine = [&](double t, Vec2 dir) {
        return cross(curve.derivative(t).unit(), dir);
    };

    for (DegenerateAxis axis : axes) {
        Vec2 dir = axis_direction(axis);
        std::vector<double> s(N + 1);
        double max_abs = 0.0;
        for (int i = 0; i <= N; ++i) {
            s[i] = angle_sine(static_cast<double>(i) / N, dir);
            max_abs = std::max(max_abs, std::abs(s[i]));
        }
        if (max_abs < tol) {
            out.intervals.push_back({0.0, 1.0, axis});
            continue;
        }

        std::vector<double> roots;
        auto add_root = [&](double t) {
            for (double r : roots)
                if (std::abs(r - t) < 1e-9 || (curve.closed() && std::abs(std::abs(r - t) - 1.0) < 1e-9))
                    return;
            roots.push_back(t);
        };

        for (int i = 0; i < N; ++i) {
            double a = static_cast<double>(i) / N, b = static_cast<double>(i + 1) / N;
            double sa = s[i], sb = s[i + 1];
            if (sa == 0.0) add_root(a);
            if (sa * sb < 0.0) {
                for (int it = 0; it < 60; ++it) {
                    double m = 0.5 * (a + b);
                    double sm = angle_sine(m, dir);
                    if (sa * sm <= 0.0) {
                        b = m;
                        sb = sm;
                    } else {
                        a = m;
                        sa = sm;
                    }
                }
                add_root(0.5 * (a + b));
            } else if (i > 0 && std::abs(s[i]) < std::max(tol, 1e-7) &&
                       std::abs(s[i]) <= std::abs(s[i - 1]) && std::abs(s[i]) <= std::abs(s[i + 1])) {
                // Tangency without sign change (e.g. inflection): minimize |s|.
                double lo = static_cast<double>(i - 1) / N, hi = b;
                for (int it = 0; it < 80; ++it) {
                    double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                    if (std::abs(angle_sine(m1, dir)) < std::abs(angle_sine(m2, dir)))
                        hi = m2;
                    else
                        lo = m1;
                }
                double m = 0.5 * (lo + hi);
                if (std::abs(angle_sine(m, dir)) <= tol) add_root(m);
            }
        }
        if (!curve.closed() && std::abs(s[N]) == 0.0) add_root(1.0);

        for (double t : roots) out.points.push_back({t, axis, curve.point(t)});
    }

    std::sort(out.points.begin(), out.points.end(),
              [](const CharacteristicPoint& a, const CharacteristicPoint& b) { return a.t < b.t; });
    return out;
}

struct ArcQuadrature {
    std::vector<Vec2> nodes;
    std::vector<double> weights;
    std::vector<double> params;
};

/// Composite midpoint rule for the arc-length measure: O(n^-2) for C^2
/// integrands, exact spacing on circles. All weights are positive.
inline ArcQuadrature arc_quadrature(const Curve& curve, int n) {
    if (n < 8) throw error("arc_quadrature needs n >= 8");
    ArcQuadrature q;
    q.nodes.reserve(n);
    q.weights.reserve(n);
    q.params.reserve(n);
    for (int i = 0; i < n; ++i) {
        double t = (i + 0.5) / n;
        q.params.push_back(t);
        q.nodes.push_back(curve.point(t));
        q.weights.push_back(curve.derivative(t).norm() / n);
    }
    return q;
}

/// Arc-measure extension kernel K(x) = int_Gamma exp(i x . s) w(s) dsigma(s)
/// by direct quadrature. Node count is auto-selected to resolve the fastest
/// oscillation max|x| * spacing <= 1/4 unless the caller pins it.
inline std::vector<cplx> extension_kernel(
    const Curve& curve, const std::vector<Vec2>& xs,
    const std::function<double(Vec2)>& weight = nullptr, int n_nodes = 0) {
    double max_r = 0.0;
    for (const Vec2& x : xs) max_r = std::max(max_r, x.norm());
    double len = curve.length();
    int required = static_cast<int>(std::ceil(4.0 * len * std::max(max_r, 1.0))) + 8;
    if (n_nodes == 0) {
        n_nodes = std::max(4096, required);
    } else if (n_nodes < required) {
        throw error("extension_kernel under-resolved: " + std::to_string(n_nodes) +
                    " nodes given, need at least " + std::to_string(required));
    }
    ArcQuadrature q = arc_quadrature(curve, n_nodes);
    std::vector<double> w(q.nodes.size());
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        w[i] = q.weights[i] * (weight ? weight(q.nodes[i]) : 1.0);

    std::vector<cplx> out(xs.size());
    parallel_for(xs.size(), [&](std::size_t ix) {
        cplx acc{};
        const Vec2 x = xs[ix];
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
            double phase = x.x * q.nodes[i].x + x.y * q.nodes[i].y;
            acc += w[i] * cplx{std::cos(phase), std::sin(phase)};
        }
        out[ix] = acc;
    });
    return out;
}

}  // namespace narrowband
