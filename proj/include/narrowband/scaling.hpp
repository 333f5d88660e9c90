#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "narrowband/exponents.hpp"
#include "narrowband/norms.hpp"
#include "narrowband/pseudoproduct.hpp"
#include "narrowband/symbols.hpp"

namespace narrowband {

enum class FitCorrection { none, auto_select, sqrt_log };
enum class Verdict { consistent, inconsistent, inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::consistent: return "consistent";
        case Verdict::inconsistent: return "inconsistent";
        default: return "inconclusive";
    }
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double log_coefficient = 0.0;  // 0 or 1/2, chosen by residual model selection
    double r_squared = 0.0;
};

/// Least squares on ln v = slope ln eps + intercept
/// [+ log_coefficient * ln(-ln eps)], the coefficient constrained to {0, 1/2}:
/// absent for `none`, chosen by residual model selection for `auto_select`,
/// pinned to 1/2 for `sqrt_log`.
inline FitResult fit_power_law(const std::vector<std::pair<double, double>>& points,
                               FitCorrection correction) {
    if (points.size() < 3) throw error("fit_power_law needs at least 3 points");
    std::vector<double> lx, ly;
    for (auto [eps, v] : points) {
        if (!(v > 0.0)) throw error("fit_power_law: nonpositive value at eps=" + std::to_string(eps));
        if (!(eps > 0.0 && eps < 1.0)) throw error("fit_power_law: eps must lie in (0,1)");
        lx.push_back(std::log(eps));
        ly.push_back(std::log(v));
    }
    std::size_t m = lx.size();

    auto least_squares = [&](double log_coef, FitResult& out) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double y = ly[i] - log_coef * std::log(-lx[i]);
            sx += lx[i];
            sy += y;
            sxx += lx[i] * lx[i];
            sxy += lx[i] * y;
        }
        double det = m * sxx - sx * sx;
        out.slope = (m * sxy - sx * sy) / det;
        out.intercept = (sy * sxx - sx * sxy) / det;
        out.log_coefficient = log_coef;
        double sse = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double pred = out.slope * lx[i] + out.intercept + log_coef * std::log(-lx[i]);
            sse += sq(ly[i] - pred);
        }
        return sse;
    };

    FitResult plain, corrected;
    FitResult best;
    double best_sse = 0.0;
    if (correction == FitCorrection::sqrt_log) {
        best_sse = least_squares(0.5, corrected);
        best = corrected;
    } else {
        best_sse = least_squares(0.0, plain);
        best = plain;
        if (correction == FitCorrection::auto_select) {
            double sse2 = least_squares(0.5, corrected);
            if (sse2 < best_sse) {
                best = corrected;
                best_sse = sse2;
            }
        }
    }

    double mean = 0.0;
    for (double y : ly) mean += y;
    mean /= m;
    double sstot = 0.0;
    for (double y : ly) sstot += sq(y - mean);
    best.r_squared = sstot > 1e-30 ? 1.0 - best_sse / sstot : (best_sse < 1e-20 ? 1.0 : 0.0);
    return best;
}

enum class SweepBuilder { tube, convolved, line };

inline const char* builder_name(SweepBuilder b) {
    switch (b) {
        case SweepBuilder::tube: return "tube";
        case SweepBuilder::convolved: return "convolved";
        default: return "line";
    }
}

struct ProbeConfig {
    std::vector<WitnessFamily> families{WitnessFamily::flat_hats};
    bool use_ascent = true;
    int restarts = 8;
    int iters = 12;
    double power_law_delta = 0.05;
};

struct SweepConfig {
    SweepBuilder builder = SweepBuilder::line;
    std::optional<Curve> curve;  // tube / convolved builders
    double lambda = 1.0;         // line builder
    Regime regime;
    LebesgueTriple triple;
    FrequencyGrid grid;
    std::vector<double> epsilons{0.125, 0.0625, 0.03125, 0.015625};
    ProbeConfig probe;
    FitCorrection correction = FitCorrection::none;
    double tolerance = 0.0;  // 0 = default from the prediction flags
    std::uint64_t seed = 1;

    void validate() const {
        if (epsilons.size() < 4) throw error("sweep needs at least 4 epsilon points");
        bool line_regime = regime.geometry == RegimeGeometry::line_nondegenerate ||
                           regime.geometry == RegimeGeometry::line_degenerate;
        if (line_regime && builder != SweepBuilder::line)
            throw error("line regimes require the line symbol builder");
        if (!line_regime && builder == SweepBuilder::line)
            throw error("the line builder pairs with a line regime");
        if (builder != SweepBuilder::line && !curve) throw error("sweep builder needs a curve");
        if (regime.geometry == RegimeGeometry::nonvanishing_curvature && curve &&
            !(curve->min_curvature() > 0.0))
            throw error("curvature regime requires min curvature > 0 on the curve");
        if (!triple.admissible()) throw error("sweep triple is not sub-Holder admissible");
    }
};

struct SweepPoint {
    double epsilon = 0.0;
    double best_lower_bound = 0.0;
    WitnessFamily witness = WitnessFamily::flat_hats;
};

struct ScalingFit {
    FitResult fit;
    std::vector<SweepPoint> points;
    ExponentPrediction predicted;
    Rational ceiling{0};
    double tolerance = 0.15;
    Verdict verdict = Verdict::inconclusive;
    bool ceiling_tripwire_ok = true;  // fitted slope <= ceiling + tolerance
    bool delta_convention = false;    // verdict is "consistent with delta" only
};

inline Symbol build_sweep_symbol(const SweepConfig& config, double eps) {
    switch (config.builder) {
        case SweepBuilder::tube: return build_tube_symbol(*config.curve, eps, config.grid);
        case SweepBuilder::convolved:
            return build_convolved_measure_symbol(*config.curve, eps, config.grid);
        default: return build_line_symbol(config.lambda, eps, config.grid);
    }
}

inline NormEstimate probe_best(const Symbol& symbol, const LebesgueTriple& triple,
                               const ProbeConfig& probe, std::uint64_t seed) {
    NormEstimate best;
    best.triple = triple;
    for (WitnessFamily family : probe.families) {
        NormEstimate e = witness_lower_bound(symbol, triple, family, probe.power_law_delta, seed);
        if (e.lower_bound > best.lower_bound) best = e;
    }
    if (probe.use_ascent) {
        NormEstimate e = ascent_lower_bound(symbol, triple, probe.restarts, probe.iters, seed);
        if (e.lower_bound > best.lower_bound) best = e;
    }
    return best;
}

/// Full epsilon sweep: build the symbol, probe the best lower bound, fit the
/// decay law and compare against the prediction. Deterministic given
/// (config, seed): every epsilon point derives its own substream seed.
inline ScalingFit sweep(const SweepConfig& config) {
    config.validate();
    ScalingFit out;
    out.points.resize(config.epsilons.size());

    for (std::size_t i = 0; i < config.epsilons.size(); ++i) {
        double eps = config.epsilons[i];
        try {
            Symbol symbol = build_sweep_symbol(config, eps);
            NormEstimate est =
                probe_best(symbol, config.triple, config.probe, mix_seed(config.seed, i));
            out.points[i] = {eps, est.lower_bound, est.witness};
        } catch (const error& e) {
            throw error("sweep failed at epsilon=" + std::to_string(eps) + ": " + e.what());
        }
    }

    std::vector<std::pair<double, double>> pts;
    for (const SweepPoint& p : out.points) pts.push_back({p.epsilon, p.best_lower_bound});
    out.fit = fit_power_law(pts, config.correction);

    out.predicted = predict(config.triple, config.regime);
    out.ceiling = necessary_ceiling(config.triple, config.regime);
    out.delta_convention = out.predicted.delta_loss;

    double tol = config.tolerance;
    if (tol <= 0.0)
        tol = (out.predicted.delta_loss || out.predicted.log_correction != LogCorrection::none)
                  ? 0.25
                  : 0.15;
    out.tolerance = tol;

    out.ceiling_tripwire_ok = out.fit.slope <= out.ceiling.as_double() + 0.25;

    if (!out.predicted.rho || out.fit.r_squared < 0.98) {
        out.verdict = Verdict::inconclusive;
    } else if (std::abs(out.fit.slope - out.predicted.rho->as_double()) <= tol) {
        out.verdict = Verdict::consistent;
    } else {
        out.verdict = Verdict::inconsistent;
    }
    return out;
}

struct BochnerRieszConvergence {
    std::vector<std::pair<double, double>> errors;  // (dilation, |B(f,g) - fg|_{r'})
    std::vector<double> layer_bounds;               // per-Whitney-layer lower bounds
    double layer_bound_sum = 0.0;
};

/// Dilation convergence experiment B_{lambda K}(f, g) -> f g in L^{r'} for a
/// Holder triple, with the symbol normalized to 1 at the origin. boundary_cap
/// fixes the regularization layer width so errors fall to the quadrature
/// floor once the data supports clear the boundary layer.
inline BochnerRieszConvergence bochner_riesz_convergence(
    const Region& K, double kappa, const LebesgueTriple& triple,
    const std::vector<double>& dilations, const FrequencyGrid& grid, double bump_width = 0.1,
    double boundary_cap = 0.25) {
    if (triple.inv_sum() != Rational(1))
        throw error("bochner_riesz_convergence needs a Holder triple (1/p + 1/q + 1/r = 1)");
    if (!K.contains({0.0, 0.0}))
        throw error("bochner_riesz_convergence: the region must contain the origin");

    double r = triple.r.as_double();
    double r_dual = r / (r - 1.0);

    auto f = GridFunction::from_frequency(grid, [bump_width](double xi) {
        return cplx{plateau_bump(xi / bump_width), 0.0};
    });
    GridFunction f2 = f.resample_to_doubled().to_spatial();
    GridFunction fg(f2.grid, Side::spatial);
    for (int k = 0; k < fg.n(); ++k) fg.values[k] = f2.values[k] * f2.values[k];

    auto scale_region = [&](double lam) {
        Region s = K;
        if (s.kind == Region::Kind::disc) {
            s.center = lam * s.center;
            s.radius *= lam;
        } else {
            for (Vec2& v : s.vertices) v = lam * v;
        }
        return s;
    };

    BochnerRieszConvergence out;
    for (double lam : dilations) {
        Region Ks = scale_region(lam);
        Symbol m = build_bochner_riesz(Ks, kappa, grid, boundary_cap);
        double center_val = kappa == 0.0
                                ? 1.0
                                : std::pow(std::min(Ks.boundary_distance({0.0, 0.0}), boundary_cap),
                                           kappa);
        if (center_val > 0.0)
            for (cplx& v : m.values) v /= center_val;
        GridFunction B = apply_bilinear(m, f, f);
        GridFunction diff(B.grid, Side::spatial);
        for (int k = 0; k < B.n(); ++k) diff.values[k] = B.values[k] - fg.values[k];
        out.errors.push_back({lam, lp_norm(diff, r_dual)});
    }

    // Layer-wise lower bounds: summable once kappa > 0.
    Symbol base = build_bochner_riesz(K, kappa, grid, boundary_cap);
    WhitneyLayers layers = whitney_layers(base);
    for (const Symbol& layer : layers.layers) {
        NormEstimate e = witness_lower_bound(layer, triple, WitnessFamily::flat_hats);
        out.layer_bounds.push_back(e.lower_bound);
        out.layer_bound_sum += e.lower_bound;
    }
    return out;
}

}  // namespace narrowband
