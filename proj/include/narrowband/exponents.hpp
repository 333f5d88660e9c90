#pragma once

#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "narrowband/rational.hpp"
#include "narrowband/symbols.hpp"

namespace narrowband {

enum class RegimeGeometry {
    nowhere_characteristic,
    nonvanishing_curvature,
    arbitrary,
    line_nondegenerate,
    line_degenerate
};

inline const char* regime_name(RegimeGeometry g) {
    switch (g) {
        case RegimeGeometry::nowhere_characteristic: return "nowhere_characteristic";
        case RegimeGeometry::nonvanishing_curvature: return "curvature";
        case RegimeGeometry::arbitrary: return "arbitrary";
        case RegimeGeometry::line_nondegenerate: return "line_nondegenerate";
        default: return "line_degenerate";
    }
}

inline RegimeGeometry parse_regime(const std::string& s) {
    if (s == "nowhere_characteristic" || s == "noncharacteristic") return RegimeGeometry::nowhere_characteristic;
    if (s == "curvature" || s == "nonvanishing_curvature") return RegimeGeometry::nonvanishing_curvature;
    if (s == "arbitrary") return RegimeGeometry::arbitrary;
    if (s == "line" || s == "line_nondegenerate") return RegimeGeometry::line_nondegenerate;
    if (s == "line_degenerate") return RegimeGeometry::line_degenerate;
    throw error("unknown regime: " + s);
}

struct Regime {
    RegimeGeometry geometry = RegimeGeometry::arbitrary;
    SymbolClass symbol_class = SymbolClass::M_eps;

    void validate() const {
        if (symbol_class != SymbolClass::M_eps && symbol_class != SymbolClass::N_eps)
            throw error("regime symbol class must be M_eps or N_eps");
        bool line = geometry == RegimeGeometry::line_nondegenerate ||
                    geometry == RegimeGeometry::line_degenerate;
        if (line && symbol_class == SymbolClass::N_eps)
            throw error("line regimes pair with plain tube (M_eps) line symbols only");
    }
};

enum class LogCorrection { none, sqrt_log, log };

inline const char* log_correction_name(LogCorrection c) {
    switch (c) {
        case LogCorrection::none: return "none";
        case LogCorrection::sqrt_log: return "sqrt_log";
        default: return "log";
    }
}

/// Predicted decay rate of the operator-norm as the tube width shrinks.
/// rho absent means the tables prove no bound for that cell (no interpolation
/// into uncovered corners). delta_loss marks rates proven as rho - delta for
/// every delta > 0; the sweep comparison widens its tolerance there.
struct ExponentPrediction {
    std::optional<Rational> rho;
    bool optimal = false;
    LogCorrection log_correction = LogCorrection::none;
    bool delta_loss = false;
    std::string source = "no proven bound";
};

namespace detail {

struct InvTriple {
    std::array<Rational, 3> u;       // (1/p, 1/q, 1/r)
    std::array<bool, 3> finite;      // exponent < infinity
    Rational sum;

    explicit InvTriple(const LebesgueTriple& t) {
        u = {t.p.inv(), t.q.inv(), t.r.inv()};
        finite = {t.p.finite(), t.q.finite(), t.r.finite()};
        sum = u[0] + u[1] + u[2];
    }

    Rational umax() const { return rat_max(u[0], rat_max(u[1], u[2])); }
    Rational umin() const { return rat_min(u[0], rat_min(u[1], u[2])); }
    bool all_finite() const { return finite[0] && finite[1] && finite[2]; }
    int infinite_count() const { return (!finite[0]) + (!finite[1]) + (!finite[2]); }

    /// Exponents in (1, infinity), i.e. every inverse strictly inside (0, 1).
    bool open_range() const {
        for (const Rational& x : u)
            if (!(x > Rational(0) && x < Rational(1))) return false;
        return true;
    }

    bool is_permutation_of(Rational a, Rational b, Rational c) const {
        std::array<Rational, 3> s = u, t = {a, b, c};
        std::sort(s.begin(), s.end());
        std::sort(t.begin(), t.end());
        return s[0] == t[0] && s[1] == t[1] && s[2] == t[2];
    }
};

struct Candidate {
    Rational rho;
    bool claimed_optimal = false;
    LogCorrection log_correction = LogCorrection::none;
    bool delta_loss = false;
    std::string source;
};

inline Rational eq_rho(const InvTriple& t) {
    Rational half(1, 2);
    return rat_min(t.u[0], half) + rat_min(t.u[1], half) + rat_min(t.u[2], half) - Rational(1);
}

}  // namespace detail

/// Sharpest proven lower-bound ceiling: no decay rate can exceed it. The
/// mechanisms are the mass witness (rate 1), the scaling witness (sum - 1),
/// the curvature tangency witness (regimes with a characteristic curvature
/// point, minimized over the three role assignments), and the modulation
/// witness 1/p for the degenerate line.
inline Rational necessary_ceiling(const LebesgueTriple& triple, const Regime& regime) {
    if (!triple.admissible()) throw error("necessary_ceiling: inadmissible triple");
    detail::InvTriple t(triple);
    Rational ceiling = rat_min(Rational(1), t.sum - Rational(1));
    if (regime.geometry == RegimeGeometry::nonvanishing_curvature) {
        Rational half(1, 2);
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3, k = (i + 2) % 3;
            Rational v = -half + t.u[i] + (t.u[j] + t.u[k]) / Rational(2);
            ceiling = rat_min(ceiling, v);
        }
    }
    if (regime.geometry == RegimeGeometry::line_degenerate)
        ceiling = rat_min(ceiling, t.u[0]);
    return ceiling;
}

/// Sharpest proven decay exponent for the cell. Overlapping statements
/// resolve to the largest rate; `optimal` is set only when the winning rate
/// also meets the regime's necessary ceiling (up to the recorded delta/log
/// conventions).
inline ExponentPrediction predict(const LebesgueTriple& triple, const Regime& regime) {
    regime.validate();
    if (!triple.admissible())
        throw error("predict: inadmissible triple (needs 1 <= 1/p + 1/q + 1/r)");
    detail::InvTriple t(triple);
    const Rational one(1), half(1, 2), zero(0);
    std::vector<detail::Candidate> cands;

    auto add = [&](Rational rho, bool claimed, const char* src,
                   LogCorrection log = LogCorrection::none, bool dloss = false) {
        cands.push_back({rho, claimed, log, dloss, src});
    };

    const bool is_line = regime.geometry == RegimeGeometry::line_nondegenerate ||
                         regime.geometry == RegimeGeometry::line_degenerate;

    if (regime.geometry == RegimeGeometry::line_nondegenerate) {
        add(rat_min(t.sum - one, one), true, "non-degenerate line characterization");
    } else if (regime.geometry == RegimeGeometry::line_degenerate) {
        Rational rho = rat_min(t.u[0] + rat_min(t.u[1] + t.u[2], one) - one, one);
        add(rho, true, "degenerate line characterization");
    }

    if (!is_line) {
        // Local-L2 bounds hold for every smooth compact curve.
        Rational er = detail::eq_rho(t);
        bool case_a = t.sum <= Rational(3, 2) && t.all_finite() && er >= zero;
        bool case_b = t.sum >= Rational(3, 2) && t.infinite_count() <= 1;
        if (case_a || case_b) {
            bool claimed = regime.geometry == RegimeGeometry::arbitrary && t.umax() <= half;
            add(er, claimed, "local-L2 exponent");
        }
        if (t.umin() >= half) {
            int strictly_small = 0;
            for (const Rational& x : t.u)
                if (x > half) ++strictly_small;
            bool claimed = regime.geometry == RegimeGeometry::arbitrary && strictly_small >= 2;
            add(t.umin(), claimed, "small-exponent improvement");
        }
    }

    if (regime.geometry == RegimeGeometry::nowhere_characteristic) {
        Rational rho2 = rat_min(detail::eq_rho(t) + (t.umax() - half), one);
        if (t.umax() > half) {
            bool case_a = t.sum <= Rational(2) && t.all_finite();
            bool case_b = t.sum == Rational(2) && t.infinite_count() <= 1;
            if (case_a || case_b) add(rho2, true, "nowhere-characteristic improvement");
        }
        if (t.umin() >= half && t.sum >= Rational(2))
            add(one, true, "nowhere-characteristic saturation");
        // Optimal sub-Holder region (four linear inequalities).
        if (t.open_range() && t.sum >= one && t.sum < Rational(2)) {
            Rational cap(3, 2);
            if (t.u[1] + t.u[2] <= cap && t.u[0] + t.u[1] <= cap && t.u[0] + t.u[2] <= cap)
                add(t.sum - one, true, "nowhere-characteristic scaling region");
        }
        // One large exponent against two small ones.
        if (t.open_range()) {
            for (int i = 0; i < 3; ++i) {
                int j = (i + 1) % 3, k = (i + 2) % 3;
                if (t.u[i] <= half && t.u[j] >= half && t.u[k] >= half &&
                    t.u[j] + t.u[k] >= Rational(3, 2))
                    add(t.u[i] + half, false, "one-large-exponent bound");
            }
        }
        if (t.is_permutation_of(zero, one, half))
            add(Rational(1, 4), false, "mixed endpoint bound");
    }

    if (regime.geometry == RegimeGeometry::nonvanishing_curvature) {
        if (t.umax() <= half)
            add(t.sum - one, true, "curvature local-L2 exponent");
        if (t.open_range()) {
            // One exponent above 2, the other two below.
            for (int i = 0; i < 3; ++i) {
                int j = (i + 1) % 3, k = (i + 2) % 3;
                if (t.u[i] < half && t.u[j] > half && t.u[k] > half)
                    add(-half + t.u[i] + (t.u[j] + t.u[k]) / Rational(2), true,
                        "curvature tangency exponent", LogCorrection::none, true);
            }
            if (t.umax() > half && t.umin() > half && t.sum >= Rational(3, 2) &&
                t.sum <= Rational(5, 2))
                add((t.sum - half) / Rational(2), false, "curvature small-exponent interpolation",
                    LogCorrection::none, true);
        }
        if (t.sum > Rational(5, 2)) add(one, true, "curvature saturation");

        // Endpoint rows with their logarithmic corrections.
        if (t.is_permutation_of(one, one, half))
            add(one, true, "curvature endpoint (1,1,2)", LogCorrection::sqrt_log);
        if (t.is_permutation_of(half, half, one))
            add(Rational(3, 4), true, "curvature endpoint (2,2,1)");
        if (t.is_permutation_of(zero, one, half))
            add(Rational(1, 4), true, "curvature endpoint (inf,1,2)", LogCorrection::sqrt_log);
        if (t.is_permutation_of(one, one, zero))
            add(half, true, "curvature endpoint (1,1,inf)", LogCorrection::log);

        if (regime.symbol_class == SymbolClass::N_eps && t.open_range()) {
            // Tangentially smooth class: one small exponent against two
            // large ordered ones.
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    if (b == a) continue;
                    int c = 3 - a - b;
                    if (t.u[a] > half && t.u[b] < t.u[c] && t.u[c] < half &&
                        t.u[a] + t.u[c] > one)
                        add(-half + t.u[b] + (t.u[a] + t.u[c]) / Rational(2), true,
                            "tangential-class tangency exponent", LogCorrection::none, true);
                }
            }
            for (int a = 0; a < 3; ++a) {
                int b = (a + 1) % 3, c = (a + 2) % 3;
                // The distinguished slot is the small exponent (largest
                // inverse), as in the first tangential-class case; this keeps
                // the rate below every tangency necessary condition.
                if (t.u[a] == t.umax() && t.u[a] + t.u[b] < one && t.u[a] + t.u[c] < one &&
                    t.sum > one)
                    add(t.sum - one, true, "tangential-class scaling exponent",
                        LogCorrection::none, true);
            }
        }
    }

    ExponentPrediction pred;
    if (cands.empty()) return pred;

    const detail::Candidate* bestc = &cands.front();
    for (const auto& c : cands) {
        if (c.rho > bestc->rho ||
            (c.rho == bestc->rho && c.claimed_optimal && !bestc->claimed_optimal))
            bestc = &c;
    }
    pred.rho = bestc->rho;
    pred.log_correction = bestc->log_correction;
    pred.delta_loss = bestc->delta_loss;
    pred.source = bestc->source;
    pred.optimal = bestc->claimed_optimal && *pred.rho == necessary_ceiling(triple, regime);
    return pred;
}

/// Proven restriction-extension region for the arc-measure multiplier.
inline std::pair<bool, std::string> restriction_extension_admissible(const LebesgueTriple& triple,
                                                                     const Regime& regime) {
    if (!triple.admissible()) throw error("restriction_extension_admissible: inadmissible triple");
    detail::InvTriple t(triple);
    const Rational one(1);

    if (regime.geometry == RegimeGeometry::nowhere_characteristic) {
        if (t.umin() >= Rational(1, 2) && t.sum >= Rational(2))
            return {true, "nowhere-characteristic restriction region"};
        return {false, "outside the nowhere-characteristic restriction region"};
    }
    if (regime.geometry != RegimeGeometry::nonvanishing_curvature)
        return {false, "no proven restriction-extension region for this regime"};

    if (t.sum > Rational(5, 2)) return {true, "kernel-decay restriction region"};

    if (t.u[0] - t.u[1] + t.u[2] <= one && -t.u[0] + t.u[1] + t.u[2] <= one &&
        t.u[0] + t.u[1] - t.u[2] <= one && t.sum > Rational(7, 3))
        return {true, "dyadic kernel-splitting restriction polytope"};

    // Convex hull of (1,1,1), permutations of (1,1,2) and (3/2,3/2,1),
    // tested in inverse-exponent coordinates with exact arithmetic.
    using V = std::array<Rational, 3>;
    static const std::vector<V> hull = {
        {Rational(1), Rational(1), Rational(1)},
        {Rational(1), Rational(1), Rational(1, 2)},
        {Rational(1), Rational(1, 2), Rational(1)},
        {Rational(1, 2), Rational(1), Rational(1)},
        {Rational(2, 3), Rational(2, 3), Rational(1)},
        {Rational(2, 3), Rational(1), Rational(2, 3)},
        {Rational(1), Rational(2, 3), Rational(2, 3)},
    };
    auto sub = [](const V& a, const V& b) {
        return V{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    };
    auto crossv = [](const V& a, const V& b) {
        return V{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    };
    auto dotv = [](const V& a, const V& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };

    V x = {t.u[0], t.u[1], t.u[2]};
    bool inside = true;
    for (std::size_t i = 0; i < hull.size() && inside; ++i) {
        for (std::size_t j = i + 1; j < hull.size() && inside; ++j) {
            for (std::size_t k = j + 1; k < hull.size() && inside; ++k) {
                V nrm = crossv(sub(hull[j], hull[i]), sub(hull[k], hull[i]));
                if (nrm[0] == Rational(0) && nrm[1] == Rational(0) && nrm[2] == Rational(0))
                    continue;
                Rational lo(0), hi(0);
                bool first = true;
                for (const V& v : hull) {
                    Rational s = dotv(nrm, sub(v, hull[i]));
                    if (first) {
                        lo = hi = s;
                        first = false;
                    } else {
                        lo = rat_min(lo, s);
                        hi = rat_max(hi, s);
                    }
                }
                if (lo >= Rational(0) || hi <= Rational(0)) {  // supporting plane
                    Rational s = dotv(nrm, sub(x, hull[i]));
                    if (hi <= Rational(0) && s > Rational(0)) inside = false;
                    if (lo >= Rational(0) && s < Rational(0)) inside = false;
                }
            }
        }
    }
    if (inside) return {true, "interpolated restriction hull"};
    return {false, "outside every proven curvature restriction region"};
}

/// CSV table of predictions (one row per triple).
inline std::string prediction_table_csv(const std::vector<LebesgueTriple>& triples,
                                        const Regime& regime) {
    std::ostringstream os;
    os << "p,q,r,rho,optimal,log_correction,delta_loss,source\n";
    for (const auto& tr : triples) {
        ExponentPrediction pr = predict(tr, regime);
        os << tr.p.str() << "," << tr.q.str() << "," << tr.r.str() << ",";
        if (pr.rho)
            os << pr.rho->as_double();
        else
            os << "none";
        os << "," << (pr.optimal ? "true" : "false") << "," << log_correction_name(pr.log_correction)
           << "," << (pr.delta_loss ? "true" : "false") << "," << pr.source << "\n";
    }
    return os.str();
}

}  // namespace narrowband
