#include <catch2/catch_amalgamated.hpp>

#include "narrowband/exponents.hpp"

using namespace narrowband;

namespace {

LebesgueTriple triple(const char* p, const char* q, const char* r) {
    return {parse_exponent(p), parse_exponent(q), parse_exponent(r)};
}

Regime regime(RegimeGeometry g, SymbolClass c = SymbolClass::M_eps) {
    Regime r;
    r.geometry = g;
    r.symbol_class = c;
    return r;
}

const Regime kArb = regime(RegimeGeometry::arbitrary);
const Regime kCurv = regime(RegimeGeometry::nonvanishing_curvature);
const Regime kCurvN = regime(RegimeGeometry::nonvanishing_curvature, SymbolClass::N_eps);
const Regime kNC = regime(RegimeGeometry::nowhere_characteristic);
const Regime kLine = regime(RegimeGeometry::line_nondegenerate);
const Regime kLineDeg = regime(RegimeGeometry::line_degenerate);

std::vector<LebesgueTriple> exponent_grid() {
    // Inverse exponents u = k/20, k = 0..20 (u = 0 encodes p = infinity).
    std::vector<LebesgueExponent> exps;
    exps.push_back(LebesgueExponent::infinity());
    for (int k = 1; k <= 20; ++k) exps.push_back(LebesgueExponent(Rational(20, k)));
    std::vector<LebesgueTriple> out;
    for (const auto& p : exps)
        for (const auto& q : exps)
            for (const auto& r : exps) {
                LebesgueTriple t(p, q, r);
                if (t.admissible()) out.push_back(t);
            }
    return out;
}

}  // namespace

TEST_CASE("predict reproduces the reference table exactly") {
    auto row = [&](const char* p, const char* q, const char* r, const Regime& rg) {
        return predict(triple(p, q, r), rg);
    };

    // (2,2,2), arbitrary -> 1/2, optimal.
    ExponentPrediction a = row("2", "2", "2", kArb);
    CHECK(*a.rho == Rational(1, 2));
    CHECK(a.optimal);

    // (1,1,1), every regime -> 1, optimal.
    for (const Regime& rg : {kArb, kCurv, kNC, kLine, kLineDeg}) {
        ExponentPrediction b = row("1", "1", "1", rg);
        CHECK(*b.rho == Rational(1));
        CHECK(b.optimal);
    }

    // (1,1,2), nowhere characteristic -> 1, no log.
    ExponentPrediction c = row("1", "1", "2", kNC);
    CHECK(*c.rho == Rational(1));
    CHECK(c.log_correction == LogCorrection::none);
    CHECK(c.optimal);

    // (1,1,2), curvature -> 1 with sqrt(-log) correction.
    ExponentPrediction d = row("1", "1", "2", kCurv);
    CHECK(*d.rho == Rational(1));
    CHECK(d.log_correction == LogCorrection::sqrt_log);

    // (2,2,1), curvature -> 3/4, optimal.
    ExponentPrediction e = row("2", "2", "1", kCurv);
    CHECK(*e.rho == Rational(3, 4));
    CHECK(e.optimal);

    // (inf,1,2), arbitrary -> 0.
    ExponentPrediction f = row("inf", "1", "2", kArb);
    CHECK(*f.rho == Rational(0));

    // (1,1,inf), nowhere characteristic -> 1/2.
    ExponentPrediction g = row("1", "1", "inf", kNC);
    CHECK(*g.rho == Rational(1, 2));

    // (2,2,4), curvature -> 1/4, optimal.
    ExponentPrediction h = row("2", "2", "4", kCurv);
    CHECK(*h.rho == Rational(1, 4));
    CHECK(h.optimal);
}

TEST_CASE("more endpoint rows") {
    CHECK(*predict(triple("inf", "1", "2"), kNC).rho == Rational(1, 4));
    ExponentPrediction i12c = predict(triple("inf", "1", "2"), kCurv);
    CHECK(*i12c.rho == Rational(1, 4));
    CHECK(i12c.log_correction == LogCorrection::sqrt_log);
    ExponentPrediction e11i = predict(triple("1", "1", "inf"), kCurv);
    CHECK(*e11i.rho == Rational(1, 2));
    CHECK(e11i.log_correction == LogCorrection::log);
    // (2,2,1) nowhere characteristic saturates at 1 (sum of inverses = 2).
    CHECK(*predict(triple("2", "2", "1"), kNC).rho == Rational(1));
}

TEST_CASE("line characterizations") {
    // rho = min(sum - 1, 1) on the non-degenerate line.
    CHECK(*predict(triple("2", "2", "2"), kLine).rho == Rational(1, 2));
    CHECK(predict(triple("2", "2", "2"), kLine).optimal);
    CHECK(*predict(triple("1", "2", "2"), kLine).rho == Rational(1));

    // Degenerate line distinguishes the first exponent.
    CHECK(*predict(triple("4", "2", "2"), kLineDeg).rho == Rational(1, 4));
    CHECK(predict(triple("4", "2", "2"), kLineDeg).optimal);
    CHECK(*predict(triple("4", "1", "1"), kLineDeg).rho == Rational(1, 4));
    CHECK(*predict(triple("1", "4", "1"), kLineDeg).rho == Rational(1));
    CHECK(*predict(triple("2", "4", "4"), kLineDeg).rho == Rational(0));  // Holder point
    CHECK(*predict(triple("4/3", "4", "4"), kLineDeg).rho == Rational(1, 4));
}

TEST_CASE("tangential-class predictions (N_eps)") {
    // One small exponent against two large ordered ones: (4/3, 4, 3).
    ExponentPrediction a = predict(triple("4/3", "4", "3"), kCurvN);
    REQUIRE(a.rho.has_value());
    CHECK(*a.rho == Rational(7, 24));  // -1/2 + 1/4 + (3/4 + 1/3)/2
    CHECK(a.delta_loss);

    // Distinguished small-sum slot: (4, 4, 3/2) -> sum - 1 = 1/6 with delta loss.
    ExponentPrediction b = predict(triple("4", "4", "3/2"), kCurvN);
    REQUIRE(b.rho.has_value());
    CHECK(*b.rho == Rational(1, 6));
    CHECK(b.delta_loss);
    CHECK(b.optimal);

    // The M_eps regime does not reach 1/6 there (general bound only).
    ExponentPrediction c = predict(triple("4", "4", "3/2"), kCurv);
    REQUIRE(c.rho.has_value());
    CHECK(*c.rho <= *b.rho);
}

TEST_CASE("necessary ceilings match the reference rows") {
    CHECK(necessary_ceiling(triple("2", "2", "2"), kArb) == Rational(1, 2));
    CHECK(necessary_ceiling(triple("2", "2", "2"), kCurv) == Rational(1, 2));
    CHECK(necessary_ceiling(triple("4", "1", "1"), kLineDeg) == Rational(1, 4));
    CHECK(necessary_ceiling(triple("1", "1", "2"), kCurv) == Rational(1));
    CHECK(necessary_ceiling(triple("2", "2", "1"), kCurv) == Rational(3, 4));
    CHECK(necessary_ceiling(triple("inf", "1", "2"), kCurv) == Rational(1, 4));
    CHECK(necessary_ceiling(triple("1", "1", "inf"), kCurv) == Rational(1, 2));
}

TEST_CASE("prediction never exceeds the ceiling on the rational grid") {
    auto grid = exponent_grid();
    for (const Regime& rg : {kArb, kCurv, kCurvN, kNC, kLine, kLineDeg}) {
        for (const auto& t : grid) {
            ExponentPrediction pr = predict(t, rg);
            if (!pr.rho) continue;
            Rational ceil = necessary_ceiling(t, rg);
            INFO(t.str() << " regime=" << regime_name(rg.geometry));
            CHECK(*pr.rho <= ceil);
            if (pr.optimal) CHECK(*pr.rho == ceil);
        }
    }
}

TEST_CASE("permutation symmetry where the statements are symmetric") {
    auto grid = exponent_grid();
    for (std::size_t idx = 0; idx < grid.size(); idx += 7) {
        const LebesgueTriple& t = grid[idx];
        LebesgueTriple perms[5] = {{t.q, t.p, t.r}, {t.r, t.q, t.p}, {t.p, t.r, t.q},
                                   {t.q, t.r, t.p}, {t.r, t.p, t.q}};
        for (const Regime& rg : {kArb, kCurv, kNC}) {
            ExponentPrediction base = predict(t, rg);
            for (const auto& pt : perms) {
                ExponentPrediction pp = predict(pt, rg);
                CHECK(base.rho.has_value() == pp.rho.has_value());
                if (base.rho && pp.rho) CHECK(*base.rho == *pp.rho);
            }
        }
    }
    // The degenerate line is NOT permutation symmetric.
    CHECK(*predict(triple("4", "1", "1"), kLineDeg).rho !=
          *predict(triple("1", "4", "1"), kLineDeg).rho);
}

TEST_CASE("rho is piecewise continuous on source regions") {
    // Along any grid segment where the winning source is unchanged, steps of
    // 1/20 in an inverse exponent move rho by at most 2/20.
    std::vector<LebesgueExponent> exps;
    for (int k = 1; k <= 20; ++k) exps.push_back(LebesgueExponent(Rational(20, k)));
    for (const Regime& rg : {kArb, kCurv, kNC}) {
        for (const auto& q : exps) {
            for (const auto& r : exps) {
                for (int k = 1; k + 1 <= 20; ++k) {
                    LebesgueTriple t1(LebesgueExponent(Rational(20, k)), q, r);
                    LebesgueTriple t2(LebesgueExponent(Rational(20, k + 1)), q, r);
                    if (!t1.admissible() || !t2.admissible()) continue;
                    ExponentPrediction p1 = predict(t1, rg);
                    ExponentPrediction p2 = predict(t2, rg);
                    if (!p1.rho || !p2.rho || p1.source != p2.source) continue;
                    Rational step = *p1.rho - *p2.rho;
                    if (step < Rational(0)) step = -step;
                    INFO(t1.str() << " vs " << t2.str() << " source=" << p1.source);
                    CHECK(step <= Rational(2, 20));
                }
            }
        }
    }
}

TEST_CASE("restriction-extension admissibility") {
    CHECK(restriction_extension_admissible(triple("1", "1", "1"), kCurv).first);
    CHECK_FALSE(restriction_extension_admissible(triple("3", "3", "3"), kCurv).first);
    CHECK_FALSE(restriction_extension_admissible(triple("2", "2", "2"), kNC).first);
    CHECK(restriction_extension_admissible(triple("1", "1", "2"), kCurv).first);
    CHECK(restriction_extension_admissible(triple("3/2", "3/2", "1"), kCurv).first);
    CHECK(restriction_extension_admissible(triple("1", "1", "2"), kNC).first);
    // Interior point of the curvature hull.
    CHECK(restriction_extension_admissible(triple("5/4", "5/4", "5/4"), kCurv).first);
    // Sum > 5/2 region.
    CHECK(restriction_extension_admissible(triple("1", "1", "5/4"), kCurv).first);
    CHECK_FALSE(restriction_extension_admissible(triple("1", "1", "3"), kCurv).first);
    // Lines never restrict.
    CHECK_FALSE(restriction_extension_admissible(triple("1", "1", "1"), kLine).first);
}

TEST_CASE("regime and input validation") {
    CHECK_THROWS_AS(predict(triple("4", "4", "4"), kArb), error);  // inadmissible
    Regime bad;
    bad.geometry = RegimeGeometry::line_nondegenerate;
    bad.symbol_class = SymbolClass::N_eps;
    CHECK_THROWS_AS(predict(triple("2", "2", "2"), bad), error);  // class mismatch
    CHECK_THROWS_AS(parse_regime("weird"), error);
}

TEST_CASE("prediction CSV table") {
    std::string csv = prediction_table_csv({triple("2", "2", "2"), triple("1", "1", "2")}, kCurv);
    CHECK(csv.find("p,q,r,rho,optimal,log_correction,delta_loss,source") == 0);
    CHECK(csv.find("2,2,2,0.5,true,none,false") != std::string::npos);
    CHECK(csv.find("1,1,2,1,") != std::string::npos);
    CHECK(csv.find("sqrt_log") != std::string::npos);
}
