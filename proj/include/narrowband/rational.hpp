#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "narrowband/common.hpp"

namespace narrowband {

/// Exact rational arithmetic for Lebesgue exponents and predicted rates.
/// Magnitudes stay tiny (exponent combinatorics), so int64 never overflows.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    void normalize() {
        if (den == 0) throw error("rational with zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    double as_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) { return Rational(a.num * b.num, a.den * b.den); }
    friend Rational operator/(Rational a, Rational b) {
        if (b.num == 0) throw error("rational division by zero");
        return Rational(a.num * b.den, a.den * b.num);
    }
    Rational operator-() const { return Rational(-num, den); }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

inline Rational rat_min(Rational a, Rational b) { return a < b ? a : b; }
inline Rational rat_max(Rational a, Rational b) { return a < b ? b : a; }

/// A Lebesgue exponent in [1, infinity], with infinity represented exactly.
struct LebesgueExponent {
    bool is_inf = false;
    Rational value{1};  // meaningful only when !is_inf

    LebesgueExponent() = default;
    LebesgueExponent(Rational v) : is_inf(false), value(v) {}

    static LebesgueExponent infinity() {
        LebesgueExponent e;
        e.is_inf = true;
        return e;
    }

    bool valid() const { return is_inf || value >= Rational(1); }

    /// 1/p, with 1/infinity = 0.
    Rational inv() const { return is_inf ? Rational(0) : Rational(value.den, value.num); }

    double as_double() const {
        return is_inf ? std::numeric_limits<double>::infinity() : value.as_double();
    }

    bool finite() const { return !is_inf; }

    std::string str() const { return is_inf ? "inf" : value.str(); }

    friend bool operator==(const LebesgueExponent& a, const LebesgueExponent& b) {
        if (a.is_inf || b.is_inf) return a.is_inf == b.is_inf;
        return a.value == b.value;
    }
};

/// Parses "2", "3/2", "1.5", "inf". Throws narrowband::error on junk.
inline LebesgueExponent parse_exponent(const std::string& s) {
    if (s == "inf" || s == "infinity" || s == "Inf") return LebesgueExponent::infinity();
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            std::int64_t n = std::stoll(s.substr(0, slash));
            std::int64_t d = std::stoll(s.substr(slash + 1));
            return LebesgueExponent(Rational(n, d));
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            std::size_t frac = s.size() - dot - 1;
            if (frac > 9) throw error("exponent literal too precise: " + s);
            std::int64_t den = 1;
            for (std::size_t i = 0; i < frac; ++i) den *= 10;
            return LebesgueExponent(Rational(std::stoll(digits), den));
        }
        return LebesgueExponent(Rational(std::stoll(s)));
    } catch (const std::invalid_argument&) {
        throw error("cannot parse exponent: " + s);
    } catch (const std::out_of_range&) {
        throw error("exponent out of range: " + s);
    }
}

/// Exponent triple (p, q, r) with the sub-Holder admissibility test.
struct LebesgueTriple {
    LebesgueExponent p, q, r;

    LebesgueTriple() = default;
    LebesgueTriple(LebesgueExponent pp, LebesgueExponent qq, LebesgueExponent rr)
        : p(pp), q(qq), r(rr) {}

    bool valid() const { return p.valid() && q.valid() && r.valid(); }

    Rational inv_sum() const { return p.inv() + q.inv() + r.inv(); }

    /// 1 <= 1/p + 1/q + 1/r.
    bool admissible() const { return valid() && inv_sum() >= Rational(1); }

    std::string str() const { return "(" + p.str() + "," + q.str() + "," + r.str() + ")"; }
};

}  // namespace narrowband
