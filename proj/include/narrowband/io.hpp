#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrowband/geometry.hpp"
#include "narrowband/grid.hpp"
#include "narrowband/norms.hpp"
#include "narrowband/scaling.hpp"
#include "narrowband/symbols.hpp"

namespace narrowband {

using json = nlohmann::json;

inline std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Schema violation with a JSON-pointer to the offending field.
class config_error : public error {
  public:
    config_error(const std::string& pointer, const std::string& msg)
        : error(pointer + ": " + msg), pointer_(pointer) {}
    const std::string& pointer() const { return pointer_; }

  private:
    std::string pointer_;
};

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

inline Curve curve_from_json(const json& j, const std::string& ptr = "/curve") {
    if (!j.is_object()) throw config_error(ptr, "expected an object");
    if (!j.contains("kind") || !j["kind"].is_string())
        throw config_error(ptr + "/kind", "expected a string curve kind");
    std::string kind = j["kind"].get<std::string>();
    try {
        if (kind == "circle") {
            auto c = j.at("center");
            return Curve::make_circle({c.at(0).get<double>(), c.at(1).get<double>()},
                                      j.at("radius").get<double>());
        }
        if (kind == "line") {
            double lam = j.at("lambda").get<double>();
            auto t = j.value("t_range", json::array({-1.0, 1.0}));
            return Curve::make_line(lam, t.at(0).get<double>(), t.at(1).get<double>());
        }
        if (kind == "graph") {
            std::vector<double> cs = j.at("coeffs").get<std::vector<double>>();
            auto t = j.at("xi_range");
            return Curve::make_graph(cs, t.at(0).get<double>(), t.at(1).get<double>());
        }
    } catch (const json::exception& e) {
        throw config_error(ptr, std::string("malformed curve: ") + e.what());
    } catch (const error& e) {
        throw config_error(ptr, e.what());
    }
    throw config_error(ptr + "/kind", "unknown curve kind '" + kind + "'");
}

inline json curve_to_json(const Curve& c) {
    switch (c.kind) {
        case CurveKind::circle:
            return {{"kind", "circle"}, {"center", {c.center.x, c.center.y}}, {"radius", c.radius}};
        case CurveKind::line:
            return {{"kind", "line"}, {"lambda", c.lambda}, {"t_range", {c.t_lo, c.t_hi}}};
        default:
            return {{"kind", "graph"}, {"coeffs", c.coeffs}, {"xi_range", {c.xi_lo, c.xi_hi}}};
    }
}

// ---------------------------------------------------------------------------
// Binary dumps: one JSON header line, then little-endian float64 pairs.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_cplx_block(std::ostream& os, const std::vector<cplx>& vs) {
    for (const cplx& v : vs) {
        double re = v.real(), im = v.imag();
        os.write(reinterpret_cast<const char*>(&re), sizeof(double));
        os.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

inline void read_cplx_block(std::istream& is, std::vector<cplx>& vs) {
    for (cplx& v : vs) {
        double re, im;
        is.read(reinterpret_cast<char*>(&re), sizeof(double));
        is.read(reinterpret_cast<char*>(&im), sizeof(double));
        v = {re, im};
    }
    if (!is) throw error("truncated binary payload");
}

}  // namespace detail

inline void dump_symbol(const Symbol& s, std::ostream& os) {
    json header = {{"n", s.grid.n},
                   {"L", s.grid.L},
                   {"epsilon", s.epsilon},
                   {"class", symbol_class_name(s.claimed_class)},
                   {"curve", s.curve ? curve_to_json(*s.curve) : json(nullptr)}};
    os << header.dump() << "\n";
    detail::write_cplx_block(os, s.values);
}

inline Symbol load_symbol(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw error("missing symbol header");
    json header = json::parse(line);
    FrequencyGrid g(header.at("L").get<double>(), header.at("n").get<int>());
    Symbol s(g);
    s.epsilon = header.at("epsilon").get<double>();
    std::string cls = header.at("class").get<std::string>();
    for (SymbolClass c : {SymbolClass::M_eps, SymbolClass::N_eps, SymbolClass::exact_line,
                          SymbolClass::bochner_riesz, SymbolClass::singular, SymbolClass::custom})
        if (cls == symbol_class_name(c)) s.claimed_class = c;
    if (!header.at("curve").is_null()) s.curve = curve_from_json(header.at("curve"), "/curve");
    detail::read_cplx_block(is, s.values);
    return s;
}

inline void dump_grid_function(const GridFunction& f, std::ostream& os) {
    json header = {{"n", f.grid.n},
                   {"L", f.grid.L},
                   {"side", f.side == Side::spatial ? "spatial" : "frequency"}};
    os << header.dump() << "\n";
    detail::write_cplx_block(os, f.values);
}

inline GridFunction load_grid_function(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw error("missing grid-function header");
    json header = json::parse(line);
    FrequencyGrid g(header.at("L").get<double>(), header.at("n").get<int>());
    GridFunction f(g, header.at("side").get<std::string>() == "spatial" ? Side::spatial
                                                                        : Side::frequency);
    detail::read_cplx_block(is, f.values);
    return f;
}

// ---------------------------------------------------------------------------
// Sweep config
// ---------------------------------------------------------------------------

inline WitnessFamily parse_witness(const std::string& s) {
    for (WitnessFamily w :
         {WitnessFamily::flat_hats, WitnessFamily::rescaled_bumps, WitnessFamily::power_law,
          WitnessFamily::dilation_product, WitnessFamily::random, WitnessFamily::ascent})
        if (s == witness_name(w)) return w;
    throw error("unknown witness family: " + s);
}

inline LebesgueTriple triple_from_json(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.size() != 3) throw config_error(ptr, "expected [p, q, r]");
    auto one = [&](const json& e, const std::string& p) {
        try {
            if (e.is_string()) return parse_exponent(e.get<std::string>());
            if (e.is_number_integer()) return LebesgueExponent(Rational(e.get<std::int64_t>()));
            if (e.is_number()) return parse_exponent(fmt_g17(e.get<double>()));
        } catch (const error& err) {
            throw config_error(p, err.what());
        }
        throw config_error(p, "expected a number or string exponent");
    };
    LebesgueTriple t(one(j[0], ptr + "/0"), one(j[1], ptr + "/1"), one(j[2], ptr + "/2"));
    if (!t.valid()) throw config_error(ptr, "exponents below 1 unsupported");
    return t;
}

inline SweepConfig sweep_config_from_json(const json& j) {
    if (!j.is_object()) throw config_error("", "config must be a JSON object");
    SweepConfig cfg;

    std::string builder = j.value("builder", "line");
    if (builder == "tube")
        cfg.builder = SweepBuilder::tube;
    else if (builder == "convolved")
        cfg.builder = SweepBuilder::convolved;
    else if (builder == "line")
        cfg.builder = SweepBuilder::line;
    else
        throw config_error("/builder", "expected tube|convolved|line");

    if (j.contains("curve")) cfg.curve = curve_from_json(j["curve"], "/curve");
    if (j.contains("lambda")) {
        if (!j["lambda"].is_number()) throw config_error("/lambda", "expected a number");
        cfg.lambda = j["lambda"].get<double>();
    }

    if (!j.contains("regime")) throw config_error("/regime", "missing");
    try {
        cfg.regime.geometry = parse_regime(j["regime"].get<std::string>());
    } catch (const error& e) {
        throw config_error("/regime", e.what());
    }
    std::string cls = j.value("class", "M_eps");
    if (cls == "M_eps")
        cfg.regime.symbol_class = SymbolClass::M_eps;
    else if (cls == "N_eps")
        cfg.regime.symbol_class = SymbolClass::N_eps;
    else
        throw config_error("/class", "expected M_eps|N_eps");

    if (!j.contains("triple")) throw config_error("/triple", "missing");
    cfg.triple = triple_from_json(j["triple"], "/triple");

    int n = j.value("grid_n", 1024);
    double L = j.value("L", 2.0);
    try {
        cfg.grid = FrequencyGrid(L, n);
    } catch (const error& e) {
        throw config_error("/grid_n", e.what());
    }

    cfg.epsilons.clear();
    if (j.contains("eps_log2")) {
        if (!j["eps_log2"].is_array()) throw config_error("/eps_log2", "expected an array");
        for (const auto& e : j["eps_log2"]) cfg.epsilons.push_back(std::pow(2.0, e.get<double>()));
    } else if (j.contains("epsilons")) {
        if (!j["epsilons"].is_array()) throw config_error("/epsilons", "expected an array");
        for (const auto& e : j["epsilons"]) cfg.epsilons.push_back(e.get<double>());
    } else {
        cfg.epsilons = {0.125, 0.0625, 0.03125, 0.015625};
    }
    for (double e : cfg.epsilons)
        if (!(e > 0.0 && e < 1.0)) throw config_error("/epsilons", "epsilon values must lie in (0,1)");

    if (j.contains("witnesses")) {
        cfg.probe.families.clear();
        for (const auto& w : j["witnesses"]) {
            try {
                cfg.probe.families.push_back(parse_witness(w.get<std::string>()));
            } catch (const error& e) {
                throw config_error("/witnesses", e.what());
            }
        }
    }
    if (j.contains("ascent")) {
        cfg.probe.restarts = j["ascent"].value("restarts", cfg.probe.restarts);
        cfg.probe.iters = j["ascent"].value("iters", cfg.probe.iters);
        cfg.probe.use_ascent = j["ascent"].value("enabled", true);
    }
    cfg.probe.power_law_delta = j.value("power_law_delta", 0.05);

    std::string corr = j.value("log_correction", "none");
    if (corr == "sqrt")
        cfg.correction = FitCorrection::sqrt_log;
    else if (corr == "auto")
        cfg.correction = FitCorrection::auto_select;
    else if (corr == "none")
        cfg.correction = FitCorrection::none;
    else
        throw config_error("/log_correction", "expected auto|none|sqrt");

    cfg.tolerance = j.value("tolerance", 0.0);
    cfg.seed = j.value("seed", 1ULL);

    try {
        cfg.validate();
    } catch (const error& e) {
        throw config_error("", e.what());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Result emission
// ---------------------------------------------------------------------------

inline std::string results_csv(const ScalingFit& fit) {
    std::ostringstream os;
    os << "epsilon,best_lower_bound,witness\n";
    for (const SweepPoint& p : fit.points)
        os << fmt_g17(p.epsilon) << "," << fmt_g17(p.best_lower_bound) << ","
           << witness_name(p.witness) << "\n";
    return os.str();
}

inline json fit_to_json(const ScalingFit& fit) {
    json pts = json::array();
    for (const SweepPoint& p : fit.points)
        pts.push_back({{"epsilon", p.epsilon},
                       {"value", p.best_lower_bound},
                       {"witness", witness_name(p.witness)}});
    json predicted = {{"rho", fit.predicted.rho ? json(fit.predicted.rho->as_double()) : json(nullptr)},
                      {"optimal", fit.predicted.optimal},
                      {"log_correction", log_correction_name(fit.predicted.log_correction)},
                      {"delta_loss", fit.predicted.delta_loss},
                      {"source", fit.predicted.source}};
    return {{"slope", fit.fit.slope},
            {"intercept", fit.fit.intercept},
            {"log_coefficient", fit.fit.log_coefficient},
            {"r_squared", fit.fit.r_squared},
            {"points", pts},
            {"predicted", predicted},
            {"ceiling", fit.ceiling.as_double()},
            {"tolerance", fit.tolerance},
            {"verdict", verdict_name(fit.verdict)},
            {"ceiling_tripwire_ok", fit.ceiling_tripwire_ok},
            {"delta_convention", fit.delta_convention}};
}

inline std::string plotdata_tsv(const ScalingFit& fit) {
    std::ostringstream os;
    os << "# ln_eps\tln_value\tfitted_ln_value\n";
    for (const SweepPoint& p : fit.points) {
        double lx = std::log(p.epsilon);
        double fitted = fit.fit.slope * lx + fit.fit.intercept +
                        fit.fit.log_coefficient * std::log(-lx);
        os << fmt_g17(lx) << "\t" << fmt_g17(std::log(p.best_lower_bound)) << "\t" << fmt_g17(fitted)
           << "\n";
    }
    return os.str();
}

inline json norm_estimate_to_json(const NormEstimate& e, double epsilon) {
    return {{"triple", {e.triple.p.str(), e.triple.q.str(), e.triple.r.str()}},
            {"epsilon", epsilon},
            {"lower_bound", e.lower_bound},
            {"witness", witness_name(e.witness)},
            {"params", e.params},
            {"seed", e.seed}};
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> outputs;
};

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

inline std::string config_hash_hex(const json& config) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
    json j = {{"command", m.command},       {"config_hash", m.config_hash},
              {"seed", m.seed},             {"tool_version", m.tool_version},
              {"started_at", m.started_at}, {"finished_at", m.finished_at},
              {"outputs", m.outputs}};
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw error("cannot open for writing: " + path);
    os << content;
}

}  // namespace narrowband
