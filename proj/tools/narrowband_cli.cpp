// Command-line laboratory: exponent predictions, epsilon sweeps with
// measured-vs-predicted verdicts, and symbol class verification.
//
// Exit codes: 0 ok (consistent or inconclusive), 2 invalid input,
// 3 theorem-inconsistent sweep result, 4 internal numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "narrowband/exponents.hpp"
#include "narrowband/io.hpp"
#include "narrowband/scaling.hpp"
#include "narrowband/symbols.hpp"

namespace fs = std::filesystem;
using namespace narrowband;

namespace {

constexpr const char* kVersion = "narrowband 1.0.0";

struct GlobalOpts {
    std::uint64_t seed = 1;
    bool seed_set = false;
    int threads = 0;
    std::string out_dir;
    int grid_n = 0;
    std::string log_correction;
};

std::string resolve_out_dir(const GlobalOpts& g) {
    if (const char* env = std::getenv("NARROWBAND_OUT")) return env;
    return g.out_dir;
}

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("", "cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw config_error("", std::string("invalid JSON: ") + e.what());
    }
}

int cmd_predict(const GlobalOpts& g, const std::string& p, const std::string& q,
                const std::string& r, const std::string& regime_s, const std::string& class_s,
                const std::string& triples_file) {
    Regime regime;
    regime.geometry = parse_regime(regime_s);
    regime.symbol_class = class_s == "N_eps" ? SymbolClass::N_eps : SymbolClass::M_eps;

    std::vector<LebesgueTriple> triples;
    if (!triples_file.empty()) {
        json j = load_json_file(triples_file);
        if (!j.is_array()) throw config_error("", "triples file must hold a JSON array");
        for (std::size_t i = 0; i < j.size(); ++i)
            triples.push_back(triple_from_json(j[i], "/" + std::to_string(i)));
    } else {
        LebesgueTriple t(parse_exponent(p), parse_exponent(q), parse_exponent(r));
        if (!t.valid()) throw config_error("", "exponents below 1 unsupported");
        triples.push_back(t);
    }
    for (const auto& t : triples)
        if (!t.valid()) throw config_error("", "exponents below 1 unsupported");

    if (triples.size() == 1 && triples_file.empty()) {
        ExponentPrediction pr = predict(triples[0], regime);
        if (pr.rho)
            std::printf("rho=%g optimal=%s log=%s delta_loss=%s source=\"%s\"\n",
                        pr.rho->as_double(), pr.optimal ? "true" : "false",
                        log_correction_name(pr.log_correction), pr.delta_loss ? "true" : "false",
                        pr.source.c_str());
        else
            std::printf("rho=none (no proven bound) source=\"%s\"\n", pr.source.c_str());
    } else {
        std::string csv = prediction_table_csv(triples, regime);
        std::string out = resolve_out_dir(g);
        if (!out.empty()) {
            fs::create_directories(out);
            write_text_file((fs::path(out) / "predictions.csv").string(), csv);
            std::printf("wrote %s\n", (fs::path(out) / "predictions.csv").c_str());
        } else {
            std::fputs(csv.c_str(), stdout);
        }
    }
    return 0;
}

int cmd_sweep(const GlobalOpts& g, const std::string& config_path) {
    json cfg_json = load_json_file(config_path);
    SweepConfig cfg = sweep_config_from_json(cfg_json);
    if (g.seed_set) cfg.seed = g.seed;
    if (g.grid_n > 0) cfg.grid = FrequencyGrid(cfg.grid.L, g.grid_n);
    if (!g.log_correction.empty()) {
        if (g.log_correction == "none")
            cfg.correction = FitCorrection::none;
        else if (g.log_correction == "sqrt")
            cfg.correction = FitCorrection::sqrt_log;
        else if (g.log_correction == "auto")
            cfg.correction = FitCorrection::auto_select;
        else
            throw config_error("/log_correction", "expected auto|none|sqrt");
    }

    RunManifest manifest;
    manifest.command = "sweep " + config_path;
    manifest.config_hash = config_hash_hex(cfg_json);
    manifest.seed = cfg.seed;
    manifest.tool_version = kVersion;
    manifest.started_at = iso_timestamp();

    ScalingFit fit = sweep(cfg);

    std::string out = resolve_out_dir(g);
    if (out.empty()) out = ".";
    fs::create_directories(out);
    write_text_file((fs::path(out) / "results.csv").string(), results_csv(fit));
    write_text_file((fs::path(out) / "fit.json").string(), fit_to_json(fit).dump(2) + "\n");
    write_text_file((fs::path(out) / "plotdata.tsv").string(), plotdata_tsv(fit));
    manifest.outputs = {"results.csv", "fit.json", "plotdata.tsv"};
    manifest.finished_at = iso_timestamp();
    write_manifest(manifest, (fs::path(out) / "manifest.json").string());

    std::printf("VERDICT %s slope=%g predicted=%s\n", verdict_name(fit.verdict), fit.fit.slope,
                fit.predicted.rho ? fmt_g17(fit.predicted.rho->as_double()).c_str() : "none");
    if (!fit.ceiling_tripwire_ok)
        std::fprintf(stderr,
                     "warning: fitted slope exceeds the necessary ceiling + tolerance "
                     "(engine consistency tripwire)\n");
    return fit.verdict == Verdict::inconsistent ? 3 : 0;
}

int cmd_verify_symbol(const GlobalOpts& g, const std::string& curve_path,
                      const std::string& class_s, std::vector<double>& eps_list, int order) {
    json cj = load_json_file(curve_path);
    Curve curve = curve_from_json(cj, "");
    if (eps_list.empty()) eps_list = {0.125, 0.0625, 0.03125, 0.015625};
    std::sort(eps_list.rbegin(), eps_list.rend());

    FrequencyGrid grid(2.0, g.grid_n > 0 ? g.grid_n : 1024);
    bool n_class = class_s == "N_eps";

    std::vector<ClassReport> reports;
    for (double eps : eps_list) {
        Symbol s = n_class ? build_convolved_measure_symbol(curve, eps, grid)
                           : build_tube_symbol(curve, eps, grid);
        reports.push_back(verify_class(s, order));
    }
    ClassCeilings ceil = ceilings_from_reference(reports.front());

    std::printf("epsilon,sup,d10,d01,d20,d02,d11,tangential,support_excess,pass\n");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        ClassReport& rep = reports[i];
        bool pass = rep.sup_value <= ceil.value_bound &&
                    rep.support_excess <= ceil.support_factor * eps_list[i] + grid.delta();
        for (const auto& [idx, v] : rep.derivative_constants)
            if (idx.first + idx.second >= 1 && v > ceil.derivative_bound) pass = false;
        if (n_class && rep.tangential_constant > ceil.tangential_bound) pass = false;
        auto get = [&](int a, int b) {
            auto it = rep.derivative_constants.find({a, b});
            return it == rep.derivative_constants.end() ? 0.0 : it->second;
        };
        std::printf("%g,%g,%g,%g,%g,%g,%g,%g,%g,%s\n", eps_list[i], rep.sup_value, get(1, 0),
                    get(0, 1), get(2, 0), get(0, 2), get(1, 1), rep.tangential_constant,
                    rep.support_excess, pass ? "true" : "false");
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for narrowly supported bilinear multipliers"};
    app.set_version_flag("--version", kVersion);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "random seed (64-bit)")->each([&](std::string) {
        g.seed_set = true;
    });
    app.add_option("--threads", g.threads, "worker thread cap (1 = fully serial)");
    app.add_option("--out", g.out_dir, "output directory (NARROWBAND_OUT overrides)");
    app.add_option("--grid-n", g.grid_n, "frequency grid resolution")
        ->check(CLI::IsMember({256, 512, 1024, 2048, 4096}));
    app.add_option("--log-correction", g.log_correction, "auto|none|sqrt");

    std::string p = "2", q = "2", r = "2", regime_s = "arbitrary", class_s = "M_eps";
    std::string triples_file;
    auto* predict_cmd = app.add_subcommand("predict", "predicted decay exponent for a triple");
    predict_cmd->add_option("--p", p, "exponent p (number, fraction or inf)");
    predict_cmd->add_option("--q", q, "exponent q");
    predict_cmd->add_option("--r", r, "exponent r");
    predict_cmd->add_option("--regime", regime_s,
                            "arbitrary|curvature|nowhere_characteristic|line|line_degenerate");
    predict_cmd->add_option("--class", class_s, "M_eps|N_eps");
    predict_cmd->add_option("--triples", triples_file, "JSON file with a list of triples (CSV out)");

    std::string config_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "epsilon sweep with verdict");
    sweep_cmd->add_option("--config", config_path, "sweep config JSON")->required();

    std::string curve_path;
    std::string vclass = "M_eps";
    std::vector<double> eps_list;
    int order = 2;
    auto* verify_cmd = app.add_subcommand("verify-symbol", "class-constant table over epsilons");
    verify_cmd->add_option("--curve", curve_path, "curve JSON file")->required();
    verify_cmd->add_option("--class", vclass, "M_eps|N_eps");
    verify_cmd->add_option("--eps", eps_list, "epsilon values");
    verify_cmd->add_option("--order", order, "max derivative order");

    app.require_subcommand(1);
    for (CLI::App* sub : {predict_cmd, sweep_cmd, verify_cmd}) sub->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (g.threads > 0) thread_cap().store(g.threads);

    try {
        if (predict_cmd->parsed()) return cmd_predict(g, p, q, r, regime_s, class_s, triples_file);
        if (sweep_cmd->parsed()) return cmd_sweep(g, config_path);
        if (verify_cmd->parsed()) return cmd_verify_symbol(g, curve_path, vclass, eps_list, order);
    } catch (const config_error& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return 2;
    } catch (const error& e) {
        // Preconditions on grids/exponents are input problems; anything else
        // that escapes is a numerical failure.
        std::string msg = e.what();
        bool input_side = msg.find("grid too coarse") != std::string::npos ||
                          msg.find("exponent") != std::string::npos ||
                          msg.find("unknown") != std::string::npos ||
                          msg.find("inadmissible") != std::string::npos ||
                          msg.find("cannot open") != std::string::npos ||
                          msg.find("needs at least") != std::string::npos;
        std::fprintf(stderr, "%s: %s\n", input_side ? "invalid input" : "numerical failure",
                     msg.c_str());
        return input_side ? 2 : 4;
    }
    return 2;
}
