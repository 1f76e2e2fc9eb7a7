// Command-line front end: every subcommand is a thin orchestration of one
// library operation. Options may come from --config JSON (keys mirror the
// flag names with underscores) and are overridden by explicit flags.
// Exit codes: 0 success, 2 usage/config error, 3 data error, 4 numerical
// failure; errors are emitted as one-line JSON on stderr.
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpr/breakdown.hpp"
#include "rpr/calibration.hpp"
#include "rpr/dataio.hpp"
#include "rpr/errors.hpp"
#include "rpr/experiments.hpp"
#include "rpr/model.hpp"
#include "rpr/report_io.hpp"
#include "rpr/runner.hpp"
#include "rpr/util.hpp"

namespace {

using nlohmann::json;

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw rpr::ConfigError("config file not readable: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw rpr::ConfigError("config file " + path + ": " + e.what());
    }
    if (!doc.is_object())
        throw rpr::ConfigError("config file must hold a JSON object");
    return doc;
}

/// Fills `into` from config key `key` unless the flag was passed explicitly.
template <typename T>
void merge(const json& cfg, const CLI::Option* opt, const char* key, T& into) {
    if (opt != nullptr && opt->count() > 0) return;
    const auto it = cfg.find(key);
    if (it == cfg.end()) return;
    try {
        into = it->get<T>();
    } catch (const json::exception&) {
        throw rpr::ConfigError(std::string("config key '") + key +
                               "' has the wrong type");
    }
}

/// merge() for values whose "absent" state matters: the flag value wins when
/// the flag was passed, the config key fills in otherwise, and `into` stays
/// disengaged when neither is present.
template <typename T>
void merge_opt(const json& cfg, const CLI::Option* opt, const T& flag_value,
               const char* key, std::optional<T>& into) {
    if (opt != nullptr && opt->count() > 0) {
        into = flag_value;
        return;
    }
    const auto it = cfg.find(key);
    if (it == cfg.end()) return;
    try {
        into = it->get<T>();
    } catch (const json::exception&) {
        throw rpr::ConfigError(std::string("config key '") + key +
                               "' has the wrong type");
    }
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw rpr::ConfigError("output path not writable: " + out_path);
    out << text;
    if (!out) throw rpr::ConfigError("write failed: " + out_path);
}

std::uint64_t require_seed(const std::optional<std::uint64_t>& seed) {
    if (!seed)
        throw rpr::ConfigError(
            "--seed is required (stochastic command, no silent "
            "nondeterminism)");
    return *seed;
}

rpr::Scheme scheme_from(const std::string& name) {
    if (name == "subsampling") return rpr::Scheme::subsampling;
    if (name == "bootstrap") return rpr::Scheme::bootstrap;
    throw rpr::ConfigError("unknown scheme: " + name);
}

rpr::BlockMode block_mode_from(const std::string& name) {
    if (name == "overlapping") return rpr::BlockMode::overlapping;
    if (name == "nonoverlapping") return rpr::BlockMode::nonoverlapping;
    throw rpr::ConfigError("unknown block mode: " + name);
}

std::string render_report(const rpr::ExperimentReport& report,
                          const std::string& format) {
    if (format == "csv") return rpr::report_to_csv(report);
    if (format == "json") return rpr::report_to_json(report).dump(2) + "\n";
    throw rpr::ConfigError("unknown format: " + format);
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    rpr::DgpConfig dgp;
    double eta = 0.0;
    double multiplier = 3.0;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_flag = 0;
    std::string config_path, out_path;
};

void run_simulate(const SimulateArgs& a) {
    const std::uint64_t seed = require_seed(a.seed);
    rpr::TimeSeriesSample sample = rpr::simulate_dgp(a.dgp, seed, 0);
    if (a.eta > 0.0) {
        rpr::ContaminationConfig cc;
        cc.eta = a.eta;
        cc.multiplier = a.multiplier;
        sample = rpr::contaminate(sample, cc, seed, 1);
    }
    write_output(rpr::sample_to_csv(sample), a.out_path);
}

// -------------------------------------------------------------------- test

struct TestArgs {
    std::string data_path, config_path, out_path, format = "json";
    rpr::RegressionSpec spec;
    rpr::RunConfig run;
    std::string scheme = "subsampling", block_mode = "overlapping";
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_flag = 0;
    std::optional<int> m_override;
    int m_flag = 0;
    std::optional<double> c_override;
    double c_flag = 0.0;
};

void run_test_cmd(const TestArgs& a) {
    rpr::RunConfig run = a.run;
    run.scheme = scheme_from(a.scheme);
    run.block_mode = block_mode_from(a.block_mode);
    run.m_override = a.m_override;
    run.c_override = a.c_override;
    run.seed = require_seed(a.seed);
    rpr::CsvSchema schema;
    schema.require_core = a.spec.response.empty();
    const rpr::Dataset ds = rpr::load_csv(a.data_path, schema);
    const rpr::RunReport report = rpr::run_test(ds, a.spec, run);
    if (a.format == "csv") {
        write_output(rpr::run_report_to_csv(report), a.out_path);
    } else if (a.format == "json") {
        write_output(rpr::run_report_to_json(report).dump(2) + "\n", a.out_path);
    } else {
        throw rpr::ConfigError("unknown format: " + a.format);
    }
}

// ---------------------------------------------------------------- mc-power

struct PowerArgs {
    rpr::PowerStudyConfig study;
    rpr::DgpConfig cell;
    double eta = 0.0;
    double multiplier = 3.0;
    std::vector<std::string> methods;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_flag = 0;
    std::string config_path, out_path, format = "csv";
};

rpr::DgpConfig dgp_from_json(const json& j) {
    rpr::DgpConfig d;
    if (j.contains("n")) d.n = j["n"].get<int>();
    if (j.contains("alpha")) d.alpha = j["alpha"].get<double>();
    if (j.contains("beta")) d.beta = j["beta"].get<std::vector<double>>();
    if (j.contains("mu")) d.mu = j["mu"].get<double>();
    if (j.contains("rho")) d.rho = j["rho"].get<std::vector<double>>();
    if (j.contains("phi")) d.phi = j["phi"].get<double>();
    if (j.contains("sigma_v")) d.sigma_v = j["sigma_v"].get<double>();
    if (j.contains("sigma_e")) d.sigma_e = j["sigma_e"].get<double>();
    if (j.contains("x_init")) d.x_init = j["x_init"].get<double>();
    if (j.contains("burn_in")) d.burn_in = j["burn_in"].get<int>();
    return d;
}

void run_mc_power(PowerArgs a, const json& cfg) {
    rpr::PowerStudyConfig study = a.study;
    if (cfg.contains("grid")) {
        study.grid.clear();
        for (const json& cell : cfg.at("grid")) study.grid.push_back(dgp_from_json(cell));
    } else {
        study.grid = {a.cell};
    }
    if (!a.methods.empty()) {
        study.methods.clear();
        for (const std::string& name : a.methods)
            study.methods.push_back(rpr::method_from_name(name));
    }
    if (a.eta > 0.0) {
        rpr::ContaminationConfig cc;
        cc.eta = a.eta;
        cc.multiplier = a.multiplier;
        study.contamination = cc;
    }
    study.seed = require_seed(a.seed);
    write_output(render_report(rpr::power_study(study), a.format), a.out_path);
}

// ------------------------------------------------------------- sensitivity

struct SensitivityArgs {
    rpr::SensitivityStudyConfig study;
    std::vector<std::string> methods;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_flag = 0;
    std::string config_path, out_path, format = "csv";
};

void run_sensitivity(SensitivityArgs a) {
    if (!a.methods.empty()) {
        a.study.methods.clear();
        for (const std::string& name : a.methods)
            a.study.methods.push_back(rpr::method_from_name(name));
    }
    a.study.seed = require_seed(a.seed);
    write_output(render_report(rpr::sensitivity_study(a.study), a.format),
                 a.out_path);
}

// -------------------------------------------------------- quantile-surface

struct SurfaceArgs {
    rpr::QuantileSurfaceConfig study;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_flag = 0;
    std::string config_path, out_path, format = "csv";
};

void run_surface(SurfaceArgs a) {
    a.study.seed = require_seed(a.seed);
    write_output(render_report(rpr::quantile_surface(a.study), a.format),
                 a.out_path);
}

// --------------------------------------------------------------- breakdown

struct BreakdownArgs {
    int n = 120, m = 10;
    double t = 0.95, b = -1.0;  // b < 0: robust (Theorem 2) formulas
    std::string scheme = "subsampling";
    std::string variant = "table-matching";
    std::string grid;  // "", "table1", "table2"
    std::string out_path;
};

std::string breakdown_grid_csv(const BreakdownArgs& a) {
    std::ostringstream out;
    const std::vector<int> ms = {10, 20, 30};
    const std::vector<double> ts = {0.90, 0.95};
    char buf[32];
    const auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    if (a.grid == "table1") {
        const double b = a.b < 0.0 ? 0.5 : a.b;
        out << "n,m,t,b,scheme,lower,upper,capped\n";
        for (const char* scheme : {"subsampling", "bootstrap"})
            for (int m : ms)
                for (double t : ts) {
                    const rpr::BreakdownBounds bounds =
                        std::string(scheme) == "subsampling"
                            ? rpr::thm1_subsampling_bounds(a.n, m, t, b)
                            : rpr::thm1_bootstrap_bounds(a.n, m, t, b);
                    out << a.n << ',' << m << ',' << rpr::format_double(t)
                        << ',' << rpr::format_double(b) << ',' << scheme << ','
                        << fmt(bounds.lower) << ',' << fmt(bounds.upper) << ','
                        << (bounds.capped ? "true" : "false") << '\n';
                }
        return out.str();
    }
    if (a.grid == "table2") {
        out << "n,m,t,scheme,value,capped,r_rounded\n";
        for (const char* scheme : {"subsampling", "bootstrap"})
            for (int m : ms)
                for (double t : ts) {
                    const rpr::BreakdownPoint p =
                        std::string(scheme) == "subsampling"
                            ? rpr::thm2_robust_subsampling(a.n, m, t)
                            : rpr::thm2_robust_bootstrap(
                                  a.n, m, t,
                                  rpr::BootstrapVariant::table_matching);
                    out << a.n << ',' << m << ',' << rpr::format_double(t)
                        << ',' << scheme << ',' << fmt(p.value) << ','
                        << (p.capped ? "true" : "false") << ','
                        << (p.r_rounded ? "true" : "false") << '\n';
                }
        return out.str();
    }
    throw rpr::ConfigError("unknown grid: " + a.grid + " (table1|table2)");
}

void run_breakdown(const BreakdownArgs& a) {
    if (!a.grid.empty()) {
        write_output(breakdown_grid_csv(a), a.out_path);
        return;
    }
    char buf[80];
    if (a.b >= 0.0) {
        const rpr::BreakdownBounds bounds =
            a.scheme == "subsampling"
                ? rpr::thm1_subsampling_bounds(a.n, a.m, a.t, a.b)
                : rpr::thm1_bootstrap_bounds(a.n, a.m, a.t, a.b);
        std::snprintf(buf, sizeof(buf), "%.4f, %.4f\n", bounds.lower,
                      bounds.upper);
    } else {
        rpr::BreakdownPoint p;
        if (a.scheme == "subsampling") {
            p = rpr::thm2_robust_subsampling(a.n, a.m, a.t);
        } else {
            const auto variant = a.variant == "theorem-literal"
                                     ? rpr::BootstrapVariant::theorem_literal
                                     : rpr::BootstrapVariant::table_matching;
            if (a.variant != "theorem-literal" && a.variant != "table-matching")
                throw rpr::ConfigError("unknown variant: " + a.variant);
            p = rpr::thm2_robust_bootstrap(a.n, a.m, a.t, variant);
        }
        std::snprintf(buf, sizeof(buf), "%.4f\n", p.value);
    }
    write_output(buf, a.out_path);
}

// --------------------------------------------------------------- calibrate

struct CalibrateArgs {
    std::string data_path, config_path, out_path;
    rpr::RegressionSpec spec;
    double level = 0.90;
    std::string scheme = "subsampling", block_mode = "overlapping";
    int bootstrap_replications = 299;
    int inner_replications = 200;
    double coverage_tolerance = 0.03;
    std::vector<int> m_grid;
    std::vector<double> c_grid;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_flag = 0;
};

void run_calibrate(const CalibrateArgs& a) {
    const std::uint64_t seed = require_seed(a.seed);
    rpr::CsvSchema schema;
    schema.require_core = a.spec.response.empty();
    const rpr::Dataset ds = rpr::load_csv(a.data_path, schema);
    const rpr::AlignedSample aligned = rpr::build_regression_sample(ds, a.spec);
    const rpr::TimeSeriesSample& sample = aligned.sample;

    rpr::CalibrationConfig cal;
    cal.target_level = a.level;
    cal.inner_replications = a.inner_replications;
    cal.coverage_tolerance = a.coverage_tolerance;
    cal.seed = seed;
    cal.resampling.scheme = scheme_from(a.scheme);
    cal.resampling.block_mode = block_mode_from(a.block_mode);
    cal.resampling.replications = a.bootstrap_replications;
    cal.resampling.mode = rpr::Pipeline::fast_robust;
    cal.resampling.tuning_c = rpr::choose_c(sample).c;
    cal.resampling.seed = rpr::derive_seed(seed, 1);

    cal.m_grid = a.m_grid.empty() ? rpr::default_block_grid(
                                        sample.n(), rpr::Pipeline::fast_robust)
                                  : a.m_grid;
    const rpr::BlockSizeSelection robust_m = rpr::select_block_size(sample, cal);

    rpr::CalibrationConfig conv_cal = cal;
    conv_cal.m_grid = a.m_grid.empty()
                          ? rpr::default_block_grid(sample.n(),
                                                    rpr::Pipeline::conventional)
                          : a.m_grid;
    conv_cal.resampling.mode = rpr::Pipeline::conventional;
    const rpr::BlockSizeSelection conv_m = rpr::select_block_size(sample, conv_cal);

    cal.resampling.m = robust_m.m;
    if (a.c_grid.empty()) {
        std::vector<double> grid;
        for (double level : {0.90, 0.95, 0.99}) {
            const double c = rpr::choose_c(sample, level).c;
            if (grid.empty() || c > grid.back()) grid.push_back(c);
        }
        cal.c_grid = grid;
    } else {
        cal.c_grid = a.c_grid;
    }
    const rpr::RobustnessSelection sel = rpr::select_robustness(sample, cal);

    const json doc{{"schema_version", rpr::REPORT_SCHEMA_VERSION},
                   {"study", "calibrate"},
                   {"provenance", json{{"seed", seed}}},
                   {"n", sample.n()},
                   {"m", robust_m.m},
                   {"m_fallback", robust_m.fallback},
                   {"m_conventional", conv_m.m},
                   {"m_conventional_fallback", conv_m.fallback},
                   {"c", rpr::json_number(sel.c)},
                   {"c_fallback", sel.fallback}};
    write_output(doc.dump(2) + "\n", a.out_path);
}

// --------------------------------------------------------------------- oos

struct OosArgs {
    std::string data_path, config_path, out_path, format = "csv";
    rpr::RegressionSpec spec;
    rpr::RollingOosConfig study;
};

void run_oos(const OosArgs& a) {
    rpr::CsvSchema schema;
    schema.require_core = a.spec.response.empty();
    const rpr::Dataset ds = rpr::load_csv(a.data_path, schema);
    const rpr::AlignedSample aligned = rpr::build_regression_sample(ds, a.spec);
    write_output(render_report(rpr::rolling_oos_study(aligned.sample, a.study),
                               a.format),
                 a.out_path);
}

int fail(int code, const char* type, const std::string& message) {
    std::cerr << json{{"error", json{{"type", type}, {"message", message}}}}
                     .dump()
              << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust inference for predictive regressions"};
    app.require_subcommand(1);
    std::function<void()> action;

    // simulate ------------------------------------------------------------
    SimulateArgs sim;
    auto* c_sim = app.add_subcommand(
        "simulate", "Emit a simulated (optionally contaminated) sample CSV");
    auto* sim_cfg = c_sim->add_option("--config", sim.config_path,
                                      "JSON config file (flags override)");
    auto* sim_n = c_sim->add_option("--n", sim.dgp.n, "observations");
    auto* sim_alpha = c_sim->add_option("--alpha", sim.dgp.alpha, "intercept");
    auto* sim_beta = c_sim->add_option("--beta", sim.dgp.beta,
                                       "slope per predictor (comma list)")
                         ->delimiter(',');
    auto* sim_mu = c_sim->add_option("--mu", sim.dgp.mu, "AR intercept");
    auto* sim_rho = c_sim->add_option("--rho", sim.dgp.rho,
                                      "AR coefficient per predictor")
                        ->delimiter(',');
    auto* sim_phi = c_sim->add_option("--phi", sim.dgp.phi, "error coupling");
    auto* sim_sv = c_sim->add_option("--sigma-v", sim.dgp.sigma_v,
                                     "predictor innovation scale");
    auto* sim_se2 = c_sim->add_option("--sigma-e", sim.dgp.sigma_e,
                                      "idiosyncratic error scale");
    auto* sim_xi = c_sim->add_option("--x-init", sim.dgp.x_init, "x start");
    auto* sim_bi = c_sim->add_option("--burn-in", sim.dgp.burn_in,
                                     "discarded warm-up steps");
    auto* sim_eta = c_sim->add_option(
        "--eta", sim.eta, "contamination probability (0 disables)");
    auto* sim_mult = c_sim->add_option("--multiplier", sim.multiplier,
                                       "contamination multiplier");
    auto* sim_seed = c_sim->add_option("--seed", sim.seed_flag, "RNG seed");
    c_sim->add_option("--out", sim.out_path, "output path (default stdout)");
    c_sim->callback([&] {
        const json cfg = load_config_file(sim.config_path);
        (void)sim_cfg;
        merge(cfg, sim_n, "n", sim.dgp.n);
        merge(cfg, sim_alpha, "alpha", sim.dgp.alpha);
        merge(cfg, sim_beta, "beta", sim.dgp.beta);
        merge(cfg, sim_mu, "mu", sim.dgp.mu);
        merge(cfg, sim_rho, "rho", sim.dgp.rho);
        merge(cfg, sim_phi, "phi", sim.dgp.phi);
        merge(cfg, sim_sv, "sigma_v", sim.dgp.sigma_v);
        merge(cfg, sim_se2, "sigma_e", sim.dgp.sigma_e);
        merge(cfg, sim_xi, "x_init", sim.dgp.x_init);
        merge(cfg, sim_bi, "burn_in", sim.dgp.burn_in);
        merge(cfg, sim_eta, "eta", sim.eta);
        merge(cfg, sim_mult, "multiplier", sim.multiplier);
        merge_opt(cfg, sim_seed, sim.seed_flag, "seed", sim.seed);
        action = [&] { run_simulate(sim); };
    });

    // test ----------------------------------------------------------------
    TestArgs tst;
    auto* c_tst = app.add_subcommand(
        "test", "Rolling-window robust predictability tests on a CSV dataset");
    c_tst->add_option("--data", tst.data_path, "input CSV")->required();
    auto* tst_cfg = c_tst->add_option("--config", tst.config_path,
                                      "JSON config file (flags override)");
    auto* tst_resp = c_tst->add_option(
        "--response", tst.spec.response,
        "raw response column (empty: horizon returns from price/dividend)");
    auto* tst_pred = c_tst->add_option("--predictors", tst.spec.predictors,
                                       "predictor columns (comma list)")
                         ->delimiter(',');
    auto* tst_hor = c_tst->add_option("--horizon", tst.spec.horizon,
                                      "return horizon (constructed response)");
    auto* tst_level = c_tst->add_option("--level", tst.run.level,
                                        "confidence level");
    auto* tst_win = c_tst->add_option("--window", tst.run.window,
                                      "rolling width (0: full sample)");
    auto* tst_scheme = c_tst->add_option("--scheme", tst.scheme,
                                         "subsampling|bootstrap");
    auto* tst_bm = c_tst->add_option("--block-mode", tst.block_mode,
                                     "overlapping|nonoverlapping");
    auto* tst_reps = c_tst->add_option("--replications",
                                       tst.run.bootstrap_replications,
                                       "bootstrap resamples");
    auto* tst_mg = c_tst->add_option("--m-grid", tst.run.m_grid,
                                     "candidate block lengths")
                       ->delimiter(',');
    auto* tst_cg = c_tst->add_option("--c-grid", tst.run.c_grid,
                                     "candidate robustness bounds")
                       ->delimiter(',');
    auto* tst_inner = c_tst->add_option("--inner", tst.run.inner_replications,
                                        "calibration pseudo-samples");
    auto* tst_tol = c_tst->add_option("--tolerance",
                                      tst.run.coverage_tolerance,
                                      "calibration coverage tolerance");
    auto* tst_m = c_tst->add_option("--m", tst.m_flag,
                                    "fixed block length (skip calibration)");
    auto* tst_c = c_tst->add_option("--c", tst.c_flag,
                                    "fixed robustness bound (skip calibration)");
    auto* tst_seed = c_tst->add_option("--seed", tst.seed_flag, "RNG seed");
    auto* tst_fmt = c_tst->add_option("--format", tst.format, "json|csv");
    c_tst->add_option("--out", tst.out_path, "output path (default stdout)");
    c_tst->callback([&] {
        const json cfg = load_config_file(tst.config_path);
        (void)tst_cfg;
        merge(cfg, tst_resp, "response", tst.spec.response);
        merge(cfg, tst_pred, "predictors", tst.spec.predictors);
        merge(cfg, tst_hor, "horizon", tst.spec.horizon);
        merge(cfg, tst_level, "level", tst.run.level);
        merge(cfg, tst_win, "window", tst.run.window);
        merge(cfg, tst_scheme, "scheme", tst.scheme);
        merge(cfg, tst_bm, "block_mode", tst.block_mode);
        merge(cfg, tst_reps, "replications", tst.run.bootstrap_replications);
        merge(cfg, tst_mg, "m_grid", tst.run.m_grid);
        merge(cfg, tst_cg, "c_grid", tst.run.c_grid);
        merge(cfg, tst_inner, "inner_replications", tst.run.inner_replications);
        merge(cfg, tst_tol, "coverage_tolerance", tst.run.coverage_tolerance);
        merge_opt(cfg, tst_m, tst.m_flag, "m", tst.m_override);
        merge_opt(cfg, tst_c, tst.c_flag, "c", tst.c_override);
        merge_opt(cfg, tst_seed, tst.seed_flag, "seed", tst.seed);
        merge(cfg, tst_fmt, "format", tst.format);
        action = [&] { run_test_cmd(tst); };
    });

    // mc-power ------------------------------------------------------------
    PowerArgs pow;
    auto* c_pow = app.add_subcommand(
        "mc-power", "Monte Carlo rejection-frequency study");
    auto* pow_cfg = c_pow->add_option(
        "--config", pow.config_path,
        "JSON config file; a 'grid' array of DGP objects enables multi-cell");
    auto* pow_n = c_pow->add_option("--n", pow.cell.n, "observations");
    auto* pow_rho = c_pow->add_option("--rho", pow.cell.rho, "AR coefficients")
                        ->delimiter(',');
    auto* pow_beta = c_pow->add_option("--beta", pow.cell.beta, "slopes")
                         ->delimiter(',');
    auto* pow_phi = c_pow->add_option("--phi", pow.cell.phi, "error coupling");
    auto* pow_eta = c_pow->add_option("--eta", pow.eta,
                                      "contamination probability (0 disables)");
    auto* pow_mult = c_pow->add_option("--multiplier", pow.multiplier,
                                       "contamination multiplier");
    auto* pow_meth = c_pow->add_option("--methods", pow.methods,
                                       "method names (comma list)")
                         ->delimiter(',');
    auto* pow_sig = c_pow->add_option("--significance",
                                      pow.study.significance,
                                      "nominal test level");
    auto* pow_reps = c_pow->add_option("--replications",
                                       pow.study.mc_replications,
                                       "Monte Carlo replications");
    auto* pow_breps = c_pow->add_option("--bootstrap-replications",
                                        pow.study.bootstrap_replications,
                                        "bootstrap resamples per test");
    auto* pow_bs = c_pow->add_option("--block-size", pow.study.block_size,
                                     "fixed block length (0: per-replicate)");
    auto* pow_cl = c_pow->add_option("--c-level", pow.study.c_quantile_level,
                                     "score-quantile level for the bound");
    auto* pow_ci = c_pow->add_option("--coefficient",
                                     pow.study.coefficient_index,
                                     "tested coefficient index");
    auto* pow_seed = c_pow->add_option("--seed", pow.seed_flag, "RNG seed");
    auto* pow_fmt = c_pow->add_option("--format", pow.format, "csv|json");
    c_pow->add_option("--out", pow.out_path, "output path (default stdout)");
    c_pow->callback([&] {
        const json cfg = load_config_file(pow.config_path);
        (void)pow_cfg;
        merge(cfg, pow_n, "n", pow.cell.n);
        merge(cfg, pow_rho, "rho", pow.cell.rho);
        merge(cfg, pow_beta, "beta", pow.cell.beta);
        merge(cfg, pow_phi, "phi", pow.cell.phi);
        merge(cfg, pow_eta, "eta", pow.eta);
        merge(cfg, pow_mult, "multiplier", pow.multiplier);
        merge(cfg, pow_meth, "methods", pow.methods);
        merge(cfg, pow_sig, "significance", pow.study.significance);
        merge(cfg, pow_reps, "replications", pow.study.mc_replications);
        merge(cfg, pow_breps, "bootstrap_replications",
              pow.study.bootstrap_replications);
        merge(cfg, pow_bs, "block_size", pow.study.block_size);
        merge(cfg, pow_cl, "c_quantile_level", pow.study.c_quantile_level);
        merge(cfg, pow_ci, "coefficient_index", pow.study.coefficient_index);
        merge_opt(cfg, pow_seed, pow.seed_flag, "seed", pow.seed);
        merge(cfg, pow_fmt, "format", pow.format);
        action = [&, cfg] { run_mc_power(pow, cfg); };
    });

    // sensitivity ----------------------------------------------------------
    SensitivityArgs sen;
    auto* c_sen = app.add_subcommand(
        "sensitivity", "Outlier-offset sensitivity of interval lengths");
    auto* sen_cfg = c_sen->add_option("--config", sen.config_path,
                                      "JSON config file (flags override)");
    auto* sen_n = c_sen->add_option("--n", sen.study.dgp.n, "observations");
    auto* sen_rho = c_sen->add_option("--rho", sen.study.dgp.rho,
                                      "AR coefficients")
                        ->delimiter(',');
    auto* sen_beta = c_sen->add_option("--beta", sen.study.dgp.beta, "slopes")
                         ->delimiter(',');
    auto* sen_phi = c_sen->add_option("--phi", sen.study.dgp.phi,
                                      "error coupling");
    auto* sen_off = c_sen->add_option("--offsets", sen.study.offsets,
                                      "outlier offsets (comma list)")
                        ->delimiter(',');
    auto* sen_meth = c_sen->add_option("--methods", sen.methods,
                                       "method names (comma list)")
                         ->delimiter(',');
    auto* sen_level = c_sen->add_option("--level", sen.study.level,
                                        "interval level");
    auto* sen_reps = c_sen->add_option("--replications",
                                       sen.study.mc_replications,
                                       "Monte Carlo replications");
    auto* sen_breps = c_sen->add_option("--bootstrap-replications",
                                        sen.study.bootstrap_replications,
                                        "bootstrap resamples per interval");
    auto* sen_bs = c_sen->add_option("--block-size", sen.study.block_size,
                                     "fixed block length (0: per-offset)");
    auto* sen_cl = c_sen->add_option("--c-level", sen.study.c_quantile_level,
                                     "score-quantile level for the bound");
    auto* sen_seed = c_sen->add_option("--seed", sen.seed_flag, "RNG seed");
    auto* sen_fmt = c_sen->add_option("--format", sen.format, "csv|json");
    c_sen->add_option("--out", sen.out_path, "output path (default stdout)");
    c_sen->callback([&] {
        const json cfg = load_config_file(sen.config_path);
        (void)sen_cfg;
        merge(cfg, sen_n, "n", sen.study.dgp.n);
        merge(cfg, sen_rho, "rho", sen.study.dgp.rho);
        merge(cfg, sen_beta, "beta", sen.study.dgp.beta);
        merge(cfg, sen_phi, "phi", sen.study.dgp.phi);
        merge(cfg, sen_off, "offsets", sen.study.offsets);
        merge(cfg, sen_meth, "methods", sen.methods);
        merge(cfg, sen_level, "level", sen.study.level);
        merge(cfg, sen_reps, "replications", sen.study.mc_replications);
        merge(cfg, sen_breps, "bootstrap_replications",
              sen.study.bootstrap_replications);
        merge(cfg, sen_bs, "block_size", sen.study.block_size);
        merge(cfg, sen_cl, "c_quantile_level", sen.study.c_quantile_level);
        merge_opt(cfg, sen_seed, sen.seed_flag, "seed", sen.seed);
        merge(cfg, sen_fmt, "format", sen.format);
        action = [&] { run_sensitivity(sen); };
    });

    // quantile-surface ------------------------------------------------------
    SurfaceArgs sur;
    auto* c_sur = app.add_subcommand(
        "quantile-surface",
        "Null-quantile surface of the robust t-statistic over (c, phi)");
    auto* sur_cfg = c_sur->add_option("--config", sur.config_path,
                                      "JSON config file (flags override)");
    auto* sur_cgrid = c_sur->add_option("--c-grid", sur.study.c_grid,
                                        "near-integration drifts (comma list)")
                          ->delimiter(',');
    auto* sur_pgrid = c_sur->add_option("--phi-grid", sur.study.phi_grid,
                                        "error couplings (comma list)")
                          ->delimiter(',');
    auto* sur_n = c_sur->add_option("--n", sur.study.n, "observations");
    auto* sur_reps = c_sur->add_option("--replications",
                                       sur.study.mc_replications,
                                       "Monte Carlo replications per cell");
    auto* sur_q = c_sur->add_option("--quantile-level",
                                    sur.study.quantile_level,
                                    "reported quantile");
    auto* sur_cl = c_sur->add_option("--c-level", sur.study.c_quantile_level,
                                     "score-quantile level for the bound");
    auto* sur_sreps = c_sur->add_option("--se-replications",
                                        sur.study.se_bootstrap_replications,
                                        "bootstrap resamples for the MC SE");
    auto* sur_seed = c_sur->add_option("--seed", sur.seed_flag, "RNG seed");
    auto* sur_fmt = c_sur->add_option("--format", sur.format, "csv|json");
    c_sur->add_option("--out", sur.out_path, "output path (default stdout)");
    c_sur->callback([&] {
        const json cfg = load_config_file(sur.config_path);
        (void)sur_cfg;
        merge(cfg, sur_cgrid, "c_grid", sur.study.c_grid);
        merge(cfg, sur_pgrid, "phi_grid", sur.study.phi_grid);
        merge(cfg, sur_n, "n", sur.study.n);
        merge(cfg, sur_reps, "mc_replications", sur.study.mc_replications);
        merge(cfg, sur_q, "quantile_level", sur.study.quantile_level);
        merge(cfg, sur_cl, "c_quantile_level", sur.study.c_quantile_level);
        merge(cfg, sur_sreps, "se_bootstrap_replications",
              sur.study.se_bootstrap_replications);
        merge_opt(cfg, sur_seed, sur.seed_flag, "seed", sur.seed);
        merge(cfg, sur_fmt, "format", sur.format);
        action = [&] { run_surface(sur); };
    });

    // breakdown -------------------------------------------------------------
    BreakdownArgs brk;
    auto* c_brk = app.add_subcommand(
        "breakdown", "Quantile breakdown bounds and points");
    c_brk->add_option("--n", brk.n, "sample size");
    c_brk->add_option("--m", brk.m, "block length");
    c_brk->add_option("--t", brk.t, "quantile level");
    c_brk->add_option(
        "--b", brk.b,
        "breakdown point of the conventional statistic (omit: robust "
        "pipeline formulas)");
    c_brk->add_option("--scheme", brk.scheme, "subsampling|bootstrap");
    c_brk->add_option("--variant", brk.variant,
                      "table-matching|theorem-literal (robust bootstrap)");
    c_brk->add_option("--grid", brk.grid,
                      "emit a full reference grid as CSV: table1|table2");
    c_brk->add_option("--out", brk.out_path, "output path (default stdout)");
    c_brk->callback([&] { action = [&] { run_breakdown(brk); }; });

    // calibrate ---------------------------------------------------------------
    CalibrateArgs calb;
    auto* c_cal = app.add_subcommand(
        "calibrate", "Select block length and robustness bound for a dataset");
    c_cal->add_option("--data", calb.data_path, "input CSV")->required();
    auto* cal_cfg = c_cal->add_option("--config", calb.config_path,
                                      "JSON config file (flags override)");
    auto* cal_resp = c_cal->add_option("--response", calb.spec.response,
                                       "raw response column");
    auto* cal_pred = c_cal->add_option("--predictors", calb.spec.predictors,
                                       "predictor columns (comma list)")
                         ->delimiter(',');
    auto* cal_hor = c_cal->add_option("--horizon", calb.spec.horizon,
                                      "return horizon");
    auto* cal_level = c_cal->add_option("--level", calb.level,
                                        "confidence level");
    auto* cal_scheme = c_cal->add_option("--scheme", calb.scheme,
                                         "subsampling|bootstrap");
    auto* cal_bm = c_cal->add_option("--block-mode", calb.block_mode,
                                     "overlapping|nonoverlapping");
    auto* cal_reps = c_cal->add_option("--replications",
                                       calb.bootstrap_replications,
                                       "bootstrap resamples");
    auto* cal_mg = c_cal->add_option("--m-grid", calb.m_grid,
                                     "candidate block lengths")
                       ->delimiter(',');
    auto* cal_cg = c_cal->add_option("--c-grid", calb.c_grid,
                                     "candidate robustness bounds")
                       ->delimiter(',');
    auto* cal_inner = c_cal->add_option("--inner", calb.inner_replications,
                                        "calibration pseudo-samples");
    auto* cal_tol = c_cal->add_option("--tolerance", calb.coverage_tolerance,
                                      "coverage tolerance");
    auto* cal_seed = c_cal->add_option("--seed", calb.seed_flag, "RNG seed");
    c_cal->add_option("--out", calb.out_path, "output path (default stdout)");
    c_cal->callback([&] {
        const json cfg = load_config_file(calb.config_path);
        (void)cal_cfg;
        merge(cfg, cal_resp, "response", calb.spec.response);
        merge(cfg, cal_pred, "predictors", calb.spec.predictors);
        merge(cfg, cal_hor, "horizon", calb.spec.horizon);
        merge(cfg, cal_level, "level", calb.level);
        merge(cfg, cal_scheme, "scheme", calb.scheme);
        merge(cfg, cal_bm, "block_mode", calb.block_mode);
        merge(cfg, cal_reps, "replications", calb.bootstrap_replications);
        merge(cfg, cal_mg, "m_grid", calb.m_grid);
        merge(cfg, cal_cg, "c_grid", calb.c_grid);
        merge(cfg, cal_inner, "inner_replications", calb.inner_replications);
        merge(cfg, cal_tol, "coverage_tolerance", calb.coverage_tolerance);
        merge_opt(cfg, cal_seed, calb.seed_flag, "seed", calb.seed);
        action = [&] { run_calibrate(calb); };
    });

    // oos ---------------------------------------------------------------------
    OosArgs oos;
    auto* c_oos = app.add_subcommand(
        "oos", "Walk-forward out-of-sample forecast comparison");
    c_oos->add_option("--data", oos.data_path, "input CSV")->required();
    auto* oos_cfg = c_oos->add_option("--config", oos.config_path,
                                      "JSON config file (flags override)");
    auto* oos_resp = c_oos->add_option("--response", oos.spec.response,
                                       "raw response column");
    auto* oos_pred = c_oos->add_option("--predictors", oos.spec.predictors,
                                       "predictor columns (comma list)")
                         ->delimiter(',');
    auto* oos_hor = c_oos->add_option("--horizon", oos.spec.horizon,
                                      "return-construction horizon");
    auto* oos_win = c_oos->add_option("--window", oos.study.window,
                                      "trailing estimation window");
    auto* oos_fh = c_oos->add_option("--forecast-horizon", oos.study.horizon,
                                     "periods between fit end and target");
    auto* oos_cl = c_oos->add_option("--c-level", oos.study.c_quantile_level,
                                     "score-quantile level for the bound");
    auto* oos_ci = c_oos->add_option("--coefficient",
                                     oos.study.coefficient_index,
                                     "forecasting coefficient index");
    auto* oos_fmt = c_oos->add_option("--format", oos.format, "csv|json");
    c_oos->add_option("--out", oos.out_path, "output path (default stdout)");
    c_oos->callback([&] {
        const json cfg = load_config_file(oos.config_path);
        (void)oos_cfg;
        merge(cfg, oos_resp, "response", oos.spec.response);
        merge(cfg, oos_pred, "predictors", oos.spec.predictors);
        merge(cfg, oos_hor, "horizon", oos.spec.horizon);
        merge(cfg, oos_win, "window", oos.study.window);
        merge(cfg, oos_fh, "forecast_horizon", oos.study.horizon);
        merge(cfg, oos_cl, "c_quantile_level", oos.study.c_quantile_level);
        merge(cfg, oos_ci, "coefficient_index", oos.study.coefficient_index);
        merge(cfg, oos_fmt, "format", oos.format);
        action = [&] { run_oos(oos); };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        return fail(2, "usage", e.what());
    } catch (const rpr::ConfigError& e) {
        return fail(2, "config", e.what());
    }

    try {
        action();
    } catch (const rpr::ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const rpr::DataError& e) {
        return fail(3, "data", e.what());
    } catch (const rpr::Error& e) {
        return fail(4, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(4, "internal", e.what());
    }
    return 0;
}
