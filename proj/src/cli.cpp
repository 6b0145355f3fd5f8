#include "maxpot/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "maxpot/analysis.hpp"
#include "maxpot/field_io.hpp"

namespace maxpot {

namespace {

namespace fs = std::filesystem;

struct RunConfig {
    int n = 2;
    int res = 64;
    double L = 2.0;
    std::string symbol = "one";
    int symbol_axis = 0;
    double t_min = 0.0;  // 0 -> grid spacing
    double t_max = 0.0;  // 0 -> box diameter
    double ratio = std::pow(2.0, 0.25);
    std::string policy = "overlap";
    int subsamples = 4;
    int quad_order = 0;  // 0 -> 64 (n=2) or 32 (n=3)
    double p = 2.0;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
};

void add_grid_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--n", cfg.n, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
    cmd->add_option("--res", cfg.res, "Nodes per axis");
    cmd->add_option("--L", cfg.L, "Box half-width");
    cmd->add_option("--seed", cfg.seed, "Seed for random fields");
}

void add_operator_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--symbol", cfg.symbol, "Sphere symbol id");
    cmd->add_option("--symbol-axis", cfg.symbol_axis, "Axis for the coordinate symbol");
    cmd->add_option("--t-min", cfg.t_min, "Smallest truncation radius (default: grid spacing)");
    cmd->add_option("--t-max", cfg.t_max, "Largest truncation radius (default: box diameter)");
    cmd->add_option("--ratio", cfg.ratio, "Ladder ratio");
    cmd->add_option("--policy", cfg.policy, "Truncation policy: overlap | center")
        ->check(CLI::IsMember({"overlap", "center"}));
    cmd->add_option("--subsamples", cfg.subsamples, "Subsamples per axis for overlap weighting");
    cmd->add_option("--quad-order", cfg.quad_order, "Sphere quadrature order (0 = default)");
}

Grid make_grid(const RunConfig& cfg) { return Grid::centered(cfg.n, cfg.res, cfg.L); }

RadiusLadder make_ladder(const RunConfig& cfg, const Grid& grid) {
    const double t0 = cfg.t_min > 0.0 ? cfg.t_min : grid.spacing;
    const double t1 = cfg.t_max > 0.0 ? cfg.t_max : grid.diameter();
    return RadiusLadder::geometric(t0, t1, cfg.ratio);
}

TruncationPolicy make_policy(const RunConfig& cfg) {
    if (cfg.policy == "center") return TruncationPolicy::center_indicator();
    return TruncationPolicy::overlap(cfg.subsamples);
}

SphereQuadrature make_quad(const RunConfig& cfg) {
    const int order = cfg.quad_order > 0 ? cfg.quad_order : (cfg.n == 2 ? 64 : 32);
    return sphere_quadrature(cfg.n, order);
}

SphereSymbol make_cfg_symbol(const RunConfig& cfg) {
    return make_symbol(cfg.symbol, cfg.n, cfg.symbol_axis);
}

/// Referenced catalog ids must exist before any compute starts.
void validate_config(const RunConfig& cfg) {
    make_symbol(cfg.symbol, cfg.n, cfg.symbol_axis);
    if (cfg.t_min > 0.0 && cfg.t_max > 0.0 && cfg.t_max < cfg.t_min) {
        throw std::invalid_argument("config: t_max below t_min");
    }
    if (cfg.quad_order != 0 && cfg.quad_order < 8) {
        throw std::invalid_argument("config: quadrature order must be >= 8");
    }
}

CatalogParams parse_params(const std::vector<std::string>& kvs) {
    CatalogParams params;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("parameter must look like key=value: " + kv);
        }
        params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    return params;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    out << text;
}

void write_meta(const fs::path& dir) {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
    write_text(dir / "run_meta.txt", std::string("finished ") + buf + "\n");
}

nlohmann::json config_json(const RunConfig& cfg, const Grid& grid) {
    return {{"n", cfg.n},
            {"res", cfg.res},
            {"L", cfg.L},
            {"h", grid.spacing},
            {"symbol", cfg.symbol},
            {"policy", cfg.policy},
            {"subsamples", cfg.subsamples},
            {"quad_order", cfg.quad_order > 0 ? cfg.quad_order : (cfg.n == 2 ? 64 : 32)},
            {"p", cfg.p},
            {"seed", cfg.seed}};
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
    RunConfig cfg;
    std::string f = "gaussian";
    std::vector<std::string> params;
    std::string out = "field.mpf";
    std::string csv;
};

int run_gen(const GenArgs& args) {
    const Grid grid = make_grid(args.cfg);
    CatalogParams params = parse_params(args.params);
    if (args.f == "random_bandlimited" && params.find("seed") == params.end()) {
        params["seed"] = static_cast<double>(args.cfg.seed);
    }
    const Field f = sample_catalog(args.f, params, grid);
    f.validate();
    write_field(f, args.out);
    if (!args.csv.empty()) write_field_csv(f, args.csv);
    std::cout << "wrote " << args.out << " (" << f.nodes() << " nodes, m=" << f.components
              << ")\n";
    return 0;
}

// ---- apply ----------------------------------------------------------------

struct ApplyArgs {
    RunConfig cfg;
    std::string op;
    std::string in;
    std::string out = "out.mpf";
    std::string csv;
    double t = 0.0;
    bool use_abs = true;
    std::string method = "fft";
};

int run_apply(const ApplyArgs& args) {
    Field f = read_field(args.in);
    f.validate();
    RunConfig cfg = args.cfg;
    cfg.n = f.grid.dim;
    validate_config(cfg);

    const ConvMethod method = args.method == "direct" ? ConvMethod::Direct : ConvMethod::Fft;
    const TruncationPolicy policy = make_policy(cfg);
    const double t = args.t > 0.0 ? args.t : f.grid.spacing;

    Field out;
    const std::string& op = args.op;
    if (op == "truncated_potential") {
        out = truncated_potential(f, KernelSpec::potential(make_cfg_symbol(cfg)), t, policy, method);
    } else if (op == "maximal_potential") {
        out = maximal_potential(f, KernelSpec::potential(make_cfg_symbol(cfg)),
                                make_ladder(cfg, f.grid), policy, method);
    } else if (op == "riesz_potential") {
        out = riesz_potential(f, method);
    } else if (op == "truncated_singular") {
        out = truncated_singular(f, KernelSpec::singular(make_cfg_symbol(cfg), make_quad(cfg)), t,
                                 policy, method);
    } else if (op == "maximal_singular") {
        out = maximal_singular(f, KernelSpec::singular(make_cfg_symbol(cfg), make_quad(cfg)),
                               make_ladder(cfg, f.grid), policy, method);
    } else if (op == "surface_convolution") {
        out = surface_convolution(f, make_cfg_symbol(cfg), t, make_quad(cfg));
    } else if (op == "grad_truncated_potential") {
        out = grad_truncated_potential(f, KernelSpec::potential(make_cfg_symbol(cfg)), t, policy,
                                       make_quad(cfg), method);
    } else if (op == "grad_majorant") {
        out = grad_majorant(f, KernelSpec::potential(make_cfg_symbol(cfg)),
                            make_ladder(cfg, f.grid), policy, make_quad(cfg), method);
    } else if (op == "spherical_average") {
        out = spherical_average(f, t, make_quad(cfg));
    } else if (op == "spherical_maximal") {
        out = spherical_maximal(f, make_ladder(cfg, f.grid), make_quad(cfg), args.use_abs);
    } else if (op == "spherical_via_gradient") {
        out = spherical_via_gradient(f, make_ladder(cfg, f.grid), policy, method);
    } else {
        throw std::invalid_argument("apply: unknown operator '" + op + "'");
    }
    out.validate();
    write_field(out, args.out);
    std::string csv = args.csv;
    if (csv.empty()) csv = fs::path(args.out).replace_extension(".csv").string();
    write_field_csv(out, csv);
    std::cout << "wrote " << args.out << " and " << csv << "\n";
    return 0;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
    RunConfig cfg;
    std::string check;
    std::string f;  // empty -> per-check default
    std::vector<std::string> params;
    std::vector<double> radii{0.5, 1.0, 2.0};
    double tol = 0.0;  // 0 -> per-check default
    bool extended = false;
};

/// Checks that differentiate the input require a smooth catalog member.
void require_smooth_catalog(const std::string& name) {
    if (name == "gaussian" || name == "smooth_bump" || name == "random_bandlimited") return;
    throw std::invalid_argument("verify: check requires a smooth catalog function, got '" + name +
                                "'");
}

CheckReport run_one_check(const std::string& check, const VerifyArgs& args) {
    RunConfig cfg = args.cfg;
    validate_config(cfg);
    const Grid grid = make_grid(cfg);
    const TruncationPolicy policy = make_policy(cfg);
    const SphereQuadrature quad = make_quad(cfg);

    if (check == "representation") {
        const std::string fname = args.f.empty() ? "gaussian" : args.f;
        require_smooth_catalog(fname);
        CatalogParams params = parse_params(args.params);
        // default sigma keeps the gaussian tail below the box cut so the
        // gradient-integral side is not starved of mass
        if (fname == "gaussian" && params.find("sigma") == params.end()) params["sigma"] = 0.7;
        const Field f = sample_catalog(fname, params, grid);
        const double tol = args.tol > 0.0 ? args.tol : 2e-2;
        CheckReport report = verify_representation(f, args.radii, tol, quad, policy);
        report.config["cli"] = config_json(cfg, grid);
        return report;
    }
    if (check == "distributional_gradient") {
        const KernelSpec spec = KernelSpec::potential(make_cfg_symbol(cfg));
        const Field phi = offset_gaussian_bump(grid, vec(0.3, -0.2, cfg.n == 3 ? 0.1 : 0.0), 0.7,
                                               0.45 * cfg.L, 0.85 * cfg.L);
        const double h = grid.spacing;
        const std::vector<double> eps{8.0 * h, 4.0 * h, 2.0 * h, h};
        const double tol = args.tol > 0.0 ? args.tol : 1e-2;
        CheckReport report = verify_distributional_gradient(spec, phi, eps, tol, quad, policy);
        report.config["cli"] = config_json(cfg, grid);
        return report;
    }
    if (check == "domination") {
        const std::string fname = args.f.empty() ? "ball_indicator" : args.f;
        const Field f = sample_catalog(fname, parse_params(args.params), grid);
        const KernelSpec spec = KernelSpec::potential(make_cfg_symbol(cfg));
        CheckReport report = verify_domination(f, spec, make_ladder(cfg, grid), policy);
        report.config["cli"] = config_json(cfg, grid);
        return report;
    }
    if (check == "gradient_bound") {
        const std::string fname = args.f.empty() ? "gaussian" : args.f;
        require_smooth_catalog(fname);
        const Field f = sample_catalog(fname, parse_params(args.params), grid);
        const KernelSpec spec = KernelSpec::potential(make_cfg_symbol(cfg));
        CheckReport report = verify_gradient_bound(f, spec, make_ladder(cfg, grid), policy, quad,
                                                   5e-2, 1e-6, args.extended, cfg.seed);
        report.config["cli"] = config_json(cfg, grid);
        return report;
    }
    throw std::invalid_argument("verify: unknown check '" + check + "'");
}

int run_verify(const VerifyArgs& args) {
    std::vector<std::string> checks;
    if (args.check == "all") {
        checks = {"representation", "distributional_gradient", "domination", "gradient_bound"};
    } else {
        checks = {args.check};
    }
    fs::create_directories(args.cfg.out_dir);
    std::string summary = CheckReport::csv_header() + "\n";
    bool all_pass = true;
    for (const auto& check : checks) {
        const CheckReport report = run_one_check(check, args);
        all_pass = all_pass && report.pass;
        write_text(fs::path(args.cfg.out_dir) / (check + ".json"), report.to_json().dump(2) + "\n");
        summary += report.csv_row() + "\n";
        std::cout << (report.pass ? "[PASS] " : "[FAIL] ") << check
                  << "  max_residual=" << format_double(report.max_residual)
                  << "  violation_fraction=" << format_double(report.violation_fraction) << "\n";
    }
    write_text(fs::path(args.cfg.out_dir) / "summary.csv", summary);
    write_meta(args.cfg.out_dir);
    return all_pass ? 0 : 1;
}

// ---- probe ------------------------------------------------------------------

struct ProbeArgs {
    RunConfig cfg;
    std::string op = "maximal_potential";
    std::string family = "default";
    bool refine = false;
    ProbeArgs() {
        cfg.n = 3;
        cfg.res = 48;
    }
};

int run_probe(const ProbeArgs& args) {
    RunConfig cfg = args.cfg;
    if (cfg.n != 3) throw std::invalid_argument("probe: boundedness probes run at n=3 only");
    validate_config(cfg);
    const Grid grid = make_grid(cfg);
    const NormSettings settings(cfg.p, cfg.n);
    const RadiusLadder ladder = make_ladder(cfg, grid);
    const TruncationPolicy policy = make_policy(cfg);
    const KernelSpec spec = KernelSpec::potential(make_cfg_symbol(cfg));

    FunctionFamily family;
    if (args.family == "default") {
        family = FunctionFamily::default_family(cfg.seed);
    } else if (args.family == "concentrating") {
        family = FunctionFamily::concentrating_family(cfg.p, cfg.n);
    } else {
        throw std::invalid_argument("probe: unknown family '" + args.family + "'");
    }

    ProbeResult result =
        args.refine ? probe_with_refinement(args.op, family, settings, grid, ladder, spec, policy)
                    : probe_operator_norm(args.op, family, settings, grid, ladder, spec, policy);
    result.config["cli"] = config_json(cfg, grid);

    fs::create_directories(cfg.out_dir);
    std::string csv = "function,params,norm_pstar,norm_grad_p,ratio\n";
    for (const auto& row : result.rows) {
        csv += row.label + "," + row.params + "," + format_double(row.norm_pstar) + "," +
               format_double(row.norm_grad_p) + "," + format_double(row.ratio) + "\n";
    }
    write_text(fs::path(cfg.out_dir) / "probe.csv", csv);
    write_text(fs::path(cfg.out_dir) / "probe.json", result.to_json().dump(2) + "\n");
    write_meta(cfg.out_dir);
    std::cout << (result.exploratory ? "[exploratory] " : "") << "family_max="
              << format_double(result.family_max);
    if (result.refined_family_max) {
        std::cout << " refined_family_max=" << format_double(*result.refined_family_max);
    }
    std::cout << "\n";
    return 0;
}

// ---- study ------------------------------------------------------------------

struct StudyArgs {
    RunConfig cfg;
    std::string op = "truncated_potential";
    std::string f = "ball_indicator";
    std::vector<int> resolutions{33, 65, 129};
};

int run_study(const StudyArgs& args) {
    const auto rows = refinement_study(args.op, args.f, args.resolutions);
    fs::create_directories(args.cfg.out_dir);
    std::string csv = "res,h,error,observed_order\n";
    for (const auto& row : rows) {
        csv += std::to_string(row.res) + "," + format_double(row.h) + "," +
               format_double(row.error) + "," + format_double(row.observed_order) + "\n";
    }
    write_text(fs::path(args.cfg.out_dir) / "study.csv", csv);
    write_meta(args.cfg.out_dir);
    std::cout << csv;
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"maxpot: maximal potentials, singular integrals, and spherical maximal operators "
                 "on discretized R^n"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file ([section] key=value); flags take precedence");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Sample a catalog function onto a grid");
    add_grid_options(gen_cmd, gen.cfg);
    gen_cmd->add_option("--f", gen.f, "Catalog function");
    gen_cmd->add_option("--param", gen.params, "Function parameter key=value");
    gen_cmd->add_option("--out", gen.out, "Output field file");
    gen_cmd->add_option("--csv", gen.csv, "Optional CSV export");

    ApplyArgs apply;
    auto* apply_cmd = app.add_subcommand("apply", "Apply an operator to a stored field");
    add_grid_options(apply_cmd, apply.cfg);
    add_operator_options(apply_cmd, apply.cfg);
    apply_cmd->add_option("--op", apply.op, "Operator id")->required();
    apply_cmd->add_option("--in", apply.in, "Input field file")->required();
    apply_cmd->add_option("--t", apply.t, "Truncation / sphere radius (default: grid spacing)");
    apply_cmd->add_flag("--use-abs,!--no-use-abs", apply.use_abs,
                        "Average |f| (spherical_maximal)");
    apply_cmd->add_option("--method", apply.method, "fft | direct")
        ->check(CLI::IsMember({"fft", "direct"}));
    apply_cmd->add_option("--out", apply.out, "Output field file");
    apply_cmd->add_option("--csv", apply.csv, "Optional CSV export");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Run identity/inequality verification checks");
    add_grid_options(verify_cmd, verify.cfg);
    add_operator_options(verify_cmd, verify.cfg);
    verify_cmd->add_option("check", verify.check,
                           "representation | distributional_gradient | domination | "
                           "gradient_bound | all")
        ->required();
    verify_cmd->add_option("--f", verify.f, "Catalog function for field-based checks");
    verify_cmd->add_option("--param", verify.params, "Function parameter key=value");
    verify_cmd->add_option("--radii", verify.radii, "Radii for the representation check");
    verify_cmd->add_option("--tol", verify.tol, "Override the check tolerance");
    verify_cmd->add_flag("--extended", verify.extended, "Also test the segment estimate");
    verify_cmd->add_option("--out-dir", verify.cfg.out_dir, "Report directory");

    ProbeArgs probe;
    auto* probe_cmd = app.add_subcommand("probe", "Empirical operator-norm ratio sweep");
    add_grid_options(probe_cmd, probe.cfg);
    add_operator_options(probe_cmd, probe.cfg);
    probe_cmd->add_option("--op", probe.op, "maximal_potential | riesz_potential");
    probe_cmd->add_option("--p", probe.cfg.p, "Lebesgue exponent");
    probe_cmd->add_option("--family", probe.family, "default | concentrating");
    probe_cmd->add_flag("--refine", probe.refine, "Also run a once-refined grid");
    probe_cmd->add_option("--out-dir", probe.cfg.out_dir, "Report directory");

    StudyArgs study;
    auto* study_cmd = app.add_subcommand("study", "Grid-refinement convergence study");
    study_cmd->add_option("--op", study.op, "Operator id");
    study_cmd->add_option("--f", study.f, "Catalog function id");
    study_cmd->add_option("--resolutions", study.resolutions, "Resolutions to sweep");
    study_cmd->add_option("--out-dir", study.cfg.out_dir, "Report directory");

    std::vector<const char*> argv;
    argv.push_back("maxpot");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen_cmd->parsed()) return run_gen(gen);
        if (apply_cmd->parsed()) return run_apply(apply);
        if (verify_cmd->parsed()) return run_verify(verify);
        if (probe_cmd->parsed()) return run_probe(probe);
        if (study_cmd->parsed()) return run_study(study);
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace maxpot
