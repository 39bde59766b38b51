#include "mre/cli_runner.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mre/adjoint.hpp"
#include "mre/certificates.hpp"
#include "mre/norms.hpp"
#include "mre/phantoms.hpp"
#include "mre/residual_ops.hpp"
#include "mre/stokes.hpp"

namespace mre::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Grid grid_from(const io::Config& cfg) {
    int dim = int(cfg.get_int("dim", 2));
    int cells = int(cfg.get_int("cells"));
    double extent = cfg.get_double("extent", 1.0);
    return Grid::make(dim, {cells, cells, cells}, {extent, extent, extent});
}

SolverConfig solver_from(const io::Config& cfg) {
    SolverConfig sc;
    sc.stab_alpha = cfg.get_double("stab_alpha", sc.stab_alpha);
    sc.condition_cap = cfg.get_double("condition_cap", sc.condition_cap);
    sc.check_condition = cfg.get_int("check_condition", 1) != 0;
    return sc;
}

PhantomSpec phantom_from(const io::Config& cfg) {
    PhantomSpec spec;
    spec.background = cfg.get_double("background", 1.0);
    if (cfg.has("inclusions")) {
        std::istringstream is(cfg.get("inclusions"));
        std::string item;
        while (std::getline(is, item, ';')) {
            if (item.find_first_not_of(" \t") == std::string::npos) continue;
            Inclusion inc;
            std::istringstream fs_(item);
            char comma;
            if (!(fs_ >> inc.center[0] >> comma >> inc.center[1] >> comma >> inc.center[2] >>
                  comma >> inc.radius >> comma >> inc.contrast >> comma >> inc.width))
                throw ConfigError("inclusion needs cx,cy,cz,radius,contrast,width: " + item);
            spec.inclusions.push_back(inc);
        }
    }
    return spec;
}

ScalarField mu_from(const io::Config& cfg, const Grid& g) {
    std::string source = cfg.get("mu", "constant");
    if (source == "constant") return ScalarField(g, cfg.get_double("mu_value", 1.0));
    if (source == "phantom") return make_phantom(phantom_from(cfg), g);
    if (source == "file") {
        std::string path = cfg.get("mu_file");
        if (!fs::exists(path)) throw MissingData("mu file not found: " + path);
        ScalarField mu = io::read_vtk_scalar(path);
        if (!mu.grid.same_layout(g)) throw DiscretizationError("mu file grid mismatch");
        return mu;
    }
    throw ConfigError("unknown mu source: " + source);
}

ExcitationSpec excitation_from(const io::Config& cfg, std::uint64_t seed, int channel) {
    ExcitationSpec spec;
    spec.kind = excitation_kind_from(cfg.get("excitation", "shear"));
    spec.amplitude = cfg.get_double("amplitude", 1.0);
    spec.modes = int(cfg.get_int("modes", 2));
    spec.seed = seed + std::uint64_t(channel) * 7919;
    return spec;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path.string());
    os << j.dump(2) << "\n";
}

json manifest_base(const io::Config& cfg, const RunOptions& opt, const std::string& command) {
    json m;
    m["command"] = command;
    m["seed"] = opt.seed;
    m["config"] = json::object();
    for (const auto& [k, v] : cfg.entries()) m["config"][k] = v;
    return m;
}

const std::set<std::string> kCommonKeys = {
    "dim",    "cells",      "extent",        "omega",      "stab_alpha",
    "mu",     "mu_value",   "mu_file",       "background", "inclusions",
    "excitation", "amplitude", "modes",      "condition_cap", "check_condition"};

std::set<std::string> with(std::set<std::string> base, std::initializer_list<const char*> extra) {
    for (auto* e : extra) base.insert(e);
    return base;
}

int finish(const RunOptions& opt, const json& manifest, const std::string& line) {
    write_json(fs::path(opt.out_dir) / "manifest.json", manifest);
    if (!opt.quiet) std::cout << line << "\n";
    return 0;
}

int run_forward_impl(const RunOptions& opt) {
    auto t0 = Clock::now();
    io::Config cfg = io::Config::load(opt.config_path);
    cfg.restrict_keys(with(kCommonKeys, {"equation", "lambda_value"}));
    Grid g = grid_from(cfg);
    ScalarField mu = mu_from(cfg, g);
    double omega = cfg.get_double("omega", 1.0);
    VectorField bc = make_excitation(excitation_from(cfg, opt.seed, 0), g);
    SolverConfig sc = solver_from(cfg);
    fs::path out(opt.out_dir);

    json m = manifest_base(cfg, opt, "forward");
    std::string eq = cfg.get("equation", "stokes");
    if (eq == "stokes") {
        StokesSolution sol = solve_stokes({g, mu, omega, bc, std::nullopt, sc});
        io::write_vtk((out / "u.vtk").string(), "u", sol.u);
        io::write_vtk((out / "p.vtk").string(), "p", sol.p);
        io::write_csv((out / "u.csv").string(), sol.u);
        m["outputs"] = {"u.vtk", "p.vtk", "u.csv"};
        m["linear_residual"] = sol.linear_residual;
        m["divergence_norm"] = sol.divergence_norm;
        m["condition_estimate"] = sol.condition_estimate;
    } else if (eq == "elasticity") {
        ScalarField lambda(g, cfg.get_double("lambda_value", 1.0e3));
        VectorField u = solve_elasticity({g, lambda, mu, omega, bc, std::nullopt, sc});
        io::write_vtk((out / "u.vtk").string(), "u", u);
        io::write_csv((out / "u.csv").string(), u);
        m["outputs"] = {"u.vtk", "u.csv"};
    } else {
        throw ConfigError("unknown equation: " + eq);
    }
    m["elapsed_ms"] = elapsed_ms(t0);
    return finish(opt, m, "forward solve written to " + opt.out_dir);
}

int run_reconstruct_impl(const RunOptions& opt) {
    auto t0 = Clock::now();
    io::Config cfg = io::Config::load(opt.config_path);
    cfg.restrict_keys(with(kCommonKeys,
                           {"sigma", "n_max", "stop_tol", "snapshot_stride", "epsilon", "mu_lo",
                            "mu_hi", "channels", "fine_data", "noise_level", "measured_file",
                            "mu0_value"}));
    Grid g = grid_from(cfg);
    double omega = cfg.get_double("omega", 1.0);
    SolverConfig sc = solver_from(cfg);
    int channels = int(cfg.get_int("channels", 1));
    if (channels < 1 || channels > 2) throw ConfigError("channels must be 1 or 2");

    ScalarField mu_true = mu_from(cfg, g);
    std::vector<VectorField> bcs, data;
    for (int ch = 0; ch < channels; ++ch) {
        ExcitationSpec es = excitation_from(cfg, opt.seed, ch);
        if (cfg.has("measured_file")) {
            std::string path = cfg.get("measured_file");
            if (channels > 1) path += "." + std::to_string(ch);
            if (!fs::exists(path)) throw MissingData("measured data file not found: " + path);
            data.push_back(io::read_vtk_vector(path));
            bcs.push_back(make_excitation(es, g));
        } else if (cfg.get_int("fine_data", 1) != 0) {
            // inverse-crime avoidance: synthesize on a 2x finer grid
            Grid gf = Grid::make(g.dim, {2 * g.cells[0], 2 * g.cells[1], 2 * g.cells[2]},
                                 g.extent);
            ScalarField mu_f = mu_from(cfg, gf);
            VectorField bc_f = make_excitation(es, gf);
            StokesSolution sol = solve_stokes({gf, mu_f, omega, bc_f, std::nullopt, sc});
            data.push_back(ops::restrict_to(sol.u, g));
            bcs.push_back(ops::restrict_to(bc_f, g));
        } else {
            VectorField bc = make_excitation(es, g);
            data.push_back(solve_stokes({g, mu_true, omega, bc, std::nullopt, sc}).u);
            bcs.push_back(bc);
        }
        double noise = cfg.get_double("noise_level", 0.0);
        if (noise > 0.0) data.back() = add_noise(data.back(), noise, opt.seed + 31 + ch);
    }

    InverseProblem ip;
    ip.grid = g;
    ip.omega = omega;
    ip.boundary_data = bcs;
    ip.measured = data;
    ip.mu_boundary = mu_true;
    ip.mu_lo = cfg.get_double("mu_lo", 1e-3);
    ip.mu_hi = cfg.get_double("mu_hi", 1e3);
    ip.solver = sc;
    ip.mu_true = mu_true;
    ip.epsilon = cfg.get_double("epsilon", 0.01);

    ScalarField mu0(g, cfg.get_double("mu0_value", cfg.get_double("background", 1.0)));
    ReconstructionTrace trace =
        landweber_run(ip, mu0, cfg.get_double("sigma", 1.0), int(cfg.get_int("n_max", 100)),
                      cfg.get_double("stop_tol", 1e-12), int(cfg.get_int("snapshot_stride", 0)));

    fs::path out(opt.out_dir);
    std::vector<std::vector<double>> rows;
    for (const auto& r : trace.records)
        rows.push_back({double(r.n), r.j, r.sigma, r.grad_norm, r.err_l2, r.err_hs});
    io::write_table_csv((out / "trace.csv").string(),
                        {"iter", "J", "sigma", "grad_norm", "err_l2", "err_hs"}, rows);
    io::write_vtk((out / "mu_final.vtk").string(), "mu", trace.mu_final);
    for (const auto& [n, snap] : trace.snapshots)
        io::write_vtk((out / ("mu_" + std::to_string(n) + ".vtk")).string(), "mu", snap);

    StokesSolution bg = solve_stokes({g, trace.mu_final, omega, bcs[0], std::nullopt, sc});
    KernelProbeResult probe;
    if (g.dim == 3 && channels == 2) {
        StokesSolution bg2 = solve_stokes({g, trace.mu_final, omega, bcs[1], std::nullopt, sc});
        probe = kernel_probe(make_linearized_map(bg.u, bg2.u, omega), 5);
    } else {
        probe = kernel_probe(make_linearized_map(bg.u, omega), 5);
    }
    json pj;
    pj["sigmas"] = probe.sigmas;
    pj["threshold"] = probe.threshold;
    pj["trivial"] = probe.trivial;
    write_json(out / "kernel_probe.json", pj);

    json m = manifest_base(cfg, opt, "reconstruct");
    m["outputs"] = {"trace.csv", "mu_final.vtk", "kernel_probe.json"};
    m["iterations"] = trace.records.size();
    m["final_J"] = trace.records.empty() ? 0.0 : trace.records.back().j;
    m["status"] = trace.status == RunStatus::Converged      ? "converged"
                  : trace.status == RunStatus::MaxIterations ? "max_iterations"
                                                             : "stalled";
    m["elapsed_ms"] = elapsed_ms(t0);
    return finish(opt, m, "reconstruction written to " + opt.out_dir);
}

Eigen::Matrix3d parse_strain(const std::string& text) {
    std::istringstream is(text);
    double v[6];
    char comma;
    if (!(is >> v[0] >> comma >> v[1] >> comma >> v[2] >> comma >> v[3] >> comma >> v[4] >>
          comma >> v[5]))
        throw ConfigError("strain needs s11,s22,s33,s12,s13,s23: " + text);
    Eigen::Matrix3d s;
    s << v[0], v[3], v[4], v[3], v[1], v[5], v[4], v[5], v[2];
    return s;
}

int run_certify_impl(const RunOptions& opt) {
    auto t0 = Clock::now();
    io::Config cfg = io::Config::load(opt.config_path);
    cfg.restrict_keys(with(kCommonKeys,
                           {"check", "threshold", "samples", "strain1", "strain2", "coefficient",
                            "xi_prime"}));
    std::string check = cfg.get("check");
    double threshold = cfg.get_double("threshold", 1e-8);
    fs::path out(opt.out_dir);
    json m = manifest_base(cfg, opt, "certify");
    json rep;

    auto report_cert = [&](const CertificateReport& c) {
        rep["kind"] = c.kind;
        rep["pass"] = c.pass;
        rep["inf"] = c.inf;
        rep["sup"] = c.sup;
        rep["C"] = std::isfinite(c.constant) ? json(c.constant) : json("inf");
        rep["worst_node"] = c.worst_node;
        rep["samples"] = c.samples;
    };
    auto report_roots = [&](const RootReport& r) {
        rep["pass"] = r.pass;
        rep["upper_count"] = r.upper_count;
        rep["lower_count"] = r.lower_count;
        rep["real_count"] = r.real_count;
        rep["min_separation"] = r.min_separation;
        rep["min_imag"] = r.min_imag;
        rep["sl_det"] = {r.sl_det.real(), r.sl_det.imag()};
        json roots = json::array();
        for (auto z : r.roots) roots.push_back({z.real(), z.imag()});
        rep["roots"] = roots;
    };

    if (check == "2d") {
        Grid g = grid_from(cfg);
        ScalarField mu = mu_from(cfg, g);
        VectorField bc = make_excitation(excitation_from(cfg, opt.seed, 0), g);
        StokesSolution sol = solve_stokes({g, mu, cfg.get_double("omega", 1.0), bc, std::nullopt,
                                           solver_from(cfg)});
        report_cert(cert_2d(sol.u, threshold));
        rep["kind"] = "cert_2d";
    } else if (check == "3d") {
        Grid g = grid_from(cfg);
        ScalarField mu = mu_from(cfg, g);
        double omega = cfg.get_double("omega", 1.0);
        SolverConfig sc = solver_from(cfg);
        VectorField bc1 = make_excitation(excitation_from(cfg, opt.seed, 0), g);
        VectorField bc2 = make_excitation(excitation_from(cfg, opt.seed, 1), g);
        StokesSolution s1 = solve_stokes({g, mu, omega, bc1, std::nullopt, sc});
        StokesSolution s2 = solve_stokes({g, mu, omega, bc2, std::nullopt, sc});
        report_cert(cert_3d(s1.u, s2.u, threshold, int(cfg.get_int("samples", 2048))));
    } else if (check == "3d_strain") {
        Eigen::Matrix3d s1 = parse_strain(cfg.get("strain1"));
        Eigen::Matrix3d s2 = parse_strain(cfg.get("strain2"));
        double a1[3][3], a2[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                a1[i][j] = s1(i, j);
                a2[i][j] = s2(i, j);
            }
        double inf = sphere_min_q(a1, a2, int(cfg.get_int("samples", 2048)));
        rep["kind"] = "cert_3d_strain";
        rep["inf"] = inf;
        rep["pass"] = inf > threshold;
    } else if (check == "sl2d") {
        report_roots(sl_check_2d(cfg.get_double("coefficient", 1.0)));
        rep["kind"] = "sl_2d";
    } else if (check == "sl3d") {
        Eigen::Matrix3d s1 = parse_strain(cfg.get("strain1"));
        Eigen::Matrix3d s2 = parse_strain(cfg.get("strain2"));
        double a1[3][3], a2[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                a1[i][j] = s1(i, j);
                a2[i][j] = s2(i, j);
            }
        double xi[2] = {1.0, 0.0};
        if (cfg.has("xi_prime")) {
            std::istringstream is(cfg.get("xi_prime"));
            char comma;
            if (!(is >> xi[0] >> comma >> xi[1]))
                throw ConfigError("xi_prime needs two comma-separated values");
        }
        report_roots(sl_check_3d(a1, a2, xi));
        rep["kind"] = "sl_3d";
    } else {
        throw ConfigError("unknown certificate check: " + check);
    }

    write_json(out / "certificate.json", rep);
    m["outputs"] = {"certificate.json"};
    m["pass"] = rep["pass"];
    m["elapsed_ms"] = elapsed_ms(t0);
    return finish(opt, m, std::string("certificate: ") + (rep["pass"].get<bool>() ? "pass" : "fail"));
}

int run_stability_impl(const RunOptions& opt) {
    auto t0 = Clock::now();
    io::Config cfg = io::Config::load(opt.config_path);
    cfg.restrict_keys(with(kCommonKeys,
                           {"amplitudes", "s", "epsilon", "bump_center", "bump_radius",
                            "bump_width", "stokes_limit_lambdas", "channels"}));
    Grid g = grid_from(cfg);
    double omega = cfg.get_double("omega", 1.0);
    SolverConfig sc = solver_from(cfg);
    fs::path out(opt.out_dir);
    json m = manifest_base(cfg, opt, "stability");
    json summary;

    NormSpec spec;
    spec.epsilon = cfg.get_double("epsilon", 0.01);
    spec.s = cfg.get_double("s", 0.5 + spec.epsilon);

    std::vector<double> amps;
    {
        std::istringstream is(cfg.get("amplitudes", "0.2,0.1,0.05"));
        std::string item;
        while (std::getline(is, item, ',')) amps.push_back(std::stod(item));
    }
    double background = cfg.get_double("background", 1.0);
    Inclusion inc;
    inc.center = {cfg.get_double("bump_center", 0.45), cfg.get_double("bump_center", 0.45),
                  cfg.get_double("bump_center", 0.45)};
    inc.radius = cfg.get_double("bump_radius", 0.3);
    inc.width = cfg.get_double("bump_width", 0.12);

    std::vector<std::pair<ScalarField, ScalarField>> pairs;
    for (double a : amps) {
        PhantomSpec ps;
        ps.background = background;
        inc.contrast = a;
        ps.inclusions = {inc};
        pairs.emplace_back(ScalarField(g, background), make_phantom(ps, g));
    }
    int channels = g.dim == 3 ? int(cfg.get_int("channels", 2)) : 1;
    std::vector<VectorField> excitations;
    for (int ch = 0; ch < channels; ++ch)
        excitations.push_back(make_excitation(excitation_from(cfg, opt.seed, ch), g));

    StabilityResult res = stability_experiment(pairs, excitations, omega, spec, amps, sc);
    std::vector<std::vector<double>> rows;
    for (const auto& r : res.rows)
        rows.push_back({double(r.pair_id), r.amplitude, r.lhs, r.rhs, r.ratio,
                        r.degenerate ? 1.0 : 0.0, r.cert_pass ? 1.0 : 0.0});
    io::write_table_csv((out / "ratios.csv").string(),
                        {"pair", "amplitude", "lhs", "rhs", "ratio", "degenerate", "cert_pass"},
                        rows);
    summary["max_ratio"] = res.max_ratio;
    summary["min_ratio"] = res.min_ratio;
    summary["spread"] = res.min_ratio > 0.0 ? res.max_ratio / res.min_ratio : 0.0;

    if (cfg.has("stokes_limit_lambdas")) {
        std::vector<double> lambdas;
        std::istringstream is(cfg.get("stokes_limit_lambdas"));
        std::string item;
        while (std::getline(is, item, ',')) lambdas.push_back(std::stod(item));
        ScalarField mu(g, background);
        VectorField bc = excitations[0];
        StokesLimitResult lim = verify_stokes_limit(lambdas, mu, omega, bc, sc);
        summary["stokes_limit_slope"] = lim.slope;
        summary["stokes_limit_gaps"] = lim.gaps;
    }

    write_json(out / "summary.json", summary);
    m["outputs"] = {"ratios.csv", "summary.json"};
    m["elapsed_ms"] = elapsed_ms(t0);
    return finish(opt, m, "stability tables written to " + opt.out_dir);
}

int guarded(const RunOptions& opt, int (*body)(const RunOptions&)) {
    try {
        fs::create_directories(opt.out_dir);
        return body(opt);
    } catch (const Error& e) {
        json err;
        err["error"] = e.kind();
        err["message"] = e.what();
        try {
            write_json(fs::path(opt.out_dir) / "error.json", err);
        } catch (...) {
        }
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = "Unhandled";
        err["message"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }
}

}  // namespace

int run_forward(const RunOptions& opt) { return guarded(opt, run_forward_impl); }
int run_reconstruct(const RunOptions& opt) { return guarded(opt, run_reconstruct_impl); }
int run_certify(const RunOptions& opt) { return guarded(opt, run_certify_impl); }
int run_stability(const RunOptions& opt) { return guarded(opt, run_stability_impl); }

int run_cli(int argc, char** argv) {
    CLI::App app{"shear-modulus reconstruction and ellipticity certification toolkit"};
    app.require_subcommand(1);

    RunOptions opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "key=value config file")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_flag("--quiet", opt.quiet, "suppress status output");
    };
    auto* fwd = app.add_subcommand("forward", "solve a forward Stokes/elasticity problem");
    auto* rec = app.add_subcommand("reconstruct", "Landweber reconstruction of mu");
    auto* cert = app.add_subcommand("certify", "ellipticity / boundary-condition certificates");
    auto* stab = app.add_subcommand("stability", "empirical stability-constant experiments");
    for (auto* sub : {fwd, rec, cert, stab}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    if (fwd->parsed()) return run_forward(opt);
    if (rec->parsed()) return run_reconstruct(opt);
    if (cert->parsed()) return run_certify(opt);
    return run_stability(opt);
}

}  // namespace mre::cli
