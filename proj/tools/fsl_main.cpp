#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fsl/assembly.hpp"
#include "fsl/cli_util.hpp"
#include "fsl/eigensolver.hpp"
#include "fsl/geometry.hpp"
#include "fsl/io.hpp"
#include "fsl/laws.hpp"
#include "fsl/paths.hpp"
#include "fsl/rng.hpp"
#include "fsl/threads.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

/**
 * One subcommand's options, all held as strings so a key=value config file
 * and the command line share one representation. Flags given on the command
 * line override file values; unknown file keys are rejected by name.
 * Handlers write resolved defaults back into `values`, which then becomes
 * the manifest's config block.
 */
struct OptionSet {
    CLI::App* cmd{nullptr};
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;

    explicit OptionSet(CLI::App* c) : cmd(c) {
        // the short -h would shadow the --h spacing flag
        cmd->set_help_flag("--help", "print this help");
        cmd->add_option("--config", config_path, "key=value file; flags override it");
    }

    void add(const std::string& key, const std::string& help) {
        options[key] = cmd->add_option("--" + key, values[key], help);
    }

    void merge_config() {
        if (config_path.empty()) return;
        auto kv = fsl::parse_key_values(fsl::read_text(config_path));
        for (const auto& [k, v] : kv) {
            auto it = options.find(k);
            if (it == options.end())
                throw std::invalid_argument("config key '" + k + "' is not a '" +
                                            cmd->get_name() + "' option");
            if (it->second->count() == 0) values[k] = v;
        }
    }

    bool has(const std::string& key) const {
        auto it = values.find(key);
        return it != values.end() && !it->second.empty();
    }

    const std::string& get(const std::string& key) const { return values.at(key); }

    void require(std::initializer_list<const char*> keys) const {
        for (const char* k : keys)
            if (!has(k))
                throw std::invalid_argument(std::string("missing required option --") + k);
    }

    std::map<std::string, std::string> config() const {
        std::map<std::string, std::string> out;
        for (const auto& [k, v] : values)
            if (!v.empty()) out[k] = v;
        return out;
    }
};

std::string manifest_path_for(const std::string& out) {
    std::filesystem::path p(out);
    return (p.parent_path() / "manifest.json").string();
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int resolve_threads_opt(OptionSet& opt) {
    int requested = 0;
    if (opt.has("threads")) {
        long long v = fsl::parse_int_token("threads", opt.get("threads"));
        if (v <= 0 || v > 1024)
            throw std::invalid_argument("threads: must be in [1, 1024], got " + opt.get("threads"));
        requested = static_cast<int>(v);
    }
    return fsl::resolve_threads(requested);
}

int run_assemble(OptionSet& opt) {
    auto t0 = std::chrono::steady_clock::now();
    opt.merge_config();
    opt.require({"domain", "alpha", "h", "out"});
    fsl::Domain dom = fsl::parse_domain_spec(opt.get("domain"));
    double alpha = fsl::parse_double_token("alpha", opt.get("alpha"));
    double h = fsl::parse_double_token("h", opt.get("h"));
    std::string out = opt.get("out");

    fsl::GridOperator op = fsl::assemble(dom, alpha, h);
    fsl::save_operator(op, out);
    std::cout << "assembled " << op.n << " cells (dim " << op.dim << ", alpha " << alpha
              << ", h " << h << ") -> " << out << "\n";
    fsl::write_manifest(manifest_path_for(out), "assemble", opt.config(), elapsed_s(t0), {out});
    return kExitOk;
}

fsl::AlphaSweep computed_sweep(OptionSet& opt, int threads) {
    opt.require({"domain", "alphas", "h"});
    fsl::Domain dom = fsl::parse_domain_spec(opt.get("domain"));
    std::vector<double> alphas = fsl::parse_alpha_list(opt.get("alphas"));
    std::vector<double> hs = fsl::parse_double_list("h", opt.get("h"));
    std::size_t k = 1;
    if (opt.has("k")) {
        long long v = fsl::parse_int_token("k", opt.get("k"));
        if (v < 1) throw std::invalid_argument("k: must be at least 1");
        k = static_cast<std::size_t>(v);
    }
    opt.values["k"] = std::to_string(k);
    return fsl::alpha_sweep(dom, alphas, k, hs, threads);
}

int run_sweep(OptionSet& opt) {
    auto t0 = std::chrono::steady_clock::now();
    opt.merge_config();
    opt.require({"out"});
    int threads = resolve_threads_opt(opt);
    fsl::AlphaSweep sweep = computed_sweep(opt, threads);
    std::string out = opt.get("out");
    fsl::write_text_atomic(out, fsl::sweep_to_csv(sweep));
    std::cout << "sweep: " << sweep.rows.size() << " rows -> " << out << "\n";
    fsl::write_manifest(manifest_path_for(out), "sweep", opt.config(), elapsed_s(t0), {out});
    return kExitOk;
}

int run_verify(OptionSet& opt) {
    auto t0 = std::chrono::steady_clock::now();
    opt.merge_config();
    opt.require({"out"});
    double tol = 5e-3;
    if (opt.has("tol")) tol = fsl::parse_double_token("tol", opt.get("tol"));
    if (!(tol >= 0.0)) throw std::invalid_argument("tol: must be nonnegative");
    opt.values["tol"] = fsl::format_g17(tol);

    std::string laws = opt.has("laws") ? opt.get("laws") : "all";
    opt.values["laws"] = laws;
    bool all = laws == "all";
    std::set<std::string> wanted;
    if (!all) {
        std::string cur;
        for (char c : laws + ",") {
            if (c != ',') {
                cur.push_back(c);
                continue;
            }
            if (cur.empty()) continue;
            if (cur != "power-monotonicity" && cur != "upper-bound" && cur != "sandwich" &&
                cur != "continuity")
                throw std::invalid_argument("laws: unknown law '" + cur + "'");
            wanted.insert(cur);
            cur.clear();
        }
    }
    auto want = [&](const char* name) { return all || wanted.count(name) > 0; };

    fsl::AlphaSweep sweep;
    if (opt.has("sweep")) {
        sweep = fsl::sweep_from_csv(fsl::read_text(opt.get("sweep")));
        if (sweep.rows.empty()) throw std::invalid_argument("sweep table is empty");
    } else {
        sweep = computed_sweep(opt, resolve_threads_opt(opt));
    }

    const std::string& domain_str = sweep.rows.front().domain;
    for (const auto& r : sweep.rows)
        if (r.domain != domain_str)
            throw std::invalid_argument("verify expects a single-domain sweep; found '" +
                                        r.domain + "' and '" + domain_str + "'");
    fsl::Domain dom = fsl::parse_domain_spec(domain_str);

    std::vector<fsl::LawReport> reports;
    if (want("power-monotonicity")) {
        auto pm = fsl::check_power_monotonicity(sweep, tol);
        reports.insert(reports.end(), pm.begin(), pm.end());
    }
    if (dom.kind != fsl::Domain::Kind::raster) {
        if (want("upper-bound")) {
            std::size_t kmax = 0;
            for (const auto& r : sweep.rows) kmax = std::max(kmax, r.i);
            auto ub = fsl::check_upper_bound(sweep, fsl::exact_laplacian_eigs(dom, kmax), tol);
            reports.insert(reports.end(), ub.begin(), ub.end());
        }
        if (want("sandwich")) {
            auto sw = fsl::check_sandwich(sweep, dom, tol);
            reports.insert(reports.end(), sw.begin(), sw.end());
        }
    }
    // the continuity profile needs an equally spaced alpha grid; sweeps
    // without one simply skip the law
    if (want("continuity")) {
        try {
            for (const auto& row : fsl::continuity_profile(sweep)) {
                fsl::LawReport rep;
                rep.law = "continuity";
                rep.instance = "domain=" + domain_str + ";i=" + std::to_string(row.i);
                rep.margin = (5.0 * row.median_increment - row.max_increment) /
                             (5.0 * row.median_increment);
                rep.pass = row.monotone && row.smooth;
                reports.push_back(std::move(rep));
            }
        } catch (const std::invalid_argument&) {
        }
    }

    std::string out = opt.get("out");
    fsl::write_text_atomic(out, fsl::reports_to_jsonl(reports));
    std::size_t failed = 0;
    for (const auto& r : reports)
        if (!r.pass) ++failed;
    std::cout << "verify: " << reports.size() << " checks, " << failed << " failed -> " << out
              << "\n";
    fsl::write_manifest(manifest_path_for(out), "verify", opt.config(), elapsed_s(t0), {out});
    return failed == 0 ? kExitOk : kExitCheckFailed;
}

int run_simulate(OptionSet& opt) {
    auto t0 = std::chrono::steady_clock::now();
    opt.merge_config();
    opt.require({"domain", "alpha", "x", "out"});
    fsl::Domain dom = fsl::parse_domain_spec(opt.get("domain"));
    double alpha = fsl::parse_double_token("alpha", opt.get("alpha"));
    if (!(alpha > 0.0) || !(alpha < 2.0))
        throw std::invalid_argument("alpha: outside the open interval (0,2)");
    fsl::Point x = fsl::parse_point("x", opt.get("x"));

    double R = fsl::inner_radius(dom);
    double dt = opt.has("dt") ? fsl::parse_double_token("dt", opt.get("dt"))
                              : 1e-3 * std::pow(R, alpha);
    double tmax = opt.has("tmax") ? fsl::parse_double_token("tmax", opt.get("tmax"))
                                  : 10.0 * std::pow(R, alpha);
    std::size_t paths = 100000;
    if (opt.has("paths")) {
        long long v = fsl::parse_int_token("paths", opt.get("paths"));
        if (v < 1) throw std::invalid_argument("paths: must be positive");
        paths = static_cast<std::size_t>(v);
    }
    std::size_t points = 200;
    if (opt.has("points")) {
        long long v = fsl::parse_int_token("points", opt.get("points"));
        if (v < 1) throw std::invalid_argument("points: must be positive");
        points = static_cast<std::size_t>(v);
    }
    std::uint64_t seed = 1;
    if (opt.has("seed"))
        seed = static_cast<std::uint64_t>(fsl::parse_int_token("seed", opt.get("seed")));
    opt.values["dt"] = fsl::format_g17(dt);
    opt.values["tmax"] = fsl::format_g17(tmax);
    opt.values["paths"] = std::to_string(paths);
    opt.values["points"] = std::to_string(points);
    opt.values["seed"] = std::to_string(seed);
    int threads = resolve_threads_opt(opt);

    std::vector<double> t_grid(points + 1);
    for (std::size_t j = 0; j <= points; ++j)
        t_grid[j] = tmax * static_cast<double>(j) / static_cast<double>(points);

    fsl::SurvivalEstimate est =
        fsl::survival_curve(dom, x, alpha, paths, t_grid, dt, fsl::RngStream(seed, 0), threads);

    std::string csv = "t,p_hat,se,alive,censored\n";
    for (std::size_t j = 0; j < est.t.size(); ++j) {
        csv += fsl::format_g17(est.t[j]);
        csv += ',';
        csv += fsl::format_g17(est.p[j]);
        csv += ',';
        csv += fsl::format_g17(est.se[j]);
        csv += ',';
        csv += std::to_string(est.alive[j]);
        csv += ',';
        csv += std::to_string(est.censored[j]);
        csv += '\n';
    }
    std::string out = opt.get("out");
    fsl::write_text_atomic(out, csv);
    std::cout << "simulate: " << paths << " paths, " << est.censored.back() << " censored -> "
              << out << "\n";
    fsl::write_manifest(manifest_path_for(out), "simulate", opt.config(), elapsed_s(t0), {out});
    return kExitOk;
}

int run_symbol_check(OptionSet& opt) {
    auto t0 = std::chrono::steady_clock::now();
    opt.merge_config();
    opt.require({"alpha", "h", "out"});
    double alpha = fsl::parse_double_token("alpha", opt.get("alpha"));
    double h = fsl::parse_double_token("h", opt.get("h"));
    int dim = 1;
    if (opt.has("dim")) {
        long long v = fsl::parse_int_token("dim", opt.get("dim"));
        if (v != 1 && v != 2) throw std::invalid_argument("dim: must be 1 or 2");
        dim = static_cast<int>(v);
    }
    std::vector<double> xis = opt.has("xi") ? fsl::parse_double_list("xi", opt.get("xi"))
                                            : std::vector<double>{1.0, 2.0};
    double truncation = opt.has("truncation")
                            ? fsl::parse_double_token("truncation", opt.get("truncation"))
                            : 64.0;
    double max_error = -1.0;
    if (opt.has("max-error")) {
        max_error = fsl::parse_double_token("max-error", opt.get("max-error"));
        if (!(max_error > 0.0)) throw std::invalid_argument("max-error: must be positive");
    }
    opt.values["dim"] = std::to_string(dim);
    opt.values["truncation"] = fsl::format_g17(truncation);
    std::string xi_str;
    for (double v : xis) {
        if (!xi_str.empty()) xi_str += ',';
        xi_str += fsl::format_g17(v);
    }
    opt.values["xi"] = xi_str;

    std::string csv = "dim,alpha,h,direction,xi,truncation,error\n";
    double worst = 0.0;
    auto emit = [&](const char* direction, double xi, double err) {
        worst = std::max(worst, err);
        csv += std::to_string(dim);
        csv += ',';
        csv += fsl::format_g17(alpha);
        csv += ',';
        csv += fsl::format_g17(h);
        csv += ',';
        csv += direction;
        csv += ',';
        csv += fsl::format_g17(xi);
        csv += ',';
        csv += fsl::format_g17(truncation);
        csv += ',';
        csv += fsl::format_g17(err);
        csv += '\n';
    };
    for (double xi : xis) {
        if (dim == 1) {
            emit("axis", xi, fsl::symbol_error(1, alpha, h, xi, truncation));
        } else {
            emit("axis", xi, fsl::symbol_error_2d(alpha, h, {xi, 0.0}, truncation));
            double c = xi / std::numbers::sqrt2;
            emit("diagonal", xi, fsl::symbol_error_2d(alpha, h, {c, c}, truncation));
        }
    }

    std::string out = opt.get("out");
    fsl::write_text_atomic(out, csv);
    std::cout << "symbol-check: worst relative error " << worst << " -> " << out << "\n";
    fsl::write_manifest(manifest_path_for(out), "symbol-check", opt.config(), elapsed_s(t0), {out});
    if (max_error > 0.0 && worst > max_error) return kExitCheckFailed;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional Laplacian spectral laboratory"};
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1);

    OptionSet assemble_opt(app.add_subcommand("assemble", "discretize one operator to a file"));
    assemble_opt.add("domain", "domain spec, e.g. interval:-1,1 or box:0,0,3.14,3.14");
    assemble_opt.add("alpha", "stability index in (0,2)");
    assemble_opt.add("h", "grid spacing");
    assemble_opt.add("out", "output operator file");

    OptionSet sweep_opt(app.add_subcommand("sweep", "extrapolated eigenvalues over an alpha grid"));
    sweep_opt.add("domain", "domain spec");
    sweep_opt.add("alphas", "start:stop:step or comma list, inside (0,2)");
    sweep_opt.add("k", "eigenvalues per alpha (default 1)");
    sweep_opt.add("h", "comma list of at least three halving spacings, coarse to fine");
    sweep_opt.add("threads", "worker threads (default: FSL_THREADS or machine parallelism)");
    sweep_opt.add("out", "output CSV");

    OptionSet verify_opt(app.add_subcommand("verify", "check spectral laws on a sweep"));
    verify_opt.add("sweep", "existing sweep CSV to check (else compute one)");
    verify_opt.add("domain", "domain spec (when computing)");
    verify_opt.add("alphas", "alpha grid (when computing)");
    verify_opt.add("k", "eigenvalues per alpha (default 1)");
    verify_opt.add("h", "refinement schedule (when computing)");
    verify_opt.add("tol", "relative tolerance for every law (default 5e-3)");
    verify_opt.add("laws", "'all' or comma list: power-monotonicity,upper-bound,sandwich,continuity");
    verify_opt.add("threads", "worker threads");
    verify_opt.add("out", "output JSONL report");

    OptionSet simulate_opt(app.add_subcommand("simulate", "Monte Carlo survival curve"));
    simulate_opt.add("domain", "domain spec");
    simulate_opt.add("alpha", "stability index in (0,2)");
    simulate_opt.add("x", "start point, 'x' or 'x,y'");
    simulate_opt.add("paths", "sample paths (default 100000)");
    simulate_opt.add("dt", "time step (default 1e-3 * R^alpha)");
    simulate_opt.add("tmax", "horizon (default 10 * R^alpha)");
    simulate_opt.add("points", "time-grid points after t=0 (default 200)");
    simulate_opt.add("seed", "RNG seed (default 1)");
    simulate_opt.add("threads", "worker threads");
    simulate_opt.add("out", "output CSV");

    OptionSet symbol_opt(app.add_subcommand("symbol-check", "Fourier-symbol calibration table"));
    symbol_opt.add("alpha", "stability index in (0,2)");
    symbol_opt.add("h", "grid spacing");
    symbol_opt.add("dim", "1 or 2 (default 1)");
    symbol_opt.add("xi", "comma list of frequency magnitudes (default 1,2)");
    symbol_opt.add("truncation", "far-field truncation radius (default 64)");
    symbol_opt.add("max-error", "fail (exit 1) if any error exceeds this");
    symbol_opt.add("out", "output CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (assemble_opt.cmd->parsed()) return run_assemble(assemble_opt);
        if (sweep_opt.cmd->parsed()) return run_sweep(sweep_opt);
        if (verify_opt.cmd->parsed()) return run_verify(verify_opt);
        if (simulate_opt.cmd->parsed()) return run_simulate(simulate_opt);
        if (symbol_opt.cmd->parsed()) return run_symbol_check(symbol_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    std::cerr << "error: no subcommand\n";
    return kExitError;
}
