#include "subwalk/cli.hpp"

#include "subwalk/bernstein.hpp"
#include "subwalk/common.hpp"
#include "subwalk/io.hpp"
#include "subwalk/levy_embed.hpp"
#include "subwalk/scaling.hpp"
#include "subwalk/subordination.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <map>

namespace subwalk {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSchema = "subwalk/v1";

struct CommonConfig {
    std::string phi_id = "stable:0.5";
    std::string out_dir = "out";
    std::uint64_t seed = 42;
    double q = 1.0;
    int d = 1;
    std::string clock = "poisson";
    std::vector<std::int64_t> n_list;
    double t = 1.0;
    std::size_t paths = 100000;
};

void add_common(CLI::App& app, CommonConfig& cfg) {
    app.set_config("--config", "", "flat key=value config file");
    app.add_option("--phi", cfg.phi_id, "catalog id (stable:A | log-example | drift | atomic:...)")
        ->capture_default_str();
    app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", cfg.seed, "rng seed")
        ->envname("SUBWALK_SEED")
        ->capture_default_str();
    app.add_option("--q", cfg.q, "compound Poisson intensity; phi(q)=q enforced")
        ->capture_default_str();
    app.add_option("--d", cfg.d, "lattice dimension")->capture_default_str();
    app.add_option("--clock", cfg.clock, "poisson | floor")->capture_default_str();
    app.add_option("--n", cfg.n_list, "scaling parameter list")->delimiter(',');
    app.add_option("--t", cfg.t, "time horizon")->capture_default_str();
    app.add_option("--paths", cfg.paths, "Monte-Carlo paths")->capture_default_str();
}

fs::path prepare_out(const CommonConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

/// resolve the catalog id and force phi(q)=q by normalization when needed
BernsteinFunction resolve_phi(const std::string& id, double q, bool* normalized = nullptr) {
    BernsteinFunction phi = phi_from_id(id);
    const double pq = eval_phi(phi, q);
    if (std::fabs(pq - q) > 1e-8 * q) {
        phi = normalize(phi, q);
        if (normalized) *normalized = true;
        std::cout << "note: phi(q) != q for " << id << "; using the normalization "
                  << phi.label << "\n";
    }
    return phi;
}

std::optional<double> stable_alpha_of(const std::string& id) {
    if (id.rfind("stable:", 0) == 0) return std::stod(id.substr(7));
    return std::nullopt;
}

int cmd_weights(const CommonConfig& cfg, double mass_tol, std::size_t m_cap) {
    const fs::path dir = prepare_out(cfg);
    BernsteinFunction phi = resolve_phi(cfg.phi_id, cfg.q);
    StepWeightOptions opts;
    opts.mass_tol = mass_tol;
    opts.M_cap = m_cap;
    const StepDistribution sd = step_weights(phi, cfg.q, opts);

    write_text_file(dir / "weights.csv", to_csv(sd));
    json summary = to_json(sd);
    summary["schema"] = kSchema;
    summary["phi"] = cfg.phi_id;
    summary["sum_with_truncation"] = sd.total_assigned() + sd.truncation_mass;
    write_text_file(dir / "summary.json", summary.dump(2) + "\n");
    std::cout << "weights: M=" << sd.M << " direct_atom=" << sd.direct_atom
              << " truncation_mass=" << sd.truncation_mass << "\n";
    return 0;
}

int cmd_triplets(const CommonConfig& cfg, int radius, double tol, double perturb) {
    const fs::path dir = prepare_out(cfg);
    BernsteinFunction phi = resolve_phi(cfg.phi_id, cfg.q);
    const LatticeWalk walk = LatticeWalk::srw(cfg.d);
    if (radius <= 0) radius = cfg.d == 1 ? 30 : 12;

    TripletOptions opts;
    const LevyTriplet hat = triplet_hat(phi, walk, cfg.q, radius, opts);
    LevyTriplet tilde = triplet_tilde(phi, walk, cfg.q, radius, opts);
    if (perturb != 0.0) {
        LatticePoint e(cfg.d, 0);
        e[0] = 1;
        tilde.nu.at(e) += perturb;
    }
    const TripletComparison cmp = compare_triplets(hat, tilde, tol);

    write_text_file(dir / "triplet_hat.csv", to_csv(hat.nu));
    write_text_file(dir / "triplet_tilde.csv", to_csv(tilde.nu));
    json out = to_json(cmp);
    out["schema"] = kSchema;
    out["phi"] = cfg.phi_id;
    out["d"] = cfg.d;
    out["radius"] = radius;
    write_text_file(dir / "comparison.json", out.dump(2) + "\n");
    std::cout << "triplets: beta_distance=" << cmp.beta_distance
              << " nu_tv_distance=" << cmp.nu_tv_distance
              << " unaccounted=" << cmp.mass_unaccounted
              << " verdict=" << (cmp.pass ? "pass" : "fail") << "\n";
    return cmp.pass ? 0 : 1;
}

int cmd_converge(const CommonConfig& cfg, double alpha_opt) {
    const fs::path dir = prepare_out(cfg);
    if (cfg.n_list.empty())
        throw ConfigError("converge requires a nonempty --n list");
    BernsteinFunction phi = resolve_phi(cfg.phi_id, 1.0);
    double alpha = alpha_opt;
    if (alpha <= 0.0) {
        if (auto a = stable_alpha_of(cfg.phi_id))
            alpha = *a;
        else if (cfg.phi_id == "log-example" || cfg.phi_id == "drift")
            alpha = 1.0;
        else
            throw ConfigError("cannot derive the RV index for " + cfg.phi_id +
                              "; pass --alpha");
    }
    const ConvergenceReport rep =
        convergence_report(phi, alpha, cfg.d, cfg.t, default_theta_grid(cfg.d),
                           cfg.n_list, clock_from_string(cfg.clock));
    write_text_file(dir / "convergence.csv", to_csv(rep));
    json out = to_json(rep);
    out["schema"] = kSchema;
    out["phi"] = cfg.phi_id;
    out["clock"] = cfg.clock;
    write_text_file(dir / "convergence.json", out.dump(2) + "\n");
    std::cout << "converge: final_distance=" << rep.final_distance
              << " monotone=" << (rep.monotone_flag ? "true" : "false") << "\n";
    return 0;
}

int cmd_simulate(const CommonConfig& cfg, std::size_t steps, std::size_t n_paths) {
    const fs::path dir = prepare_out(cfg);
    BernsteinFunction phi = resolve_phi(cfg.phi_id, 1.0);
    ScaledProcessSpec spec;
    spec.phi = phi;
    spec.stable_alpha = stable_alpha_of(cfg.phi_id);
    spec.n = cfg.n_list.empty() ? 1000 : cfg.n_list.front();
    spec.clock = clock_from_string(cfg.clock);
    spec.d = cfg.d;
    spec.t = cfg.t;
    spec.seed = cfg.seed;

    std::vector<double> grid;
    if (cfg.t <= 0.0 || steps == 0) {
        grid = {0.0};
    } else {
        for (std::size_t k = 0; k <= steps; ++k)
            grid.push_back(cfg.t * static_cast<double>(k) / static_cast<double>(steps));
    }
    const Rng base(cfg.seed);
    for (std::size_t p = 0; p < n_paths; ++p) {
        const PathTable table = sample_scaled_path(spec, grid, base.substream(p));
        char name[32];
        std::snprintf(name, sizeof(name), "path_%03zu.csv", p);
        write_text_file(dir / name, to_csv(table));
    }
    std::cout << "simulate: wrote " << n_paths << " path files\n";
    return 0;
}

int cmd_rv(const CommonConfig& cfg, double lambda_min, double lambda_max, double x,
           bool also_inverse) {
    const fs::path dir = prepare_out(cfg);
    BernsteinFunction phi = phi_from_id(cfg.phi_id);
    const RVEstimate rv = rv_index_estimate(
        [&](double l) { return eval_phi(phi, l); }, lambda_min, lambda_max, 25, x);
    json out;
    out["schema"] = kSchema;
    out["phi"] = cfg.phi_id;
    out["phi_index"] = to_json(rv);
    if (also_inverse) {
        const RVEstimate rvi = rv_index_estimate(
            [&](double y) { return invert_phi(phi, y); }, lambda_min, lambda_max, 25, x);
        out["inverse_index"] = to_json(rvi);
    }
    write_text_file(dir / "rv.json", out.dump(2) + "\n");
    std::cout << "rv: index_hat=" << rv.index_hat << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// the aggregated verification suite

struct CheckTolerances {
    double lemma = 1e-8;
    double rv = 0.05;
    double example_tail = 0.01;
    double example_slope = 0.2;
    double tmp121 = 1e-9;
};

json run_check_lemma31(const CheckTolerances& tol) {
    json results = json::array();
    bool all_ok = true;
    std::vector<double> grid;
    for (double v = 1e-6; v <= 1.0001e6; v *= 10.0) grid.push_back(v);
    for (const std::string& id : default_catalog_ids()) {
        const BernsteinFunction phi = phi_from_id(id);
        const LemmaReport rep = check_lemma_lmest(phi, grid, {0.001, 0.1, 0.5, 1.0, 2.0,
                                                              10.0, 1000.0},
                                                  tol.lemma);
        all_ok = all_ok && rep.ok;
        results.push_back({{"phi", id},
                           {"ok", rep.ok},
                           {"worst_moment_residual", rep.worst_moment_residual},
                           {"worst_tail_residual", rep.worst_tail_residual},
                           {"worst_scaling_residual", rep.worst_scaling_residual}});
    }
    return {{"name", "lemma31"}, {"pass", all_ok}, {"results", results}};
}

json run_check_rv(const CheckTolerances& tol) {
    json results = json::array();
    bool all_ok = true;
    auto push = [&](const std::string& what, double got, double want) {
        const bool ok = std::fabs(got - want) <= tol.rv;
        all_ok = all_ok && ok;
        results.push_back({{"what", what}, {"index_hat", got}, {"expected", want}, {"ok", ok}});
    };
    for (double a : {0.3, 0.5, 0.8}) {
        const BernsteinFunction phi = stable_exponent(a);
        push("stable:" + std::to_string(a),
             rv_index_estimate([&](double l) { return eval_phi(phi, l); }, 1e-8, 1e-2)
                 .index_hat,
             a);
        push("stable:" + std::to_string(a) + ":inverse",
             rv_index_estimate([&](double y) { return invert_phi(phi, y); }, 1e-8, 1e-2)
                 .index_hat,
             1.0 / a);
    }
    const BernsteinFunction lg = log_example_exponent();
    push("log-example",
         rv_index_estimate([&](double l) { return eval_phi(lg, l); }, 1e-14, 1e-6)
             .index_hat,
         1.0);
    // any Bernstein index must land in [0,1] numerically
    for (const std::string& id : default_catalog_ids()) {
        const BernsteinFunction phi = phi_from_id(id);
        const double got =
            rv_index_estimate([&](double l) { return eval_phi(phi, l); }, 1e-10, 1e-2)
                .index_hat;
        const bool ok = got >= -0.02 && got <= 1.02;
        all_ok = all_ok && ok;
        results.push_back({{"what", id + ":range"}, {"index_hat", got}, {"ok", ok}});
    }
    return {{"name", "rv"}, {"pass", all_ok}, {"results", results}};
}

json run_check_example14(const CheckTolerances& tol) {
    const BernsteinFunction phi = log_example_exponent();
    const double c = 1.0 / std::log(2.0);
    json results = json::array();
    bool all_ok = true;

    // t mu(t,inf) -> c
    const double t0 = 1e4;
    const double tail = phi.levy.tail_mass_by_quadrature(t0);
    const bool tail_ok = std::fabs(t0 * tail - c) <= tol.example_tail * c;
    all_ok = all_ok && tail_ok;
    results.push_back({{"what", "t*tail_mass(t) at t=1e4"},
                       {"value", t0 * tail},
                       {"limit", c},
                       {"ok", tail_ok}});

    // truncated second-moment proxy: sum m w_m grows like c log M
    StepDistribution sd;
    try {
        StepWeightOptions opts;
        opts.mass_tol = 1e-12;
        opts.M_cap = 10000;
        sd = step_weights(phi, 1.0, opts);
    } catch (const TruncationError& e) {
        sd = e.partial; // the infinite mixture is cut deliberately at M_cap
    }
    std::vector<double> partial(sd.weights.size() + 1, 0.0);
    for (std::size_t m = 1; m <= sd.weights.size(); ++m)
        partial[m] = partial[m - 1] + static_cast<double>(m) * sd.weights[m - 1];
    const double s100 = partial[100], s10000 = partial[10000];
    const bool doubling_ok = s10000 >= 2.0 * s100;
    all_ok = all_ok && doubling_ok;
    results.push_back({{"what", "sum m*w_m doubling"},
                       {"at_1e2", s100},
                       {"at_1e4", s10000},
                       {"ok", doubling_ok}});

    // least squares slope of partial sums against log M
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (double mf = 100.0; mf <= 10000.5; mf *= std::pow(100.0, 0.125)) {
        const std::size_t M = static_cast<std::size_t>(std::llround(mf));
        const double x = std::log(static_cast<double>(M)), y = partial[M];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    const bool slope_ok = std::fabs(slope - c) <= tol.example_slope * c;
    all_ok = all_ok && slope_ok;
    results.push_back(
        {{"what", "partial-sum slope vs log M"}, {"slope", slope}, {"c", c}, {"ok", slope_ok}});

    // RV index 1 +- tol
    const double idx =
        rv_index_estimate([&](double l) { return eval_phi(phi, l); }, 1e-14, 1e-6)
            .index_hat;
    const bool rv_ok = std::fabs(idx - 1.0) <= 0.05;
    all_ok = all_ok && rv_ok;
    results.push_back({{"what", "rv index"}, {"index_hat", idx}, {"ok", rv_ok}});

    return {{"name", "example14"}, {"pass", all_ok}, {"results", results}};
}

json run_check_tmp121(const CheckTolerances& tol) {
    json results = json::array();
    bool all_ok = true;
    for (const std::string& id : default_catalog_ids()) {
        const BernsteinFunction phi = phi_from_id(id);
        double worst = -1e300;
        for (int d : {1, 2}) {
            const auto grid = default_theta_grid(d);
            ScaledProcessSpec spec;
            spec.phi = phi;
            spec.d = d;
            for (std::int64_t n : {10ll, 100ll, 1000ll, 100000ll, 1000000ll}) {
                spec.n = n;
                const double scale = spec.scale();
                for (const auto& th : grid) {
                    double norm2 = 0.0, arg = 0.0;
                    for (double v : th) {
                        norm2 += v * v;
                        const double s = std::sin(0.5 * scale * v);
                        arg += 2.0 * s * s;
                    }
                    arg /= d;
                    const double lhs =
                        static_cast<double>(n) * (arg <= 0.0 ? 0.0 : eval_phi(phi, arg));
                    const double rhs = std::max(norm2 / (2.0 * d), 1.0);
                    worst = std::max(worst, lhs - rhs);
                }
            }
        }
        const bool ok = worst <= tol.tmp121;
        all_ok = all_ok && ok;
        results.push_back({{"phi", id}, {"worst_lhs_minus_rhs", worst}, {"ok", ok}});
    }
    return {{"name", "tmp121"}, {"pass", all_ok}, {"results", results}};
}

int cmd_check(const CommonConfig& cfg, const std::string& only,
              const std::vector<std::string>& tol_overrides) {
    const fs::path dir = prepare_out(cfg);
    CheckTolerances tol;
    for (const std::string& kv : tol_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("bad --tol override: " + kv);
        const std::string key = kv.substr(0, eq);
        double val = 0.0;
        try {
            val = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad --tol value in: " + kv);
        }
        if (key == "lemma")
            tol.lemma = val;
        else if (key == "rv")
            tol.rv = val;
        else if (key == "example.tail")
            tol.example_tail = val;
        else if (key == "example.slope")
            tol.example_slope = val;
        else if (key == "tmp121")
            tol.tmp121 = val;
        else
            throw ConfigError("unknown tolerance key: " + key);
    }

    const std::vector<std::string> known{"lemma31", "rv", "example14", "tmp121"};
    if (!only.empty() && std::find(known.begin(), known.end(), only) == known.end())
        throw ConfigError("unknown check name: " + only);

    json checks = json::array();
    bool all_pass = true;
    for (const std::string& name : known) {
        if (!only.empty() && name != only) continue;
        json r;
        if (name == "lemma31") r = run_check_lemma31(tol);
        else if (name == "rv") r = run_check_rv(tol);
        else if (name == "example14") r = run_check_example14(tol);
        else r = run_check_tmp121(tol);
        all_pass = all_pass && r["pass"].get<bool>();
        std::cout << "check " << name << ": " << (r["pass"].get<bool>() ? "pass" : "FAIL")
                  << "\n";
        checks.push_back(std::move(r));
    }
    json out{{"schema", kSchema}, {"pass", all_pass}, {"checks", checks}};
    write_text_file(dir / "check.json", out.dump(2) + "\n");
    return all_pass ? 0 : 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"subordinate random walks: verification suites and experiments"};
    app.require_subcommand(1);

    CommonConfig cfg;
    add_common(app, cfg);

    // shared options live on the main app; subcommands let unmatched flags
    // fall through so `subwalk weights --phi ...` works, and flat config keys
    // like phi=... resolve at the top level
    auto* weights = app.add_subcommand("weights", "emit the subordinate step mixture");
    weights->fallthrough();
    double mass_tol = 0.05;
    std::size_t m_cap = 20000;
    weights->add_option("--mass-tol", mass_tol, "stop once this little mass is left")
        ->capture_default_str();
    weights->add_option("--m-cap", m_cap, "mixture size cap")->capture_default_str();

    auto* triplets = app.add_subcommand("triplets", "compare the two embedding triplets");
    triplets->fallthrough();
    int radius = 0;
    double trip_tol = 1e-6;
    double perturb = 0.0;
    triplets->add_option("--radius", radius, "lattice truncation radius (0: default)");
    triplets->add_option("--tol", trip_tol, "comparison tolerance")->capture_default_str();
    triplets->add_option("--perturb-nu", perturb,
                         "add this mass to tilde nu at +e_1 (self-test)");

    auto* converge = app.add_subcommand("converge", "chf distance to the stable limit");
    converge->fallthrough();
    double alpha = 0.0;
    converge->add_option("--alpha", alpha, "RV index (derived for catalog phis)");

    auto* simulate = app.add_subcommand("simulate", "sample scaled paths to CSV");
    simulate->fallthrough();
    std::size_t steps = 100, n_paths = 1;
    simulate->add_option("--steps", steps, "time grid steps")->capture_default_str();
    simulate->add_option("--num-paths", n_paths, "number of path files")
        ->capture_default_str();

    auto* check = app.add_subcommand("check", "run the verification suite");
    check->fallthrough();
    std::string only;
    std::vector<std::string> tol_overrides;
    check->add_option("--only", only, "run a single check (lemma31|rv|example14|tmp121)");
    check->add_option("--tol", tol_overrides, "override tolerance KEY=VAL")
        ->take_all();

    auto* rv = app.add_subcommand("rv", "regular-variation index estimate");
    rv->fallthrough();
    double lambda_min = 1e-8, lambda_max = 1e-2, x_factor = 10.0;
    bool also_inverse = false;
    rv->add_option("--lambda-min", lambda_min)->capture_default_str();
    rv->add_option("--lambda-max", lambda_max)->capture_default_str();
    rv->add_option("--x", x_factor)->capture_default_str();
    rv->add_flag("--inverse", also_inverse, "also estimate the index of phi^{-1}");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (weights->parsed()) return cmd_weights(cfg, mass_tol, m_cap);
        if (triplets->parsed()) return cmd_triplets(cfg, radius, trip_tol, perturb);
        if (converge->parsed()) return cmd_converge(cfg, alpha);
        if (simulate->parsed()) return cmd_simulate(cfg, steps, n_paths);
        if (check->parsed()) return cmd_check(cfg, only, tol_overrides);
        if (rv->parsed()) return cmd_rv(cfg, lambda_min, lambda_max, x_factor, also_inverse);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace subwalk
