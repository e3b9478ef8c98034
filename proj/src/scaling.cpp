#include "subwalk/scaling.hpp"

#include "subwalk/common.hpp"
#include "subwalk/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>

namespace subwalk {

Clock clock_from_string(const std::string& s) {
    if (s == "poisson") return Clock::poisson;
    if (s == "floor") return Clock::floor;
    throw ConfigError("unknown clock '" + s + "' (expected poisson|floor)");
}

std::string to_string(Clock c) { return c == Clock::poisson ? "poisson" : "floor"; }

double ScaledProcessSpec::scale() const {
    return std::sqrt(invert_phi(phi, 1.0 / static_cast<double>(n)));
}

ScaledProcessSpec make_scaled_spec(const std::string& phi_id, std::int64_t n, Clock clock,
                                   int d, double t, std::uint64_t seed) {
    ScaledProcessSpec spec;
    spec.phi = phi_from_id(phi_id);
    if (phi_id.rfind("stable:", 0) == 0) spec.stable_alpha = std::stod(phi_id.substr(7));
    if (n < 1) throw DomainError("scaled process requires n >= 1");
    if (d < 1) throw DomainError("scaled process requires d >= 1");
    if (t < 0.0) throw DomainError("scaled process requires t >= 0");
    const double phi1 = eval_phi(spec.phi, 1.0);
    if (std::fabs(phi1 - 1.0) > 1e-8)
        throw DomainError("scaled process requires phi(1) = 1 (got phi(1)=" +
                          std::to_string(phi1) + "); normalize first");
    spec.n = n;
    spec.clock = clock;
    spec.d = d;
    spec.t = t;
    spec.seed = seed;
    return spec;
}

StepCountSampler resolve_step_counts(const ScaledProcessSpec& spec, double mass_tol,
                                     std::size_t M_cap) {
    if (spec.stable_alpha) return StepCountSampler::stable(*spec.stable_alpha);
    if (spec.phi.levy.is_zero()) return StepCountSampler::drift();
    StepWeightOptions opts;
    opts.mass_tol = mass_tol;
    opts.M_cap = M_cap;
    return StepCountSampler::mixture(step_weights(spec.phi, 1.0, opts),
                                     LatticeWalk::srw(spec.d));
}

double cosine_average(const std::vector<double>& theta, double scale) {
    if (theta.empty()) throw DomainError("cosine_average: empty theta");
    double acc = 0.0;
    for (double th : theta) acc += std::cos(scale * th);
    return acc / static_cast<double>(theta.size());
}

std::vector<std::vector<double>> default_theta_grid(int d) {
    std::vector<std::vector<double>> grid;
    if (d == 1) {
        for (int i = -20; i <= 20; ++i) grid.push_back({0.25 * i});
    } else if (d == 2) {
        for (int i = -6; i <= 6; ++i)
            for (int j = -6; j <= 6; ++j) grid.push_back({0.5 * i, 0.5 * j});
    } else {
        for (int i = -2; i <= 2; ++i)
            for (int j = -2; j <= 2; ++j)
                for (int k = -2; k <= 2; ++k)
                    grid.push_back({1.0 * i, 1.0 * j, 1.0 * k});
    }
    return grid;
}

namespace {

// 1 - c_n(theta) for the SRW, via sin^2 halves: (2/d) sum_j sin^2(scale*t_j/2).
// The direct 1-cos form loses all precision once scale*theta ~ 1e-6.
double one_minus_cosavg(const std::vector<double>& theta, double scale) {
    double acc = 0.0;
    for (double th : theta) {
        const double s = std::sin(0.5 * scale * th);
        acc += 2.0 * s * s;
    }
    return acc / static_cast<double>(theta.size());
}

} // namespace

double chf_scaled_exact(const ScaledProcessSpec& spec, const std::vector<double>& theta) {
    if (static_cast<int>(theta.size()) != spec.d)
        throw DomainError("chf_scaled_exact: theta has wrong dimension");
    const double arg = one_minus_cosavg(theta, spec.scale());
    const double ph = arg <= 0.0 ? 0.0 : eval_phi(spec.phi, arg);
    if (spec.clock == Clock::poisson)
        return std::exp(-static_cast<double>(spec.n) * spec.t * ph);
    const double base = 1.0 - ph;
    if (base < 0.0)
        throw DomainError("floor-clock base 1-phi(1-c) is negative at this theta "
                          "(phi(1-c)=" + std::to_string(ph) + ")");
    const double steps = std::floor(static_cast<double>(spec.n) * spec.t);
    return std::pow(base, steps);
}

double chf_limit(const std::vector<double>& theta, double t, double alpha, int d) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("chf_limit: alpha in (0,1]");
    double norm2 = 0.0;
    for (double th : theta) norm2 += th * th;
    return std::exp(-t * std::pow(2.0 * d, -alpha) * std::pow(norm2, alpha));
}

ConvergenceReport convergence_report(const BernsteinFunction& phi, double alpha, int d,
                                     double t,
                                     const std::vector<std::vector<double>>& theta_grid,
                                     const std::vector<std::int64_t>& n_sequence,
                                     Clock clock) {
    if (n_sequence.empty()) throw ConfigError("convergence_report: empty n sequence");
    ConvergenceReport rep;
    rep.alpha = alpha;
    rep.n_sequence = n_sequence;
    ScaledProcessSpec spec;
    spec.phi = phi;
    spec.clock = clock;
    spec.d = d;
    spec.t = t;
    for (std::int64_t n : n_sequence) {
        spec.n = n;
        double sup = 0.0;
        for (const auto& th : theta_grid)
            sup = std::max(sup, std::fabs(chf_scaled_exact(spec, th) -
                                          chf_limit(th, t, alpha, d)));
        rep.sup_distance.push_back(sup);
    }
    rep.final_distance = rep.sup_distance.back();
    rep.monotone_flag = true;
    for (std::size_t i = 0; i + 1 < rep.sup_distance.size(); ++i)
        if (rep.sup_distance[i + 1] > rep.sup_distance[i] + 1e-12)
            rep.monotone_flag = false;
    return rep;
}

// ---------------------------------------------------------------------------

ChfEvaluation empirical_chf(const std::vector<std::vector<std::int64_t>>& endpoints,
                            double scale,
                            const std::vector<std::vector<double>>& theta_grid) {
    ChfEvaluation out;
    out.theta_grid = theta_grid;
    out.method = "monte_carlo";
    out.paths = endpoints.size();
    out.values.assign(theta_grid.size(), {0.0, 0.0});
    if (endpoints.empty()) return out;
    for (const auto& z : endpoints) {
        for (std::size_t g = 0; g < theta_grid.size(); ++g) {
            double dot = 0.0;
            for (std::size_t j = 0; j < z.size(); ++j)
                dot += theta_grid[g][j] * (scale * static_cast<double>(z[j]));
            out.values[g] += std::complex<double>(std::cos(dot), std::sin(dot));
        }
    }
    const double inv = 1.0 / static_cast<double>(endpoints.size());
    out.stderrs.resize(theta_grid.size());
    for (std::size_t g = 0; g < theta_grid.size(); ++g) {
        out.values[g] *= inv;
        out.stderrs[g] = std::sqrt(std::max(0.0, 1.0 - std::norm(out.values[g])) * inv);
    }
    return out;
}

ChfEvaluation chf_monte_carlo(const ScaledProcessSpec& spec,
                              const std::vector<std::vector<double>>& theta_grid,
                              std::size_t paths, const McOptions& mc) {
    if (paths < 1000) throw DomainError("chf_monte_carlo: need at least 1e3 paths");
    const StepCountSampler counts = resolve_step_counts(spec);
    const double scale = spec.scale();
    const double nt = static_cast<double>(spec.n) * spec.t;
    const std::int64_t floor_steps = static_cast<std::int64_t>(std::floor(nt));
    const Rng base(spec.seed);

    const std::size_t n_chunks = (paths + mc.chunk - 1) / mc.chunk;
    std::vector<std::vector<std::complex<double>>> partial(
        n_chunks, std::vector<std::complex<double>>(theta_grid.size(), {0.0, 0.0}));

    for_each_chunk(
        paths, mc.chunk,
        [&](std::size_t c, std::size_t begin, std::size_t end) {
            Rng rng = base.substream(c);
            std::poisson_distribution<std::int64_t> clock_draw(nt);
            auto& acc = partial[c];
            for (std::size_t i = begin; i < end; ++i) {
                const std::int64_t k =
                    spec.clock == Clock::poisson ? clock_draw(rng) : floor_steps;
                std::int64_t total = 0;
                constexpr std::int64_t kCap = static_cast<std::int64_t>(4.0e18);
                for (std::int64_t s = 0; s < k; ++s) {
                    const std::int64_t m = counts(rng);
                    total = (total > kCap - m) ? kCap : total + m;
                }
                const auto z = sample_srw_endpoint64(spec.d, total, rng);
                for (std::size_t g = 0; g < theta_grid.size(); ++g) {
                    double dot = 0.0;
                    for (std::size_t j = 0; j < z.size(); ++j)
                        dot += theta_grid[g][j] * (scale * static_cast<double>(z[j]));
                    acc[g] += std::complex<double>(std::cos(dot), std::sin(dot));
                }
            }
        },
        mc.threads);

    ChfEvaluation out;
    out.theta_grid = theta_grid;
    out.method = "monte_carlo";
    out.paths = paths;
    out.values.assign(theta_grid.size(), {0.0, 0.0});
    for (const auto& acc : partial)
        for (std::size_t g = 0; g < theta_grid.size(); ++g) out.values[g] += acc[g];
    const double inv = 1.0 / static_cast<double>(paths);
    out.stderrs.resize(theta_grid.size());
    for (std::size_t g = 0; g < theta_grid.size(); ++g) {
        out.values[g] *= inv;
        out.stderrs[g] = std::sqrt(std::max(0.0, 1.0 - std::norm(out.values[g])) * inv);
    }
    return out;
}

// ---------------------------------------------------------------------------

TailBoundReport tail_bound_ratio(const BernsteinFunction& phi,
                                 const StepCountSampler& counts, double a,
                                 const std::vector<double>& K_grid, double beta,
                                 const std::vector<std::int64_t>& n_grid,
                                 std::size_t paths, std::uint64_t seed, int d,
                                 const McOptions& mc) {
    if (phi.drift_b != 0.0)
        throw DomainError("tail_bound_ratio requires b = 0");
    if (!counts.exact())
        throw DomainError("tail_bound_ratio requires an exact step-count sampler; "
                          "the truncated mixture cannot reach the tail events");
    TailBoundReport rep;
    rep.a = a;
    rep.beta = beta;
    const Rng base(seed);

    std::vector<double> max_per_n;
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
        const std::int64_t n = n_grid[ni];
        const double inv_n = invert_phi(phi, 1.0 / static_cast<double>(n));
        const std::int64_t terms =
            static_cast<std::int64_t>(std::floor(a * static_cast<double>(n)));

        // thresholds K/sqrt(phi^{-1}(1/n)) shared across one endpoint sample
        std::vector<double> thresholds;
        for (double K : K_grid) thresholds.push_back(K / std::sqrt(inv_n));

        const std::size_t n_chunks = (paths + mc.chunk - 1) / mc.chunk;
        std::vector<std::vector<std::size_t>> exceed(
            n_chunks, std::vector<std::size_t>(K_grid.size(), 0));
        for_each_chunk(
            paths, mc.chunk,
            [&](std::size_t c, std::size_t begin, std::size_t end) {
                Rng rng = base.substream((ni << 32) ^ c);
                auto& cnt = exceed[c];
                constexpr std::int64_t kCap = static_cast<std::int64_t>(4.0e18);
                for (std::size_t i = begin; i < end; ++i) {
                    std::int64_t total = 0;
                    for (std::int64_t s = 0; s < terms; ++s) {
                        const std::int64_t m = counts(rng);
                        total = (total > kCap - m) ? kCap : total + m;
                    }
                    const auto z = sample_srw_endpoint64(d, total, rng);
                    double norm2 = 0.0;
                    for (std::int64_t zj : z)
                        norm2 += static_cast<double>(zj) * static_cast<double>(zj);
                    const double norm = std::sqrt(norm2);
                    for (std::size_t ki = 0; ki < thresholds.size(); ++ki)
                        if (norm > thresholds[ki]) ++cnt[ki];
                }
            },
            mc.threads);

        double row_max = 0.0;
        for (std::size_t ki = 0; ki < K_grid.size(); ++ki) {
            std::size_t hits = 0;
            for (const auto& cnt : exceed) hits += cnt[ki];
            const double K = K_grid[ki];
            TailBoundCell cell;
            cell.K = K;
            cell.n = n;
            cell.lhs = static_cast<double>(hits) / static_cast<double>(paths);
            const double inv_kn =
                invert_phi(phi, std::pow(K, -beta) / static_cast<double>(n));
            cell.rhs = a * (std::pow(K, -2.0 - beta) * inv_n / inv_kn + std::pow(K, -beta));
            cell.ratio = cell.lhs / cell.rhs;
            if (hits == 0) cell.lhs_bound95 = 3.0 / static_cast<double>(paths);
            if (!std::isfinite(cell.ratio)) rep.all_finite = false;
            rep.max_ratio = std::max(rep.max_ratio, cell.ratio);
            row_max = std::max(row_max, cell.ratio);
            rep.cells.push_back(cell);
        }
        max_per_n.push_back(row_max);
    }

    rep.monotone_growth = max_per_n.size() >= 2;
    for (std::size_t i = 0; i + 1 < max_per_n.size(); ++i)
        if (max_per_n[i + 1] <= max_per_n[i]) rep.monotone_growth = false;
    return rep;
}

// ---------------------------------------------------------------------------

PathTable sample_scaled_path(const ScaledProcessSpec& spec,
                             const std::vector<double>& time_grid, Rng rng) {
    for (std::size_t i = 0; i + 1 < time_grid.size(); ++i)
        if (time_grid[i + 1] <= time_grid[i])
            throw DomainError("sample_scaled_path: time grid must be increasing");
    const StepCountSampler counts = resolve_step_counts(spec);
    const double scale = spec.scale();
    const double n = static_cast<double>(spec.n);

    PathTable out;
    out.times = time_grid;
    std::vector<std::int64_t> pos(static_cast<std::size_t>(spec.d), 0);
    std::int64_t consumed = 0; // xi draws so far; the stream is shared by all
                               // grid times so refinements restrict
    double poisson_count = 0.0;
    double prev_time = 0.0;
    std::poisson_distribution<std::int64_t> pd;

    for (double tt : time_grid) {
        if (tt < 0.0) throw DomainError("sample_scaled_path: negative time");
        std::int64_t target;
        if (spec.clock == Clock::floor) {
            target = static_cast<std::int64_t>(std::floor(n * tt));
        } else {
            const double dt = n * (tt - prev_time);
            if (dt > 0.0) {
                pd.param(std::poisson_distribution<std::int64_t>::param_type(dt));
                poisson_count += static_cast<double>(pd(rng));
            }
            prev_time = tt;
            target = static_cast<std::int64_t>(poisson_count);
        }
        while (consumed < target) {
            const std::int64_t m = counts(rng);
            const auto step = sample_srw_endpoint64(spec.d, m, rng);
            for (std::size_t j = 0; j < pos.size(); ++j) pos[j] += step[j];
            ++consumed;
        }
        std::vector<double> row(pos.size());
        for (std::size_t j = 0; j < pos.size(); ++j)
            row[j] = scale * static_cast<double>(pos[j]);
        out.values.push_back(std::move(row));
    }
    return out;
}

} // namespace subwalk
