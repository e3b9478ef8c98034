#include "subwalk/levy_embed.hpp"

#include "subwalk/common.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace subwalk {
namespace {

bool unit_euclid_ball(const LatticePoint& z) {
    long long norm2 = 0;
    for (int c : z) norm2 += static_cast<long long>(c) * c;
    return norm2 > 0 && norm2 <= 1; // on Z^d: exactly the points +-e_j
}

bool is_origin(const LatticePoint& z) {
    for (int c : z)
        if (c != 0) return false;
    return true;
}

// P(Z~_s = z) for the 1d compound Poisson SRW, lambda = q*s. Poisson series
// over parity-matched m with ratio recurrences; window chosen so that the
// skipped Poisson mass is below ~1e-13.
double cp_point_1d(double lambda, long long z) {
    const long long az = std::llabs(z);
    if (lambda <= 1e-300) return az == 0 ? 1.0 : 0.0;
    const double w = 8.5 * std::sqrt(lambda) + 25.0;
    const double hi = lambda + w;
    if (static_cast<double>(az) > hi) return 0.0;

    long long m0 = std::max<long long>(az, static_cast<long long>(lambda - w));
    if ((m0 + az) % 2 != 0) ++m0; // parity of z
    double acc = 0.0;
    // z = 0, m = 0 term
    if (az == 0 && m0 == 0) {
        acc += std::exp(-lambda);
        m0 = 2;
    }
    if (m0 > static_cast<long long>(hi)) return acc;

    const double log_po0 = static_cast<double>(m0) * std::log(lambda) - lambda -
                           std::lgamma(static_cast<double>(m0) + 1.0);
    double po = log_po0 < -745.0 ? 0.0 : std::exp(log_po0);
    if (po == 0.0) return acc;
    double b = srw1d_point_pmf(m0, z);
    const double zd = static_cast<double>(z);
    for (double m = static_cast<double>(m0); m <= hi; m += 2.0) {
        acc += po * b;
        po *= lambda * lambda / ((m + 1.0) * (m + 2.0));
        b *= (m + 2.0) * (m + 1.0) / ((m + 2.0 + zd) * (m + 2.0 - zd));
    }
    return acc;
}

// d=2 via the rotation (x,y) -> (x+y, x-y): P(Z_m=(x,y)) = b_m(x+y) b_m(x-y)
double cp_point_2d(double lambda, long long x, long long y) {
    const long long s = x + y, t = x - y;
    const long long lo_m = std::llabs(x) + std::llabs(y);
    if (lambda <= 1e-300) return lo_m == 0 ? 1.0 : 0.0;
    const double w = 8.5 * std::sqrt(lambda) + 25.0;
    const double hi = lambda + w;
    if (static_cast<double>(lo_m) > hi) return 0.0;

    long long m0 = std::max<long long>(lo_m, static_cast<long long>(lambda - w));
    if ((m0 + s) % 2 != 0) ++m0;
    double acc = 0.0;
    if (lo_m == 0 && m0 == 0) {
        acc += std::exp(-lambda);
        m0 = 2;
    }
    if (m0 > static_cast<long long>(hi)) return acc;

    const double log_po0 = static_cast<double>(m0) * std::log(lambda) - lambda -
                           std::lgamma(static_cast<double>(m0) + 1.0);
    double po = log_po0 < -745.0 ? 0.0 : std::exp(log_po0);
    if (po == 0.0) return acc;
    double bs = srw1d_point_pmf(m0, s);
    double bt = srw1d_point_pmf(m0, t);
    const double sd = static_cast<double>(s), td = static_cast<double>(t);
    for (double m = static_cast<double>(m0); m <= hi; m += 2.0) {
        acc += po * bs * bt;
        po *= lambda * lambda / ((m + 1.0) * (m + 2.0));
        bs *= (m + 2.0) * (m + 1.0) / ((m + 2.0 + sd) * (m + 2.0 - sd));
        bt *= (m + 2.0) * (m + 1.0) / ((m + 2.0 + td) * (m + 2.0 - td));
    }
    return acc;
}

} // namespace

LevyTriplet cp_triplet_from_jump_law(double q, const LatticeDistribution& eta) {
    if (q <= 0.0) throw DomainError("cp_triplet_from_jump_law requires q > 0");
    const int d = eta.dimension();
    LevyTriplet out{d, std::vector<double>(static_cast<std::size_t>(d), 0.0),
                    LatticeDistribution(d, eta.radius()), 0.0};
    for (const auto& [z, p] : eta.entries()) {
        if (is_origin(z)) continue;
        out.nu.at(z) = q * p;
        if (unit_euclid_ball(z))
            for (int j = 0; j < d; ++j)
                out.beta[static_cast<std::size_t>(j)] -= q * z[j] * p;
    }
    out.nu.set_captured_mass(out.nu.total_mass());
    out.unaccounted = q * std::max(0.0, 1.0 - eta.captured_mass());
    return out;
}

LevyTriplet triplet_hat(const BernsteinFunction& phi, const LatticeWalk& walk, double q,
                        int radius, const TripletOptions& opts) {
    StepWeightOptions wopts;
    wopts.mass_tol = opts.mass_tol;
    wopts.M_cap = opts.M_cap;
    const StepDistribution sd = step_weights(phi, q, wopts);
    const SubordinatePmf pmf = subordinate_step_pmf(sd, walk, radius);
    LevyTriplet out = cp_triplet_from_jump_law(q, pmf.law);
    out.unaccounted = q * (pmf.weight_truncation + pmf.lattice_loss);
    return out;
}

LevyTriplet triplet_tilde(const BernsteinFunction& phi, const LatticeWalk& walk, double q,
                          int radius, const TripletOptions& opts) {
    const int d = walk.dimension();
    if (!walk.is_srw() || d > 2)
        throw DomainError("triplet_tilde supports the SRW in d = 1, 2");
    const double phi_q = eval_phi(phi, q);
    if (std::fabs(phi_q - q) > 1e-8 * q)
        throw DomainError("triplet_tilde requires phi(q) = q; normalize first");

    LevyTriplet out{d, std::vector<double>(static_cast<std::size_t>(d), 0.0),
                    LatticeDistribution(d, radius), 0.0};

    QuadOptions qopts;
    qopts.rel_tol = opts.quad_rel_tol;
    qopts.abs_tol = 1e-14;
    const double b = phi.drift_b;

    // choose the s-cutoff so the neglected tail per lattice point stays below
    // budget: integrand <= maxP(qs) * mu-density, maxP from the local CLT scale
    auto max_p = [&](double s) {
        const double l = q * s;
        if (l < 1.0) return 1.0;
        const double m1 = 0.48 / std::sqrt(l); // safety 1.2 over (2 pi l)^{-1/2}
        return d == 1 ? std::min(1.0, m1) : std::min(1.0, 2.0 * m1 * m1);
    };
    double s_max = 1.0;
    if (!phi.levy.is_zero()) {
        while (phi.levy.tail_mass(s_max) * max_p(s_max) > opts.s_budget_per_point) {
            s_max *= 2.0;
            if (s_max > 1e300) break;
        }
    }
    const double tail_budget =
        phi.levy.is_zero() ? 0.0 : phi.levy.tail_mass(s_max) * max_p(s_max);

    // integral of P(Z~_s = z) mu(ds) for one canonical z, then mirrored
    auto nu_integral = [&](const LatticePoint& z) {
        long long zn = 0;
        for (int c : z) zn += std::llabs(c);
        auto f = [&](double s) {
            if (s > s_max) return 0.0;
            return d == 1 ? cp_point_1d(q * s, z[0]) : cp_point_2d(q * s, z[0], z[1]);
        };
        // hint both the rise of the series near s ~ |z|/q and the cutoff
        std::vector<double> hints{static_cast<double>(zn) / q,
                                  static_cast<double>(zn * zn) / q, s_max};
        return phi.levy.integrate(f, qopts, hints).value;
    };

    std::size_t points = 0;
    if (d == 1) {
        for (int z = 1; z <= radius; ++z) {
            const double v = nu_integral({z});
            out.nu.at({z}) = v;
            out.nu.at({-z}) = v;
            ++points;
        }
    } else {
        for (int x = 0; x <= radius; ++x) {
            for (int y = 0; y <= x; ++y) {
                if (x == 0 && y == 0) continue;
                const double v = nu_integral({x, y});
                ++points;
                // orbit under sign flips and coordinate swap
                std::vector<LatticePoint> orbit{{x, y},   {-x, y},  {x, -y}, {-x, -y},
                                                {y, x},   {-y, x},  {y, -x}, {-y, -x}};
                std::sort(orbit.begin(), orbit.end());
                orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
                for (const auto& p : orbit) out.nu.at(p) = v;
            }
        }
    }

    // nu(B) = q b P(zeta_1 in B) + integral part
    if (b > 0.0) {
        for (const auto& [z, p] : walk.step_pmf()) {
            if (is_origin(z)) continue;
            if (out.nu.contains(z)) out.nu.at(z) += q * b * p;
        }
    }

    // beta = b*beta_Z~ - sum_{0<|y|<=1} y (integral part at y)
    for (int j = 0; j < d; ++j) {
        LatticePoint e(d, 0);
        e[j] = 1;
        LatticePoint me(d, 0);
        me[j] = -1;
        double beta_zt_j = 0.0;
        for (const auto& [z, p] : walk.step_pmf())
            if (unit_euclid_ball(z)) beta_zt_j -= q * z[j] * p;
        const double qbp_plus = q * b * (walk.step_pmf().count(e) ? walk.step_pmf().at(e) : 0.0);
        const double qbp_minus =
            q * b * (walk.step_pmf().count(me) ? walk.step_pmf().at(me) : 0.0);
        const double integral_plus = out.nu.at(e) - qbp_plus;
        const double integral_minus = out.nu.at(me) - qbp_minus;
        out.beta[static_cast<std::size_t>(j)] =
            b * beta_zt_j - (integral_plus - integral_minus);
    }

    out.nu.set_captured_mass(out.nu.total_mass());
    // reported cut-offs: s-tail per evaluated point plus a flat allowance for
    // the per-node Poisson window deficit
    out.unaccounted = static_cast<double>(points) * tail_budget + 1e-10;
    return out;
}

TripletComparison compare_triplets(const LevyTriplet& a, const LevyTriplet& b,
                                   double tolerance) {
    if (a.dimension != b.dimension)
        throw DomainError("compare_triplets: dimension mismatch");
    TripletComparison cmp;
    cmp.tolerance = tolerance;
    cmp.mass_unaccounted = a.unaccounted + b.unaccounted;
    for (std::size_t j = 0; j < a.beta.size(); ++j)
        cmp.beta_distance = std::max(cmp.beta_distance, std::fabs(a.beta[j] - b.beta[j]));

    const LatticeDistribution& big = a.nu.radius() >= b.nu.radius() ? a.nu : b.nu;
    const LatticeDistribution& small = a.nu.radius() >= b.nu.radius() ? b.nu : a.nu;
    for (const auto& [z, p] : big.entries())
        cmp.nu_tv_distance += std::fabs(p - small.at(z));
    // points carrying mass only in `small` were skipped above
    for (const auto& [z, p] : small.entries())
        if (big.at(z) == 0.0) cmp.nu_tv_distance += std::fabs(p);

    cmp.pass = cmp.beta_distance <= tolerance + cmp.mass_unaccounted &&
               cmp.nu_tv_distance <= tolerance + cmp.mass_unaccounted;
    return cmp;
}

// ---------------------------------------------------------------------------

double one_minus_chf(const LatticeWalk& walk, const std::vector<double>& theta) {
    if (!walk.is_symmetric()) throw DomainError("one_minus_chf: walk must be symmetric");
    if (static_cast<int>(theta.size()) != walk.dimension())
        throw DomainError("one_minus_chf: theta has wrong dimension");
    double v = 0.0;
    for (const auto& [z, p] : walk.step_pmf()) {
        double dot = 0.0;
        for (std::size_t j = 0; j < theta.size(); ++j) dot += theta[j] * z[j];
        const double s = std::sin(0.5 * dot);
        v += p * 2.0 * s * s;
    }
    return v;
}

double chf_hat_exact(const StepDistribution& sd, const LatticeWalk& walk, double t,
                     const std::vector<double>& theta) {
    const double chi = walk.chf(theta);
    // chi_xi = b*chi + sum w_m chi^m, summed from the top (Horner)
    double series = 0.0;
    for (std::size_t m = sd.weights.size(); m-- > 0;)
        series = (series + sd.weights[m]) * chi;
    const double chi_xi = sd.direct_atom * chi + series;
    return std::exp(-t * sd.q * (1.0 - chi_xi));
}

double chf_tilde_exact(const BernsteinFunction& phi, const LatticeWalk& walk, double q,
                       double t, const std::vector<double>& theta) {
    const double arg = q * one_minus_chf(walk, theta);
    const double ph = arg <= 0.0 ? 0.0 : eval_phi(phi, arg); // phi(0+) = 0
    return std::exp(-t * ph);
}

ChfIdentity chf_exact(const StepDistribution& sd, const BernsteinFunction& phi,
                      const LatticeWalk& walk, double t,
                      const std::vector<double>& theta) {
    ChfIdentity out;
    out.hat = chf_hat_exact(sd, walk, t, theta);
    out.tilde = chf_tilde_exact(phi, walk, sd.q, t, theta);
    out.truncation_budget = t * sd.q * sd.truncation_mass;
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::int64_t>> simulate_hat(const StepDistribution& sd,
                                                    const LatticeWalk& walk, double t,
                                                    std::size_t paths, Rng rng) {
    const int d = walk.dimension();
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(paths);
    if (t < 0.0) throw DomainError("simulate_hat: t >= 0 required");
    StepSampler sampler(sd, walk);
    std::poisson_distribution<std::int64_t> pois(sd.q * t);
    for (std::size_t i = 0; i < paths; ++i) {
        std::vector<std::int64_t> z(static_cast<std::size_t>(d), 0);
        const std::int64_t n = t == 0.0 ? 0 : pois(rng);
        if (walk.is_srw()) {
            std::int64_t total_steps = 0;
            for (std::int64_t k = 0; k < n; ++k) total_steps += sampler.sample_count(rng);
            z = sample_srw_endpoint64(d, total_steps, rng);
        } else {
            for (std::int64_t k = 0; k < n; ++k) {
                const LatticePoint step = sampler.sample(rng);
                for (int j = 0; j < d; ++j) z[static_cast<std::size_t>(j)] += step[j];
            }
        }
        out.push_back(std::move(z));
    }
    return out;
}

std::vector<std::vector<std::int64_t>> simulate_tilde(double alpha,
                                                      const LatticeWalk& walk, double q,
                                                      double t, std::size_t paths,
                                                      Rng rng) {
    if (!walk.is_srw())
        throw DomainError("simulate_tilde supports the SRW (counts can be huge)");
    if (t < 0.0) throw DomainError("simulate_tilde: t >= 0 required");
    const int d = walk.dimension();
    std::vector<std::vector<std::int64_t>> out;
    out.reserve(paths);
    for (std::size_t i = 0; i < paths; ++i) {
        if (t == 0.0) {
            out.emplace_back(static_cast<std::size_t>(d), 0);
            continue;
        }
        // clamp keeps the Poisson count in int64; the clipped tail event has
        // probability ~1e-10 per path and never flips a box-scale statistic
        const double T = std::min(sample_stable_subordinator(alpha, t, rng), 4.0e18 / q);
        std::poisson_distribution<std::int64_t> pois(q * T);
        out.push_back(sample_srw_endpoint64(d, pois(rng), rng));
    }
    return out;
}

} // namespace subwalk
