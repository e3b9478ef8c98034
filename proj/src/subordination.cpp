#include "subwalk/subordination.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace subwalk {

double StepDistribution::total_assigned() const {
    double s = direct_atom;
    for (double w : weights) s += w;
    return s;
}

namespace {

// breakpoints (in t) around the peak of t^m e^{-qt} at t = m/q; spacing in
// units of the peak width 1/sqrt(m) in log t
std::vector<double> weight_peak_hints(std::size_t m, double q) {
    const double t_star = static_cast<double>(m) / q;
    const double sigma = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<double> bp;
    for (double k : {-30.0, -12.0, -6.0, -3.0, -1.5, 0.0, 1.5, 3.0, 6.0, 12.0, 30.0})
        bp.push_back(t_star * std::exp(k * sigma));
    return bp;
}

// log of q^{m-1}/m! * t^m e^{-qt} at the peak t = m/q; Stirling keeps full
// precision where lgamma - m log m + m would cancel
double weight_log_scale(double m, double q) {
    if (m < 32.0)
        return (m - 1.0) * std::log(q) - std::lgamma(m + 1.0) +
               m * std::log(m / q) - m;
    const double m3 = m * m * m;
    const double stirling = 0.5 * std::log(2.0 * M_PI * m) + 1.0 / (12.0 * m) -
                            1.0 / (360.0 * m3) + 1.0 / (1260.0 * m3 * m * m);
    return -std::log(q) - stirling;
}

// Log integrand of w_m. Near the peak t* = m/q the direct m log t - qt form
// loses ~7 digits once m ~ 1e5, so the peak region is evaluated relative to
// t*; far from the peak (where values are negligible anyway) the direct form
// is the numerically clean one.
double weight_log_integrand(double m, double q, double log_c_peak,
                            double log_c_direct, double t) {
    const double t_star = m / q;
    const double delta = (t - t_star) / t_star;
    if (std::fabs(delta) > 0.5) return log_c_direct + m * std::log(t) - q * t;
    double lp;
    if (std::fabs(delta) < 1e-4) {
        const double d2 = delta * delta;
        lp = d2 * (-0.5 + delta * (1.0 / 3.0 - 0.25 * delta));
    } else {
        lp = std::log1p(delta) - delta;
    }
    return log_c_peak + m * lp;
}

} // namespace

StepDistribution step_weights(const BernsteinFunction& phi, double q,
                              const StepWeightOptions& opts) {
    if (q <= 0.0) throw DomainError("step_weights requires q > 0");
    if (!(opts.mass_tol >= 0.0 && opts.mass_tol < 1.0))
        throw DomainError("step_weights requires mass_tol in [0,1)");
    const double phi_q = eval_phi(phi, q);
    if (std::fabs(phi_q - q) > opts.fixed_point_tol * q)
        throw DomainError("step_weights requires phi(q) = q; normalize phi first "
                          "(phi(q)=" + std::to_string(phi_q) + ", q=" + std::to_string(q) + ")");

    StepDistribution sd;
    sd.q = q;
    sd.direct_atom = phi.drift_b;

    QuadOptions qopts;
    qopts.rel_tol = opts.quad_rel_tol;
    // per-weight absolute floor: summed over even 1e6 mixture terms this
    // stays an order below the 1e-10 mass-identity budget
    qopts.abs_tol = 1e-17;

    double assigned = sd.direct_atom;
    if (!phi.levy.is_zero()) {
        for (std::size_t m = 1; m <= opts.M_cap; ++m) {
            const double md = static_cast<double>(m);
            const double lc_peak = weight_log_scale(md, q);
            const double lc_direct =
                (md - 1.0) * std::log(q) - std::lgamma(md + 1.0);
            auto f = [md, q, lc_peak, lc_direct](double t) {
                const double le = weight_log_integrand(md, q, lc_peak, lc_direct, t);
                return le < -745.0 ? 0.0 : std::exp(le);
            };
            const double w = phi.levy.integrate(f, qopts, weight_peak_hints(m, q)).value;
            sd.weights.push_back(std::max(w, 0.0));
            assigned += sd.weights.back();
            if (assigned >= 1.0 - opts.mass_tol) break;
        }
    }
    sd.M = sd.weights.size();

    // independent estimate of the unassigned mass: Poisson tail beyond M
    // against mu; reproduces phi(q)/q - assigned up to quadrature error
    if (!phi.levy.is_zero()) {
        const double mp1 = static_cast<double>(sd.M) + 1.0;
        auto tail = [&](double t) {
            return boost::math::gamma_p(mp1, q * t); // P(Poisson(qt) > M)
        };
        std::vector<double> hints = weight_peak_hints(std::max<std::size_t>(sd.M, 1), q);
        QuadOptions topts = qopts;
        // gamma_p itself carries ~1e-13 relative noise; the tail only feeds
        // the mass identity at the 1e-10 level
        topts.rel_tol = std::max(opts.quad_rel_tol, 1e-10);
        sd.truncation_mass =
            std::max(0.0, phi.levy.integrate(tail, topts, hints).value / q);
    }

    if (sd.M == opts.M_cap && sd.truncation_mass > opts.mass_tol) {
        throw TruncationError(
            "step_weights: M_cap=" + std::to_string(opts.M_cap) +
                " reached with mass deficit " + std::to_string(sd.truncation_mass) +
                " > mass_tol",
            sd);
    }
    return sd;
}

// ---------------------------------------------------------------------------

namespace {

// one exact pmf row of the 1d SRW: out[k+radius] = P(Z_m = radius-sym k),
// built from one lgamma anchor and the ratio recurrence in k.
void srw1d_row(std::int64_t m, int radius, std::vector<double>& out) {
    std::fill(out.begin(), out.end(), 0.0);
    if (m < 0) return;
    const int k0 = static_cast<int>(m % 2); // smallest nonnegative lattice point of right parity
    if (m < k0) return;
    double b = srw1d_point_pmf(m, k0);
    for (int k = k0; k <= radius; k += 2) {
        if (k <= m) {
            out[static_cast<std::size_t>(k + radius)] = b;
            out[static_cast<std::size_t>(-k + radius)] = b;
        }
        const double md = static_cast<double>(m), kd = static_cast<double>(k);
        b *= (md - kd) / (md + kd + 2.0);
    }
}

} // namespace

SubordinatePmf subordinate_step_pmf(const StepDistribution& sd, const LatticeWalk& walk,
                                    int radius) {
    const int d = walk.dimension();
    SubordinatePmf out{LatticeDistribution(d, radius), sd.truncation_mass, 0.0};

    auto add_term = [&](double weight, const LatticeDistribution& law) {
        if (weight == 0.0) return;
        double captured = 0.0;
        const auto& src = law.raw();
        auto& dst = out.law.raw();
        if (law.radius() == radius && law.dimension() == d) {
            for (std::size_t i = 0; i < dst.size(); ++i) {
                dst[i] += weight * src[i];
                captured += src[i];
            }
        } else {
            for (const auto& [z, p] : law.entries()) {
                if (out.law.contains(z)) {
                    out.law.at(z) += weight * p;
                    captured += p;
                }
            }
        }
        out.lattice_loss += weight * std::max(0.0, 1.0 - captured);
    };

    if (walk.is_srw() && d == 1) {
        std::vector<double> row(static_cast<std::size_t>(2 * radius + 1));
        auto accumulate_row = [&](double weight, std::int64_t m) {
            if (weight == 0.0) return;
            srw1d_row(m, radius, row);
            double captured = 0.0;
            auto& dst = out.law.raw();
            for (std::size_t i = 0; i < row.size(); ++i) {
                dst[i] += weight * row[i];
                captured += row[i];
            }
            out.lattice_loss += weight * std::max(0.0, 1.0 - captured);
        };
        accumulate_row(sd.direct_atom, 1);
        for (std::size_t m = 0; m < sd.weights.size(); ++m)
            accumulate_row(sd.weights[m], static_cast<std::int64_t>(m + 1));
    } else if (walk.is_srw() && d == 2) {
        // rotated coordinates: P(Z_m=(x,y)) = b_m(x+y) b_m(x-y)
        std::vector<double> row(static_cast<std::size_t>(4 * radius + 1));
        auto accumulate_rot = [&](double weight, std::int64_t m) {
            if (weight == 0.0) return;
            srw1d_row(m, 2 * radius, row);
            double captured = 0.0;
            auto& dst = out.law.raw();
            std::size_t idx = 0;
            for (int x = -radius; x <= radius; ++x) {
                for (int y = -radius; y <= radius; ++y, ++idx) {
                    const double p = row[static_cast<std::size_t>(x + y + 2 * radius)] *
                                     row[static_cast<std::size_t>(x - y + 2 * radius)];
                    dst[idx] += weight * p;
                    captured += p;
                }
            }
            out.lattice_loss += weight * std::max(0.0, 1.0 - captured);
        };
        accumulate_rot(sd.direct_atom, 1);
        for (std::size_t m = 0; m < sd.weights.size(); ++m)
            accumulate_rot(sd.weights[m], static_cast<std::int64_t>(m + 1));
    } else {
        // generic walk: iterate sparse convolution, reusing Z_m laws
        LatticeDistribution zm(d, radius);
        zm.at(LatticePoint(d, 0)) = 1.0;
        const auto& step = walk.step_pmf();
        const std::size_t mmax = sd.weights.size();
        for (std::size_t m = 1; m <= std::max<std::size_t>(mmax, 1); ++m) {
            LatticeDistribution next(d, radius);
            for (const auto& [z, p] : zm.entries()) {
                for (const auto& [s, ps] : step) {
                    LatticePoint t(z);
                    for (int j = 0; j < d; ++j) t[j] += s[j];
                    if (next.contains(t)) next.at(t) += p * ps;
                }
            }
            zm = std::move(next);
            double weight = 0.0;
            if (m == 1) weight += sd.direct_atom;
            if (m <= mmax) weight += sd.weights[m - 1];
            add_term(weight, zm);
        }
    }

    out.law.set_captured_mass(out.law.total_mass());
    return out;
}

// ---------------------------------------------------------------------------

void StepSampler::require_sampleable(const StepDistribution& sd, double mass_tol) {
    if (sd.truncation_mass > mass_tol)
        throw DomainError("step distribution truncation mass " +
                          std::to_string(sd.truncation_mass) +
                          " exceeds the sampling tolerance");
}

StepSampler::StepSampler(const StepDistribution& sd, const LatticeWalk& walk)
    : walk_(walk) {
    // outcome 0 = direct branch (one step), outcome m>=1 = m steps
    std::vector<double> p;
    p.push_back(sd.direct_atom);
    for (double w : sd.weights) p.push_back(w);
    double total = 0.0;
    for (double v : p) total += v;
    if (total <= 0.0) throw DomainError("step distribution has no mass to sample");
    for (double& v : p) v /= total;

    // Walker alias construction
    const std::size_t n = p.size();
    accept_.assign(n, 1.0);
    alias_.assign(n, 0);
    std::vector<std::uint32_t> small, large;
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = p[i] * static_cast<double>(n);
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        large.pop_back();
        accept_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::uint32_t i : large) accept_[i] = 1.0;
    for (std::uint32_t i : small) accept_[i] = 1.0;
}

std::int64_t StepSampler::sample_count(Rng& rng) const {
    const std::size_t n = accept_.size();
    const std::size_t i = static_cast<std::size_t>(rng() % n);
    const std::size_t outcome = (rng.uniform() < accept_[i]) ? i : alias_[i];
    return outcome == 0 ? 1 : static_cast<std::int64_t>(outcome);
}

LatticePoint StepSampler::sample(Rng& rng) const {
    const std::int64_t m = sample_count(rng);
    if (walk_.is_srw()) {
        const auto z64 = sample_srw_endpoint64(walk_.dimension(), m, rng);
        LatticePoint z(walk_.dimension());
        for (std::size_t j = 0; j < z.size(); ++j) z[j] = static_cast<int>(z64[j]);
        return z;
    }
    return sample_walk_endpoint(walk_, m, rng);
}

std::vector<std::int64_t> sample_srw_endpoint64(int d, std::int64_t m, Rng& rng) {
    std::vector<std::int64_t> z(static_cast<std::size_t>(d), 0);
    std::int64_t remaining = m;
    for (int j = 0; j < d; ++j) {
        std::int64_t mj = remaining;
        if (j + 1 < d) {
            std::binomial_distribution<std::int64_t> split(
                remaining, 1.0 / static_cast<double>(d - j));
            mj = split(rng);
        }
        remaining -= mj;
        std::binomial_distribution<std::int64_t> axis(mj, 0.5);
        z[static_cast<std::size_t>(j)] = 2 * axis(rng) - mj;
    }
    return z;
}

LatticePoint sample_walk_endpoint(const LatticeWalk& walk, std::int64_t m, Rng& rng) {
    // inverse-cdf per step; fine for the small m this path is used with
    const int d = walk.dimension();
    LatticePoint z(d, 0);
    for (std::int64_t i = 0; i < m; ++i) {
        double u = rng.uniform();
        const auto& pmf = walk.step_pmf();
        auto pick = pmf.begin();
        for (auto it = pmf.begin(); it != pmf.end(); ++it) {
            pick = it;
            u -= it->second;
            if (u <= 0.0) break;
        }
        for (int j = 0; j < d; ++j) z[j] += pick->first[j];
    }
    return z;
}

std::int64_t sample_sibuya(double alpha, Rng& rng) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("sample_sibuya: alpha in (0,1)");
    double p;
    if (alpha == 0.5) {
        const double s = std::sin(std::numbers::pi * 0.5 * rng.uniform());
        p = s * s; // Beta(1/2,1/2)
    } else {
        std::gamma_distribution<double> ga(alpha, 1.0), gb(1.0 - alpha, 1.0);
        const double x = ga(rng);
        const double y = gb(rng);
        p = x / (x + y);
    }
    p = std::clamp(p, 1e-300, 1.0);
    if (p >= 1.0) return 1;
    // 1 + Geometric(p): ceil of log(U)/log(1-p)
    const double g = std::log(rng.uniform()) / std::log1p(-p);
    constexpr double kCap = 4.0e18; // keep downstream binomial counts in int64
    return 1 + static_cast<std::int64_t>(std::min(std::floor(g), kCap));
}

double sample_stable_subordinator(double alpha, double t, Rng& rng) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("sample_stable_subordinator: alpha in (0,1)");
    if (t < 0.0) throw DomainError("sample_stable_subordinator: t >= 0");
    if (t == 0.0) return 0.0;
    // Kanter: S = (a(U)/E)^{(1-alpha)/alpha}, E e^{-l S} = e^{-l^alpha}
    const double u = std::numbers::pi * rng.uniform();
    const double e = -std::log(rng.uniform());
    const double a = std::sin((1.0 - alpha) * u) *
                     std::pow(std::sin(alpha * u), alpha / (1.0 - alpha)) /
                     std::pow(std::sin(u), 1.0 / (1.0 - alpha));
    const double s = std::pow(a / e, (1.0 - alpha) / alpha);
    return std::pow(t, 1.0 / alpha) * s;
}

// ---------------------------------------------------------------------------

StepCountSampler StepCountSampler::stable(double alpha) {
    StepCountSampler s;
    s.alpha_ = alpha;
    s.exact_ = true;
    return s;
}

StepCountSampler StepCountSampler::drift() {
    StepCountSampler s;
    s.alpha_ = 0.0;
    s.exact_ = true;
    return s;
}

StepCountSampler StepCountSampler::mixture(const StepDistribution& sd,
                                           const LatticeWalk& walk) {
    StepCountSampler s;
    s.exact_ = false;
    s.mixture_ = std::make_shared<StepSampler>(sd, walk);
    return s;
}

std::int64_t StepCountSampler::operator()(Rng& rng) const {
    if (mixture_) return mixture_->sample_count(rng);
    if (alpha_ == 0.0) return 1;
    return sample_sibuya(alpha_, rng);
}

} // namespace subwalk
