#include "subwalk/bernstein.hpp"

#include "subwalk/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subwalk {

double eval_phi_by_quadrature(const BernsteinFunction& phi, double lambda,
                              const EvalOptions& opts) {
    if (lambda <= 0.0) throw DomainError("eval_phi requires lambda > 0");
    QuadOptions qopts;
    qopts.rel_tol = opts.rel_tol;
    double v = phi.drift_b * lambda;
    if (!phi.levy.is_zero()) {
        // 1 - e^{-lambda s} evaluated via expm1 to keep precision at small
        // lambda*s, where the integrand behaves like lambda*s.
        QuadResult r = phi.levy.integrate(
            [lambda](double s) { return one_minus_exp_neg(lambda * s); }, qopts,
            {1.0 / lambda});
        v += r.value;
    }
    return std::max(v, 0.0);
}

double eval_phi(const BernsteinFunction& phi, double lambda, const EvalOptions& opts) {
    if (lambda <= 0.0) throw DomainError("eval_phi requires lambda > 0");
    if (phi.closed_form) return (*phi.closed_form)(lambda);
    return eval_phi_by_quadrature(phi, lambda, opts);
}

double invert_phi(const BernsteinFunction& phi, double y, const EvalOptions& opts) {
    if (y <= 0.0) throw DomainError("invert_phi requires y > 0");
    if (!phi.strictly_increasing())
        throw DomainError("invert_phi requires a strictly increasing phi");
    if (phi.closed_form_inverse) return (*phi.closed_form_inverse)(y);

    auto f = [&](double l) { return eval_phi(phi, l, opts); };

    double lo = 1.0, hi = 1.0;
    if (f(1.0) < y) {
        int steps = 0;
        do {
            lo = hi;
            hi *= 2.0;
            if (++steps > opts.max_bracket_steps)
                throw OutOfRangeError("invert_phi: no upper bracket for y=" +
                                      std::to_string(y));
        } while (f(hi) < y);
    } else {
        int steps = 0;
        do {
            hi = lo;
            lo *= 0.5;
            if (++steps > opts.max_bracket_steps)
                throw OutOfRangeError("invert_phi: no lower bracket for y=" +
                                      std::to_string(y));
        } while (f(lo) > y);
    }

    // bisect until the residual and the bracket are both tight
    double mid = 0.5 * (lo + hi);
    for (int i = 0; i < 400; ++i) {
        mid = 0.5 * (lo + hi);
        const double v = f(mid);
        if (v < y)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) <= opts.invert_rel_tol * mid &&
            std::fabs(v - y) <= opts.rel_tol * std::max(y, 1.0))
            break;
    }
    return 0.5 * (lo + hi);
}

double tail_mass(const BernsteinFunction& phi, double t, const EvalOptions& opts) {
    QuadOptions qopts;
    qopts.rel_tol = opts.rel_tol;
    return phi.levy.tail_mass(t, qopts);
}

double truncated_first_moment(const BernsteinFunction& phi, double r,
                              const EvalOptions& opts) {
    QuadOptions qopts;
    qopts.rel_tol = opts.rel_tol;
    return phi.levy.truncated_first_moment(r, qopts);
}

BernsteinFunction normalize(const BernsteinFunction& phi, double q,
                            const EvalOptions& opts) {
    if (q <= 0.0) throw DomainError("normalize requires q > 0");
    const double phi_q = eval_phi(phi, q, opts);
    if (!(phi_q > 0.0) || !std::isfinite(phi_q))
        throw DomainError("normalize: phi(q) must be finite and positive");
    const double factor = q / phi_q;

    BernsteinFunction out;
    out.drift_b = factor * phi.drift_b;
    out.levy = phi.levy.scaled(factor);
    if (phi.closed_form) {
        auto cf = *phi.closed_form;
        out.closed_form = [cf, factor](double l) { return factor * cf(l); };
    }
    if (phi.closed_form_inverse) {
        auto ci = *phi.closed_form_inverse;
        out.closed_form_inverse = [ci, factor](double y) { return ci(y / factor); };
    }
    out.label = phi.label + "|normalized(q=" + std::to_string(q) + ")";
    return out;
}

// ---------------------------------------------------------------------------
// catalog

BernsteinFunction stable_exponent(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("stable exponent requires alpha in (0,1)");
    const double coeff = alpha / std::tgamma(1.0 - alpha);
    BernsteinFunction out;
    out.levy = LevyMeasure(
        [coeff, alpha](double t) { return coeff * std::pow(t, -1.0 - alpha); }, {},
        // mu(t,inf) = t^{-alpha}/Gamma(1-alpha)
        [alpha](double t) { return std::pow(t, -alpha) / std::tgamma(1.0 - alpha); });
    out.closed_form = [alpha](double l) { return std::pow(l, alpha); };
    out.closed_form_inverse = [alpha](double y) { return std::pow(y, 1.0 / alpha); };
    std::ostringstream lab;
    lab << "stable:" << alpha;
    out.label = lab.str();
    return out;
}

namespace {
// 1 - e^{-t}(1+t) = integral of s e^{-s} over (0,t]; series below t=1e-3
// avoids the cancellation of the direct form.
double one_minus_emt_one_plus_t(double t) {
    if (t > 1e-3) return 1.0 - std::exp(-t) * (1.0 + t);
    double term = 0.5 * t * t; // k=0 term of sum (-1)^k t^{k+2}/(k!(k+2))
    double sum = term;
    for (int k = 1; k < 12; ++k) {
        term *= -t * static_cast<double>(k + 1) / (static_cast<double>(k) *
                                                   static_cast<double>(k + 2));
        sum += term;
        if (std::fabs(term) < 1e-20 * std::fabs(sum)) break;
    }
    return sum;
}
} // namespace

BernsteinFunction log_example_exponent() {
    const double c = 1.0 / std::log(2.0);
    BernsteinFunction out;
    out.levy = LevyMeasure(
        [c](double t) { return c * one_minus_emt_one_plus_t(t) / (t * t); }, {},
        // mu(t,inf) = c(1-e^{-t})/t
        [c](double t) { return c * one_minus_exp_neg(t) / t; });
    out.closed_form = [c](double l) { return c * l * std::log1p(1.0 / l); };
    out.label = "log-example";
    return out;
}

BernsteinFunction pure_drift() {
    BernsteinFunction out;
    out.drift_b = 1.0;
    out.closed_form = [](double l) { return l; };
    out.closed_form_inverse = [](double y) { return y; };
    out.label = "drift";
    return out;
}

BernsteinFunction atomic(const std::vector<double>& locations,
                         const std::vector<double>& masses, double drift) {
    if (locations.size() != masses.size())
        throw ConfigError("atomic: locations and masses must have equal length");
    if (drift < 0.0) throw ConfigError("atomic: drift must be nonnegative");
    std::vector<LevyMeasure::Atom> atoms;
    for (std::size_t i = 0; i < locations.size(); ++i)
        atoms.push_back({locations[i], masses[i]});
    BernsteinFunction out;
    out.drift_b = drift;
    out.levy = LevyMeasure(nullptr, std::move(atoms));
    // finite sums; use them as the closed form as well
    auto locs = locations;
    auto ms = masses;
    out.closed_form = [locs, ms, drift](double l) {
        double v = drift * l;
        for (std::size_t i = 0; i < locs.size(); ++i)
            v += ms[i] * one_minus_exp_neg(l * locs[i]);
        return v;
    };
    std::ostringstream lab;
    lab << "atomic:";
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (i) lab << ",";
        lab << locations[i] << ":" << masses[i];
    }
    if (drift > 0.0) lab << ":drift:" << drift;
    out.label = lab.str();
    return out;
}

BernsteinFunction phi_from_id(const std::string& id) {
    if (id == "drift") return pure_drift();
    if (id == "log-example") return log_example_exponent();
    if (id.rfind("stable:", 0) == 0) {
        double alpha = 0.0;
        try {
            alpha = std::stod(id.substr(7));
        } catch (const std::exception&) {
            throw ConfigError("bad stable id: " + id);
        }
        return stable_exponent(alpha);
    }
    if (id.rfind("atomic:", 0) == 0) {
        std::string body = id.substr(7);
        double drift = 0.0;
        const auto dpos = body.find(":drift:");
        if (dpos != std::string::npos) {
            try {
                drift = std::stod(body.substr(dpos + 7));
            } catch (const std::exception&) {
                throw ConfigError("bad atomic drift in: " + id);
            }
            body = body.substr(0, dpos);
        }
        std::vector<double> locs, ms;
        std::stringstream ss(body);
        std::string pair;
        while (std::getline(ss, pair, ',')) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos)
                throw ConfigError("bad atomic pair '" + pair + "' in: " + id);
            try {
                locs.push_back(std::stod(pair.substr(0, colon)));
                ms.push_back(std::stod(pair.substr(colon + 1)));
            } catch (const std::exception&) {
                throw ConfigError("bad atomic pair '" + pair + "' in: " + id);
            }
        }
        if (locs.empty() && drift == 0.0)
            throw ConfigError("atomic id has neither atoms nor drift: " + id);
        return atomic(locs, ms, drift);
    }
    throw ConfigError("unknown phi id: " + id);
}

std::vector<std::string> default_catalog_ids() {
    return {"stable:0.3", "stable:0.5", "stable:0.8", "log-example", "drift"};
}

// ---------------------------------------------------------------------------
// structural checks

ValidationReport validate_bernstein(const BernsteinFunction& phi, const EvalOptions& opts) {
    ValidationReport rep;
    auto fail = [&](const std::string& what, double residual) {
        rep.ok = false;
        rep.failures.push_back(what);
        rep.worst_residual = std::max(rep.worst_residual, residual);
    };

    // phi -> 0 along a decreasing grid; the grid reaches 1e-30 so that slowly
    // vanishing exponents (small stable index) still show the decay
    const double phi1 = eval_phi(phi, 1.0, opts);
    double prev = phi1;
    for (double l = 1e-2; l >= 1e-30; l *= 1e-4) {
        const double v = eval_phi(phi, l, opts);
        if (v > prev * (1.0 + 1e-12) + 1e-12)
            fail("phi not decreasing towards 0 at lambda=" + std::to_string(l), v - prev);
        prev = v;
    }
    if (prev > 1e-6 * std::max(1.0, phi1)) fail("phi(0+) does not vanish", prev);

    // monotone on a log grid
    double last = 0.0;
    bool first = true;
    for (double l = 1e-6; l <= 1e6; l *= 10.0) {
        const double v = eval_phi(phi, l, opts);
        if (!first && v < last * (1.0 - 1e-12) - 1e-12)
            fail("phi not nondecreasing at lambda=" + std::to_string(l), last - v);
        last = v;
        first = false;
    }

    // alternating finite differences up to order 4: (-1)^{n-1} D^n phi >= -tol.
    // Steps proportional to lambda keep the stencil in the local scale.
    for (double l : {1e-4, 1e-2, 1.0, 1e2}) {
        const double h = 0.05 * l;
        double f0 = eval_phi(phi, l, opts), f1 = eval_phi(phi, l + h, opts),
               f2 = eval_phi(phi, l + 2 * h, opts), f3 = eval_phi(phi, l + 3 * h, opts),
               f4 = eval_phi(phi, l + 4 * h, opts);
        const double scale = std::max({std::fabs(f0), std::fabs(f4), 1e-30});
        const double tol = 1e-6 * scale;
        const double d1 = f1 - f0;
        const double d2 = f2 - 2 * f1 + f0;
        const double d3 = f3 - 3 * f2 + 3 * f1 - f0;
        const double d4 = f4 - 4 * f3 + 6 * f2 - 4 * f1 + f0;
        const double signed_diffs[4] = {d1, -d2, d3, -d4};
        for (int n = 0; n < 4; ++n)
            if (signed_diffs[n] < -tol)
                fail("finite-difference sign pattern violated (order " +
                         std::to_string(n + 1) + ") at lambda=" + std::to_string(l),
                     -signed_diffs[n] / scale);
    }

    // closed form vs drift+quadrature
    if (phi.closed_form && (phi.drift_b > 0.0 || !phi.levy.is_zero())) {
        for (double l = 1e-6; l <= 1e6; l *= 10.0) {
            const double cf = (*phi.closed_form)(l);
            const double q = eval_phi_by_quadrature(phi, l, opts);
            const double rd = rel_diff(cf, q);
            if (rd > 1e-8)
                fail("closed form and quadrature disagree at lambda=" + std::to_string(l),
                     rd);
        }
    }
    return rep;
}

LemmaReport check_lemma_lmest(const BernsteinFunction& phi,
                              const std::vector<double>& grid,
                              const std::vector<double>& x_grid, double tol,
                              const EvalOptions& opts) {
    if (grid.empty()) throw DomainError("check_lemma_lmest requires a nonempty grid");
    LemmaReport rep;
    auto record = [&](double& worst, double lhs, double rhs, const std::string& what) {
        const double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1e-30});
        const double residual = (lhs - rhs) / scale;
        worst = std::max(worst, residual);
        if (residual > tol) {
            rep.ok = false;
            rep.failures.push_back(what);
        }
    };

    constexpr double kE = 2.718281828459045;
    const double tail_coeff = 1.0 / (1.0 - std::exp(-1.0));
    for (double r : grid) {
        record(rep.worst_moment_residual, truncated_first_moment(phi, r, opts),
               kE * r * eval_phi(phi, 1.0 / r, opts),
               "moment bound violated at r=" + std::to_string(r));
        record(rep.worst_tail_residual, tail_mass(phi, r, opts),
               tail_coeff * eval_phi(phi, 1.0 / r, opts),
               "tail bound violated at t=" + std::to_string(r));
    }
    for (double l : grid) {
        const double phi_l = eval_phi(phi, l, opts);
        for (double x : x_grid)
            record(rep.worst_scaling_residual, eval_phi(phi, l * x, opts),
                   std::max(x, 1.0) * phi_l,
                   "scaling bound violated at lambda=" + std::to_string(l) +
                       " x=" + std::to_string(x));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// regular variation

RVEstimate rv_index_estimate(const std::function<double(double)>& f, double lambda_min,
                             double lambda_max, std::size_t points, double x) {
    if (!(x > 1.0)) throw DomainError("rv_index_estimate requires x > 1");
    if (!(lambda_min > 0.0 && lambda_max > lambda_min))
        throw DomainError("rv_index_estimate requires 0 < lambda_min < lambda_max");
    if (points < 2) points = 2;

    RVEstimate out;
    out.x_factor = x;
    const double step = std::log(lambda_max / lambda_min) /
                        static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double l = lambda_min * std::exp(step * static_cast<double>(i));
        const double f1 = f(l), f2 = f(l * x);
        if (!(f1 > 0.0) || !(f2 > 0.0) || !std::isfinite(f1) || !std::isfinite(f2))
            throw DomainError("rv_index_estimate: non-positive or non-finite value at lambda=" +
                              std::to_string(l));
        out.scale_points.push_back(l);
        out.per_point_ratios.push_back(std::log(f2 / f1) / std::log(x));
    }
    // the limit is at 0: average the smallest-lambda half
    const std::size_t half = (points + 1) / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < half; ++i) acc += out.per_point_ratios[i];
    out.index_hat = acc / static_cast<double>(half);
    return out;
}

UpperScalingReport upper_scaling_check(const BernsteinFunction& phi, double gamma,
                                       const std::vector<double>& x_grid,
                                       double lambda_min, double lambda_max,
                                       std::size_t lambda_points, const EvalOptions& opts) {
    if (!phi.strictly_increasing())
        throw DomainError("upper_scaling_check requires strictly increasing phi");
    UpperScalingReport rep;
    rep.gamma = gamma;
    rep.x_grid = x_grid;
    const double step = lambda_points > 1
                            ? std::log(lambda_max / lambda_min) /
                                  static_cast<double>(lambda_points - 1)
                            : 0.0;
    for (double x : x_grid) {
        double sup = 0.0;
        for (std::size_t i = 0; i < lambda_points; ++i) {
            const double l = lambda_min * std::exp(step * static_cast<double>(i));
            const double ratio = invert_phi(phi, l * x, opts) /
                                 (invert_phi(phi, l, opts) * std::pow(x, gamma));
            sup = std::max(sup, ratio);
        }
        rep.sup_per_x.push_back(sup);
        rep.empirical_c = std::max(rep.empirical_c, sup);
    }
    // unbounded if the per-x sup keeps growing over the last three decades of x
    std::size_t n = rep.sup_per_x.size();
    if (n >= 4) {
        bool growing = true;
        for (std::size_t i = n - 4; i + 1 < n; ++i)
            if (rep.sup_per_x[i + 1] <= rep.sup_per_x[i] * (1.0 + 1e-9)) growing = false;
        if (growing) rep.bounded = false;
    }
    return rep;
}

} // namespace subwalk
