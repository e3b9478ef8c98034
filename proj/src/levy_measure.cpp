#include "subwalk/levy_measure.hpp"

#include "subwalk/common.hpp"

#include <algorithm>
#include <cmath>

namespace subwalk {
namespace {

// Integrate g over [0,inf) by chunks [0,L],[L,2L],[2L,4L],... stopping once
// two consecutive chunks contribute below the tolerance of the running total.
QuadResult integrate_chunked(const std::function<double(double)>& g,
                             const QuadOptions& opts,
                             const std::vector<double>& breakpoints) {
    QuadResult acc;
    double lo = 0.0, len = 2.0;
    int quiet = 0;
    const double u_max = 1400.0; // far past double underflow in t
    // never stop before the outermost hinted feature
    double must_reach = 0.0;
    for (double b : breakpoints) must_reach = std::max(must_reach, b);
    while (lo < u_max) {
        const double hi = std::min(lo + len, u_max);
        QuadResult chunk = integrate_adaptive(g, lo, hi, breakpoints, opts);
        acc += chunk;
        const double floor =
            0.01 * std::max(opts.abs_tol, opts.rel_tol * std::fabs(acc.value));
        quiet = (std::fabs(chunk.value) + chunk.abs_error <= floor) ? quiet + 1 : 0;
        if (quiet >= 2 && hi > must_reach) break;
        lo = hi;
        len = std::min(2.0 * len, 64.0);
    }
    return acc;
}

} // namespace

LevyMeasure::LevyMeasure(Density density, std::vector<Atom> atoms,
                         std::optional<Tail> tail_analytic, double split_point)
    : density_(std::move(density)), atoms_(std::move(atoms)),
      tail_(std::move(tail_analytic)), split_point_(split_point) {
    validate();
}

void LevyMeasure::validate() {
    if (split_point_ <= 0.0) throw DomainError("split_point must be positive");
    for (const Atom& a : atoms_) {
        if (a.location <= 0.0) throw DomainError("atom location must be positive");
        if (a.mass <= 0.0) throw DomainError("atom mass must be strictly positive");
    }
    // (1 ^ s)-integrability, checked with the configured quadrature
    QuadResult r;
    try {
        r = integrate([](double s) { return std::min(1.0, s); });
    } catch (const QuadratureError& e) {
        throw DomainError(std::string("integral of (1 ^ s) against mu did not "
                                      "converge: ") + e.what());
    }
    if (!std::isfinite(r.value) || r.value > 1e100)
        throw DomainError("integral of (1 ^ s) against mu is not finite");
    if (r.value < -1e-12) throw DomainError("mu has negative mass");
    one_wedge_mass_ = r.value;
    one_wedge_err_ = r.abs_error;

    if (tail_) {
        // analytic tail must agree with quadrature of the density on a check grid
        for (double t : {0.5 * split_point_, split_point_, 4.0 * split_point_}) {
            const double analytic = tail_mass(t);
            const double quad = tail_mass_by_quadrature(t);
            const double tol = 1e-7 * std::max({1.0, analytic, quad});
            if (std::fabs(analytic - quad) > tol)
                throw DomainError("tail_analytic disagrees with density quadrature at t=" +
                                  std::to_string(t));
        }
    }
}

QuadResult LevyMeasure::integrate(const std::function<double(double)>& f,
                                  const QuadOptions& opts,
                                  const std::vector<double>& t_breakpoints) const {
    QuadResult out;
    for (const Atom& a : atoms_) {
        out.value += f(a.location) * a.mass;
        out.evals += 1;
    }
    if (!density_) return out;

    const double sp = split_point_;
    std::vector<double> bp_small, bp_large;
    for (double t : t_breakpoints) {
        if (t <= 0.0) continue;
        if (t <= sp)
            bp_small.push_back(std::log(sp / t)); // u = log(split/t)
        else
            bp_large.push_back(std::log(t / sp)); // u = log(t/split)
    }

    // (0, split]: t = split*e^{-u}, dt = -t du
    auto small_side = [&](double u) {
        const double t = sp * std::exp(-u);
        if (t <= 0.0) return 0.0;
        const double d = density_(t);
        if (d < 0.0) throw DomainError("density negative at t=" + std::to_string(t));
        return f(t) * d * t;
    };
    out += integrate_chunked(small_side, opts, bp_small);

    // (split, inf): t = split*e^{u}
    auto large_side = [&](double u) {
        const double t = sp * std::exp(u);
        if (!std::isfinite(t)) return 0.0;
        const double d = density_(t);
        if (d < 0.0) throw DomainError("density negative at t=" + std::to_string(t));
        return f(t) * d * t;
    };
    out += integrate_chunked(large_side, opts, bp_large);
    return out;
}

double LevyMeasure::tail_mass(double t, const QuadOptions& opts) const {
    if (t <= 0.0) throw DomainError("tail_mass requires t > 0");
    if (tail_) {
        double v = (*tail_)(t);
        for (const Atom& a : atoms_)
            if (a.location > t) v += a.mass;
        return v;
    }
    return tail_mass_by_quadrature(t, opts);
}

double LevyMeasure::tail_mass_by_quadrature(double t, const QuadOptions& opts) const {
    double v = 0.0;
    for (const Atom& a : atoms_)
        if (a.location > t) v += a.mass;
    if (!density_) return v;
    // integrate density over (t, inf) via u-substitution s = t*e^{u}
    auto g = [&](double u) {
        const double s = t * std::exp(u);
        if (!std::isfinite(s)) return 0.0;
        return density_(s) * s;
    };
    v += integrate_chunked(g, opts, {}).value;
    return v;
}

double LevyMeasure::truncated_first_moment(double r, const QuadOptions& opts) const {
    if (r <= 0.0) throw DomainError("truncated_first_moment requires r > 0");
    double v = 0.0;
    for (const Atom& a : atoms_)
        if (a.location <= r) v += a.location * a.mass;
    if (!density_) return v;
    // integral of s over (0, r]: s = r*e^{-u}
    auto g = [&](double u) {
        const double s = r * std::exp(-u);
        if (s <= 0.0) return 0.0;
        return density_(s) * s * s;
    };
    v += integrate_chunked(g, opts, {}).value;
    return v;
}

LevyMeasure LevyMeasure::scaled(double factor) const {
    if (factor <= 0.0) throw DomainError("scale factor must be positive");
    if (is_zero()) return LevyMeasure();
    LevyMeasure out;
    out.split_point_ = split_point_;
    if (density_) {
        Density d = density_;
        out.density_ = [d, factor](double t) { return factor * d(t); };
    }
    out.atoms_ = atoms_;
    for (Atom& a : out.atoms_) a.mass *= factor;
    if (tail_) {
        Tail t = *tail_;
        out.tail_ = [t, factor](double x) { return factor * t(x); };
    }
    out.one_wedge_mass_ = factor * one_wedge_mass_;
    out.one_wedge_err_ = factor * one_wedge_err_;
    return out;
}

} // namespace subwalk
