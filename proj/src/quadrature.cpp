#include "subwalk/quadrature.hpp"

#include "subwalk/common.hpp"

#include <algorithm>
#include <cmath>

namespace subwalk {
namespace {

// 15-point Kronrod nodes/weights on [-1,1] with the embedded 7-point Gauss
// rule. Nodes are symmetric; only the nonnegative half is stored.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelEstimate {
    double kronrod;
    double err;
};

PanelEstimate gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kXgk[j]);
        fv[14 - j] = f(c + h * kXgk[j]);
    }
    fv[7] = f(c);
    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    for (int j = 0; j < 7; ++j) {
        resk += kWgk[j] * (fv[j] + fv[14 - j]);
        if (j % 2 == 1) resg += kWg[j / 2] * (fv[j] + fv[14 - j]);
    }
    const double mean = resk * 0.5;
    double resasc = kWgk[7] * std::fabs(fv[7] - mean);
    for (int j = 0; j < 7; ++j)
        resasc += kWgk[j] * (std::fabs(fv[j] - mean) + std::fabs(fv[14 - j] - mean));
    resk *= h;
    resg *= h;
    resasc *= std::fabs(h);
    // QUADPACK-style sharpened error estimate
    double err = std::fabs(resk - resg);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (!std::isfinite(resk)) throw QuadratureError("non-finite integrand value", resg, err);
    return {resk, std::max(err, std::fabs(resk) * 5e-16)};
}

struct Panel {
    double a, b, value, err;
    int depth;
};

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const QuadOptions& opts) {
    QuadResult out;
    if (a == b) return out;
    PanelEstimate first = gk15(f, a, b);
    out.evals = 15;

    std::vector<Panel> heap{{a, b, first.kronrod, first.err, 0}};
    double total = first.kronrod;
    double toterr = first.err;
    const auto cmp = [](const Panel& p, const Panel& q) { return p.err < q.err; };

    while (toterr > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total))) {
        if (out.evals > opts.max_evals)
            throw QuadratureError("quadrature eval budget exhausted", total, toterr);
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (worst.depth >= opts.max_depth || mid <= worst.a || mid >= worst.b)
            throw QuadratureError("quadrature did not converge", total, toterr);
        PanelEstimate left = gk15(f, worst.a, mid);
        PanelEstimate right = gk15(f, mid, worst.b);
        out.evals += 30;
        total += left.kronrod + right.kronrod - worst.value;
        toterr += left.err + right.err - worst.err;
        heap.push_back({worst.a, mid, left.kronrod, left.err, worst.depth + 1});
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back({mid, worst.b, right.kronrod, right.err, worst.depth + 1});
        std::push_heap(heap.begin(), heap.end(), cmp);
    }
    out.value = total;
    out.abs_error = toterr;
    return out;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const std::vector<double>& breakpoints,
                              const QuadOptions& opts) {
    std::vector<double> edges{a};
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    QuadResult out;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        out += integrate_adaptive(f, edges[i], edges[i + 1], opts);
    return out;
}

} // namespace subwalk
