#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace subwalk {

struct QuadOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300; // floor so that zero integrals converge
    int max_depth = 60;
    std::size_t max_evals = 50'000'000;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0; // accumulated error estimate
    std::size_t evals = 0;
    bool converged = true;

    QuadResult& operator+=(const QuadResult& o) {
        value += o.value;
        abs_error += o.abs_error;
        evals += o.evals;
        converged = converged && o.converged;
        return *this;
    }
};

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Throws QuadratureError when the
/// tolerance cannot be met within max_depth bisections.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const QuadOptions& opts = {});

/// Same, but splits [a,b] at the given interior breakpoints first. Useful when
/// the integrand has a known narrow peak that plain bisection could miss.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, const std::vector<double>& breakpoints,
                              const QuadOptions& opts = {});

} // namespace subwalk
