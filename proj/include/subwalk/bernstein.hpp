#pragma once

#include "subwalk/levy_measure.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace subwalk {

/// Laplace exponent of a subordinator:
///   phi(lambda) = b*lambda + integral of (1 - e^{-lambda s}) mu(ds).
/// Catalog entries additionally carry closed forms used as fast paths and as
/// oracles against the drift+quadrature evaluation.
struct BernsteinFunction {
    double drift_b = 0.0;
    LevyMeasure levy;
    std::optional<std::function<double(double)>> closed_form;
    std::optional<std::function<double(double)>> closed_form_inverse;
    std::string label;

    bool strictly_increasing() const { return drift_b > 0.0 || !levy.is_zero(); }
};

struct EvalOptions {
    double rel_tol = 1e-10;
    /// relative width of the bisection bracket at which inversion stops
    double invert_rel_tol = 1e-12;
    int max_bracket_steps = 200;
};

/// phi(lambda) via closed form when present, else drift + quadrature.
double eval_phi(const BernsteinFunction& phi, double lambda, const EvalOptions& opts = {});

/// Always drift + quadrature, ignoring any closed form (oracle cross-check).
double eval_phi_by_quadrature(const BernsteinFunction& phi, double lambda,
                              const EvalOptions& opts = {});

/// Solve phi(lambda) = y. Bracket by doubling/halving from 1, then bisect.
double invert_phi(const BernsteinFunction& phi, double y, const EvalOptions& opts = {});

double tail_mass(const BernsteinFunction& phi, double t, const EvalOptions& opts = {});
double truncated_first_moment(const BernsteinFunction& phi, double r,
                              const EvalOptions& opts = {});

/// psi(lambda) = q/phi(q) * phi(lambda), so that psi(q) = q.
BernsteinFunction normalize(const BernsteinFunction& phi, double q,
                            const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// catalog

/// phi(lambda) = lambda^alpha with density alpha/Gamma(1-alpha) t^{-1-alpha}.
BernsteinFunction stable_exponent(double alpha);
/// phi(lambda) = c lambda log(1+1/lambda), c = 1/log 2, with density
/// c (1-e^{-t}(1+t))/t^2. Varies regularly at 0 with index 1.
BernsteinFunction log_example_exponent();
/// phi(lambda) = lambda.
BernsteinFunction pure_drift();
/// Finite atomic Levy measure plus optional drift.
BernsteinFunction atomic(const std::vector<double>& locations,
                         const std::vector<double>& masses, double drift = 0.0);
/// Resolve "stable:0.5" | "log-example" | "drift" | "atomic:l:m[,l:m...][:drift:b]".
BernsteinFunction phi_from_id(const std::string& id);
/// ids of the built-in parameterless suite (used by `check` commands/tests)
std::vector<std::string> default_catalog_ids();

// ---------------------------------------------------------------------------
// structural checks

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;
    double worst_residual = 0.0;
};

/// Numeric proxies for the Bernstein property: phi(0+)=0 on a decreasing
/// grid, monotonicity, alternating finite-difference signs up to order 4,
/// and closed-form/quadrature agreement when both are available.
ValidationReport validate_bernstein(const BernsteinFunction& phi,
                                    const EvalOptions& opts = {});

struct LemmaReport {
    bool ok = true;
    double worst_moment_residual = -1.0;   // (lhs-rhs)/scale for the r-bound
    double worst_tail_residual = -1.0;     // same for the tail bound
    double worst_scaling_residual = -1.0;  // same for phi(lambda x) <= (x v 1) phi(lambda)
    std::vector<std::string> failures;
};

/// Upper bounds of the moment/tail lemma plus the (x v 1) scaling inequality,
/// checked on the given grid (r and t from `grid`, x from `x_grid`).
LemmaReport check_lemma_lmest(const BernsteinFunction& phi,
                              const std::vector<double>& grid,
                              const std::vector<double>& x_grid = {0.001, 0.1, 0.5, 1.0,
                                                                   2.0, 10.0, 1000.0},
                              double tol = 1e-8, const EvalOptions& opts = {});

// ---------------------------------------------------------------------------
// regular variation

struct RVEstimate {
    double index_hat = 0.0;
    std::vector<double> scale_points;
    std::vector<double> per_point_ratios;
    double x_factor = 10.0;
};

/// log(f(lambda x)/f(lambda))/log x on a log grid; index_hat averages the
/// smallest-lambda half as the lambda->0 surrogate.
RVEstimate rv_index_estimate(const std::function<double(double)>& f,
                             double lambda_min, double lambda_max,
                             std::size_t points = 25, double x = 10.0);

struct UpperScalingReport {
    bool bounded = true;
    double empirical_c = 0.0;
    double gamma = 0.0;
    std::vector<double> x_grid;
    std::vector<double> sup_per_x; // sup over small lambda of ratio/x^gamma
};

/// Empirical check of sup_{small lambda} phi^{-1}(lambda x)/(phi^{-1}(lambda) x^gamma).
/// Flags unboundedness when the per-x sup grows monotonically over the last
/// three decades of x.
UpperScalingReport upper_scaling_check(const BernsteinFunction& phi, double gamma,
                                       const std::vector<double>& x_grid,
                                       double lambda_min, double lambda_max,
                                       std::size_t lambda_points = 13,
                                       const EvalOptions& opts = {});

} // namespace subwalk
