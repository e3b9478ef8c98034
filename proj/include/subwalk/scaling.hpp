#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/levy_embed.hpp"
#include "subwalk/rng.hpp"
#include "subwalk/subordination.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace subwalk {

enum class Clock { poisson, floor };

Clock clock_from_string(const std::string& s);
std::string to_string(Clock c);

/// The scaled subordinate walk X^(n): scale = sqrt(phi^{-1}(1/n)), the clock
/// is either an intensity-1 Poisson process or floor(nt). Requires phi(1)=1.
struct ScaledProcessSpec {
    BernsteinFunction phi;
    std::optional<double> stable_alpha; // set when phi is the stable entry
    std::int64_t n = 1;
    Clock clock = Clock::poisson;
    int d = 1;
    double t = 1.0;
    std::uint64_t seed = 42;

    double scale() const; // sqrt(phi^{-1}(1/n))
};

/// Validates phi(1)=1 and n>=1; resolves "stable:a" to an exact sampler.
ScaledProcessSpec make_scaled_spec(const std::string& phi_id, std::int64_t n,
                                   Clock clock, int d, double t,
                                   std::uint64_t seed = 42);

/// Exact step-count sampler where one exists (stable, drift); otherwise the
/// truncated mixture with the given tolerances.
StepCountSampler resolve_step_counts(const ScaledProcessSpec& spec,
                                     double mass_tol = 2e-3,
                                     std::size_t M_cap = 250'000);

struct ChfEvaluation {
    std::vector<std::vector<double>> theta_grid;
    std::vector<std::complex<double>> values;
    std::string method; // "exact" | "monte_carlo"
    std::vector<double> stderrs; // empty for exact
    std::size_t paths = 0;
};

struct ConvergenceReport {
    std::vector<std::int64_t> n_sequence;
    std::vector<double> sup_distance;
    double alpha = 0.0;
    bool monotone_flag = false;
    double final_distance = 0.0;
};

/// (cos(scale t_1) + ... + cos(scale t_d))/d
double cosine_average(const std::vector<double>& theta, double scale);

/// Default diagnostic grids: d=1 -> [-5,5] step 0.25, d=2 -> [-3,3]^2 step 0.5.
std::vector<std::vector<double>> default_theta_grid(int d);

/// E e^{i theta . X_t^(n)} in closed/quadrature form:
/// poisson clock: exp(-n t phi(1-c_n)), floor clock: (1-phi(1-c_n))^floor(nt).
/// The complement 1-c_n is computed from sin^2 halves so no precision is lost
/// at large n. Throws DomainError when the floor-clock base turns negative.
double chf_scaled_exact(const ScaledProcessSpec& spec, const std::vector<double>& theta);

/// exp(-t (2d)^{-alpha} |theta|^{2 alpha})
double chf_limit(const std::vector<double>& theta, double t, double alpha, int d);

ConvergenceReport convergence_report(const BernsteinFunction& phi, double alpha, int d,
                                     double t,
                                     const std::vector<std::vector<double>>& theta_grid,
                                     const std::vector<std::int64_t>& n_sequence,
                                     Clock clock);

struct McOptions {
    std::size_t chunk = 8192;
    unsigned threads = 0; // 0: hardware
};

/// Empirical chf of the scaled endpoint over `paths` simulated paths.
/// Deterministic given spec.seed regardless of thread count.
ChfEvaluation chf_monte_carlo(const ScaledProcessSpec& spec,
                              const std::vector<std::vector<double>>& theta_grid,
                              std::size_t paths, const McOptions& mc = {});

/// Empirical chf of already-simulated endpoints at the given lattice scale.
ChfEvaluation empirical_chf(const std::vector<std::vector<std::int64_t>>& endpoints,
                            double scale,
                            const std::vector<std::vector<double>>& theta_grid);

// ---------------------------------------------------------------------------
// tail bound diagnostics

struct TailBoundCell {
    double K = 0.0;
    std::int64_t n = 0;
    double lhs = 0.0;        // MC exceedance probability
    double rhs = 0.0;        // a (K^{-2-beta} phi^{-1}(1/n)/phi^{-1}(K^{-beta}/n) + K^{-beta})
    double ratio = 0.0;
    double lhs_bound95 = 0.0; // one-sided 95% bound when no exceedances seen
};

struct TailBoundReport {
    double a = 1.0;
    double beta = 1.0;
    std::vector<TailBoundCell> cells; // n-major order
    double max_ratio = 0.0;
    bool all_finite = true;
    bool monotone_growth = false; // max-over-K ratio strictly increasing in n
};

/// Monte-Carlo check that P(|sum_{k<=an} xi_k| > K/scale_n) stays within a
/// bounded multiple of the closed-form envelope. Requires an exact step-count
/// sampler; phi supplies phi^{-1} for the envelope.
TailBoundReport tail_bound_ratio(const BernsteinFunction& phi,
                                 const StepCountSampler& counts, double a,
                                 const std::vector<double>& K_grid, double beta,
                                 const std::vector<std::int64_t>& n_grid,
                                 std::size_t paths, std::uint64_t seed, int d = 1,
                                 const McOptions& mc = {});

// ---------------------------------------------------------------------------
// path sampling

struct PathTable {
    std::vector<double> times;
    std::vector<std::vector<double>> values; // one row per time, d columns
};

/// Piecewise-constant trajectory of X^(n) at the given times. The floor clock
/// consumes the xi stream sequentially, so a coarse grid is the restriction
/// of a finer one under the same seed.
PathTable sample_scaled_path(const ScaledProcessSpec& spec,
                             const std::vector<double>& time_grid, Rng rng);

} // namespace subwalk
